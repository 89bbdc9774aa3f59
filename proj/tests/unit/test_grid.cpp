#include <cmath>
#include <random>

#include "doctest.h"
#include "wildeuler/errors.hpp"
#include "wildeuler/grid.hpp"

using namespace wildeuler;

namespace {

// Exhaustive enumeration of (i, zeta) over a generous index box.
std::size_t brute_count(const GridSpec& g, double t0, double t1) {
  std::size_t n = 0;
  const int zmax = static_cast<int>(1.0 / g.h) + 3;
  const int imax = static_cast<int>(g.T / g.h) + 3;
  for (int i = -3; i <= imax; ++i) {
    for (int a = -3; a <= zmax; ++a) {
      for (int b = -3; b <= zmax; ++b) {
        const bool even = ((a + b) % 2 + 2) % 2 == 0;
        const double tl = even ? i * g.h : (i - 0.5) * g.h;
        const double th = tl + g.h;
        const double eps = 1e-12;
        const bool inside = tl >= t0 - eps && th <= t1 + eps && (a - 0.5) * g.h >= -eps &&
                            (a + 0.5) * g.h <= 1 + eps && (b - 0.5) * g.h >= -eps &&
                            (b + 0.5) * g.h <= 1 + eps;
        n += inside ? 1 : 0;
      }
    }
  }
  return n;
}

bool interiors_overlap(const Cell& a, const Cell& b) {
  if (std::min(a.t_hi, b.t_hi) - std::max(a.t_lo, b.t_lo) <= 1e-12) return false;
  for (Eigen::Index k = 0; k < a.x_lo.size(); ++k) {
    if (std::min(a.x_hi(k), b.x_hi(k)) - std::max(a.x_lo(k), b.x_lo(k)) <= 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("build grid") {
  const GridSpec g = GridSpec::unit(2, 0.05, 0.1, 1.0);
  const auto cells = build_grid(g);
  CHECK(cells.size() == brute_count(g, 0.1, 0.9));
  for (const Cell& c : cells) {
    CHECK(c.t_lo >= 0.1 - 1e-12);
    CHECK(c.t_hi <= 0.9 + 1e-12);
    CHECK(c.x_lo.minCoeff() >= -1e-12);
    CHECK(c.x_hi.maxCoeff() <= 1.0 + 1e-12);
    const int expect = ((c.zeta[0] + c.zeta[1]) % 2 + 2) % 2;
    CHECK(c.parity == expect);
    CHECK(c.t_hi - c.t_lo == doctest::Approx(0.05));
  }
  // Disjointness of equal-parity cells (a sample of pairs to keep it quick).
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  for (int k = 0; k < 20000; ++k) {
    const Cell& a = cells[pick(gen)];
    const Cell& b = cells[pick(gen)];
    if (&a == &b || a.parity != b.parity) continue;
    CHECK_FALSE(interiors_overlap(a, b));
  }
  CHECK_THROWS_AS(build_grid(GridSpec::unit(2, 0.6, 0.1, 1.0)), EmptyGrid);
  CHECK_THROWS_AS(build_grid(GridSpec::unit(2, 0.06, 0.1, 1.0)), InvalidArgument);
}

TEST_CASE("cell locator agrees with a linear search") {
  const GridSpec g = GridSpec::unit(2, 1.0 / 24, 0.1, 1.0);
  const auto cells = build_grid(g, 0.05, 0.95);
  const CellLocator loc(g, cells);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 3000; ++k) {
    const double t = u(gen);
    Eigen::VectorXd x(2);
    x << u(gen), u(gen);
    long found = -1;
    for (std::size_t n = 0; n < cells.size(); ++n) {
      const Cell& c = cells[n];
      if (t >= c.t_lo && t < c.t_hi && x(0) >= c.x_lo(0) && x(0) < c.x_hi(0) &&
          x(1) >= c.x_lo(1) && x(1) < c.x_hi(1)) {
        found = static_cast<long>(n);
      }
    }
    CHECK(loc.locate(t, x) == found);
    CHECK(loc.locate2(t, x(0), x(1)) == found);
  }
}

TEST_CASE("parity regions") {
  double prev_err = 1e9;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    const GridSpec g = GridSpec::unit(2, h, 0.3, 1.0);
    const auto r1 = omega_region(g, 1);
    const auto r2 = omega_region(g, 2);
    const double target = 9.0 / 32.0;
    const double err = std::abs(region_volume(r1) - target) / target;
    CHECK(err <= prev_err + 1e-12);
    prev_err = err;
    if (h == 1.0 / 32) {
      CHECK(err <= 0.15);
      CHECK(std::abs(region_volume(r2) - target) / target <= 0.15);
    }
    for (const Box& a : r1) {
      for (const Box& b : r2) {
        bool overlap = true;
        for (int k = 0; k < 2; ++k) {
          overlap = overlap && std::min(a.hi(k), b.hi(k)) > std::max(a.lo(k), b.lo(k));
        }
        CHECK_FALSE(overlap);
      }
    }
  }
}

TEST_CASE("plateau covers a parity region at every time") {
  const double h = 1.0 / 16;
  const GridSpec g = GridSpec::unit(2, h, 0.2, 1.0);
  const auto cells = build_grid(g, 0.05, 0.95);
  const CellLocator loc(g, cells);
  const auto r1 = omega_region(g, 1);
  const auto r2 = omega_region(g, 2);
  for (int k = 0; k <= 400; ++k) {
    const double t = 0.2 + 0.6 * k / 400.0;
    const int s = plateau_region_at(t, h);
    const auto& region = s == 1 ? r1 : r2;
    bool all = true;
    for (const Box& b : region) {
      // corners and centre of the shrunken cube
      for (double fx : {0.0, 0.5, 1.0}) {
        for (double fy : {0.0, 0.5, 1.0}) {
          Eigen::VectorXd x(2);
          x << b.lo(0) + fx * (b.hi(0) - b.lo(0)), b.lo(1) + fy * (b.hi(1) - b.lo(1));
          const long c = loc.locate(t, x);
          if (c < 0) {
            all = false;
            continue;
          }
          Eigen::VectorXd y(3);
          y << x(0), x(1), t;
          all = all && cells[static_cast<std::size_t>(c)].cutoff(h).value(y) == 1.0;
        }
      }
    }
    CHECK(all);
  }
}

TEST_CASE("cutoff partition property") {
  const double h = 1.0 / 8;
  const GridSpec g = GridSpec::unit(2, h, 0.3, 1.0);
  const auto cells = build_grid(g, 0.1, 0.9);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd y(3);
    y << u(gen), u(gen), 0.1 + 0.8 * u(gen);
    int even = 0, odd = 0;
    double total = 0.0;
    for (const Cell& c : cells) {
      const double v = c.cutoff(h).value(y);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      if (v > 0.0) (c.parity == 0 ? even : odd) += 1;
      total += v;
    }
    CHECK(even <= 1);
    CHECK(odd <= 1);
    CHECK(total <= 2.0);
  }
}

TEST_CASE("step function E^h") {
  const PressureLaw law(2.0);
  const GridSpec g = GridSpec::unit(2, 0.05, 0.1, 1.0);
  const auto cells = build_grid(g);
  auto constant = [](double, const Eigen::VectorXd&) { return EulerState::zero(2, 1.0, 2.0); };
  for (double e : step_function_Eh(constant, law, cells)) CHECK(e == doctest::Approx(-1.0));
  auto kvalued = [&](double t, const Eigen::VectorXd& x) {
    Eigen::VectorXd m(2);
    m << std::sin(6 * x(0)), t * x(1);
    return k_point(1.0 + 0.5 * x(0), m, law);
  };
  for (double e : step_function_Eh(kvalued, law, cells)) CHECK(std::abs(e) <= 1e-14);
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "test_helpers.hpp"
#include "wildeuler/convex_geometry.hpp"
#include "wildeuler/errors.hpp"

using namespace wildeuler;
using testutil::random_vector;

namespace {

Eigen::VectorXd unit2(double t) {
  Eigen::VectorXd v(2);
  v << std::cos(t), std::sin(t);
  return v;
}

// Random convex combination of k sphere directions; the generator is the oracle.
ConvexDecomposition random_combination(std::mt19937_64& gen, const SliceParams& p, int k) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  ConvexDecomposition dec;
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    dec.weights.push_back(u(gen));
    s += dec.weights.back();
    dec.directions.push_back(p.r * random_vector(gen, p.d).normalized());
  }
  for (double& w : dec.weights) {
    w /= s;
  }
  return dec;
}

void check_valid(const ConvexDecomposition& dec, const SliceParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < dec.size(); ++i) {
    CHECK(dec.weights[i] > 0.0);
    CHECK(dec.weights[i] <= 1.0 + 1e-12);
    CHECK(std::abs(dec.directions[i].norm() - p.r) <= 1e-10 * p.r);
    s += dec.weights[i];
  }
  CHECK(std::abs(s - 1.0) <= 1e-10);
  CHECK(static_cast<int>(dec.size()) <= slice_dimension(p.d) + 1);
}

}  // namespace

TEST_CASE("slice dimension") {
  CHECK(slice_dimension(2) == 4);
  CHECK(slice_dimension(3) == 8);
}

TEST_CASE("decompose the centre of the slice") {
  const SliceParams p{1.0, 1.0, 2};
  const ConvexDecomposition dec =
      caratheodory_decompose(p, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2));
  check_valid(dec, p);
  CHECK(dec.residual(p, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)) <= 2e-10);

  // The symmetric four-point combination itself reconstructs the centre.
  ConvexDecomposition four;
  for (int k = 0; k < 4; ++k) {
    four.weights.push_back(0.25);
    four.directions.push_back(unit2(k * M_PI / 2));
  }
  CHECK(four.residual(p, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)) < 1e-15);
}

TEST_CASE("extreme points decompose to a single point") {
  const SliceParams p{1.5, 2.0, 2};
  const Eigen::VectorXd m = 2.0 * unit2(0.7);
  const ConvexDecomposition dec = caratheodory_decompose(p, m, circ_product(m) / p.rho);
  REQUIRE(dec.size() == 1);
  CHECK(dec.weights[0] == 1.0);
  CHECK((dec.directions[0] - m).norm() < 1e-12);
}

TEST_CASE("points outside the slice hull are rejected") {
  const SliceParams p{1.0, 1.0, 2};
  Eigen::VectorXd m(2);
  m << 0.9, 0.0;
  CHECK_THROWS_AS(caratheodory_decompose(p, m, Eigen::MatrixXd::Zero(2, 2)),
                  InfeasibleDecomposition);
  CHECK_THROWS_AS(caratheodory_decompose(SliceParams{-1.0, 1.0, 2}, m, Eigen::MatrixXd::Zero(2, 2)),
                  InvalidArgument);
}

TEST_CASE("decomposition round trip") {
  for (int d : {2, 3}) {
    std::mt19937_64 gen(100 + d);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    const int trials = d == 2 ? 100 : 25;
    for (int t = 0; t < trials; ++t) {
      const SliceParams p{u(gen), u(gen), d};
      const ConvexDecomposition gen_dec = random_combination(gen, p, 6);
      const Eigen::VectorXd m = gen_dec.reconstruct_m();
      const Eigen::MatrixXd M = gen_dec.reconstruct_M(p.rho);
      if (e_kin(p.rho, m, M) > 0.999 * p.r * p.r / (2 * p.rho)) {
        continue;
      }
      const ConvexDecomposition dec = caratheodory_decompose(p, m, M);
      check_valid(dec, p);
      CHECK((dec.reconstruct_m() - m).norm() <= 1e-8);
      CHECK((dec.reconstruct_M(p.rho) - M).norm() <= 1e-8);
    }
  }
}

TEST_CASE("caratheodory reduce") {
  std::mt19937_64 gen(5);
  const SliceParams p{1.2, 1.0, 2};
  const ConvexDecomposition big = random_combination(gen, p, 12);
  const ConvexDecomposition small = caratheodory_reduce(big, p);
  check_valid(small, p);
  CHECK(small.size() <= 5);
  CHECK((small.reconstruct_m() - big.reconstruct_m()).norm() <= 1e-9);
  CHECK((small.reconstruct_M(p.rho) - big.reconstruct_M(p.rho)).norm() <= 1e-9);

  const ConvexDecomposition again = caratheodory_reduce(small, p);
  CHECK(again.size() == small.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again.weights[i] == small.weights[i]);
  }

  ConvexDecomposition with_zero = small;
  with_zero.weights.push_back(0.0);
  with_zero.directions.push_back(unit2(0.3));
  CHECK(caratheodory_reduce(with_zero, p).size() == small.size());
}

TEST_CASE("antipodal perturbation") {
  const SliceParams p{1.0, 1.0, 2};
  ConvexDecomposition four;
  for (int k = 0; k < 4; ++k) {
    four.weights.push_back(0.25);
    four.directions.push_back(unit2(k * M_PI / 2));
  }
  const ConvexDecomposition out = perturb_antipodal(four, p, 1e-3, 42);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      CHECK((out.directions[i] + out.directions[j]).norm() >= 1e-3);
    }
  }
  CHECK(out.residual(p, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)) <= 1e-2);
  const ConvexDecomposition again = perturb_antipodal(four, p, 1e-3, 42);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.directions[i] == again.directions[i]);
  }

  ConvexDecomposition clean;
  clean.weights = {0.5, 0.5};
  clean.directions = {unit2(0.0), unit2(1.0)};
  const ConvexDecomposition same = perturb_antipodal(clean, p, 1e-3, 1);
  CHECK(same.directions[0] == clean.directions[0]);
  CHECK(same.directions[1] == clean.directions[1]);

  ConvexDecomposition single;
  single.weights = {1.0};
  single.directions = {unit2(0.4)};
  CHECK(perturb_antipodal(single, p, 1e-3, 1).size() == 1);
}

TEST_CASE("segment bound example") {
  // rho = 1, Q = 2, m = 0 at r = sqrt(d rho Q) = 2: (r^2 - |m|^2)/(4 r N) = 4/48.
  const PressureLaw law(2.0);
  const EulerState z = EulerState::zero(2, 1.0, 2.0);
  CHECK(slice_radius(z, law, RadiusRule::Grid) == doctest::Approx(2.0));
  OscillationSegment s;
  s.center = z;
  s.r = 2.0;
  CHECK(s.amplitude_floor() == doctest::Approx(1.0 / 12.0).epsilon(1e-15));

  const OscillationSegment seg = build_segment(z, law);
  CHECK(seg.r == doctest::Approx(std::sqrt(2.0)));
  CHECK(seg.amplitude_m.norm() >= seg.amplitude_floor());
  CHECK(hull_functional(seg.endpoint(1.0), law) < 0.0);
  CHECK(hull_functional(seg.endpoint(-1.0), law) < 0.0);
  // Parallel to (a - b, (a (x) a - b (x) b) / rho).
  const Eigen::VectorXd& a = seg.endpoint_a;
  const Eigen::VectorXd& b = seg.endpoint_b;
  CHECK(std::abs(a.norm() - seg.r) < 1e-10);
  CHECK(std::abs(b.norm() - seg.r) < 1e-10);
  CHECK((a + b).norm() > 1e-6);
  const double c = 0.5 * seg.lambda_j;
  CHECK((seg.amplitude_m - c * (a - b)).norm() < 1e-14);
  CHECK((seg.amplitude_M - c * (a * a.transpose() - b * b.transpose()) / z.rho).norm() < 1e-12);
}

TEST_CASE("random strict subsolution points yield admissible segments") {
  const PressureLaw law(1.4);
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int built = 0;
  for (int t = 0; t < 200; ++t) {
    const double rho = 0.5 + 1.5 * u(gen);
    const Eigen::VectorXd m = random_vector(gen, 2, 0.7);
    const Eigen::MatrixXd M = testutil::random_trace_free(gen, 2, 0.3);
    EulerState z;
    z.rho = rho;
    z.m = m;
    z.M = M;
    // Q strictly above the hull boundary by a random margin.
    z.Q = law.pressure(rho) + e_kin(rho, m, M) + 0.05 + u(gen);
    REQUIRE(hull_functional(z, law) < 0.0);
    SegmentOptions opt;
    opt.seed = static_cast<std::uint64_t>(t);
    const OscillationSegment seg = build_segment(z, law, opt);
    CHECK(seg.amplitude_m.norm() >= seg.amplitude_floor());
    CHECK(hull_functional(seg.endpoint(1.0), law) < 0.0);
    CHECK(hull_functional(seg.endpoint(-1.0), law) < 0.0);
    CHECK(seg.amplitude_M.trace() == doctest::Approx(0.0).scale(1.0));
    ++built;
  }
  CHECK(built == 200);
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "wildeuler/errors.hpp"
#include "wildeuler/toy_model.hpp"

using namespace wildeuler;

TEST_CASE("zero pair has I = -1") {
  CHECK(I_toy(ToyPair()) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("first perturbation of zero gives -7/8") {
  // u = sin(2 pi n x) / 2: int u^2 - 1 = 1/8 - 1.
  const ToyPair p = perturb_toy(ToyPair(), 8);
  CHECK(I_toy(p) == doctest::Approx(-0.875).epsilon(1e-12));
  CHECK(p.u(0.03125) == doctest::Approx(0.5));
  CHECK(p.v(0.3) == 0.0);
}

TEST_CASE("perturbation of a constant pair matches the closed form") {
  // u = a + s(x)/2 (1 - (a+b)^2), int (|u| + b)^2 with |u| = u when a > c/2.
  const double a = 0.6, b = 0.1;
  const double c = 1 - (a + b) * (a + b);
  CHECK(a > 0.5 * c - 1e-9);
  const ToyPair p = perturb_toy(ToyPair(a, b), 16);
  const double expected = (a + b) * (a + b) + c * c / 8.0 - 1.0;
  CHECK(I_toy(p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("random strict pairs gain at least I^2 / 16 up to quadrature error") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ToyQuadrature q;
  q.min_points = 1 << 14;
  for (int k = 0; k < 50; ++k) {
    double a = u(gen), b = u(gen);
    const double s = std::abs(a) + std::abs(b);
    if (s >= 0.98) {
      a *= 0.98 / s;
      b *= 0.98 / s;
    }
    const double wa = 0.2 * u(gen), wb = 0.2 * u(gen);
    const double scale = 0.9 / (std::abs(a) + std::abs(b) + std::abs(wa) + std::abs(wb));
    const double s0 = std::min(1.0, scale);
    ToyPair base([=](double x) { return s0 * (a + wa * std::sin(2 * M_PI * x)); },
                 [=](double x) { return s0 * (b + wb * std::cos(2 * M_PI * 3 * x)); });
    const double before = I_toy(base, q);
    const ToyPair next = perturb_toy(base, 128, q);
    const double after = I_toy(next, q);
    CHECK(after - before >= before * before / 16.0 - 0.01);
    CHECK(next.v(0.123) == base.v(0.123));
  }
}

TEST_CASE("jensen bound holds for one step") {
  const ToyPair base([](double x) { return 0.3 * std::sin(2 * M_PI * x); },
                     [](double) { return 0.2; });
  const ToyPass before = toy_pass(base);
  const double after = I_toy(perturb_toy(base, 64));
  CHECK(after - before.I >= before.jensen - 1e-4);
  CHECK(before.jensen >= before.I * before.I / 8.0 - 1e-12);
}

TEST_CASE("non-strict pairs are rejected") {
  CHECK_THROWS_AS(perturb_toy(ToyPair(0.6, 0.4), 8), NotStrict);
}

TEST_CASE("iteration increases I monotonically and records the schedule") {
  ToyQuadrature q;
  q.min_points = 1 << 14;
  const ToyTrace tr = iterate_toy(ToyPair(), doubling_schedule(8, 5), 0.0, q);
  REQUIRE(tr.steps.size() == 5);
  CHECK(tr.steps[0].I_after == doctest::Approx(-0.875).epsilon(1e-12));
  for (const auto& s : tr.steps) {
    CHECK(s.gain > 0.0);
    CHECK(s.max_sum < 1.0);
  }
  CHECK(tr.final_pair.frequencies() == std::vector<long>{8, 16, 32, 64, 128});
}

TEST_CASE("quadrature grows with the frequency") {
  ToyQuadrature q;
  CHECK(q.points(8) == q.min_points);
  CHECK(q.points(1L << 20) == 8L << 20);
}

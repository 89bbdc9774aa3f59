#include <cmath>

#include "doctest.h"
#include "wildeuler/errors.hpp"
#include "wildeuler/fields.hpp"
#include "wildeuler/functionals.hpp"

using namespace wildeuler;

namespace {

EulerState state(double rho, double m1, double m2, double M11, double M12, double Q) {
  EulerState z;
  z.rho = rho;
  z.m = Eigen::Vector2d(m1, m2);
  z.M = Eigen::MatrixXd(2, 2);
  z.M << M11, M12, M12, -M11;
  z.Q = Q;
  return z;
}

FieldEnsemble constant(const EulerState& z) { return FieldEnsemble(BaseFields::constant(z)); }

QuadratureSpec quick() {
  QuadratureSpec q;
  q.time_samples = 8;
  q.per_unit = 32;
  q.outer_time_samples = 2;
  return q;
}

}  // namespace

TEST_CASE("constant subsolution has I = p - Q and deficit over the slab") {
  const PressureLaw law(2.0);
  const auto dom = FunctionalDomain::unit(2, 0.1, 1.0);
  const FunctionalReport r = evaluate_functionals(constant(state(1, 0, 0, 0, 0, 2)), law, dom, quick());
  CHECK(r.I == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.deficit == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.margin_hull == doctest::Approx(1.0).epsilon(1e-12));
  const SubsolutionReport s = subsolution_report(r, 1e-3);
  CHECK(s.verdict);
}

TEST_CASE("K-valued constant state has vanishing functional") {
  const PressureLaw law(2.0);
  const auto dom = FunctionalDomain::unit(2, 0.1, 1.0);
  const FunctionalReport r =
      evaluate_functionals(constant(state(1, 1, 0, 0.5, 0, 1.5)), law, dom, quick());
  CHECK(std::abs(r.I) < 1e-12);
  CHECK(std::abs(r.deficit) < 1e-12);
  CHECK_FALSE(subsolution_report(r, 1e-3).verdict);
}

TEST_CASE("integrand is convex in the momentum") {
  const PressureLaw law(2.0);
  const auto dom = FunctionalDomain::unit(2, 0.1, 1.0);
  const double a = I_functional(constant(state(1, 0.3, -0.2, 0, 0, 2)), law, dom, quick());
  const double b = I_functional(constant(state(1, -0.5, 0.4, 0, 0, 2)), law, dom, quick());
  const double mid = I_functional(constant(state(1, -0.1, 0.1, 0, 0, 2)), law, dom, quick());
  CHECK(mid <= 0.5 * (a + b) + 1e-14);
}

TEST_CASE("I is the infimum over time of the spatial integral") {
  const PressureLaw law(2.0);
  const auto dom = FunctionalDomain::unit(2, 0.1, 1.0);
  FieldEnsemble f(BaseFields::function(2, [](double t, const Eigen::VectorXd&) {
    return state(1, 0, 0, 0, 0, 2 + std::sin(6.0 * t));
  }));
  QuadratureSpec q = quick();
  q.time_samples = 64;
  const FunctionalReport r = evaluate_functionals(f, law, dom, q);
  double lo = 1e9;
  for (std::size_t k = 0; k < r.times.size(); ++k) lo = std::min(lo, r.integrals[k]);
  CHECK(r.I == lo);
  CHECK(r.I == doctest::Approx(1 - (2 + std::sin(6.0 * r.t_min))));
  CHECK(r.t_min > 0.2);
  CHECK(r.t_min < 0.32);
}

TEST_CASE("density floor is enforced") {
  const PressureLaw law(2.0);
  const auto dom = FunctionalDomain::unit(2, 0.1, 1.0);
  CHECK_THROWS_AS(evaluate_functionals(constant(state(1e-8, 0, 0, 0, 0, 2)), law, dom, quick()),
                  InvalidArgument);
}

TEST_CASE("explicit quadrature below eight points per wavelength is rejected") {
  QuadratureSpec q;
  q.per_unit = 100;
  CHECK_THROWS_AS(q.resolved_per_unit(16), QuadratureUnderresolved);
  q.per_unit = 0;
  CHECK(q.resolved_per_unit(16) >= 128);
}

TEST_CASE("results do not depend on the thread count") {
  const PressureLaw law(2.0);
  const auto dom = FunctionalDomain::unit(2, 0.1, 1.0);
  FieldEnsemble f(BaseFields::function(2, [](double t, const Eigen::VectorXd& x) {
    return state(1, 0.2 * std::sin(7 * x(0) + t), 0.1 * std::cos(5 * x(1)), 0, 0, 2);
  }));
  QuadratureSpec q = quick();
  const FunctionalReport a = evaluate_functionals(f, law, dom, q);
  q.threads = 3;
  const FunctionalReport b = evaluate_functionals(f, law, dom, q);
  CHECK(a.I == b.I);
  CHECK(a.deficit == b.deficit);
  CHECK(a.margin_hull == b.margin_hull);
}

TEST_CASE("weak residual of a constant state vanishes") {
  const WeakResidualReport r = weak_residual(constant(state(1, 0.3, 0.1, 0.2, -0.1, 2)),
                                             test_battery(), 64);
  CHECK(r.pass);
  CHECK(r.max_fine <= 1e-10);
  CHECK(r.rows.size() == test_battery().size());
}

TEST_CASE("weak residual flags a compressive momentum field") {
  auto broken = [](double, double x1, double) {
    State2 s;
    s.rho = 1.0;
    s.m1 = std::sin(2 * M_PI * 2 * x1);
    s.Q = 2.0;
    return s;
  };
  const WeakResidualReport r = weak_residual(broken, 2, test_battery(), 64);
  CHECK_FALSE(r.pass);
  CHECK(r.max_fine > 1e-4);
}

TEST_CASE("test function gradients match finite differences") {
  for (const TestFunction& f : test_battery()) {
    const double t = f.center[0] + 0.3 * f.width[0];
    const double x1 = f.center[1] - 0.2 * f.width[1];
    const double x2 = f.center[2] + 0.1 * f.width[2];
    const auto g = f.gradient(t, x1, x2);
    const double e = 1e-6;
    CHECK(g[0] == doctest::Approx((f.value(t + e, x1, x2) - f.value(t - e, x1, x2)) / (2 * e)).epsilon(1e-5));
    CHECK(g[1] == doctest::Approx((f.value(t, x1 + e, x2) - f.value(t, x1 - e, x2)) / (2 * e)).epsilon(1e-5));
    CHECK(g[2] == doctest::Approx((f.value(t, x1, x2 + e) - f.value(t, x1, x2 - e)) / (2 * e)).epsilon(1e-5));
  }
}

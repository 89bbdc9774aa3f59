#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "wildeuler/convex_geometry.hpp"
#include "wildeuler/errors.hpp"
#include "wildeuler/fields.hpp"
#include "wildeuler/grid.hpp"
#include "wildeuler/waves.hpp"

using namespace wildeuler;

namespace {

EulerState base_state() {
  EulerState z;
  z.rho = 1.0;
  z.m = Eigen::VectorXd::Zero(2);
  z.M = Eigen::MatrixXd::Zero(2, 2);
  z.Q = 2.0;
  return z;
}

struct OneWave {
  GridSpec gs;
  std::vector<Cell> cells;
  long target = 0;
  std::shared_ptr<const WaveLayer> layer;
};

OneWave one_wave(int j) {
  OneWave w;
  w.gs = GridSpec::unit(2, 0.125, 0.25, 1.0);
  w.cells = build_grid(w.gs);
  w.target = static_cast<long>(w.cells.size() / 2);
  const PressureLaw law(2.0);
  const OscillationSegment seg = build_segment(base_state(), law);
  auto profile = std::make_shared<const OscillationProfile>(1.0 / 32.0);
  const Cell& c = w.cells[static_cast<std::size_t>(w.target)];
  std::vector<LocalizedWave> waves{localize(seg, find_direction(seg), j, c.cutoff(w.gs.h), profile)};
  std::vector<long> of(w.cells.size(), -1);
  of[static_cast<std::size_t>(w.target)] = 0;
  w.layer = std::make_shared<const WaveLayer>(w.gs, w.cells, std::move(waves), of);
  return w;
}

}  // namespace

TEST_CASE("constant base evaluates to itself") {
  const FieldEnsemble f(BaseFields::constant(base_state()));
  const State2 s = f.evaluate2(0.3, 0.2, 0.9);
  CHECK(s.rho == 1.0);
  CHECK(s.Q == 2.0);
  CHECK(s.m1 == 0.0);
  CHECK(f.wave_count() == 0);
  CHECK(f.max_frequency() == 0);
}

TEST_CASE("fast layer path matches the generic wave evaluator") {
  const OneWave w = one_wave(16);
  const FieldEnsemble f = FieldEnsemble(BaseFields::constant(base_state())).with_layer(w.layer);
  CHECK(f.wave_count() == 1);
  CHECK(f.max_frequency() == 16);
  const Cell& c = w.cells[static_cast<std::size_t>(w.target)];
  const LocalizedWave& wave = w.layer->waves().front();
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 2000; ++n) {
    const double t = c.t_lo + u(gen) * (c.t_hi - c.t_lo);
    const double x1 = c.x_lo(0) + u(gen) * (c.x_hi(0) - c.x_lo(0));
    const double x2 = c.x_lo(1) + u(gen) * (c.x_hi(1) - c.x_lo(1));
    Eigen::VectorXd y(3);
    y << x1, x2, t;
    Eigen::VectorXd m;
    Eigen::MatrixXd M;
    LocalizedWave::split(wave.field(y), m, M);
    const State2 s = f.evaluate2(t, x1, x2);
    worst = std::max({worst, std::abs(s.m1 - m(0)), std::abs(s.m2 - m(1)),
                      std::abs(s.M11 - M(0, 0)), std::abs(s.M12 - M(0, 1))});
    CHECK(s.rho == 1.0);
    CHECK(s.Q == 2.0);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("layer is zero outside its cell and equals the plane wave on the plateau") {
  const OneWave w = one_wave(32);
  const FieldEnsemble f = FieldEnsemble(BaseFields::constant(base_state())).with_layer(w.layer);
  const Cell& c = w.cells[static_cast<std::size_t>(w.target)];
  const State2 far = f.evaluate2(c.t_center(), c.x_center()(0) + 0.3, c.x_center()(1));
  CHECK(far.m1 == 0.0);
  CHECK(far.M11 == 0.0);
  const LocalizedWave& wave = w.layer->waves().front();
  Eigen::VectorXd y(3);
  y << c.x_center()(0) + 0.01, c.x_center()(1) - 0.02, c.t_center() + 0.015;
  Eigen::VectorXd m;
  Eigen::MatrixXd M;
  LocalizedWave::split(wave.plane_wave(y), m, M);
  const State2 s = f.evaluate2(y(2), y(0), y(1));
  CHECK(s.m1 == doctest::Approx(m(0)).epsilon(1e-12));
  CHECK(s.m2 == doctest::Approx(m(1)).epsilon(1e-12));
}

TEST_CASE("evaluate and evaluate2 agree") {
  const OneWave w = one_wave(16);
  const FieldEnsemble f = FieldEnsemble(BaseFields::constant(base_state())).with_layer(w.layer);
  const Cell& c = w.cells[static_cast<std::size_t>(w.target)];
  Eigen::VectorXd x = c.x_center();
  x(0) += 0.02;
  const EulerState z = f.evaluate(c.t_center() + 0.03, x);
  const State2 s = f.evaluate2(c.t_center() + 0.03, x(0), x(1));
  CHECK(z.m(0) == doctest::Approx(s.m1));
  CHECK(z.M(0, 1) == doctest::Approx(s.M12));
  CHECK(z.M.trace() == doctest::Approx(0.0));
  CHECK(f.evaluate2_layers(c.t_center() + 0.03, x(0), x(1), 0).m1 == 0.0);
}

TEST_CASE("function base is evaluated pointwise") {
  const BaseFields b = BaseFields::function(2, [](double t, const Eigen::VectorXd& x) {
    EulerState z = base_state();
    z.rho = 1.0 + 0.1 * t + 0.05 * x(0);
    return z;
  });
  CHECK_FALSE(b.is_constant());
  CHECK(b.evaluate2(0.5, 0.2, 0.0).rho == doctest::Approx(1.06));
}

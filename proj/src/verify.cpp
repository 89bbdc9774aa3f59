#include "wildeuler/verify.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "wildeuler/convex_geometry.hpp"
#include "wildeuler/errors.hpp"
#include "wildeuler/grid.hpp"
#include "wildeuler/toy_model.hpp"
#include "wildeuler/waves.hpp"

namespace wildeuler {

using nlohmann::json;

namespace {

EulerState random_state(std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  EulerState z;
  z.rho = u(gen);
  z.m = Eigen::VectorXd(2);
  z.m << scale * n(gen), scale * n(gen);
  const double a = scale * n(gen), b = scale * n(gen);
  z.M = Eigen::MatrixXd(2, 2);
  z.M << a, b, b, -a;
  z.Q = 0.0;
  return z;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SuiteResult suite_ekin(const RunConfig& cfg) {
  std::mt19937_64 gen(cfg.scenario.seed + 1);
  double worst_convex = -1e300, worst_lower = -1e300, worst_equal = 0.0, worst_sup = 0.0;
  for (int k = 0; k < cfg.verify.samples; ++k) {
    EulerState a = random_state(gen, 1.0);
    EulerState b = random_state(gen, 1.0);
    EulerState mid = a;
    mid.rho = 0.5 * (a.rho + b.rho);
    mid.m = 0.5 * (a.m + b.m);
    mid.M = 0.5 * (a.M + b.M);
    const double scale = 1.0 + e_kin(a) + e_kin(b);
    worst_convex = std::max(worst_convex, (e_kin(mid) - 0.5 * (e_kin(a) + e_kin(b))) / scale);
    worst_lower = std::max(worst_lower, (a.m.squaredNorm() / (2 * a.rho) - e_kin(a)) / scale);
    Eigen::MatrixXd MK = circ_product(a.m) / a.rho;
    const double ek = e_kin(a.rho, a.m, MK);
    worst_equal = std::max(worst_equal, std::abs(ek - a.m.squaredNorm() / (2 * a.rho)) / scale);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(MK);
    const double sup = es.eigenvalues().cwiseAbs().maxCoeff();
    worst_sup = std::max(worst_sup, (sup - ek) / scale);  // 2 (d-1)/d = 1 for d = 2
  }
  const double tol = 1e-9;
  return {"ekin_properties",
          worst_convex <= tol && worst_lower <= tol && worst_equal <= tol && worst_sup <= tol,
          {{"samples", cfg.verify.samples},
           {"max_convexity_violation", worst_convex},
           {"max_lower_bound_violation", worst_lower},
           {"max_equality_defect_on_K", worst_equal},
           {"max_sup_bound_violation_on_K", worst_sup},
           {"tolerance", tol}}};
}

SuiteResult suite_hull(const RunConfig& cfg, std::vector<OscillationSegment>& segments) {
  std::mt19937_64 gen(cfg.scenario.seed + 2);
  std::uniform_real_distribution<double> margin(0.05, 1.0);
  const PressureLaw law(cfg.scenario.gamma);
  int ok = 0, total = 200, bound_ok = 0;
  double worst_ratio = 1e300;
  for (int k = 0; k < total; ++k) {
    EulerState z = random_state(gen, 0.5);
    z.Q = law.pressure(z.rho) + e_kin(z) + margin(gen);
    try {
      SegmentOptions so;
      so.seed = cfg.scenario.seed + static_cast<std::uint64_t>(k);
      const OscillationSegment seg = build_segment(z, law, so);
      EulerState inc = EulerState::zero(2, 0.0, 0.0);
      inc.m = seg.amplitude_m;
      inc.M = seg.amplitude_M;
      const bool cone = wave_cone_test(inc);
      const bool ends = hull_functional(seg.endpoint(1.0), law) < 0.0 &&
                        hull_functional(seg.endpoint(-1.0), law) < 0.0;
      if (cone && ends) ++ok;
      const double amp = seg.amplitude_m.norm();
      const double floor = seg.amplitude_floor();
      if (amp >= floor - 1e-9) ++bound_ok;
      worst_ratio = std::min(worst_ratio, amp / floor);
      segments.push_back(seg);
    } catch (const Error&) {
    }
  }
  return {"hull_and_segments",
          ok == total && bound_ok == total,
          {{"states", total},
           {"constructive_successes", ok},
           {"amplitude_bound_ok", bound_ok},
           {"min_amplitude_over_floor", worst_ratio}}};
}

SuiteResult suite_localization(const RunConfig& cfg, const std::vector<OscillationSegment>& segs) {
  if (segs.empty()) return {"localization_slope", false, {{"error", "no segment"}}};
  const OscillationSegment& seg = segs.front();
  const WaveDirection xi = find_direction(seg);
  auto profile = std::make_shared<const OscillationProfile>(1.0 / 32);
  Eigen::VectorXd c(3);
  c << 0.5, 0.5, 0.5;
  const SpacetimeCutoff cut{c, 1.0};
  std::mt19937_64 gen(cfg.scenario.seed + 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::VectorXd> pts;
  for (int k = 0; k < 10000; ++k) {
    Eigen::VectorXd y(3);
    y << u(gen), u(gen), u(gen);
    pts.push_back(y);
  }
  std::vector<double> lj, le;
  json rows = json::array();
  for (int j : cfg.verify.localization_frequencies) {
    const LocalizedWave w = localize(seg, xi, j, cut, profile);
    double err = 0.0;
    for (const auto& y : pts) {
      err = std::max(err, (w.field(y) - w.plane_wave(y)).cwiseAbs().maxCoeff());
    }
    lj.push_back(std::log(j));
    le.push_back(std::log(err));
    rows.push_back({{"j", j}, {"sup_error", err}});
  }
  const double slope = fit_slope(lj, le);
  return {"localization_slope",
          std::abs(slope + 1.0) <= 0.15,
          {{"slope", slope}, {"target", -1.0}, {"tolerance", 0.15}, {"rows", rows}}};
}

SuiteResult suite_young(const RunConfig& cfg) {
  const OscillationProfile profile(1.0 / 32);
  Eigen::VectorXd s(3);
  s << 0.6, 0.8, 0.3;
  const WaveDirection xi{s.normalized()};
  YoungMeasureOptions opt;
  opt.box_lo = Eigen::VectorXd::Zero(2);
  opt.box_hi = Eigen::VectorXd::Ones(2);
  auto phi = [](const Eigen::VectorXd& x) {
    return (x(0) > 0.3 && x(0) < 0.6 && x(1) > 0.2 && x(1) < 0.7) ? 1.0 : 0.0;
  };
  const std::vector<std::pair<std::string, std::function<double(double)>>> battery = {
      {"identity", [](double v) { return v; }},
      {"square", [](double v) { return v * v; }},
      {"cube", [](double v) { return v * v * v; }},
      {"abs", [](double v) { return std::abs(v); }},
  };
  bool pass = true;
  json rows = json::array();
  for (const auto& [name, f] : battery) {
    const auto res = young_measure_check(profile, xi, f, phi, cfg.verify.young_frequencies, opt);
    json devs = json::array();
    for (const auto& r : res) devs.push_back({{"n", r.frequency}, {"deviation", r.deviation}});
    const bool small = res.back().deviation < 0.1;
    const bool decreasing = res.back().deviation <= res.front().deviation;
    pass = pass && small && decreasing;
    rows.push_back({{"f", name}, {"deviations", devs}, {"last_below_0.1", small},
                    {"decreasing", decreasing}});
  }
  return {"young_measure", pass, {{"rows", rows}}};
}

SuiteResult suite_regions(const RunConfig& cfg) {
  GridSpec spec = GridSpec::unit(2, cfg.verify.region_h, 4.0 * cfg.verify.region_h, 1.0);
  const double target = 9.0 / 32.0 * spec.omega_volume();
  const double v1 = region_volume(omega_region(spec, 1));
  const double v2 = region_volume(omega_region(spec, 2));
  const double rel = std::max(std::abs(v1 - target), std::abs(v2 - target)) / target;
  // plateau coverage at sampled times
  std::mt19937_64 gen(cfg.scenario.seed + 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool covered = true;
  for (int k = 0; k < 200; ++k) {
    const double t = u(gen);
    const double f = t / spec.h - std::floor(t / spec.h);
    const bool even_plateau = f >= 0.125 && f <= 0.875;
    const bool odd_plateau = !(f > 0.375 && f < 0.625);
    covered = covered && (even_plateau || odd_plateau) &&
              (plateau_region_at(t, spec.h) == 1 ? even_plateau : odd_plateau);
  }
  return {"grid_regions",
          rel <= 0.15 && covered,
          {{"h", spec.h},
           {"volume_even", v1},
           {"volume_odd", v2},
           {"limit", target},
           {"max_relative_deviation", rel},
           {"plateau_coverage", covered}}};
}

SuiteResult suite_toy(const RunConfig&) {
  ToyPair p;
  const double I0 = I_toy(p);
  const double I1 = I_toy(p.with_term(64));
  const bool ok = std::abs(I0 + 1.0) <= 1e-12 && std::abs(I1 + 0.875) <= 1e-6;
  return {"toy_first_step",
          ok,
          {{"I_initial", I0}, {"I_after", I1}, {"gain", I1 - I0}, {"floor", 1.0 / 16.0}}};
}

SuiteResult suite_functionals(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  const PressureLaw law = sc.law();
  FieldEnsemble f(sc.base());
  QuadratureSpec q;
  q.time_samples = 8;
  q.min_per_unit = 32;
  const FunctionalReport rep = evaluate_functionals(f, law, sc.domain(), q);
  const SubsolutionReport sub = subsolution_report(rep, sc.delta);
  const WeakResidualReport res = weak_residual(f, test_battery());
  const bool ok = rep.I <= 1e-9 && sub.verdict && res.max_fine <= 1e-10;
  return {"functionals_base",
          ok,
          {{"I", rep.I},
           {"deficit", rep.deficit},
           {"margin_hull", sub.margin_hull},
           {"verdict", sub.verdict},
           {"residual_max", res.max_fine},
           {"battery", test_battery_version()}}};
}

}  // namespace

std::vector<SuiteResult> run_verify_suites(const RunConfig& cfg) {
  std::vector<SuiteResult> out;
  std::vector<OscillationSegment> segs;
  out.push_back(suite_ekin(cfg));
  out.push_back(suite_hull(cfg, segs));
  out.push_back(suite_localization(cfg, segs));
  out.push_back(suite_young(cfg));
  out.push_back(suite_regions(cfg));
  out.push_back(suite_toy(cfg));
  out.push_back(suite_functionals(cfg));
  return out;
}

}  // namespace wildeuler

#include "wildeuler/functionals.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "wildeuler/errors.hpp"
#include "parallel.hpp"

namespace wildeuler {

namespace {

constexpr double kRhoFloor = 1e-6;
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct TimeSlice {
  double integral = 0.0;
  double abs_integral = 0.0;
  double margin_hull = std::numeric_limits<double>::infinity();
  double margin_kinetic = std::numeric_limits<double>::infinity();
};

void check_rho(double rho) {
  if (!(rho >= kRhoFloor)) {
    throw InvalidArgument("density below the floor 1e-6 during evaluation");
  }
}

// Shared stop state of one functional pass, polled once per row.
struct PassControl {
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
  double abort_margin = -std::numeric_limits<double>::infinity();
  std::atomic<bool> stop{false};
  std::atomic<bool> late{false};

  bool poll() {
    if (stop.load(std::memory_order_relaxed)) return true;
    if (deadline != std::chrono::steady_clock::time_point::max() &&
        std::chrono::steady_clock::now() > deadline) {
      late.store(true);
      stop.store(true);
      return true;
    }
    return false;
  }
};

TimeSlice slice_2d(const FieldEnsemble& fields, const PressureLaw& law,
                   const FunctionalDomain& dom, int per_unit, double t, PassControl& ctl) {
  const double lx = dom.omega_hi(0) - dom.omega_lo(0);
  const double ly = dom.omega_hi(1) - dom.omega_lo(1);
  const int nx = std::max(1, static_cast<int>(std::ceil(lx * per_unit)));
  const int ny = std::max(1, static_cast<int>(std::ceil(ly * per_unit)));
  const double dx = lx / nx;
  const double dy = ly / ny;
  std::vector<double> row(static_cast<std::size_t>(nx));
  std::vector<double> row_abs(static_cast<std::size_t>(nx));
  std::vector<double> rows(static_cast<std::size_t>(ny));
  std::vector<double> rows_abs(static_cast<std::size_t>(ny));
  TimeSlice out;
  const bool constant_rho = fields.base().is_constant();
  double p_const = 0.0;
  if (constant_rho) {
    const State2 b = fields.base().evaluate2(t, dom.omega_lo(0), dom.omega_lo(1));
    check_rho(b.rho);
    p_const = law.pressure(b.rho);
  }
  for (int iy = 0; iy < ny; ++iy) {
    if (ctl.poll()) return out;
    if (out.margin_hull < ctl.abort_margin) {
      ctl.stop.store(true, std::memory_order_relaxed);
      return out;
    }
    const double x2 = dom.omega_lo(1) + (iy + 0.5) * dy;
    for (int ix = 0; ix < nx; ++ix) {
      const double x1 = dom.omega_lo(0) + (ix + 0.5) * dx;
      const State2 z = fields.evaluate2(t, x1, x2);
      double p;
      if (constant_rho) {
        p = p_const;
      } else {
        check_rho(z.rho);
        p = law.pressure(z.rho);
      }
      const double quad = (z.m1 * z.m1 + z.m2 * z.m2) / (2.0 * z.rho);
      const double ek = e_kin_2d(z.rho, z.m1, z.m2, z.M11, z.M12);
      const double integrand = p + quad - z.Q;
      row[static_cast<std::size_t>(ix)] = integrand;
      row_abs[static_cast<std::size_t>(ix)] = std::abs(integrand);
      out.margin_hull = std::min(out.margin_hull, z.Q - p - ek);
      out.margin_kinetic = std::min(out.margin_kinetic, ek - quad);
    }
    rows[static_cast<std::size_t>(iy)] = pairwise_sum(row.data(), row.size());
    rows_abs[static_cast<std::size_t>(iy)] = pairwise_sum(row_abs.data(), row_abs.size());
  }
  out.integral = pairwise_sum(rows.data(), rows.size()) * dx * dy;
  out.abs_integral = pairwise_sum(rows_abs.data(), rows_abs.size()) * dx * dy;
  return out;
}

TimeSlice slice_generic(const FieldEnsemble& fields, const PressureLaw& law,
                        const FunctionalDomain& dom, int per_unit, double t) {
  const int d = static_cast<int>(dom.omega_lo.size());
  std::vector<int> n(static_cast<std::size_t>(d));
  std::vector<double> step(static_cast<std::size_t>(d));
  long total = 1;
  double cell = 1.0;
  for (int k = 0; k < d; ++k) {
    const double len = dom.omega_hi(k) - dom.omega_lo(k);
    n[static_cast<std::size_t>(k)] = std::max(1, static_cast<int>(std::ceil(len * per_unit)));
    step[static_cast<std::size_t>(k)] = len / n[static_cast<std::size_t>(k)];
    total *= n[static_cast<std::size_t>(k)];
    cell *= step[static_cast<std::size_t>(k)];
  }
  std::vector<double> vals(static_cast<std::size_t>(total));
  std::vector<double> abs_vals(static_cast<std::size_t>(total));
  TimeSlice out;
  Eigen::VectorXd x(d);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int k = 0; k < d; ++k) {
      const int ik = static_cast<int>(rem % n[static_cast<std::size_t>(k)]);
      rem /= n[static_cast<std::size_t>(k)];
      x(k) = dom.omega_lo(k) + (ik + 0.5) * step[static_cast<std::size_t>(k)];
    }
    const EulerState z = fields.evaluate(t, x);
    check_rho(z.rho);
    const double p = law.pressure(z.rho);
    const double quad = z.m.squaredNorm() / (d * z.rho);
    const double ek = (2.0 / d) * e_kin(z);
    const double integrand = p + quad - z.Q;
    vals[static_cast<std::size_t>(idx)] = integrand;
    abs_vals[static_cast<std::size_t>(idx)] = std::abs(integrand);
    out.margin_hull = std::min(out.margin_hull, z.Q - p - ek);
    out.margin_kinetic = std::min(out.margin_kinetic, ek - quad);
  }
  out.integral = pairwise_sum(vals.data(), vals.size()) * cell;
  out.abs_integral = pairwise_sum(abs_vals.data(), abs_vals.size()) * cell;
  return out;
}

}  // namespace

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += values[k];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

void FunctionalDomain::validate() const {
  if (!(epsilon > 0.0) || !(T > 2.0 * epsilon)) {
    throw InvalidArgument("functional domain requires 0 < eps < T/2");
  }
  if (omega_lo.size() != omega_hi.size() || omega_lo.size() < 1) {
    throw InvalidArgument("functional domain box has inconsistent dimension");
  }
  for (Eigen::Index k = 0; k < omega_lo.size(); ++k) {
    if (!(omega_hi(k) > omega_lo(k))) {
      throw InvalidArgument("functional domain box is empty");
    }
  }
}

double FunctionalDomain::omega_volume() const { return (omega_hi - omega_lo).prod(); }

FunctionalDomain FunctionalDomain::unit(int d, double epsilon, double T) {
  FunctionalDomain dom;
  dom.epsilon = epsilon;
  dom.T = T;
  dom.omega_lo = Eigen::VectorXd::Zero(d);
  dom.omega_hi = Eigen::VectorXd::Ones(d);
  return dom;
}

int QuadratureSpec::resolved_per_unit(int j) const {
  const int needed = 8 * std::max(0, j);
  if (per_unit > 0) {
    if (per_unit < needed) {
      throw QuadratureUnderresolved("spatial resolution " + std::to_string(per_unit) +
                                    " per unit is below 8 x frequency " + std::to_string(j));
    }
    return per_unit;
  }
  return std::max(min_per_unit, needed);
}

FunctionalReport evaluate_functionals(const FieldEnsemble& fields, const PressureLaw& law,
                                      const FunctionalDomain& domain,
                                      const QuadratureSpec& quad) {
  domain.validate();
  if (domain.omega_lo.size() != fields.dim()) {
    throw InvalidArgument("functional domain dimension does not match the fields");
  }
  if (quad.time_samples < 1) {
    throw InvalidArgument("at least one time sample is required");
  }
  const int per_unit = quad.resolved_per_unit(fields.max_frequency());
  const double a = domain.epsilon;
  const double b = domain.T - domain.epsilon;

  // inner times first (they define I), then outer times (margins only)
  std::vector<double> inner;
  for (int k = 0; k < quad.time_samples; ++k) {
    inner.push_back(a + (k + 0.5) * (b - a) / quad.time_samples);
  }
  std::vector<double> outer;
  const int no = std::max(0, quad.outer_time_samples);
  for (int k = 0; k < no; ++k) {
    outer.push_back((k + 0.5) * a / no);
    outer.push_back(b + (k + 0.5) * a / no);
  }
  for (double t : quad.extra_times) {
    if (t >= a && t <= b) {
      inner.push_back(t);
    } else if (t >= 0.0 && t <= domain.T) {
      outer.push_back(t);
    }
  }
  std::vector<double> all = inner;
  all.insert(all.end(), outer.begin(), outer.end());

  std::vector<TimeSlice> slices(all.size());
  const bool fast = fields.dim() == 2;
  PassControl ctl;
  ctl.deadline = quad.deadline;
  ctl.abort_margin = quad.abort_margin;
  detail::parallel_for(all.size(), quad.threads, [&](std::size_t k) {
    if (ctl.poll()) return;
    slices[k] = fast ? slice_2d(fields, law, domain, per_unit, all[k], ctl)
                     : slice_generic(fields, law, domain, per_unit, all[k]);
    if (slices[k].margin_hull < quad.abort_margin) ctl.stop.store(true, std::memory_order_relaxed);
  });

  FunctionalReport rep;
  rep.per_unit = per_unit;
  if (ctl.stop.load()) {
    // Which slices ran depends on scheduling, so nothing partial is reported.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.aborted = true;
    rep.timed_out = ctl.late.load();
    rep.I = rep.deficit = rep.margin_hull = rep.margin_kinetic = nan;
    return rep;
  }
  rep.I = std::numeric_limits<double>::infinity();
  rep.margin_hull = std::numeric_limits<double>::infinity();
  rep.margin_kinetic = std::numeric_limits<double>::infinity();
  std::vector<double> node_abs;
  for (std::size_t k = 0; k < all.size(); ++k) {
    const TimeSlice& s = slices[k];
    rep.margin_hull = std::min(rep.margin_hull, s.margin_hull);
    rep.margin_kinetic = std::min(rep.margin_kinetic, s.margin_kinetic);
    if (k < inner.size()) {
      rep.times.push_back(all[k]);
      rep.integrals.push_back(s.integral);
      if (s.integral < rep.I) {
        rep.I = s.integral;
        rep.t_min = all[k];
      }
      if (k < static_cast<std::size_t>(quad.time_samples)) node_abs.push_back(s.abs_integral);
    }
  }
  rep.deficit = pairwise_sum(node_abs.data(), node_abs.size()) * (b - a) / quad.time_samples;
  long per_slice = 1;
  for (Eigen::Index k = 0; k < domain.omega_lo.size(); ++k) {
    per_slice *= std::max(
        1L, static_cast<long>(std::ceil((domain.omega_hi(k) - domain.omega_lo(k)) * per_unit)));
  }
  rep.samples = per_slice * static_cast<long>(all.size());
  return rep;
}

double I_functional(const FieldEnsemble& fields, const PressureLaw& law,
                    const FunctionalDomain& domain, const QuadratureSpec& quad) {
  return evaluate_functionals(fields, law, domain, quad).I;
}

double solution_deficit(const FieldEnsemble& fields, const PressureLaw& law,
                        const FunctionalDomain& domain, const QuadratureSpec& quad) {
  return evaluate_functionals(fields, law, domain, quad).deficit;
}

SubsolutionReport subsolution_report(const FunctionalReport& pass, double delta) {
  SubsolutionReport r;
  r.margin_hull = pass.margin_hull;
  r.margin_kinetic = pass.margin_kinetic;
  r.delta = delta;
  r.hull_ok = pass.margin_hull >= delta;
  r.kinetic_ok = pass.margin_kinetic >= delta;
  r.verdict = r.hull_ok;
  r.samples = pass.samples;
  return r;
}

SubsolutionReport subsolution_check(const FieldEnsemble& fields, const PressureLaw& law,
                                    double delta, const FunctionalDomain& domain,
                                    const QuadratureSpec& quad) {
  return subsolution_report(evaluate_functionals(fields, law, domain, quad), delta);
}

// ---------------------------------------------------------------------------
// weak residuals

namespace {

inline double bump(double u) {
  const double q = 1.0 - u * u;
  return q > 0.0 ? std::exp(1.0 - 1.0 / q) : 0.0;
}

// B'(u) = B(u) * (-2u / (1 - u^2)^2)
inline double bump_derivative(double u) {
  const double q = 1.0 - u * u;
  return q > 0.0 ? std::exp(1.0 - 1.0 / q) * (-2.0 * u / (q * q)) : 0.0;
}

}  // namespace

double TestFunction::value(double t, double x1, double x2) const {
  const double y[3] = {t, x1, x2};
  double v = 1.0;
  double phase_arg = phase;
  for (int k = 0; k < 3; ++k) {
    v *= bump((y[k] - center[static_cast<std::size_t>(k)]) / width[static_cast<std::size_t>(k)]);
    phase_arg += kTwoPi * wavenumber[static_cast<std::size_t>(k)] * y[k];
  }
  return v * std::cos(phase_arg);
}

std::array<double, 3> TestFunction::gradient(double t, double x1, double x2) const {
  const double y[3] = {t, x1, x2};
  double b[3];
  double db[3];
  double phase_arg = phase;
  for (int k = 0; k < 3; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double u = (y[k] - center[kk]) / width[kk];
    b[k] = bump(u);
    db[k] = bump_derivative(u) / width[kk];
    phase_arg += kTwoPi * wavenumber[kk] * y[k];
  }
  const double c = std::cos(phase_arg);
  const double s = std::sin(phase_arg);
  const double prod = b[0] * b[1] * b[2];
  std::array<double, 3> g{};
  for (int k = 0; k < 3; ++k) {
    double others = 1.0;
    for (int l = 0; l < 3; ++l) {
      if (l != k) others *= b[l];
    }
    g[static_cast<std::size_t>(k)] =
        db[k] * others * c - prod * s * kTwoPi * wavenumber[static_cast<std::size_t>(k)];
  }
  return g;
}

const char* test_battery_version() { return "battery-v1"; }

const std::vector<TestFunction>& test_battery() {
  static const std::vector<TestFunction> battery = [] {
    std::vector<TestFunction> out;
    const double ts[3] = {0.3, 0.5, 0.7};
    const double xs[4][2] = {{0.3, 0.3}, {0.7, 0.35}, {0.4, 0.65}, {0.62, 0.71}};
    const double modes[2][3] = {{0.0, 0.0, 0.0}, {1.0, 2.0, -1.0}};
    int n = 0;
    for (int it = 0; it < 3; ++it) {
      for (int ix = 0; ix < 4; ++ix) {
        for (int im = 0; im < 2; ++im) {
          TestFunction f;
          f.name = "psi" + std::to_string(n);
          f.center = {ts[it], xs[ix][0], xs[ix][1]};
          const double w = 0.04 + 0.005 * ((n * 7) % 5);
          f.width = {w, w, w};
          f.wavenumber = {modes[im][0], modes[im][1], modes[im][2]};
          f.phase = 0.25 * n;
          out.push_back(f);
          ++n;
        }
      }
    }
    return out;
  }();
  return battery;
}

namespace {

std::array<double, 3> residual_vector(const std::function<State2(double, double, double)>& f,
                                      const TestFunction& psi, int per_unit) {
  int n[3];
  double lo[3];
  double step[3];
  for (int k = 0; k < 3; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double len = 2.0 * psi.width[kk];
    n[k] = std::max(160, static_cast<int>(std::ceil(len * per_unit)));
    lo[k] = psi.center[kk] - psi.width[kk];
    step[k] = len / n[k];
  }
  const double vol = step[0] * step[1] * step[2];
  std::vector<double> row[3];
  std::vector<double> plane[3];
  std::vector<double> cube[3];
  for (int c = 0; c < 3; ++c) {
    row[c].resize(static_cast<std::size_t>(n[2]));
    plane[c].resize(static_cast<std::size_t>(n[1]));
    cube[c].resize(static_cast<std::size_t>(n[0]));
  }
  for (int it = 0; it < n[0]; ++it) {
    const double t = lo[0] + (it + 0.5) * step[0];
    for (int i1 = 0; i1 < n[1]; ++i1) {
      const double x1 = lo[1] + (i1 + 0.5) * step[1];
      for (int i2 = 0; i2 < n[2]; ++i2) {
        const double x2 = lo[2] + (i2 + 0.5) * step[2];
        const auto g = psi.gradient(t, x1, x2);
        const State2 z = f(t, x1, x2);
        const double M22 = -z.M11;
        const auto k2 = static_cast<std::size_t>(i2);
        row[0][k2] = z.rho * g[0] + z.m1 * g[1] + z.m2 * g[2];
        row[1][k2] = z.m1 * g[0] + (z.M11 + z.Q) * g[1] + z.M12 * g[2];
        row[2][k2] = z.m2 * g[0] + z.M12 * g[1] + (M22 + z.Q) * g[2];
      }
      for (int c = 0; c < 3; ++c) {
        plane[c][static_cast<std::size_t>(i1)] = pairwise_sum(row[c].data(), row[c].size());
      }
    }
    for (int c = 0; c < 3; ++c) {
      cube[c][static_cast<std::size_t>(it)] = pairwise_sum(plane[c].data(), plane[c].size());
    }
  }
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    out[static_cast<std::size_t>(c)] = pairwise_sum(cube[c].data(), cube[c].size()) * vol;
  }
  return out;
}

double norm3(const std::array<double, 3>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

}  // namespace

WeakResidualReport weak_residual(const std::function<State2(double, double, double)>& fields,
                                 int max_frequency, const std::vector<TestFunction>& battery,
                                 int per_unit, double floor, int threads) {
  QuadratureSpec q;
  q.per_unit = per_unit;
  q.min_per_unit = 64;
  const int n = q.resolved_per_unit(max_frequency);
  WeakResidualReport rep;
  rep.per_unit = n;
  rep.rows.resize(battery.size());
  detail::parallel_for(battery.size(), threads, [&](std::size_t k) {
    const auto coarse = residual_vector(fields, battery[k], n / 2);
    const auto fine = residual_vector(fields, battery[k], n);
    const std::array<double, 3> diff{coarse[0] - fine[0], coarse[1] - fine[1],
                                     coarse[2] - fine[2]};
    ResidualRow row;
    row.name = battery[k].name;
    row.coarse = norm3(coarse);
    row.fine = norm3(fine);
    row.tolerance = std::max(2.0 * norm3(diff), floor);
    row.pass = row.fine <= row.tolerance;
    rep.rows[k] = row;
  });
  rep.pass = true;
  for (const auto& r : rep.rows) {
    rep.max_fine = std::max(rep.max_fine, r.fine);
    rep.max_tolerance = std::max(rep.max_tolerance, r.tolerance);
    rep.pass = rep.pass && r.pass;
  }
  return rep;
}

WeakResidualReport weak_residual(const FieldEnsemble& fields,
                                 const std::vector<TestFunction>& battery, int per_unit,
                                 double floor, int threads) {
  if (fields.dim() != 2) {
    throw InvalidArgument("weak residuals are implemented for d = 2");
  }
  return weak_residual([&fields](double t, double x1,
                                 double x2) { return fields.evaluate2(t, x1, x2); },
                       fields.max_frequency(), battery, per_unit, floor, threads);
}

}  // namespace wildeuler

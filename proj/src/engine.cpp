#include "wildeuler/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "wildeuler/errors.hpp"
#include "parallel.hpp"

namespace wildeuler {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t seed, int step, std::size_t cell) {
  return splitmix(splitmix(seed ^ (static_cast<std::uint64_t>(step) << 40)) ^ cell);
}

// int bump(s)^2 ds / h for the one-dimensional plateau cutoff.
double bump_square_fraction() {
  static const double value = [] {
    const Bump1D b{1.0};
    const int n = 1 << 14;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double x = -0.5 + (k + 0.5) / n;
      const double v = b.value(x);
      s += v * v;
    }
    return s / n;
  }();
  return value;
}

struct CellPlan {
  bool active = false;
  OscillationSegment segment;
  WaveDirection xi;
  double shrink = 1.0;
  bool continuity_ok = true;
  CellReport report;
};

double hull_F(const State2& z, const PressureLaw& law) {
  return law.pressure(z.rho) + e_kin_2d(z.rho, z.m1, z.m2, z.M11, z.M12) - z.Q;
}

// Continuity control: F(z(t,x) +- s Z) <= -delta at the centre, the corners
// and random points of the cell.
bool continuity_holds(const FieldEnsemble& fields, const PressureLaw& law, const Cell& cell,
                      const OscillationSegment& seg, double s, double delta,
                      const std::vector<std::array<double, 3>>& samples) {
  const double am1 = s * seg.amplitude_m(0);
  const double am2 = s * seg.amplitude_m(1);
  const double aM11 = s * seg.amplitude_M(0, 0);
  const double aM12 = s * seg.amplitude_M(0, 1);
  for (const auto& p : samples) {
    const State2 z = fields.evaluate2(p[0], p[1], p[2]);
    for (double sign : {-1.0, 1.0}) {
      State2 w = z;
      w.m1 += sign * am1;
      w.m2 += sign * am2;
      w.M11 += sign * aM11;
      w.M12 += sign * aM12;
      if (!(hull_F(w, law) <= -delta)) return false;
    }
  }
  (void)cell;
  return true;
}

std::vector<std::array<double, 3>> cell_samples(const Cell& cell, int random_count,
                                                std::uint64_t seed) {
  std::vector<std::array<double, 3>> pts;
  const double tc = cell.t_center();
  const double xc = 0.5 * (cell.x_lo(0) + cell.x_hi(0));
  const double yc = 0.5 * (cell.x_lo(1) + cell.x_hi(1));
  const double ht = 0.5 * (cell.t_hi - cell.t_lo) * 0.999;
  const double hx = 0.5 * (cell.x_hi(0) - cell.x_lo(0)) * 0.999;
  const double hy = 0.5 * (cell.x_hi(1) - cell.x_lo(1)) * 0.999;
  pts.push_back({tc, xc, yc});
  for (int a : {-1, 1}) {
    for (int b : {-1, 1}) {
      for (int c : {-1, 1}) pts.push_back({tc + a * ht, xc + b * hx, yc + c * hy});
    }
  }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < random_count; ++k) {
    pts.push_back({tc + u(gen) * ht, xc + u(gen) * hx, yc + u(gen) * hy});
  }
  return pts;
}

std::vector<double> merged_times(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> layer_times(const std::vector<Cell>& cells) {
  std::vector<double> out;
  for (const Cell& c : cells) {
    out.push_back(c.t_lo);
    out.push_back(c.t_hi);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

QuadratureSpec with_times(const Scenario& sc, const std::vector<double>& times) {
  QuadratureSpec q = sc.quad;
  q.extra_times = merged_times(sc.quad.extra_times, times);
  q.threads = sc.threads;
  return q;
}

// min over the I time samples of the plateau-covered fraction of Omega_0.
double plateau_fraction(const std::vector<Cell>& cells, double h, const std::vector<double>& times,
                        double omega_volume) {
  const double block = std::pow(0.75 * h, 2);
  double worst = std::numeric_limits<double>::infinity();
  for (double t : times) {
    double covered = 0.0;
    for (const Cell& c : cells) {
      if (std::abs(t - c.t_center()) <= 0.375 * h) covered += block;
    }
    worst = std::min(worst, covered / omega_volume);
  }
  return worst;
}

double predicted_gain(const std::vector<Cell>& cells, const std::vector<CellPlan>& plans, double h,
                      double mean_square, const std::vector<double>& times) {
  const Bump1D bump{h};
  const double spatial = std::pow(bump_square_fraction() * h, 2);
  std::vector<double> weight(cells.size(), 0.0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!plans[k].active) continue;
    const OscillationSegment& seg = plans[k].segment;
    weight[k] = spatial * seg.amplitude_m.squaredNorm() * mean_square /
                (2.0 * seg.center.rho);
  }
  double worst = std::numeric_limits<double>::infinity();
  for (double t : times) {
    double sum = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (weight[k] == 0.0) continue;
      const double v = bump.value(t - cells[k].t_center());
      sum += v * v * weight[k];
    }
    worst = std::min(worst, sum);
  }
  return worst;
}

}  // namespace

void Scenario::validate() const {
  if (d != 2) throw InvalidArgument("the engine supports d = 2 only");
  if (!(gamma > 1.0)) throw InvalidArgument("gamma must exceed 1");
  if (!(epsilon > 0.0) || !(T > 2.0 * epsilon)) {
    throw InvalidArgument("scenario requires 0 < eps < T/2");
  }
  if (!(period > 0.0)) throw InvalidArgument("period must be positive");
  if (omega_lo.size() != 2 || omega_hi.size() != 2) {
    throw InvalidArgument("Omega_0 must be a box in two dimensions");
  }
  for (int k = 0; k < 2; ++k) {
    if (!(omega_lo(k) >= 0.0) || !(omega_hi(k) <= period) || !(omega_hi(k) > omega_lo(k))) {
      throw InvalidArgument("Omega_0 must be a nonempty box inside one period");
    }
  }
  if (!(rho_floor > 0.0)) throw InvalidArgument("rho_floor must be positive");
  if (!base_function) {
    if (!(rho0 >= rho_floor)) throw InvalidArgument("rho0 is below rho_floor");
    if (m0.size() != 2 || M0.rows() != 2 || M0.cols() != 2) {
      throw InvalidArgument("m0 and M0 must have dimension 2");
    }
    if (!is_symmetric_trace_free(M0)) throw InvalidArgument("M0 must be symmetric trace-free");
  }
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (!(alpha_fraction > 0.0 && alpha_fraction <= 1.0)) {
    throw InvalidArgument("alpha_fraction must lie in (0, 1]");
  }
  for (double a : alpha_schedule) {
    if (!(a > 0.0)) throw InvalidArgument("alpha values must be positive");
  }
  if (iterations < 0) throw InvalidArgument("iterations must be nonnegative");
  if (h0 < 0.0 || h0 > 0.5 * epsilon * (1.0 + 1e-12)) {
    throw InvalidArgument("h0 must lie in (0, eps/2]");
  }
  if (max_h_halvings < 0 || max_shrinks < 0 || continuity_samples < 0) {
    throw InvalidArgument("control counts must be nonnegative");
  }
  if (j0 < 1 || j_cap < j0) throw InvalidArgument("require 1 <= j0 <= j_cap");
  if (!(profile_eps0 > 0.0 && profile_eps0 < 0.25)) {
    throw InvalidArgument("profile_eps0 must lie in (0, 1/4)");
  }
  if (quad.time_samples < 1) throw InvalidArgument("time_samples must be positive");
  if (threads < 1) throw InvalidArgument("threads must be positive");
}

PressureLaw Scenario::law() const { return PressureLaw(gamma); }

BaseFields Scenario::base() const {
  if (base_function) return BaseFields::function(2, base_function);
  EulerState z;
  z.rho = rho0;
  z.m = m0;
  z.M = M0;
  z.Q = Q;
  return BaseFields::constant(z);
}

GridSpec Scenario::grid(double h) const {
  GridSpec g;
  g.h = h;
  g.epsilon = epsilon;
  g.T = T;
  g.omega_lo = omega_lo;
  g.omega_hi = omega_hi;
  g.period = period;
  return g;
}

FunctionalDomain Scenario::domain() const {
  FunctionalDomain dom;
  dom.epsilon = epsilon;
  dom.T = T;
  dom.omega_lo = omega_lo;
  dom.omega_hi = omega_hi;
  return dom;
}

double Scenario::initial_h() const { return h0 > 0.0 ? h0 : 0.5 * epsilon; }

BaseFields default_subsolution(double rho_bar, double Q_bar, const PressureLaw& law) {
  if (!(rho_bar > 0.0)) throw InvalidArgument("rho_bar must be positive");
  if (!(Q_bar > law.pressure(rho_bar))) {
    throw NotStrict("Q_bar must exceed p(rho_bar)");
  }
  return BaseFields::constant(EulerState::zero(2, rho_bar, Q_bar));
}

std::vector<double> cell_boundary_times(const FieldEnsemble& fields) {
  std::vector<double> out;
  for (const auto& l : fields.layers()) out = merged_times(out, layer_times(l->cells()));
  return out;
}

StepResult perturbation_step(const FieldEnsemble& fields, const Scenario& sc, double alpha,
                             int index) {
  sc.validate();
  const FunctionalReport before =
      evaluate_functionals(fields, sc.law(), sc.domain(),
                           with_times(sc, cell_boundary_times(fields)));
  return perturbation_step(fields, sc, alpha, before, index);
}

StepResult perturbation_step(const FieldEnsemble& fields, const Scenario& sc, double alpha,
                             const FunctionalReport& before, int index) {
  const auto start = std::chrono::steady_clock::now();
  sc.validate();
  if (fields.dim() != 2) throw InvalidArgument("the engine supports d = 2 only");
  const PressureLaw law = sc.law();
  const FunctionalDomain dom = sc.domain();
  const SubsolutionReport sub_before = subsolution_report(before, sc.delta);
  if (!sub_before.verdict) {
    std::ostringstream os;
    os << "input fields are not a strict subsolution: min Q - p - e_kin = "
       << sub_before.margin_hull << " < delta = " << sc.delta;
    throw NotStrictSubsolution(os.str());
  }
  if (!(before.I < -alpha)) {
    throw InvalidArgument("perturbation step requires I < -alpha");
  }

  StepReport rep;
  rep.index = index;
  rep.alpha = alpha;
  rep.I_before = before.I;
  rep.deficit_before = before.deficit;
  const std::vector<double> old_times = cell_boundary_times(fields);
  const auto profile = std::make_shared<const OscillationProfile>(sc.profile_eps0);

  std::string last_failure = "no grid size satisfied the controls";
  for (int hv = 0; hv <= sc.max_h_halvings; ++hv) {
    const double h = sc.initial_h() / std::pow(2.0, hv);
    const GridSpec gs = sc.grid(h);
    std::vector<Cell> cells;
    try {
      cells = build_grid(gs, 0.5 * sc.epsilon, sc.T - 0.5 * sc.epsilon);
    } catch (const EmptyGrid&) {
      last_failure = "empty grid";
      continue;
    }
    const std::vector<double> times = merged_times(old_times, layer_times(cells));
    QuadratureSpec quad = with_times(sc, times);
    // I time samples, used for the functional control and the prediction
    std::vector<double> i_times;
    for (int k = 0; k < quad.time_samples; ++k) {
      i_times.push_back(sc.epsilon + (k + 0.5) * (sc.T - 2 * sc.epsilon) / quad.time_samples);
    }
    for (double t : times) {
      if (t >= sc.epsilon && t <= sc.T - sc.epsilon) i_times.push_back(t);
    }
    const double c = plateau_fraction(cells, h, i_times, dom.omega_volume());
    if (c < sc.min_plateau_fraction) {
      last_failure = "plateau fraction below the functional control";
      continue;
    }

    std::vector<CellPlan> plans(cells.size());
    detail::parallel_for(cells.size(), sc.threads, [&](std::size_t k) {
      const Cell& cell = cells[k];
      CellPlan& plan = plans[k];
      CellReport& cr = plan.report;
      cr.cell = static_cast<long>(k);
      cr.t = cell.t_center();
      const Eigen::VectorXd xc = cell.x_center();
      cr.x1 = xc(0);
      cr.x2 = xc(1);
      const EulerState z = fields.evaluate(cell.t_center(), xc);
      try {
        SegmentOptions so = sc.segment;
        so.seed = cell_seed(sc.seed, index, k);
        OscillationSegment seg = build_segment(z, law, so);
        cr.r = seg.r;
        cr.m_norm = z.m.norm();
        cr.amplitude = seg.amplitude_m.norm();
        cr.floor = seg.amplitude_floor();
        cr.bound_ok = cr.amplitude >= cr.floor - 1e-9;
        const WaveDirection xi = find_direction(seg);
        const auto pts = cell_samples(cell, sc.continuity_samples, cell_seed(sc.seed ^ 0x5bd1e995ULL, index, k));
        double s = 1.0;
        bool ok = continuity_holds(fields, law, cell, seg, s, sc.delta, pts);
        for (int sh = 0; !ok && sh < sc.max_shrinks; ++sh) {
          s *= 0.5;
          ok = continuity_holds(fields, law, cell, seg, s, sc.delta, pts);
        }
        plan.continuity_ok = ok;
        plan.shrink = s;
        cr.shrink = s;
        if (ok) {
          plan.segment = s < 1.0 ? seg.scaled(s) : seg;
          plan.xi = xi;
          plan.active = true;
          cr.has_wave = true;
        } else {
          cr.note = "continuity control failed";
        }
      } catch (const Error& e) {
        cr.note = e.what();
      }
    });
    bool continuity = true;
    for (const CellPlan& p : plans) continuity = continuity && p.continuity_ok;
    if (!continuity) {
      last_failure = "continuity control failed after segment shrinking";
      continue;
    }

    rep.h = h;
    rep.halvings = hv;
    rep.plateau_fraction = c;
    rep.cells.clear();
    rep.shrunk_cells = 0;
    for (const CellPlan& p : plans) {
      rep.cells.push_back(p.report);
      if (p.active && p.shrink < 1.0) ++rep.shrunk_cells;
    }
    rep.predicted = predicted_gain(cells, plans, h, profile->mean_square(), i_times);
    rep.A = 0.0;
    for (const Cell& cell : cells) {
      rep.A = std::max(rep.A, fields.evaluate(cell.t_center(), cell.x_center()).Q);
    }

    for (int j = sc.j0; j <= sc.j_cap; j *= 2) {
      if (std::chrono::steady_clock::now() > quad.deadline) {
        throw StepFailed("time budget exhausted before trying j = " + std::to_string(j));
      }
      std::vector<LocalizedWave> waves;
      std::vector<long> wave_of_cell(cells.size(), -1);
      std::vector<std::unique_ptr<LocalizedWave>> built(cells.size());
      detail::parallel_for(cells.size(), sc.threads, [&](std::size_t k) {
        if (!plans[k].active) return;
        built[k] = std::make_unique<LocalizedWave>(
            localize(plans[k].segment, plans[k].xi, j, cells[k].cutoff(h), profile));
      });
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (!built[k]) continue;
        wave_of_cell[k] = static_cast<long>(waves.size());
        waves.push_back(std::move(*built[k]));
      }
      auto layer = std::make_shared<const WaveLayer>(gs, cells, std::move(waves), wave_of_cell);
      FieldEnsemble next = fields.with_layer(layer);
      QuadratureSpec attempt_quad = quad;
      attempt_quad.abort_margin = sc.delta;
      FunctionalReport pass = evaluate_functionals(next, law, dom, attempt_quad);
      if (pass.timed_out) {
        throw StepFailed("time budget exhausted during the pass at j = " + std::to_string(j));
      }
      const double gain = pass.I - before.I;
      FrequencyAttempt att;
      att.j = j;
      att.gain = gain;
      att.margin = pass.margin_hull;
      att.aborted = pass.aborted;
      att.accepted = !pass.aborted && pass.margin_hull >= sc.delta && gain > 0.0 &&
                     gain >= 0.5 * rep.predicted;
      rep.attempts.push_back(att);
      if (att.accepted) {
        rep.frequency = j;
        rep.I_after = pass.I;
        rep.gain = gain;
        rep.deficit_after = pass.deficit;
        rep.subsolution = subsolution_report(pass, sc.delta);
        rep.waves = static_cast<int>(layer->size());
        rep.C_prime = gain * rep.A * dom.omega_volume() / (alpha * alpha);
        rep.beta = rep.predicted;
        rep.per_unit = pass.per_unit;
        rep.samples = pass.samples;
        rep.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return {std::move(next), rep, std::move(pass)};
      }
      if (j > sc.j_cap / 2) break;
    }
    std::ostringstream os;
    os << "frequency cap " << sc.j_cap << " reached at h = " << h << " without verdict and gain;";
    for (const auto& a : rep.attempts) {
      if (a.aborted) {
        os << " j=" << a.j << " margin below delta;";
      } else {
        os << " j=" << a.j << " gain=" << a.gain << " margin=" << a.margin << ";";
      }
    }
    throw StepFailed(os.str());
  }
  throw StepFailed(last_failure);
}

IterationResult iterate(const Scenario& sc) {
  sc.validate();
  return iterate(sc, FieldEnsemble(sc.base()));
}

IterationResult iterate(const Scenario& scenario, const FieldEnsemble& start) {
  scenario.validate();
  Scenario sc = scenario;
  if (sc.time_budget > 0.0) {
    sc.quad.deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(sc.time_budget));
  }
  IterationResult out{{}, start, {}, {}, false, {}};
  const PressureLaw law = sc.law();
  // The starting pass is always completed; the budget applies to the steps.
  FunctionalReport pass = evaluate_functionals(start, law, sc.domain(),
                                               with_times(scenario, cell_boundary_times(start)));
  out.initial = pass;
  for (int k = 0; k < sc.iterations; ++k) {
    if (std::abs(pass.I) < sc.stop_tolerance) break;
    const double alpha = k < static_cast<int>(sc.alpha_schedule.size())
                             ? sc.alpha_schedule[static_cast<std::size_t>(k)]
                             : sc.alpha_fraction * std::abs(pass.I);
    try {
      // Later steps never need a lower frequency than the last accepted one.
      Scenario sk = sc;
      if (!out.trace.empty()) sk.j0 = std::min(sc.j_cap, std::max(sc.j0, out.trace.back().frequency));
      StepResult r = perturbation_step(out.fields, sk, alpha, pass, k);
      out.fields = std::move(r.fields);
      pass = std::move(r.pass);
      out.trace.push_back(std::move(r.report));
    } catch (const StepFailed& e) {
      out.failed = true;
      out.failure = e.what();
      break;
    }
  }
  out.final_pass = pass;
  return out;
}

}  // namespace wildeuler

// wildeuler: command-line front end.
//
// Exit codes: 0 ok, 1 property failure, 2 invalid input, 3 step failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wildeuler/engine.hpp"
#include "wildeuler/errors.hpp"
#include "wildeuler/io.hpp"
#include "wildeuler/toy_model.hpp"
#include "wildeuler/verify.hpp"
#include "wildeuler/waves.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wildeuler;

namespace {

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kInvalid = 2;
constexpr int kStepFailure = 3;

struct Globals {
  int threads = 1;
  bool no_plots = false;
  long seed = -1;
  std::string out;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
  }
  return out;
}

// State from --rho --m --M --Q. M lists the upper triangle row by row.
EulerState parse_state(double rho, const std::string& m, const std::string& M, double Q) {
  const std::vector<double> mv = parse_list(m, "--m");
  const int d = static_cast<int>(mv.size());
  if (d != 2 && d != 3) throw InvalidArgument("--m needs 2 or 3 components");
  const std::vector<double> Mv = parse_list(M, "--M");
  if (static_cast<int>(Mv.size()) != d * (d + 1) / 2) {
    throw InvalidArgument("--M needs the d(d+1)/2 upper-triangle entries");
  }
  EulerState z;
  z.rho = rho;
  z.m = Eigen::Map<const Eigen::VectorXd>(mv.data(), d);
  z.M = Eigen::MatrixXd(d, d);
  std::size_t k = 0;
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      z.M(a, b) = Mv[k];
      z.M(b, a) = Mv[k];
      ++k;
    }
  }
  z.Q = Q;
  z.validate();
  return z;
}

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat(const Eigen::MatrixXd& M) {
  json out = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    out.push_back(row);
  }
  return out;
}

RunConfig resolve_config(const std::string& path, const Globals& g) {
  RunConfig cfg = path.empty() ? parse_config(json::object()) : load_config(path);
  if (g.threads < 1) throw InvalidArgument("--threads must be positive");
  cfg.scenario.threads = g.threads;
  if (g.seed >= 0) cfg.scenario.seed = static_cast<std::uint64_t>(g.seed);
  if (g.no_plots) cfg.plots = false;
  if (const char* env = std::getenv("WILDEULER_OUTPUT_DIR")) cfg.output_dir = env;
  if (!g.out.empty()) cfg.output_dir = g.out;
  return cfg;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InvalidArgument("cannot create directory " + p.string());
}

int cmd_hull(double rho, const std::string& m, const std::string& M, double Q, double gamma) {
  const PressureLaw law(gamma);
  const EulerState z = parse_state(rho, m, M, Q);
  const double F = hull_functional(z, law);
  json out = {{"F", F}, {"in_hull", in_hull(z, law)}, {"in_K", in_K(z, law)}, {"e_kin", e_kin(z)}};
  std::cout << out.dump() << "\n";
  return kOk;
}

int cmd_segment(double rho, const std::string& m, const std::string& M, double Q, double gamma,
                const std::string& rule, const Globals& g) {
  const PressureLaw law(gamma);
  const EulerState z = parse_state(rho, m, M, Q);
  SegmentOptions so;
  if (rule == "grid") {
    so.radius_rule = RadiusRule::Grid;
  } else if (rule != "hull") {
    throw InvalidArgument("--radius must be hull or grid");
  }
  so.seed = g.seed >= 0 ? static_cast<std::uint64_t>(g.seed) : 0;
  const OscillationSegment seg = build_segment(z, law, so);
  json out = {{"r", seg.r},
              {"amplitude_m", vec(seg.amplitude_m)},
              {"amplitude_M", mat(seg.amplitude_M)},
              {"amplitude_norm", seg.amplitude_m.norm()},
              {"floor", seg.amplitude_floor()},
              {"bound_ok", seg.amplitude_m.norm() >= seg.amplitude_floor() - 1e-9},
              {"endpoint_a", vec(seg.endpoint_a)},
              {"endpoint_b", vec(seg.endpoint_b)},
              {"F_plus", hull_functional(seg.endpoint(1.0), law)},
              {"F_minus", hull_functional(seg.endpoint(-1.0), law)},
              {"lambda_max", seg.lambda_max},
              {"lambda_j", seg.lambda_j},
              {"points", seg.points}};
  if (z.dim() == 2) {
    const WaveDirection xi = find_direction(seg);
    out["xi"] = vec(xi.xi);
  }
  std::cout << out.dump() << "\n";
  return kOk;
}

void write_plots_for_trace(const RunConfig& cfg, const IterationResult& res, const fs::path& dir) {
  ensure_dir(dir / "plots");
  Series I{"I", {}, {}};
  Series D{"deficit", {}, {}};
  I.x.push_back(0);
  I.y.push_back(res.initial.I);
  D.x.push_back(0);
  D.y.push_back(res.initial.deficit);
  for (const auto& s : res.trace) {
    I.x.push_back(s.index + 1);
    I.y.push_back(s.I_after);
    D.x.push_back(s.index + 1);
    D.y.push_back(s.deficit_after);
  }
  write_text((dir / "plots" / "I_trace.svg").string(),
             svg_line_plot("Deficiency functional", "iteration", "I", {I}));
  write_text((dir / "plots" / "deficit_trace.svg").string(),
             svg_line_plot("Solution deficit", "iteration", "deficit", {D}));
  const Scenario& sc = cfg.scenario;
  const double t = cfg.snapshot.t * sc.T;
  const int n = cfg.snapshot.resolution;
  std::vector<double> E;
  const PressureLaw law = sc.law();
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double x1 = sc.omega_lo(0) + (i + 0.5) * (sc.omega_hi(0) - sc.omega_lo(0)) / n;
      const double x2 = sc.omega_lo(1) + (k + 0.5) * (sc.omega_hi(1) - sc.omega_lo(1)) / n;
      const State2 z = res.fields.evaluate2(t, x1, x2);
      E.push_back(law.pressure(z.rho) + (z.m1 * z.m1 + z.m2 * z.m2) / (2 * z.rho) - z.Q);
    }
  }
  write_text((dir / "plots" / "E_heatmap.svg").string(),
             svg_heatmap("p + |m|^2/(d rho) - Q at the snapshot time", E, n, n));
  Series m1{"m1", {}, {}}, m2{"m2", {}, {}};
  const int nt = 2048;
  const double x2 = 0.5 * (sc.omega_lo(1) + sc.omega_hi(1));
  for (int i = 0; i < nt; ++i) {
    const double x1 = sc.omega_lo(0) + (i + 0.5) * (sc.omega_hi(0) - sc.omega_lo(0)) / nt;
    const State2 z = res.fields.evaluate2(t, x1, x2);
    m1.x.push_back(x1);
    m1.y.push_back(z.m1);
    m2.x.push_back(x1);
    m2.y.push_back(z.m2);
  }
  write_text((dir / "plots" / "momentum_transect.svg").string(),
             svg_line_plot("Momentum along x2 = mid-height", "x1", "m", {m1, m2}));
}

int cmd_iterate(const std::string& config, const Globals& g, bool single_step) {
  RunConfig cfg = resolve_config(config, g);
  if (single_step) cfg.scenario.iterations = 1;
  const fs::path dir(cfg.output_dir);
  ensure_dir(dir);
  write_json((dir / "config.json").string(), config_to_json(cfg));
  IterationResult res = iterate(cfg.scenario);

  json trace = json::array();
  for (const auto& s : res.trace) trace.push_back(to_json(s));
  json trace_doc = {{"initial", to_json(res.initial)}, {"steps", trace},
                    {"failed", res.failed}, {"failure", res.failure}};
  write_json((dir / "trace.json").string(), trace_doc);

  if (!single_step) {
    ensure_dir(dir / "snapshots");
    const double t = cfg.snapshot.t * cfg.scenario.T;
    for (std::size_t k = 0; k < res.fields.layers().size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof(name), "iter_%02zu.csv", k + 1);
      FieldEnsemble partial(res.fields.base());
      for (std::size_t l = 0; l <= k; ++l) partial = partial.with_layer(res.fields.layers()[l]);
      write_snapshot_csv((dir / "snapshots" / name).string(), partial, t, cfg.scenario.omega_lo,
                         cfg.scenario.omega_hi, cfg.snapshot.resolution);
    }
  }
  json report = {{"final", to_json(res.final_pass)},
                 {"iterations", res.trace.size()},
                 {"failed", res.failed},
                 {"failure", res.failure}};
  if (!res.trace.empty()) {
    report["subsolution"] = to_json(res.trace.back().subsolution);
    report["weak_residual"] = to_json(weak_residual(res.fields, test_battery(), 0, 1e-10,
                                                    cfg.scenario.threads));
    json secs = json::array();
    for (const auto& s : res.trace) secs.push_back(s.seconds);
    report["step_seconds"] = secs;
    if (single_step) report["step"] = to_json(res.trace.front(), true);
  }
  write_json((dir / (single_step ? "step.json" : "report.json")).string(), report);
  if (cfg.plots) write_plots_for_trace(cfg, res, dir);

  json summary = {{"output_dir", dir.string()},
                  {"initial_I", res.initial.I},
                  {"final_I", res.final_pass.I},
                  {"final_deficit", res.final_pass.deficit},
                  {"iterations", res.trace.size()},
                  {"failed", res.failed}};
  std::cout << summary.dump() << "\n";
  if (res.failed) {
    std::cerr << "step failed: " << res.failure << "\n";
    return kStepFailure;
  }
  return kOk;
}

int cmd_toy(int steps, long n0, long min_points, const Globals& g) {
  if (steps < 0 || n0 < 1 || min_points < 1) throw InvalidArgument("toy flags out of range");
  const fs::path dir(g.out.empty() ? (std::getenv("WILDEULER_OUTPUT_DIR")
                                          ? std::getenv("WILDEULER_OUTPUT_DIR")
                                          : "wildeuler-toy")
                                    : g.out);
  ensure_dir(dir);
  ToyQuadrature quad;
  quad.min_points = min_points;
  const ToyTrace tr = iterate_toy(ToyPair(), doubling_schedule(n0, steps), 0.0, quad);
  json doc = to_json(tr);
  doc["seed"] = g.seed >= 0 ? g.seed : 0;
  doc["n0"] = n0;
  doc["beta_first_step"] = 1.0 / 16.0;
  write_json((dir / "trace.json").string(), doc);
  if (!g.no_plots) {
    ensure_dir(dir / "plots");
    std::vector<Series> series;
    const int np = 1024;
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
      if (k > tr.steps.size()) continue;
      ToyPair p;
      for (std::size_t l = 0; l < k; ++l) p = p.with_term(tr.final_pair.frequencies()[l]);
      Series u{"u after " + std::to_string(k), {}, {}};
      Series s{"|u|+|v| after " + std::to_string(k), {}, {}};
      for (int i = 0; i < np; ++i) {
        const double x = (i + 0.5) / np;
        u.x.push_back(x);
        u.y.push_back(p.u(x));
        s.x.push_back(x);
        s.y.push_back(std::abs(p.u(x)) + std::abs(p.v(x)));
      }
      series.push_back(u);
      series.push_back(s);
    }
    write_text((dir / "plots" / "toy_profiles.svg").string(),
               svg_line_plot("Toy iterates", "x", "value", series));
    Series I{"I", {0.0}, {tr.initial.I}};
    for (const auto& s : tr.steps) {
      I.x.push_back(s.step + 1);
      I.y.push_back(s.I_after);
    }
    write_text((dir / "plots" / "toy_I.svg").string(),
               svg_line_plot("Toy functional", "step", "I", {I}));
  }
  json summary = {{"output_dir", dir.string()},
                  {"initial_I", tr.initial.I},
                  {"final_I", tr.final_pass.I},
                  {"final_abs_I", std::abs(tr.final_pass.I)},
                  {"steps", tr.steps.size()}};
  std::cout << summary.dump() << "\n";
  return kOk;
}

int cmd_verify(const std::string& config, const Globals& g) {
  const RunConfig cfg = resolve_config(config, g);
  const fs::path dir(cfg.output_dir);
  ensure_dir(dir);
  const auto suites = run_verify_suites(cfg);
  json out = json::array();
  bool all = true;
  for (const auto& s : suites) {
    out.push_back({{"suite", s.name}, {"pass", s.pass}, {"measured", s.measured}});
    all = all && s.pass;
    std::cout << (s.pass ? "PASS " : "FAIL ") << s.name << "\n";
  }
  write_json((dir / "verify.json").string(), {{"pass", all}, {"suites", out}});
  return all ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex-integration engine for wild solutions of isentropic Euler"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads for parallel sections")->capture_default_str();
  app.add_flag("--no-plots", g.no_plots, "Skip SVG output");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--out", g.out, "Output directory");

  double rho = 1.0, Q = 0.0, gamma = 2.0;
  std::string m = "0,0", M = "0,0,0", rule = "hull";
  auto add_state = [&](CLI::App* c) {
    c->add_option("--rho", rho, "Density")->required();
    c->add_option("--m", m, "Momentum, comma separated")->required();
    c->add_option("--M", M, "Upper triangle of M, comma separated")->required();
    c->add_option("--Q", Q, "Generalized pressure")->required();
    c->add_option("--gamma", gamma, "Pressure exponent")->capture_default_str();
  };
  CLI::App* hull = app.add_subcommand("hull", "Evaluate F, in_K and in_hull for a state");
  add_state(hull);
  CLI::App* segment = app.add_subcommand("segment", "Build an oscillation segment through a state");
  add_state(segment);
  segment->add_option("--radius", rule, "Slice radius rule: hull or grid")->capture_default_str();

  std::string config;
  CLI::App* step = app.add_subcommand("step", "One perturbation step on the configured scenario");
  step->add_option("--config", config, "JSON run configuration");
  CLI::App* iter = app.add_subcommand("iterate", "Iterate perturbation steps");
  iter->add_option("--config", config, "JSON run configuration");
  int steps = 20;
  long n0 = 8, min_points = 1L << 16;
  CLI::App* toy = app.add_subcommand("toy", "Iterate the |u|+|v|=1 model problem");
  toy->add_option("--steps", steps, "Number of perturbations")->capture_default_str();
  toy->add_option("--n0", n0, "First integer frequency (k = 2 pi n)")->capture_default_str();
  toy->add_option("--min-points", min_points, "Minimum quadrature points")->capture_default_str();
  CLI::App* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--config", config, "JSON run configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (g.threads < 1) throw InvalidArgument("--threads must be positive");
    if (*hull) return cmd_hull(rho, m, M, Q, gamma);
    if (*segment) return cmd_segment(rho, m, M, Q, gamma, rule, g);
    if (*step) return cmd_iterate(config, g, true);
    if (*iter) return cmd_iterate(config, g, false);
    if (*toy) return cmd_toy(steps, n0, min_points, g);
    if (*verify) return cmd_verify(config, g);
  } catch (const StepFailed& e) {
    std::cerr << "step failed: " << e.what() << "\n";
    return kStepFailure;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const NotStrict& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const NotStrictSubsolution& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const InfeasibleDecomposition& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPropertyFailure;
  }
  return kInvalid;
}

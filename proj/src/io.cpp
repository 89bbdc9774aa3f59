#include "wildeuler/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "wildeuler/errors.hpp"

namespace wildeuler {

using nlohmann::json;

namespace {

// Reads keys of one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw InvalidArgument(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw InvalidArgument(where(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InvalidArgument(where(key) + ": must be finite");
    return x;
  }

  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) throw InvalidArgument(where(key) + ": expected an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw InvalidArgument(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw InvalidArgument(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_array()) throw InvalidArgument(where(key) + ": expected an array");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw InvalidArgument(where(key) + ": expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_array()) throw InvalidArgument(where(key) + ": expected an array");
    std::vector<int> out;
    for (const json& e : v) {
      if (!e.is_number_integer()) throw InvalidArgument(where(key) + ": expected integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  const json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw InvalidArgument("unknown key " + where(it.key()));
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Eigen::Index>(k)) = v[k];
  return out;
}

std::vector<double> from_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::MatrixXd parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw InvalidArgument(where + ": expected a 2x2 array");
  Eigen::MatrixXd M(2, 2);
  for (int r = 0; r < 2; ++r) {
    const json& row = v.at(static_cast<std::size_t>(r));
    if (!row.is_array() || row.size() != 2) {
      throw InvalidArgument(where + ": expected a 2x2 array");
    }
    for (int c = 0; c < 2; ++c) {
      const json& e = row.at(static_cast<std::size_t>(c));
      if (!e.is_number()) throw InvalidArgument(where + ": expected numbers");
      M(r, c) = e.get<double>();
    }
  }
  return M;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  Scenario& sc = cfg.scenario;
  Section root(doc, "config");
  if (const json* s = root.child("scenario")) {
    Section sec(*s, "scenario");
    sc.period = sec.number("period", sc.period);
    sc.omega_lo = to_vector(sec.numbers("omega_lo", from_vector(sc.omega_lo)));
    sc.omega_hi = to_vector(sec.numbers("omega_hi", from_vector(sc.omega_hi)));
    sc.T = sec.number("T", sc.T);
    sc.epsilon = sec.number("epsilon", sc.epsilon);
    sc.gamma = sec.number("gamma", sc.gamma);
    sc.rho0 = sec.number("rho0", sc.rho0);
    sc.m0 = to_vector(sec.numbers("m0", from_vector(sc.m0)));
    if (const json* M = sec.child("M0")) sc.M0 = parse_matrix(*M, sec.where("M0"));
    sc.Q = sec.number("Q", sc.Q);
    sc.rho_floor = sec.number("rho_floor", sc.rho_floor);
    sc.delta = sec.number("delta", sc.delta);
    sec.finish();
  }
  if (const json* g = root.child("grid")) {
    Section sec(*g, "grid");
    if (sec.has("h")) {
      const double h = sec.number("h", 0.0);
      if (!(h > 0.0) || !(h < 0.5 * sc.epsilon)) {
        throw InvalidArgument("grid.h must satisfy 0 < h < epsilon/2");
      }
      sc.h0 = h;
    }
    sc.max_h_halvings = static_cast<int>(sec.integer("max_halvings", sc.max_h_halvings));
    sc.min_plateau_fraction = sec.number("min_plateau_fraction", sc.min_plateau_fraction);
    sc.continuity_samples =
        static_cast<int>(sec.integer("continuity_samples", sc.continuity_samples));
    sc.max_shrinks = static_cast<int>(sec.integer("max_shrinks", sc.max_shrinks));
    sec.finish();
  }
  if (const json* f = root.child("frequency")) {
    Section sec(*f, "frequency");
    sc.j0 = static_cast<int>(sec.integer("j0", sc.j0));
    sc.j_cap = static_cast<int>(sec.integer("j_cap", sc.j_cap));
    sc.profile_eps0 = sec.number("profile_eps0", sc.profile_eps0);
    sec.finish();
  }
  if (const json* it = root.child("iteration")) {
    Section sec(*it, "iteration");
    sc.iterations = static_cast<int>(sec.integer("iterations", sc.iterations));
    sc.alpha_fraction = sec.number("alpha_fraction", sc.alpha_fraction);
    sc.alpha_schedule = sec.numbers("alpha_schedule", sc.alpha_schedule);
    sc.stop_tolerance = sec.number("stop_tolerance", sc.stop_tolerance);
    sc.time_budget = sec.number("time_budget", sc.time_budget);
    if (sc.time_budget < 0.0) throw InvalidArgument("iteration.time_budget must be >= 0");
    sec.finish();
  }
  if (const json* q = root.child("quadrature")) {
    Section sec(*q, "quadrature");
    sc.quad.time_samples = static_cast<int>(sec.integer("time_samples", sc.quad.time_samples));
    sc.quad.per_unit = static_cast<int>(sec.integer("per_unit", sc.quad.per_unit));
    sc.quad.min_per_unit = static_cast<int>(sec.integer("min_per_unit", sc.quad.min_per_unit));
    sc.quad.outer_time_samples =
        static_cast<int>(sec.integer("outer_time_samples", sc.quad.outer_time_samples));
    sec.finish();
    if (sc.quad.per_unit < 0 || sc.quad.min_per_unit < 1 || sc.quad.outer_time_samples < 0) {
      throw InvalidArgument("quadrature sizes must be nonnegative");
    }
  }
  if (const json* s = root.child("segment")) {
    Section sec(*s, "segment");
    const std::string rule = sec.string("radius_rule", "hull");
    if (rule == "hull") {
      sc.segment.radius_rule = RadiusRule::Hull;
    } else if (rule == "grid") {
      sc.segment.radius_rule = RadiusRule::Grid;
    } else {
      throw InvalidArgument("segment.radius_rule must be \"hull\" or \"grid\"");
    }
    sc.segment.antipodal_eta = sec.number("antipodal_eta", sc.segment.antipodal_eta);
    sc.segment.decomposition.delta =
        sec.number("decomposition_delta", sc.segment.decomposition.delta);
    sec.finish();
  }
  if (const json* o = root.child("output")) {
    Section sec(*o, "output");
    cfg.output_dir = sec.string("dir", cfg.output_dir);
    cfg.plots = sec.boolean("plots", cfg.plots);
    cfg.snapshot.resolution =
        static_cast<int>(sec.integer("snapshot_resolution", cfg.snapshot.resolution));
    cfg.snapshot.t = sec.number("snapshot_time", cfg.snapshot.t);
    sec.finish();
    if (cfg.snapshot.resolution < 1) throw InvalidArgument("output.snapshot_resolution must be positive");
    if (!(cfg.snapshot.t >= 0.0 && cfg.snapshot.t <= 1.0)) {
      throw InvalidArgument("output.snapshot_time is a fraction of T in [0, 1]");
    }
  }
  if (const json* t = root.child("toy")) {
    Section sec(*t, "toy");
    cfg.toy.steps = static_cast<int>(sec.integer("steps", cfg.toy.steps));
    cfg.toy.n0 = sec.integer("n0", cfg.toy.n0);
    cfg.toy.min_points = sec.integer("min_points", cfg.toy.min_points);
    cfg.toy.points_per_period = sec.integer("points_per_period", cfg.toy.points_per_period);
    cfg.toy.stop_tolerance = sec.number("stop_tolerance", cfg.toy.stop_tolerance);
    sec.finish();
    if (cfg.toy.steps < 0 || cfg.toy.n0 < 1 || cfg.toy.min_points < 1 ||
        cfg.toy.points_per_period < 3) {
      throw InvalidArgument("toy settings out of range");
    }
  }
  if (const json* v = root.child("verify")) {
    Section sec(*v, "verify");
    cfg.verify.samples = static_cast<int>(sec.integer("samples", cfg.verify.samples));
    cfg.verify.localization_frequencies =
        sec.integers("localization_frequencies", cfg.verify.localization_frequencies);
    cfg.verify.young_frequencies = sec.integers("young_frequencies", cfg.verify.young_frequencies);
    cfg.verify.region_h = sec.number("region_h", cfg.verify.region_h);
    sec.finish();
    if (cfg.verify.samples < 1 || cfg.verify.localization_frequencies.size() < 2 ||
        cfg.verify.young_frequencies.empty() || !(cfg.verify.region_h > 0.0)) {
      throw InvalidArgument("verify settings out of range");
    }
  }
  sc.seed = static_cast<std::uint64_t>(root.integer("seed", static_cast<long>(sc.seed)));
  sc.threads = static_cast<int>(root.integer("threads", sc.threads));
  root.finish();
  if (!(sc.gamma > 1.0)) throw InvalidArgument("scenario.gamma must exceed 1");
  sc.validate();
  const double p = PressureLaw(sc.gamma).pressure(sc.rho0);
  if (!(sc.Q > p)) throw InvalidArgument("scenario.Q must exceed p(rho0)");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidArgument("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

json config_to_json(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  json M = json::array({json::array({sc.M0(0, 0), sc.M0(0, 1)}),
                        json::array({sc.M0(1, 0), sc.M0(1, 1)})});
  return {
      {"scenario",
       {{"period", sc.period},
        {"omega_lo", from_vector(sc.omega_lo)},
        {"omega_hi", from_vector(sc.omega_hi)},
        {"T", sc.T},
        {"epsilon", sc.epsilon},
        {"gamma", sc.gamma},
        {"rho0", sc.rho0},
        {"m0", from_vector(sc.m0)},
        {"M0", M},
        {"Q", sc.Q},
        {"rho_floor", sc.rho_floor},
        {"delta", sc.delta}}},
      {"grid",
       {{"h", sc.h0 > 0.0 ? json(sc.h0) : json(nullptr)},
        {"max_halvings", sc.max_h_halvings},
        {"min_plateau_fraction", sc.min_plateau_fraction},
        {"continuity_samples", sc.continuity_samples},
        {"max_shrinks", sc.max_shrinks}}},
      {"frequency", {{"j0", sc.j0}, {"j_cap", sc.j_cap}, {"profile_eps0", sc.profile_eps0}}},
      {"iteration",
       {{"iterations", sc.iterations},
        {"alpha_fraction", sc.alpha_fraction},
        {"alpha_schedule", sc.alpha_schedule},
        {"stop_tolerance", sc.stop_tolerance},
        {"time_budget", sc.time_budget}}},
      {"quadrature",
       {{"time_samples", sc.quad.time_samples},
        {"per_unit", sc.quad.per_unit},
        {"min_per_unit", sc.quad.min_per_unit},
        {"outer_time_samples", sc.quad.outer_time_samples}}},
      {"segment",
       {{"radius_rule", sc.segment.radius_rule == RadiusRule::Hull ? "hull" : "grid"},
        {"antipodal_eta", sc.segment.antipodal_eta},
        {"decomposition_delta", sc.segment.decomposition.delta}}},
      {"output",
       {{"dir", cfg.output_dir},
        {"plots", cfg.plots},
        {"snapshot_resolution", cfg.snapshot.resolution},
        {"snapshot_time", cfg.snapshot.t}}},
      {"toy",
       {{"steps", cfg.toy.steps},
        {"n0", cfg.toy.n0},
        {"min_points", cfg.toy.min_points},
        {"points_per_period", cfg.toy.points_per_period},
        {"stop_tolerance", cfg.toy.stop_tolerance}}},
      {"verify",
       {{"samples", cfg.verify.samples},
        {"localization_frequencies", cfg.verify.localization_frequencies},
        {"young_frequencies", cfg.verify.young_frequencies},
        {"region_h", cfg.verify.region_h}}},
      {"seed", sc.seed},
      {"threads", sc.threads},
  };
}

json to_json(const FunctionalReport& r, bool with_series) {
  json j = {{"I", r.I},
            {"t_min", r.t_min},
            {"deficit", r.deficit},
            {"margin_hull", r.margin_hull},
            {"margin_kinetic", r.margin_kinetic},
            {"per_unit", r.per_unit},
            {"samples", r.samples},
            {"time_samples", r.times.size()}};
  if (with_series) {
    j["times"] = r.times;
    j["integrals"] = r.integrals;
  }
  return j;
}

json to_json(const SubsolutionReport& r) {
  return {{"margin_hull", r.margin_hull}, {"margin_kinetic", r.margin_kinetic},
          {"delta", r.delta},             {"hull_ok", r.hull_ok},
          {"kinetic_ok", r.kinetic_ok},   {"verdict", r.verdict},
          {"samples", r.samples}};
}

json to_json(const WeakResidualReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"name", row.name},
                    {"coarse", row.coarse},
                    {"fine", row.fine},
                    {"tolerance", row.tolerance},
                    {"pass", row.pass}});
  }
  return {{"battery", test_battery_version()},
          {"per_unit", r.per_unit},
          {"max_fine", r.max_fine},
          {"max_tolerance", r.max_tolerance},
          {"pass", r.pass},
          {"rows", rows}};
}

json to_json(const StepReport& r, bool with_cells) {
  json attempts = json::array();
  for (const auto& a : r.attempts) {
    attempts.push_back(
        {{"j", a.j}, {"gain", a.aborted ? json(nullptr) : json(a.gain)},
         {"margin", a.aborted ? json(nullptr) : json(a.margin)}, {"aborted", a.aborted},
         {"accepted", a.accepted}});
  }
  int bound_ok = 0;
  int with_wave = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& c : r.cells) {
    if (c.bound_ok) ++bound_ok;
    if (c.has_wave) ++with_wave;
    if (c.floor > 0.0) min_ratio = std::min(min_ratio, c.amplitude / c.floor);
  }
  json j = {{"index", r.index},
            {"alpha", r.alpha},
            {"h", r.h},
            {"halvings", r.halvings},
            {"plateau_fraction", r.plateau_fraction},
            {"frequency", r.frequency},
            {"attempts", attempts},
            {"I_before", r.I_before},
            {"I_after", r.I_after},
            {"gain", r.gain},
            {"predicted", r.predicted},
            {"A", r.A},
            {"C_prime", r.C_prime},
            {"beta", r.beta},
            {"deficit_before", r.deficit_before},
            {"deficit_after", r.deficit_after},
            {"subsolution", to_json(r.subsolution)},
            {"cells", r.cells.size()},
            {"cells_with_wave", with_wave},
            {"cells_bound_ok", bound_ok},
            {"min_amplitude_over_floor", std::isfinite(min_ratio) ? json(min_ratio) : json()},
            {"shrunk_cells", r.shrunk_cells},
            {"waves", r.waves},
            {"per_unit", r.per_unit},
            {"samples", r.samples}};
  if (with_cells) {
    json cells = json::array();
    for (const auto& c : r.cells) {
      cells.push_back({{"cell", c.cell},     {"t", c.t},
                       {"x1", c.x1},         {"x2", c.x2},
                       {"r", c.r},           {"m_norm", c.m_norm},
                       {"amplitude", c.amplitude}, {"floor", c.floor},
                       {"bound_ok", c.bound_ok},   {"shrink", c.shrink},
                       {"has_wave", c.has_wave},   {"note", c.note}});
    }
    j["cell_reports"] = cells;
  }
  return j;
}

json to_json(const ToyTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"step", s.step},
                     {"n", s.n},
                     {"I_before", s.I_before},
                     {"I_after", s.I_after},
                     {"gain", s.gain},
                     {"floor", s.floor},
                     {"gain_over_floor", s.floor > 0.0 ? json(s.gain / s.floor) : json()},
                     {"max_sum", s.max_sum},
                     {"points", s.points}});
  }
  return {{"initial_I", t.initial.I},
          {"final_I", t.final_pass.I},
          {"final_abs_I", std::abs(t.final_pass.I)},
          {"final_distance_sq", t.final_pass.distance_sq},
          {"final_max_sum", t.final_pass.max_sum},
          {"steps", steps}};
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << doc.dump(2) << "\n";
}

void write_snapshot_csv(const std::string& path, const FieldEnsemble& fields, double t,
                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int resolution) {
  if (fields.dim() != 2) throw InvalidArgument("snapshots are written for d = 2");
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << "t,x1,x2,rho,m1,m2,M11,M12,Q\n";
  char buf[512];
  const double dx = (hi(0) - lo(0)) / resolution;
  const double dy = (hi(1) - lo(1)) / resolution;
  for (int i = 0; i < resolution; ++i) {
    const double x1 = lo(0) + (i + 0.5) * dx;
    for (int k = 0; k < resolution; ++k) {
      const double x2 = lo(1) + (k + 0.5) * dy;
      const State2 z = fields.evaluate2(t, x1, x2);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    t, x1, x2, z.rho, z.m1, z.m2, z.M11, z.M12, z.Q);
      out << buf;
    }
  }
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series) {
  const double W = 640, H = 420, L = 70, R = 20, Tm = 40, B = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  }
  if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  if (xmax == xmin) { xmin -= 0.5; xmax += 0.5; }
  if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - Tm - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\""
     << H - Tm - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + k * (xmax - xmin) / 4;
    const double yv = ymin + k * (ymax - ymin) / 4;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
       << fmt(xv) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
       << fmt(yv) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
     << escape(xlabel) << "</text>\n";
  os << "<text x=\"16\" y=\"" << (Tm + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (Tm + H - B) / 2 << ")\">" << escape(ylabel) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* col = colors[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    const std::size_t n = std::min(series[s].x.size(), series[s].y.size());
    for (std::size_t k = 0; k < n; ++k) {
      os << px(series[s].x[k]) << "," << py(series[s].y[k]) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 8 << "\" y=\"" << Tm + 16 + 14 * s << "\" text-anchor=\"end\" fill=\""
       << col << "\">" << escape(series[s].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_heatmap(const std::string& title, const std::vector<double>& values, int nx,
                        int ny) {
  const double W = 520, H = 560, L = 20, Tm = 40, S = 480;
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (double v : values) { vmin = std::min(vmin, v); vmax = std::max(vmax, v); }
  if (!(vmax > vmin)) vmax = vmin + 1.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";
  const double cw = S / nx, ch = S / ny;
  for (int i = 0; i < nx; ++i) {
    for (int k = 0; k < ny; ++k) {
      const double v = values[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) +
                              static_cast<std::size_t>(k)];
      const double u = (v - vmin) / (vmax - vmin);
      const int r = static_cast<int>(255 * u);
      const int b = static_cast<int>(255 * (1 - u));
      os << "<rect x=\"" << L + i * cw << "\" y=\"" << Tm + (ny - 1 - k) * ch << "\" width=\""
         << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\"rgb(" << r << ",64," << b
         << ")\"/>\n";
    }
  }
  os << "<text x=\"" << L << "\" y=\"" << Tm + S + 20 << "\">min " << fmt(vmin) << "  max "
     << fmt(vmax) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

}  // namespace wildeuler

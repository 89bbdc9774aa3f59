#pragma once

// JSON run configuration, report serialization, CSV snapshots and SVG plots.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wildeuler/engine.hpp"
#include "wildeuler/functionals.hpp"
#include "wildeuler/toy_model.hpp"

namespace wildeuler {

struct SnapshotSpec {
  int resolution = 64;  // points per axis over Omega_0
  double t = 0.5;       // fraction of T
};

struct ToyConfig {
  int steps = 20;
  long n0 = 8;
  long min_points = 1L << 16;
  long points_per_period = 8;
  double stop_tolerance = 0.0;
};

struct VerifyConfig {
  int samples = 1000;
  std::vector<int> localization_frequencies{8, 16, 32, 64};
  std::vector<int> young_frequencies{8, 16, 32, 64};
  double region_h = 1.0 / 32.0;
};

struct RunConfig {
  Scenario scenario;
  std::string output_dir = "wildeuler-out";
  bool plots = true;
  SnapshotSpec snapshot;
  ToyConfig toy;
  VerifyConfig verify;
};

/// Parses a configuration document; unknown keys, wrong types and values
/// violating the scenario invariants raise InvalidArgument.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
/// The configuration with every default filled in.
nlohmann::json config_to_json(const RunConfig& cfg);

nlohmann::json to_json(const FunctionalReport& r, bool with_series = false);
nlohmann::json to_json(const SubsolutionReport& r);
nlohmann::json to_json(const WeakResidualReport& r);
/// Step report without wall-clock fields, so traces compare bitwise.
nlohmann::json to_json(const StepReport& r, bool with_cells = false);
nlohmann::json to_json(const ToyTrace& t);

void write_json(const std::string& path, const nlohmann::json& doc);

/// CSV with header t,x1,x2,rho,m1,m2,M11,M12,Q on the midpoint lattice of
/// Omega_0, x1 index outer and x2 index inner.
void write_snapshot_csv(const std::string& path, const FieldEnsemble& fields, double t,
                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int resolution);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart.
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series);
/// Standalone SVG heatmap of values[i * ny + k] over a nx x ny lattice.
std::string svg_heatmap(const std::string& title, const std::vector<double>& values, int nx,
                        int ny);
void write_text(const std::string& path, const std::string& text);

}  // namespace wildeuler

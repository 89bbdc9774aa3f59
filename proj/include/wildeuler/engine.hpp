#pragma once

// Perturbation step and iteration driver at fixed density.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wildeuler/convex_geometry.hpp"
#include "wildeuler/euler_state.hpp"
#include "wildeuler/fields.hpp"
#include "wildeuler/functionals.hpp"
#include "wildeuler/grid.hpp"

namespace wildeuler {

struct Scenario {
  int d = 2;
  double period = 1.0;
  Eigen::VectorXd omega_lo = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd omega_hi = Eigen::VectorXd::Ones(2);
  double T = 1.0;
  double epsilon = 0.1;
  double gamma = 2.0;
  /// Constant base subsolution; base_function overrides it when set.
  double rho0 = 1.0;
  Eigen::VectorXd m0 = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd M0 = Eigen::MatrixXd::Zero(2, 2);
  double Q = 2.0;
  BaseFields::Function base_function;
  /// Lower density bound rho_bar; any positive value is allowed.
  double rho_floor = 1e-6;
  double delta = 1e-3;
  std::uint64_t seed = 0;

  /// Target alpha per step; empty means alpha_k = alpha_fraction |I_k|.
  std::vector<double> alpha_schedule;
  double alpha_fraction = 0.9;
  int iterations = 6;
  double stop_tolerance = 1e-9;
  /// Wall-clock budget in seconds for iterate(); 0 means unlimited. When it
  /// runs out the iteration ends as a step failure with the trace so far.
  double time_budget = 0.0;

  /// Initial grid size (0: eps/2) and number of halvings allowed.
  double h0 = 0.0;
  int max_h_halvings = 3;
  /// Functional control: min over t of the plateau-covered fraction of Omega_0.
  double min_plateau_fraction = 0.05;
  /// Continuity control: random samples per cell besides centre and corners,
  /// and how often a segment may be halved before h is.
  int continuity_samples = 16;
  int max_shrinks = 4;

  int j0 = 8;
  int j_cap = 16384;
  double profile_eps0 = 1.0 / 32.0;

  QuadratureSpec quad;
  SegmentOptions segment;
  int threads = 1;

  void validate() const;
  PressureLaw law() const;
  BaseFields base() const;
  GridSpec grid(double h) const;
  FunctionalDomain domain() const;
  double initial_h() const;
};

struct CellReport {
  long cell = 0;
  double t = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double r = 0.0;
  double m_norm = 0.0;
  double amplitude = 0.0;  // |m_bar| of the built segment
  double floor = 0.0;      // (r^2 - |m|^2) / (4 r N)
  bool bound_ok = false;
  double shrink = 1.0;     // factor applied by the continuity control
  bool has_wave = false;
  std::string note;
};

struct FrequencyAttempt {
  int j = 0;
  double gain = 0.0;
  double margin = 0.0;
  bool aborted = false;  // pass stopped at the first slice below delta
  bool accepted = false;
};

struct StepReport {
  int index = 0;
  double alpha = 0.0;
  double h = 0.0;
  int halvings = 0;
  double plateau_fraction = 0.0;  // measured grid constant c
  int frequency = 0;
  std::vector<FrequencyAttempt> attempts;
  double I_before = 0.0;
  double I_after = 0.0;
  double gain = 0.0;
  double predicted = 0.0;  // min_t sum_cells int phi^2 |m_bar|^2 <h^2> / (d rho)
  double A = 0.0;          // max Q over the slab
  double C_prime = 0.0;    // gain A |Omega_0| / alpha^2
  double beta = 0.0;       // C' alpha^2 / (A |Omega_0|) with C' from the prediction
  double deficit_before = 0.0;
  double deficit_after = 0.0;
  SubsolutionReport subsolution;
  std::vector<CellReport> cells;
  int waves = 0;
  int shrunk_cells = 0;
  int per_unit = 0;
  long samples = 0;
  double seconds = 0.0;
};

struct StepResult {
  FieldEnsemble fields;
  StepReport report;
  FunctionalReport pass;
};

/// One perturbation step: grid, segments, waves at a common frequency.
/// Throws NotStrictSubsolution if the input fails the verdict and StepFailed if
/// no grid size or frequency up to the cap satisfies the controls.
StepResult perturbation_step(const FieldEnsemble& fields, const Scenario& scenario, double alpha,
                             int index = 0);
/// Same, with the functional pass of the input already computed.
StepResult perturbation_step(const FieldEnsemble& fields, const Scenario& scenario, double alpha,
                             const FunctionalReport& before, int index = 0);

struct IterationResult {
  std::vector<StepReport> trace;
  FieldEnsemble fields;
  FunctionalReport initial;
  FunctionalReport final_pass;
  bool failed = false;
  std::string failure;
};

IterationResult iterate(const Scenario& scenario);
/// Continues from given fields.
IterationResult iterate(const Scenario& scenario, const FieldEnsemble& start);

/// Constant (rho_bar, 0, 0, Q_bar). Throws NotStrict if Q_bar <= p(rho_bar).
BaseFields default_subsolution(double rho_bar, double Q_bar, const PressureLaw& law);

/// All distinct cell boundary times of the ensemble's layers.
std::vector<double> cell_boundary_times(const FieldEnsemble& fields);

}  // namespace wildeuler

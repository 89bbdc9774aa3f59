#pragma once

// Deficiency functional, solution deficit, subsolution margins and weak-form
// residuals of sampled fields.

#include <array>
#include <chrono>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wildeuler/euler_state.hpp"
#include "wildeuler/fields.hpp"

namespace wildeuler {

/// Space-time slab [eps, T - eps] x Omega_0 over which I is taken.
struct FunctionalDomain {
  double epsilon = 0.1;
  double T = 1.0;
  Eigen::VectorXd omega_lo;
  Eigen::VectorXd omega_hi;

  void validate() const;
  double omega_volume() const;
  static FunctionalDomain unit(int d, double epsilon, double T);
};

/// Composite midpoint rule. Times: time_samples midpoints of [eps, T - eps]
/// plus extra_times (cell boundaries) inside it. Space: per_unit points per
/// unit length, or 8 x the highest frequency when per_unit is 0.
struct QuadratureSpec {
  int time_samples = 64;
  std::vector<double> extra_times;
  int per_unit = 0;
  int min_per_unit = 64;
  /// Samples in [0, eps) and (T - eps, T] used only for the margins.
  int outer_time_samples = 8;
  int threads = 1;
  /// Stop the pass once a time slice has hull margin below this value; the
  /// report is then marked aborted and carries no values. Disabled by default.
  double abort_margin = -std::numeric_limits<double>::infinity();
  /// Passes still running at this instant stop the same way.
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();

  /// Spatial points per unit length for fields whose finest frequency is j.
  /// Throws QuadratureUnderresolved if an explicit per_unit is below 8 j.
  int resolved_per_unit(int j) const;
};

/// One pass over the quadrature lattice.
struct FunctionalReport {
  double I = 0.0;
  double t_min = 0.0;  // sampled time attaining the infimum
  double deficit = 0.0;
  /// min Q - p - (2/d) e_kin and min (2/d) e_kin - |m|^2/(d rho) over all samples.
  double margin_hull = 0.0;
  double margin_kinetic = 0.0;
  std::vector<double> times;
  std::vector<double> integrals;  // int (p + |m|^2/(d rho) - Q) dx per time
  int per_unit = 0;
  long samples = 0;
  bool aborted = false;
  bool timed_out = false;
};

FunctionalReport evaluate_functionals(const FieldEnsemble& fields, const PressureLaw& law,
                                      const FunctionalDomain& domain, const QuadratureSpec& quad);

double I_functional(const FieldEnsemble& fields, const PressureLaw& law,
                    const FunctionalDomain& domain, const QuadratureSpec& quad);
double solution_deficit(const FieldEnsemble& fields, const PressureLaw& law,
                        const FunctionalDomain& domain, const QuadratureSpec& quad);

struct SubsolutionReport {
  double margin_hull = 0.0;
  double margin_kinetic = 0.0;
  double delta = 0.0;
  bool hull_ok = false;
  bool kinetic_ok = false;  // reported, not part of the verdict
  bool verdict = false;
  long samples = 0;
};

SubsolutionReport subsolution_report(const FunctionalReport& pass, double delta);
/// Strict membership at margin delta on the quadrature lattice of quad,
/// extended to [0, T].
SubsolutionReport subsolution_check(const FieldEnsemble& fields, const PressureLaw& law,
                                    double delta, const FunctionalDomain& domain,
                                    const QuadratureSpec& quad);

/// psi(t, x) = prod_k B((y_k - c_k) / w_k) * trig(2 pi (k . y) + phase), y = (t, x1, x2),
/// B(u) = exp(1 - 1/(1 - u^2)) on |u| < 1.
struct TestFunction {
  std::string name;
  std::array<double, 3> center{};
  std::array<double, 3> width{};
  std::array<double, 3> wavenumber{};
  double phase = 0.0;

  double value(double t, double x1, double x2) const;
  /// (d/dt, d/dx1, d/dx2).
  std::array<double, 3> gradient(double t, double x1, double x2) const;
};

/// The fixed, versioned battery of 24 test functions on [0,1]^3.
const std::vector<TestFunction>& test_battery();
const char* test_battery_version();

struct ResidualRow {
  std::string name;
  double coarse = 0.0;  // |R| at n/2 points per unit
  double fine = 0.0;    // |R| at n
  double tolerance = 0.0;
  bool pass = false;
};

struct WeakResidualReport {
  std::vector<ResidualRow> rows;
  int per_unit = 0;
  double max_fine = 0.0;
  double max_tolerance = 0.0;
  bool pass = false;
};

/// int int (rho, m ; m, M + Q I) : grad psi for every battery function, at n and 2n points
/// per unit. A row passes if |R_2n| <= max(2 |R_n - R_2n|, floor).
WeakResidualReport weak_residual(const FieldEnsemble& fields,
                                 const std::vector<TestFunction>& battery, int per_unit = 0,
                                 double floor = 1e-10, int threads = 1);
/// Residual of a generic pointwise field, used for negative controls.
WeakResidualReport weak_residual(const std::function<State2(double, double, double)>& fields,
                                 int max_frequency, const std::vector<TestFunction>& battery,
                                 int per_unit = 0, double floor = 1e-10, int threads = 1);

/// Pairwise sum, fixed reduction order.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace wildeuler

#pragma once

// State-space algebra of the relaxed isentropic Euler system: states
// z = (rho, m, M, Q) with M symmetric trace-free, the constitutive set K and
// the convex function F whose sublevel set {F <= 0} is the Lambda-convex hull.

#include <cmath>

#include <Eigen/Dense>

namespace wildeuler {

/// p(rho) = rho^gamma with gamma > 1.
class PressureLaw {
 public:
  explicit PressureLaw(double gamma);

  double gamma() const { return gamma_; }
  double pressure(double rho) const;
  /// P(rho) = rho * int_0^rho p(s)/s^2 ds = rho^gamma / (gamma - 1).
  double potential(double rho) const;

 private:
  double gamma_;
};

struct EulerState {
  double rho = 1.0;
  Eigen::VectorXd m;
  Eigen::MatrixXd M;
  double Q = 0.0;

  int dim() const { return static_cast<int>(m.size()); }

  /// Throws InvalidArgument unless rho > 0, d >= 2 and M is symmetric trace-free.
  void validate() const;

  /// Zero state of dimension d with the given density and generalized pressure.
  static EulerState zero(int d, double rho = 1.0, double Q = 0.0);
};

/// Dimension N = (1 + d/2)(d + 1) of the relaxed state space.
int state_space_dimension(int d);

/// m o m = m (x) m - |m|^2/d I.
Eigen::MatrixXd circ_product(const Eigen::VectorXd& m);

/// Largest eigenvalue of a symmetric matrix. Closed form for d = 2.
double lambda_max_symmetric(const Eigen::MatrixXd& A);

/// Default symmetry/trace tolerance 1e-12 (1 + |M|).
bool is_symmetric_trace_free(const Eigen::MatrixXd& M, double rel_tol = 1e-12);

/// e_kin(rho, m, M) = d/2 lambda_max(m (x) m / rho - M).
double e_kin(double rho, const Eigen::VectorXd& m, const Eigen::MatrixXd& M);
inline double e_kin(const EulerState& z) { return e_kin(z.rho, z.m, z.M); }

/// F(z) = p(rho) + 2/d e_kin(rho, m, M) - Q.
double hull_functional(const EulerState& z, const PressureLaw& law);

/// M = m o m / rho and Q = p(rho) + |m|^2/(d rho), both within tol.
bool in_K(const EulerState& z, const PressureLaw& law, double tol = 1e-9);

/// rho > 0 and F(z) <= tol.
bool in_hull(const EulerState& z, const PressureLaw& law, double tol = 1e-12);

/// The point of K with the given density and momentum.
EulerState k_point(double rho, const Eigen::VectorXd& m, const PressureLaw& law);

/// p(rho) + |m|^2/(d rho) - Q, the integrand of the deficiency functional.
double constraint_defect(const EulerState& z, const PressureLaw& law);

/// Closed-form e_kin for d = 2 with M = [[M11, M12], [M12, -M11]].
inline double e_kin_2d(double rho, double m1, double m2, double M11, double M12) {
  const double a = m1 * m1 / rho - M11;
  const double c = m2 * m2 / rho + M11;
  const double b = m1 * m2 / rho - M12;
  const double half_diff = 0.5 * (a - c);
  return 0.5 * (a + c) + std::sqrt(half_diff * half_diff + b * b);
}

}  // namespace wildeuler

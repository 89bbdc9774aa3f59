#include "wildeuler/euler_state.hpp"

#include <string>

#include "wildeuler/errors.hpp"

namespace wildeuler {

PressureLaw::PressureLaw(double gamma) : gamma_(gamma) {
  if (!(gamma > 1.0)) {
    throw InvalidArgument("pressure exponent gamma must exceed 1, got " + std::to_string(gamma));
  }
}

double PressureLaw::pressure(double rho) const { return std::pow(rho, gamma_); }

double PressureLaw::potential(double rho) const { return std::pow(rho, gamma_) / (gamma_ - 1.0); }

void EulerState::validate() const {
  if (!(rho > 0.0)) {
    throw InvalidArgument("density must be positive, got " + std::to_string(rho));
  }
  const auto d = m.size();
  if (d < 2) {
    throw InvalidArgument("space dimension must be at least 2");
  }
  if (M.rows() != d || M.cols() != d) {
    throw InvalidArgument("M must be a d x d matrix");
  }
  if (!is_symmetric_trace_free(M)) {
    throw InvalidArgument("M must be symmetric and trace-free");
  }
}

EulerState EulerState::zero(int d, double rho, double Q) {
  EulerState z;
  z.rho = rho;
  z.m = Eigen::VectorXd::Zero(d);
  z.M = Eigen::MatrixXd::Zero(d, d);
  z.Q = Q;
  return z;
}

int state_space_dimension(int d) { return (2 + d) * (d + 1) / 2; }

Eigen::MatrixXd circ_product(const Eigen::VectorXd& m) {
  const auto d = m.size();
  if (d < 2) {
    throw InvalidArgument("circ_product requires d >= 2");
  }
  Eigen::MatrixXd out = m * m.transpose();
  out.diagonal().array() -= m.squaredNorm() / static_cast<double>(d);
  return out;
}

double lambda_max_symmetric(const Eigen::MatrixXd& A) {
  if (A.rows() == 2) {
    const double a = A(0, 0);
    const double c = A(1, 1);
    const double b = 0.5 * (A(0, 1) + A(1, 0));
    const double half_diff = 0.5 * (a - c);
    return 0.5 * (a + c) + std::hypot(half_diff, b);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

bool is_symmetric_trace_free(const Eigen::MatrixXd& M, double rel_tol) {
  if (M.rows() != M.cols()) {
    return false;
  }
  const double tol = rel_tol * (1.0 + M.norm());
  return (M - M.transpose()).norm() <= tol && std::abs(M.trace()) <= tol;
}

double e_kin(double rho, const Eigen::VectorXd& m, const Eigen::MatrixXd& M) {
  if (!(rho > 0.0)) {
    throw InvalidArgument("e_kin: density must be positive");
  }
  if (M.rows() != m.size() || !is_symmetric_trace_free(M)) {
    throw InvalidArgument("e_kin: M must be a symmetric trace-free d x d matrix");
  }
  const double d = static_cast<double>(m.size());
  return 0.5 * d * lambda_max_symmetric(m * m.transpose() / rho - M);
}

double hull_functional(const EulerState& z, const PressureLaw& law) {
  const double d = static_cast<double>(z.dim());
  return law.pressure(z.rho) + 2.0 / d * e_kin(z) - z.Q;
}

bool in_K(const EulerState& z, const PressureLaw& law, double tol) {
  if (!(z.rho > 0.0)) {
    return false;
  }
  const double d = static_cast<double>(z.dim());
  const double m2 = z.m.squaredNorm();
  const bool flux_ok = (z.M - circ_product(z.m) / z.rho).norm() <= tol;
  const bool pressure_ok = std::abs(z.Q - law.pressure(z.rho) - m2 / (d * z.rho)) <= tol;
  return flux_ok && pressure_ok;
}

bool in_hull(const EulerState& z, const PressureLaw& law, double tol) {
  if (!(z.rho > 0.0)) {
    return false;
  }
  return hull_functional(z, law) <= tol;
}

EulerState k_point(double rho, const Eigen::VectorXd& m, const PressureLaw& law) {
  if (!(rho > 0.0)) {
    throw InvalidArgument("k_point: density must be positive");
  }
  EulerState z;
  z.rho = rho;
  z.m = m;
  z.M = circ_product(m) / rho;
  z.Q = law.pressure(rho) + m.squaredNorm() / (static_cast<double>(m.size()) * rho);
  return z;
}

double constraint_defect(const EulerState& z, const PressureLaw& law) {
  const double d = static_cast<double>(z.dim());
  return law.pressure(z.rho) + z.m.squaredNorm() / (d * z.rho) - z.Q;
}

}  // namespace wildeuler

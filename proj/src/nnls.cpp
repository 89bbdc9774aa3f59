#include "wildeuler/nnls.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace wildeuler {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::vector<int>& passive) {
  Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t k = 0; k < passive.size(); ++k) {
    Ap.col(static_cast<Eigen::Index>(k)) = A.col(passive[k]);
  }
  return Ap.colPivHouseholderQr().solve(b);
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations,
                double tol) {
  const Eigen::Index n = A.cols();
  if (max_iterations <= 0) {
    max_iterations = static_cast<int>(3 * n + 30);
  }
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.norm());

  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> in_passive(static_cast<std::size_t>(n), false);

  for (int outer = 0; outer < max_iterations; ++outer) {
    out.iterations = outer + 1;
    const Eigen::VectorXd w = A.transpose() * (b - A * out.x);

    Eigen::Index best = -1;
    double best_w = tol * scale;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!in_passive[static_cast<std::size_t>(i)] && w(i) > best_w) {
        best_w = w(i);
        best = i;
      }
    }
    if (best < 0) {
      out.converged = true;
      break;
    }
    in_passive[static_cast<std::size_t>(best)] = true;

    // Inner loop: move toward the unconstrained passive solution, dropping
    // variables that hit zero on the way.
    for (int inner = 0; inner < max_iterations; ++inner) {
      std::vector<int> passive;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (in_passive[static_cast<std::size_t>(i)]) {
          passive.push_back(static_cast<int>(i));
        }
      }
      const Eigen::VectorXd z = solve_passive(A, b, passive);

      bool feasible = true;
      for (Eigen::Index k = 0; k < z.size(); ++k) {
        if (z(k) <= 0.0) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        out.x.setZero();
        for (std::size_t k = 0; k < passive.size(); ++k) {
          out.x(passive[k]) = z(static_cast<Eigen::Index>(k));
        }
        break;
      }

      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const double zk = z(static_cast<Eigen::Index>(k));
        if (zk <= 0.0) {
          const double xk = out.x(passive[k]);
          alpha = std::min(alpha, xk / (xk - zk));
        }
      }
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const int i = passive[k];
        out.x(i) += alpha * (z(static_cast<Eigen::Index>(k)) - out.x(i));
        if (out.x(i) <= 1e-15) {
          out.x(i) = 0.0;
          in_passive[static_cast<std::size_t>(i)] = false;
        }
      }
    }
  }
  out.residual = (A * out.x - b).norm();
  return out;
}

}  // namespace wildeuler

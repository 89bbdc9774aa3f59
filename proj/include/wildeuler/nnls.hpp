#pragma once

#include <Eigen/Dense>

namespace wildeuler {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual = 0.0;  // |A x - b|_2
  int iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson active-set solver for min |A x - b| subject to x >= 0.
/// The returned passive set has linearly independent columns, so at most
/// rank(A) entries of x are nonzero.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations = 0,
                double tol = 1e-12);

}  // namespace wildeuler

#pragma once

// Constructive geometry of the slice hulls (L_{rho,r})^co: Caratheodory
// decompositions of interior points into sphere directions |m_i| = r, and
// admissible momentum-oscillation segments built from them.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "wildeuler/euler_state.hpp"

namespace wildeuler {

struct SliceParams {
  double rho = 1.0;
  double r = 1.0;
  int d = 2;

  void validate() const;
};

/// (m, M) = sum_i weights[i] * (directions[i], directions[i] o directions[i] / rho).
struct ConvexDecomposition {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> directions;

  std::size_t size() const { return weights.size(); }
  Eigen::VectorXd reconstruct_m() const;
  Eigen::MatrixXd reconstruct_M(double rho) const;
  /// |sum m - m| + |sum M - M|_F + |sum lambda - 1|.
  double residual(const SliceParams& params, const Eigen::VectorXd& m,
                  const Eigen::MatrixXd& M) const;
};

/// Ambient dimension D = d + d(d+1)/2 - 1 of the (m, M) slice.
int slice_dimension(int d);

struct DecompositionOptions {
  /// Strictness margin: requires e_kin <= (1 - delta) r^2 / (2 rho).
  double delta = 1e-3;
  /// Reconstruction tolerance, scaled by (1 + r^2 / rho).
  double tol = 1e-10;
  int initial_directions = 64;
  int max_directions = 1024;
};

/// Writes the interior point (m, M) of (L_{rho,r})^co as a convex combination
/// of at most D+1 points of L_{rho,r}. Nonnegative least squares over a
/// dictionary of sphere directions, refined by doubling, followed by
/// Caratheodory reduction and a Gauss-Newton polish of directions and weights.
ConvexDecomposition caratheodory_decompose(const SliceParams& params, const Eigen::VectorXd& m,
                                           const Eigen::MatrixXd& M,
                                           const DecompositionOptions& options = {});

/// Removes zero weights and eliminates affinely dependent points until at
/// most D+1 remain. Independent decompositions are returned unchanged.
ConvexDecomposition caratheodory_reduce(const ConvexDecomposition& dec, const SliceParams& params);

/// Rotates directions so that every pair satisfies |m_i + m_j| >= eta * r.
/// Deterministic in the seed.
ConvexDecomposition perturb_antipodal(const ConvexDecomposition& dec, const SliceParams& params,
                                      double eta, std::uint64_t seed, int max_attempts = 64);

/// How the slice radius r is chosen from a state.
enum class RadiusRule {
  /// Q = p(rho) + r^2 / (d rho): the radius at which {F < 0} is exactly the
  /// interior of the slice hull.
  Hull,
  /// r = sqrt(d rho Q), ignoring the pressure contribution.
  Grid,
};

double slice_radius(const EulerState& z, const PressureLaw& law, RadiusRule rule);

struct SegmentOptions {
  DecompositionOptions decomposition;
  RadiusRule radius_rule = RadiusRule::Hull;
  double antipodal_eta = 1e-3;
  std::uint64_t seed = 0;
};

/// sigma = [center - amplitude, center + amplitude] with amplitude
/// (0, m_bar, M_bar, 0) parallel to (0, a - b, (a (x) a - b (x) b)/rho, 0).
struct OscillationSegment {
  EulerState center;
  Eigen::VectorXd amplitude_m;
  Eigen::MatrixXd amplitude_M;
  /// a = m_j and b = m_1 of the decomposition; |a| = |b| = r.
  Eigen::VectorXd endpoint_a;
  Eigen::VectorXd endpoint_b;
  double r = 0.0;
  double lambda_max = 0.0;
  double lambda_j = 0.0;
  std::size_t points = 0;

  EulerState endpoint(double sign) const;
  /// (r^2 - |m|^2) / (4 r N), N = (1 + d/2)(d + 1).
  double amplitude_floor() const;
  /// The same segment with amplitude multiplied by s (0 < s <= 1).
  OscillationSegment scaled(double s) const;
};

OscillationSegment build_segment(const EulerState& z, const PressureLaw& law,
                                 const SegmentOptions& options = {});

/// Lifted moment coordinates used by the decomposition, exposed for tests:
/// (m / r, trace-free coordinates of M scaled by rho / r^2, 1).
Eigen::VectorXd lifted_moments(const SliceParams& params, const Eigen::VectorXd& m,
                               const Eigen::MatrixXd& M, double weight_row = 1.0);

}  // namespace wildeuler

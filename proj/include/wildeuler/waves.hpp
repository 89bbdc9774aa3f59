#pragma once

// Plane waves of the relaxed linear system and their localization.
//
// A momentum perturbation (0, m, M, 0) is stored as the space-time matrix
// V = [[M, m], [m^T, 0]] in coordinates y = (x_1, ..., x_d, t). The
// constant-density system is then div_y V = 0, and a plane wave V h(j y.xi)
// solves it iff V xi = 0.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wildeuler/convex_geometry.hpp"
#include "wildeuler/cutoff.hpp"
#include "wildeuler/euler_state.hpp"
#include "wildeuler/piecewise_poly.hpp"

namespace wildeuler {

/// Unit space-time direction ordered (xi_x, xi_t).
struct WaveDirection {
  Eigen::VectorXd xi;

  int dim() const { return static_cast<int>(xi.size()) - 1; }
  Eigen::VectorXd spatial() const { return xi.head(xi.size() - 1); }
  double temporal() const { return xi(xi.size() - 1); }
};

/// [[m, M + Q I], [rho, m^T]], columns ordered (t, x).
Eigen::MatrixXd wave_block_matrix(const EulerState& increment);

/// |det U| <= tol |z|^{d+1}, |z| the Euclidean norm of all components.
bool wave_cone_test(const EulerState& increment, double tol = 1e-10);

/// Unit kernel vector of the block matrix with the largest spatial part and
/// first nonzero component positive.
WaveDirection find_direction(const EulerState& increment);
WaveDirection find_direction(const OscillationSegment& seg);

/// Space-time amplitude [[M, m], [m^T, 0]].
Eigen::MatrixXd spacetime_amplitude(const Eigen::VectorXd& m, const Eigen::MatrixXd& M);

/// 1-periodic square wave h: -1 on [eps0, 1/2 - eps0], +1 on [1/2 + eps0, 1 - eps0],
/// joined by odd C^3 septic transitions. H_k are the mean-zero k-th antiderivatives.
class OscillationProfile {
 public:
  explicit OscillationProfile(double epsilon0);

  double epsilon0() const { return eps0_; }
  double h(double s) const { return eval(0, piece_of(s - fast_floor(s)), s - fast_floor(s)); }
  /// k = 0 gives h, k = 1..3 the antiderivatives H_k.
  double H(int k, double s) const {
    const double u = s - fast_floor(s);
    return eval(k, piece_of(u), u);
  }
  /// h, H_1, H_2, H_3 at s with one piece lookup.
  void all_levels(double s, double* out) const {
    const double u = s - fast_floor(s);
    const int p = piece_of(u);
    for (int k = 0; k < 4; ++k) out[k] = eval(k, p, u);
  }
  const PeriodicPiecewise& level(int k) const { return levels_[static_cast<std::size_t>(k)]; }
  /// Max |H_k| over a period.
  double sup_H(int k) const { return sup_[static_cast<std::size_t>(k)]; }
  /// Exact integral of h^2 over one period.
  double mean_square() const { return mean_square_; }

 private:
  static constexpr int kMaxCoeffs = 12;

  int piece_of(double u) const {
    int p = 0;
    while (p < 4 && u >= br_[static_cast<std::size_t>(p + 1)]) ++p;
    return p;
  }
  double eval(int k, int p, double u) const {
    const auto& c = coef_[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
    const double x = u - br_[static_cast<std::size_t>(p)];
    double acc = 0.0;
    for (int i = ncoef_[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] - 1; i >= 0; --i) {
      acc = acc * x + c[static_cast<std::size_t>(i)];
    }
    return acc;
  }

  double eps0_;
  std::vector<PeriodicPiecewise> levels_;
  std::array<double, 6> br_{};
  std::array<std::array<std::array<double, kMaxCoeffs>, 5>, 4> coef_{};
  std::array<std::array<int, 5>, 4> ncoef_{};
  std::array<double, 4> sup_{};
  double mean_square_;
};

/// Multi-indices over n variables of total order <= max_order, sorted by
/// order then lexicographically descending.
std::vector<std::vector<int>> multi_indices(int n, int order);

/// Constant-coefficient operator L psi = sum_K C_K d^K psi, |K| = order, from
/// scalars to symmetric trace-free space-time matrices with vanishing tt
/// entry, whose image is divergence-free for every psi.
class PotentialOperator {
 public:
  /// Builds the coefficient space for space dimension d. Throws
  /// InvalidArgument if the space is trivial.
  PotentialOperator(int d, int order);

  int d() const { return d_; }
  int order() const { return order_; }
  /// Dimension of the space of admissible coefficient tensors.
  int admissible_dimension() const { return static_cast<int>(basis_.cols()); }

  /// Coefficient vector with sum_K C_K xi^K = Vbar, chosen to minimise the
  /// cutoff-error coefficients. Throws InvalidArgument if no admissible
  /// operator reproduces Vbar.
  Eigen::VectorXd solve(const Eigen::MatrixXd& Vbar, const Eigen::VectorXd& xi) const;

  /// Rows D_A (packed symmetric, one row per multi-index A of order <= l),
  /// with D_0 = Vbar.
  Eigen::MatrixXd leibniz_coefficients(const Eigen::VectorXd& coeffs,
                                       const Eigen::VectorXd& xi) const;

  /// Packed symmetric pair list (a, b), a <= b, over the d+1 space-time axes.
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  const std::vector<std::vector<int>>& monomials() const { return monomials_; }
  const std::vector<std::vector<int>>& lower_indices() const { return lower_; }

  /// Maximum of |div L psi| coefficients over the basis, for tests.
  double divergence_defect(const Eigen::VectorXd& coeffs) const;

 private:
  Eigen::MatrixXd plane_wave_map(const Eigen::VectorXd& xi) const;
  Eigen::MatrixXd leibniz_map(const Eigen::VectorXd& xi) const;

  int d_;
  int order_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::vector<int>> monomials_;
  std::vector<std::vector<int>> lower_;
  Eigen::MatrixXd basis_;  // columns span admissible coefficient vectors
  Eigen::MatrixXd divergence_;
};

/// Shared potential operator of order 3 for the given dimension.
const PotentialOperator& default_potential(int d);

/// Space-time cutoff chi(y) = prod_k bump(y_k - c_k), c ordered (x, t).
struct SpacetimeCutoff {
  Eigen::VectorXd center;
  double h = 1.0;

  double value(const Eigen::VectorXd& y) const;
  bool on_plateau(const Eigen::VectorXd& y) const;
  bool in_support(const Eigen::VectorXd& y) const;
};

/// One localized plane wave L(chi j^{-l} Psi(j y.xi)). Its field is exactly
/// divergence-free and equals chi Vbar h(j y.xi) wherever chi is constant.
class LocalizedWave {
 public:
  LocalizedWave(Eigen::MatrixXd Vbar, WaveDirection xi, int frequency, SpacetimeCutoff cutoff,
                std::shared_ptr<const OscillationProfile> profile,
                const PotentialOperator& op = default_potential(2));

  const Eigen::MatrixXd& amplitude() const { return Vbar_; }
  const WaveDirection& direction() const { return xi_; }
  int frequency() const { return j_; }
  const SpacetimeCutoff& cutoff() const { return cutoff_; }
  const OscillationProfile& profile() const { return *profile_; }
  const std::shared_ptr<const OscillationProfile>& profile_ptr() const { return profile_; }
  /// Rows D_A of the Leibniz expansion, packed symmetric.
  const Eigen::MatrixXd& leibniz() const { return D_; }
  const std::vector<std::vector<int>>& lower_indices() const { return lower_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

  /// Localized space-time field at y = (x, t).
  Eigen::MatrixXd field(const Eigen::VectorXd& y) const;
  /// chi(y) Vbar h(j y.xi).
  Eigen::MatrixXd plane_wave(const Eigen::VectorXd& y) const;
  /// (m, M) read from a space-time field.
  static void split(const Eigen::MatrixXd& V, Eigen::VectorXd& m, Eigen::MatrixXd& M);

 private:
  Eigen::MatrixXd Vbar_;
  WaveDirection xi_;
  int j_;
  SpacetimeCutoff cutoff_;
  std::shared_ptr<const OscillationProfile> profile_;
  Eigen::MatrixXd D_;
  std::vector<std::vector<int>> lower_;
  std::vector<std::pair<int, int>> pairs_;
};

/// Builds the localized wave for a segment: direction from find_direction,
/// amplitude from the segment, cutoff of the given cell.
LocalizedWave localize(const OscillationSegment& seg, const WaveDirection& xi, int frequency,
                       const SpacetimeCutoff& cutoff,
                       std::shared_ptr<const OscillationProfile> profile);

struct YoungMeasureRow {
  int frequency = 0;
  double deviation = 0.0;
};

struct YoungMeasureOptions {
  Eigen::VectorXd box_lo;  // spatial box for the x integral
  Eigen::VectorXd box_hi;
  std::vector<double> times{0.0, 0.37, 0.71};
  int points_per_wavelength = 16;
};

/// sup_t |int phi f(h(n (x,t).xi)) dx - int phi dx int_0^1 f(h)|, per frequency.
std::vector<YoungMeasureRow> young_measure_check(
    const OscillationProfile& profile, const WaveDirection& xi,
    const std::function<double(double)>& f,
    const std::function<double(const Eigen::VectorXd&)>& phi, const std::vector<int>& frequencies,
    const YoungMeasureOptions& options);

}  // namespace wildeuler

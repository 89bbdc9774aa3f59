#include "wildeuler/waves.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wildeuler/errors.hpp"

namespace wildeuler {

namespace {

double state_norm(const EulerState& z) {
  return std::sqrt(z.rho * z.rho + z.m.squaredNorm() + z.M.squaredNorm() + z.Q * z.Q);
}

double monomial(const Eigen::VectorXd& xi, const std::vector<int>& K) {
  double v = 1.0;
  for (std::size_t k = 0; k < K.size(); ++k) {
    for (int p = 0; p < K[k]; ++p) {
      v *= xi(static_cast<Eigen::Index>(k));
    }
  }
  return v;
}

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) {
    v = v * (n - k + i) / i;
  }
  return v;
}

int order_of(const std::vector<int>& K) {
  int s = 0;
  for (int v : K) {
    s += v;
  }
  return s;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& A, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut) {
    ++rank;
  }
  return svd.matrixV().rightCols(A.cols() - rank);
}

const Polynomial& tau_poly() {
  static const Polynomial tau(
      {0.0, 35.0 / 16.0, 0.0, -35.0 / 16.0, 0.0, 21.0 / 16.0, 0.0, -5.0 / 16.0});
  return tau;
}

}  // namespace

Eigen::MatrixXd wave_block_matrix(const EulerState& z) {
  const int d = z.dim();
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(d + 1, d + 1);
  U.block(0, 0, d, 1) = z.m;
  U.block(0, 1, d, d) = z.M + z.Q * Eigen::MatrixXd::Identity(d, d);
  U(d, 0) = z.rho;
  U.block(d, 1, 1, d) = z.m.transpose();
  return U;
}

bool wave_cone_test(const EulerState& z, double tol) {
  const double n = state_norm(z);
  if (n == 0.0) {
    throw InvalidArgument("wave_cone_test requires a nonzero increment");
  }
  return std::abs(wave_block_matrix(z).determinant()) <= tol * std::pow(n, z.dim() + 1);
}

WaveDirection find_direction(const EulerState& z) {
  const int d = z.dim();
  const Eigen::MatrixXd U = wave_block_matrix(z);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(U, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double scale = std::max(sv(0), 1e-300);
  if (sv(d) > 1e-8 * scale) {
    throw InvalidArgument("increment is not in the wave cone");
  }
  Eigen::Index first = d;
  while (first > 0 && sv(first - 1) <= 1e-8 * scale) {
    --first;
  }
  const Eigen::MatrixXd K = svd.matrixV().rightCols(d + 1 - first);

  // Within the kernel, pick the unit vector with the smallest time component.
  Eigen::VectorXd v = K.col(K.cols() - 1);
  if (K.cols() > 1) {
    const Eigen::VectorXd tau = K.row(0).transpose();
    if (tau.norm() > 1e-14) {
      Eigen::VectorXd best;
      double best_norm = -1.0;
      for (Eigen::Index e = 0; e < K.cols(); ++e) {
        Eigen::VectorXd c = Eigen::VectorXd::Unit(K.cols(), e);
        c -= tau.dot(c) / tau.squaredNorm() * tau;
        if (c.norm() > best_norm) {
          best_norm = c.norm();
          best = c;
        }
      }
      v = (K * best).normalized();
    }
  }

  WaveDirection out;
  out.xi.resize(d + 1);
  out.xi.head(d) = v.tail(d);
  out.xi(d) = v(0);
  out.xi.normalize();
  for (Eigen::Index k = 0; k <= d; ++k) {
    if (std::abs(out.xi(k)) > 1e-14) {
      if (out.xi(k) < 0.0) {
        out.xi = -out.xi;
      }
      break;
    }
  }
  if (out.spatial().norm() < 1e-8) {
    throw TimeParallelKernel("wave direction is parallel to the time axis");
  }
  return out;
}

WaveDirection find_direction(const OscillationSegment& seg) {
  EulerState inc;
  inc.rho = 0.0;
  inc.m = seg.amplitude_m;
  inc.M = seg.amplitude_M;
  inc.Q = 0.0;
  return find_direction(inc);
}

Eigen::MatrixXd spacetime_amplitude(const Eigen::VectorXd& m, const Eigen::MatrixXd& M) {
  const Eigen::Index d = m.size();
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(d + 1, d + 1);
  V.topLeftCorner(d, d) = M;
  V.block(0, d, d, 1) = m;
  V.block(d, 0, 1, d) = m.transpose();
  return V;
}

OscillationProfile::OscillationProfile(double epsilon0) : eps0_(epsilon0) {
  if (!(epsilon0 > 0.0) || epsilon0 >= 0.25) {
    throw InvalidArgument("profile mollification eps0 must lie in (0, 1/4)");
  }
  const double e = epsilon0;
  const Polynomial& tau = tau_poly();
  std::vector<double> breaks{0.0, e, 0.5 - e, 0.5 + e, 1.0 - e, 1.0};
  std::vector<Polynomial> pieces{
      tau.compose_affine(1.0 / e, 0.0) * -1.0,
      Polynomial({-1.0}),
      tau.compose_affine(1.0 / e, -1.0),
      Polynomial({1.0}),
      tau.compose_affine(1.0 / e, -1.0) * -1.0,
  };
  PeriodicPiecewise h(breaks, pieces);
  levels_.push_back(h);
  for (int k = 1; k <= 3; ++k) {
    PeriodicPiecewise next = levels_.back().antiderivative();
    levels_.push_back(next.shifted(-next.mean()));
  }
  for (std::size_t b = 0; b < 6; ++b) br_[b] = breaks[b];
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t p = 0; p < 5; ++p) {
      const auto& c = levels_[k].pieces()[p].coeffs();
      if (c.size() > static_cast<std::size_t>(kMaxCoeffs)) {
        throw InvalidArgument("profile polynomial degree exceeds the fast-path storage");
      }
      ncoef_[k][p] = static_cast<int>(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) coef_[k][p][i] = c[i];
    }
  }
  for (int k = 0; k <= 3; ++k) {
    double s = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      s = std::max(s, std::abs(levels_[static_cast<std::size_t>(k)](i / 20000.0)));
    }
    sup_[static_cast<std::size_t>(k)] = s;
  }
  std::vector<Polynomial> squares;
  for (const Polynomial& p : pieces) {
    squares.push_back(p * p);
  }
  mean_square_ = PeriodicPiecewise(breaks, squares).mean();
}

std::vector<std::vector<int>> multi_indices(int n, int order) {
  std::vector<std::vector<int>> out;
  for (int o = 0; o <= order; ++o) {
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    // Enumerate compositions of o into n parts, lexicographically descending.
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == n - 1) {
        cur[static_cast<std::size_t>(pos)] = left;
        out.push_back(cur);
        return;
      }
      for (int v = left; v >= 0; --v) {
        cur[static_cast<std::size_t>(pos)] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, o);
  }
  return out;
}

PotentialOperator::PotentialOperator(int d, int order) : d_(d), order_(order) {
  if (d < 2 || order < 1 || order > 3) {
    throw InvalidArgument("potential operator needs d >= 2 and order in 1..3");
  }
  const int n = d + 1;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      pairs_.emplace_back(a, b);
    }
  }
  lower_ = multi_indices(n, order);
  for (const auto& K : lower_) {
    if (order_of(K) == order) {
      monomials_.push_back(K);
    }
  }
  std::vector<std::vector<int>> upper;
  for (const auto& P : multi_indices(n, order + 1)) {
    if (order_of(P) == order + 1) {
      upper.push_back(P);
    }
  }
  const int P = static_cast<int>(pairs_.size());
  const int nm = static_cast<int>(monomials_.size());
  auto pair_index = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    for (int p = 0; p < P; ++p) {
      if (pairs_[static_cast<std::size_t>(p)] == std::make_pair(a, b)) return p;
    }
    return -1;
  };
  auto col = [&](int p, int k) { return p * nm + k; };

  divergence_ = Eigen::MatrixXd::Zero(n * static_cast<int>(upper.size()), P * nm);
  for (int a = 0; a < n; ++a) {
    for (std::size_t u = 0; u < upper.size(); ++u) {
      const int row = a * static_cast<int>(upper.size()) + static_cast<int>(u);
      for (int b = 0; b < n; ++b) {
        if (upper[u][static_cast<std::size_t>(b)] == 0) continue;
        std::vector<int> K = upper[u];
        K[static_cast<std::size_t>(b)] -= 1;
        const auto it = std::find(monomials_.begin(), monomials_.end(), K);
        const int k = static_cast<int>(it - monomials_.begin());
        divergence_(row, col(pair_index(a, b), k)) += 1.0;
      }
    }
  }
  Eigen::MatrixXd extra = Eigen::MatrixXd::Zero(2 * nm, P * nm);
  for (int k = 0; k < nm; ++k) {
    for (int a = 0; a < n; ++a) {
      extra(k, col(pair_index(a, a), k)) = 1.0;
    }
    extra(nm + k, col(pair_index(n - 1, n - 1), k)) = 1.0;
  }
  Eigen::MatrixXd all(divergence_.rows() + extra.rows(), P * nm);
  all << divergence_, extra;
  basis_ = null_space(all, 1e-10);
  if (basis_.cols() == 0) {
    throw InvalidArgument("no nonzero divergence-free potential of order " +
                          std::to_string(order) + " exists in dimension " + std::to_string(d));
  }
}

Eigen::MatrixXd PotentialOperator::plane_wave_map(const Eigen::VectorXd& xi) const {
  const int P = static_cast<int>(pairs_.size());
  const int nm = static_cast<int>(monomials_.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P, P * nm);
  for (int p = 0; p < P; ++p) {
    for (int k = 0; k < nm; ++k) {
      A(p, p * nm + k) = monomial(xi, monomials_[static_cast<std::size_t>(k)]);
    }
  }
  return A;
}

Eigen::MatrixXd PotentialOperator::leibniz_map(const Eigen::VectorXd& xi) const {
  const int P = static_cast<int>(pairs_.size());
  const int nm = static_cast<int>(monomials_.size());
  const int nl = static_cast<int>(lower_.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nl * P, P * nm);
  for (int a = 0; a < nl; ++a) {
    const auto& A = lower_[static_cast<std::size_t>(a)];
    for (int k = 0; k < nm; ++k) {
      const auto& K = monomials_[static_cast<std::size_t>(k)];
      double coef = 1.0;
      std::vector<int> rest(K.size());
      bool ok = true;
      for (std::size_t c = 0; c < K.size(); ++c) {
        if (K[c] < A[c]) {
          ok = false;
          break;
        }
        coef *= binom(K[c], A[c]);
        rest[c] = K[c] - A[c];
      }
      if (!ok) continue;
      coef *= monomial(xi, rest);
      for (int p = 0; p < P; ++p) {
        G(a * P + p, p * nm + k) = coef;
      }
    }
  }
  return G;
}

Eigen::VectorXd PotentialOperator::solve(const Eigen::MatrixXd& Vbar,
                                         const Eigen::VectorXd& xi) const {
  const int n = d_ + 1;
  if (Vbar.rows() != n || Vbar.cols() != n || xi.size() != n) {
    throw InvalidArgument("potential solve: dimension mismatch");
  }
  const int P = static_cast<int>(pairs_.size());
  Eigen::VectorXd v(P);
  for (int p = 0; p < P; ++p) {
    v(p) = Vbar(pairs_[static_cast<std::size_t>(p)].first, pairs_[static_cast<std::size_t>(p)].second);
  }
  const Eigen::MatrixXd A = plane_wave_map(xi) * basis_;
  const Eigen::MatrixXd G = leibniz_map(xi) * basis_;
  const int nb = static_cast<int>(basis_.cols());

  // Quadratic objective on the error coefficients D_A, |A| >= 1.
  Eigen::MatrixXd H = 1e-8 * Eigen::MatrixXd::Identity(nb, nb);
  for (std::size_t a = 0; a < lower_.size(); ++a) {
    const int o = order_of(lower_[a]);
    if (o == 0) continue;
    const double w = o == 1 ? 1.0 : (o == 2 ? 0.1 : 0.01);
    const auto rows = G.middleRows(static_cast<Eigen::Index>(a) * P, P);
    H += w * rows.transpose() * rows;
  }
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nb + P, nb + P);
  kkt.topLeftCorner(nb, nb) = H;
  kkt.topRightCorner(nb, P) = A.transpose();
  kkt.bottomLeftCorner(P, nb) = A;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb + P);
  rhs.tail(P) = v;
  const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  const Eigen::VectorXd z = sol.head(nb);
  const double miss = (A * z - v).norm();
  if (miss > 1e-9 * (1.0 + v.norm())) {
    throw InvalidArgument("no admissible potential reproduces the amplitude (defect " +
                          std::to_string(miss) + ")");
  }
  return basis_ * z;
}

Eigen::MatrixXd PotentialOperator::leibniz_coefficients(const Eigen::VectorXd& coeffs,
                                                        const Eigen::VectorXd& xi) const {
  const int P = static_cast<int>(pairs_.size());
  const Eigen::VectorXd flat = leibniz_map(xi) * coeffs;
  Eigen::MatrixXd D(static_cast<Eigen::Index>(lower_.size()), P);
  for (Eigen::Index a = 0; a < D.rows(); ++a) {
    D.row(a) = flat.segment(a * P, P).transpose();
  }
  return D;
}

double PotentialOperator::divergence_defect(const Eigen::VectorXd& coeffs) const {
  return (divergence_ * coeffs).cwiseAbs().maxCoeff();
}

const PotentialOperator& default_potential(int d) {
  static const PotentialOperator op2(2, 3);
  static const PotentialOperator op3(3, 3);
  if (d == 2) return op2;
  if (d == 3) return op3;
  throw InvalidArgument("potentials are provided for d = 2 and d = 3");
}

double SpacetimeCutoff::value(const Eigen::VectorXd& y) const {
  const Bump1D b{h};
  double v = 1.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    v *= b.value(y(k) - center(k));
  }
  return v;
}

bool SpacetimeCutoff::on_plateau(const Eigen::VectorXd& y) const {
  const Bump1D b{h};
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (!b.on_plateau(y(k) - center(k))) return false;
  }
  return true;
}

bool SpacetimeCutoff::in_support(const Eigen::VectorXd& y) const {
  const Bump1D b{h};
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (!b.in_support(y(k) - center(k))) return false;
  }
  return true;
}

LocalizedWave::LocalizedWave(Eigen::MatrixXd Vbar, WaveDirection xi, int frequency,
                             SpacetimeCutoff cutoff,
                             std::shared_ptr<const OscillationProfile> profile,
                             const PotentialOperator& op)
    : Vbar_(std::move(Vbar)),
      xi_(std::move(xi)),
      j_(frequency),
      cutoff_(std::move(cutoff)),
      profile_(std::move(profile)) {
  if (frequency < 1) {
    throw InvalidArgument("wave frequency must be at least 1");
  }
  if (!profile_) {
    throw InvalidArgument("localized wave needs a profile");
  }
  if ((Vbar_ * xi_.xi).norm() > 1e-9 * (1.0 + Vbar_.norm())) {
    throw InvalidArgument("amplitude is not annihilated by the wave direction");
  }
  D_ = op.leibniz_coefficients(op.solve(Vbar_, xi_.xi), xi_.xi);
  lower_ = op.lower_indices();
  pairs_ = op.pairs();
  // Make the tt entry and the trace vanish exactly rather than to rounding.
  const int n = op.d() + 1;
  Eigen::Index last_diag = -1;
  std::vector<Eigen::Index> diag;
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto [a, b] = pairs_[p];
    if (a != b) continue;
    if (a == n - 1) {
      D_.col(static_cast<Eigen::Index>(p)).setZero();
    } else if (a == n - 2) {
      last_diag = static_cast<Eigen::Index>(p);
    } else {
      diag.push_back(static_cast<Eigen::Index>(p));
    }
  }
  D_.col(last_diag).setZero();
  for (Eigen::Index p : diag) {
    D_.col(last_diag) -= D_.col(p);
  }
}

Eigen::MatrixXd LocalizedWave::plane_wave(const Eigen::VectorXd& y) const {
  const double s = j_ * y.dot(xi_.xi);
  return cutoff_.value(y) * profile_->h(s) * Vbar_;
}

Eigen::MatrixXd LocalizedWave::field(const Eigen::VectorXd& y) const {
  const Eigen::Index n = y.size();
  const double s = j_ * y.dot(xi_.xi);
  if (cutoff_.on_plateau(y)) {
    return profile_->h(s) * Vbar_;
  }
  if (!cutoff_.in_support(y)) {
    return Eigen::MatrixXd::Zero(n, n);
  }
  const Bump1D b{cutoff_.h};
  std::vector<std::array<double, 4>> jets;
  for (Eigen::Index k = 0; k < n; ++k) {
    jets.push_back(b.jet(y(k) - cutoff_.center(k)));
  }
  std::array<double, 4> psi{};
  double scale = 1.0;
  for (int o = 0; o <= 3; ++o) {
    psi[static_cast<std::size_t>(o)] = scale * profile_->H(o, s);
    scale /= j_;
  }
  Eigen::VectorXd packed = Eigen::VectorXd::Zero(D_.cols());
  for (std::size_t a = 0; a < lower_.size(); ++a) {
    double c = psi[static_cast<std::size_t>(order_of(lower_[a]))];
    for (Eigen::Index k = 0; k < n; ++k) {
      c *= jets[static_cast<std::size_t>(k)][static_cast<std::size_t>(lower_[a][static_cast<std::size_t>(k)])];
    }
    packed += c * D_.row(static_cast<Eigen::Index>(a)).transpose();
  }
  Eigen::MatrixXd V(n, n);
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    V(pairs_[p].first, pairs_[p].second) = packed(static_cast<Eigen::Index>(p));
    V(pairs_[p].second, pairs_[p].first) = packed(static_cast<Eigen::Index>(p));
  }
  return V;
}

void LocalizedWave::split(const Eigen::MatrixXd& V, Eigen::VectorXd& m, Eigen::MatrixXd& M) {
  const Eigen::Index d = V.rows() - 1;
  m = V.block(0, d, d, 1);
  M = V.topLeftCorner(d, d);
}

LocalizedWave localize(const OscillationSegment& seg, const WaveDirection& xi, int frequency,
                       const SpacetimeCutoff& cutoff,
                       std::shared_ptr<const OscillationProfile> profile) {
  return LocalizedWave(spacetime_amplitude(seg.amplitude_m, seg.amplitude_M), xi, frequency,
                       cutoff, std::move(profile), default_potential(seg.center.dim()));
}

std::vector<YoungMeasureRow> young_measure_check(
    const OscillationProfile& profile, const WaveDirection& xi,
    const std::function<double(double)>& f,
    const std::function<double(const Eigen::VectorXd&)>& phi, const std::vector<int>& frequencies,
    const YoungMeasureOptions& options) {
  const int d = xi.dim();
  if (xi.spatial().norm() < 1e-8) {
    throw TimeParallelKernel("young_measure_check needs a direction with spatial part");
  }
  if (options.box_lo.size() != d || options.box_hi.size() != d) {
    throw InvalidArgument("young_measure_check: box dimension mismatch");
  }
  // int_0^1 f(h(s)) ds by a fine midpoint rule.
  const int ns = 1 << 18;
  double fbar = 0.0;
  for (int i = 0; i < ns; ++i) {
    fbar += f(profile.h((i + 0.5) / ns));
  }
  fbar /= ns;

  std::vector<YoungMeasureRow> rows;
  for (int n : frequencies) {
    std::vector<int> counts(static_cast<std::size_t>(d));
    double cell = 1.0;
    for (int k = 0; k < d; ++k) {
      const double len = options.box_hi(k) - options.box_lo(k);
      counts[static_cast<std::size_t>(k)] =
          std::max(8, static_cast<int>(std::ceil(options.points_per_wavelength * n * len)));
      cell *= len / counts[static_cast<std::size_t>(k)];
    }
    double worst = 0.0;
    for (double t : options.times) {
      double integral = 0.0;
      double mass = 0.0;
      std::vector<int> idx(static_cast<std::size_t>(d), 0);
      Eigen::VectorXd x(d);
      while (true) {
        for (int k = 0; k < d; ++k) {
          const double len = options.box_hi(k) - options.box_lo(k);
          x(k) = options.box_lo(k) +
                 (idx[static_cast<std::size_t>(k)] + 0.5) * len / counts[static_cast<std::size_t>(k)];
        }
        const double w = phi(x);
        mass += w;
        integral += w * f(profile.h(n * (x.dot(xi.spatial()) + t * xi.temporal())));
        int k = 0;
        while (k < d && ++idx[static_cast<std::size_t>(k)] == counts[static_cast<std::size_t>(k)]) {
          idx[static_cast<std::size_t>(k)] = 0;
          ++k;
        }
        if (k == d) break;
      }
      worst = std::max(worst, std::abs(integral * cell - mass * cell * fbar));
    }
    rows.push_back({n, worst});
  }
  return rows;
}

}  // namespace wildeuler

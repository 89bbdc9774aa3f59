#include "wildeuler/convex_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "wildeuler/errors.hpp"
#include "wildeuler/nnls.hpp"

namespace wildeuler {

namespace {

int trace_free_coords(int d) { return d * (d + 1) / 2 - 1; }

// Diagonal entries M_ii for i < d-1, then off-diagonals i < j.
void write_trace_free(const Eigen::MatrixXd& M, Eigen::Ref<Eigen::VectorXd> out) {
  const int d = static_cast<int>(M.rows());
  int k = 0;
  for (int i = 0; i + 1 < d; ++i) {
    out(k++) = M(i, i);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      out(k++) = M(i, j);
    }
  }
}

Eigen::VectorXd lifted_column(const SliceParams& p, const Eigen::VectorXd& m, double weight_row) {
  return lifted_moments(p, m, circ_product(m) / p.rho, weight_row);
}

Eigen::MatrixXd lifted_matrix(const SliceParams& p, const std::vector<Eigen::VectorXd>& dirs,
                              double weight_row) {
  Eigen::MatrixXd A(slice_dimension(p.d) + 1, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    A.col(static_cast<Eigen::Index>(i)) = lifted_column(p, dirs[i], weight_row);
  }
  return A;
}

std::vector<Eigen::VectorXd> dictionary(int d, int n, double r) {
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  if (d == 2) {
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * std::numbers::pi * k / n;
      Eigen::VectorXd v(2);
      v << r * std::cos(t), r * std::sin(t);
      dirs.push_back(v);
    }
  } else if (d == 3) {
    // Fibonacci sphere
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / n;
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      Eigen::VectorXd v(3);
      v << r * s * std::cos(golden * k), r * s * std::sin(golden * k), r * z;
      dirs.push_back(v);
    }
  } else {
    std::mt19937_64 gen(0x5eedULL + static_cast<std::uint64_t>(n));
    std::normal_distribution<double> normal;
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd v(d);
      for (int i = 0; i < d; ++i) {
        v(i) = normal(gen);
      }
      dirs.push_back(r * v.normalized());
    }
  }
  return dirs;
}

// Orthonormal basis of the complement of m.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& m) {
  const Eigen::Index d = m.size();
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(d, d);
  full.col(0) = m.normalized();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(full);
  Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(d - 1);
}

ConvexDecomposition drop_zero_weights(const ConvexDecomposition& dec, double floor = 0.0) {
  ConvexDecomposition out;
  for (std::size_t i = 0; i < dec.size(); ++i) {
    if (dec.weights[i] > floor) {
      out.weights.push_back(dec.weights[i]);
      out.directions.push_back(dec.directions[i]);
    }
  }
  return out;
}

void renormalize(ConvexDecomposition& dec) {
  double s = 0.0;
  for (double w : dec.weights) {
    s += w;
  }
  for (double& w : dec.weights) {
    w /= s;
  }
}

// Gauss-Newton on weights and tangent direction perturbations. Directions
// stay exactly on the sphere; weights stay positive via step halving.
ConvexDecomposition polish(const ConvexDecomposition& start, const SliceParams& p,
                           const Eigen::VectorXd& target, int max_iter = 60) {
  ConvexDecomposition dec = start;
  const int rows = slice_dimension(p.d) + 1;
  const int k = static_cast<int>(dec.size());
  const int tdim = p.d - 1;
  auto residual_of = [&](const ConvexDecomposition& c) {
    Eigen::VectorXd f = -target;
    for (std::size_t i = 0; i < c.size(); ++i) {
      f += c.weights[i] * lifted_column(p, c.directions[i], 1.0);
    }
    return f;
  };
  Eigen::VectorXd f = residual_of(dec);
  for (int it = 0; it < max_iter && f.norm() > 1e-15; ++it) {
    Eigen::MatrixXd J(rows, k * (1 + tdim));
    std::vector<Eigen::MatrixXd> bases;
    for (int i = 0; i < k; ++i) {
      const Eigen::VectorXd& m = dec.directions[static_cast<std::size_t>(i)];
      const double w = dec.weights[static_cast<std::size_t>(i)];
      J.col(i) = lifted_column(p, m, 1.0);
      bases.push_back(tangent_basis(m));
      for (int t = 0; t < tdim; ++t) {
        const Eigen::VectorXd dm = bases.back().col(t) * p.r;
        Eigen::VectorXd col(rows);
        col.head(p.d) = dm / p.r;
        const Eigen::MatrixXd dM = (dm * m.transpose() + m * dm.transpose()) / (p.r * p.r);
        write_trace_free(dM, col.segment(p.d, trace_free_coords(p.d)));
        col(rows - 1) = 0.0;
        J.col(k + i * tdim + t) = w * col;
      }
    }
    const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-f);
    double s = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls, s *= 0.5) {
      ConvexDecomposition trial = dec;
      bool positive = true;
      for (int i = 0; i < k; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        trial.weights[ui] += s * step(i);
        if (!(trial.weights[ui] > 0.0)) {
          positive = false;
          break;
        }
        Eigen::VectorXd dm = Eigen::VectorXd::Zero(p.d);
        for (int t = 0; t < tdim; ++t) {
          dm += bases[ui].col(t) * (p.r * s * step(k + i * tdim + t));
        }
        trial.directions[ui] = p.r * (dec.directions[ui] + dm).normalized();
      }
      if (!positive) {
        continue;
      }
      const Eigen::VectorXd ft = residual_of(trial);
      if (ft.norm() < f.norm()) {
        dec = trial;
        f = ft;
        improved = true;
        break;
      }
    }
    if (!improved) {
      break;
    }
  }
  return dec;
}

double min_pair_sum(const ConvexDecomposition& dec) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dec.size(); ++i) {
    for (std::size_t j = i + 1; j < dec.size(); ++j) {
      best = std::min(best, (dec.directions[i] + dec.directions[j]).norm());
    }
  }
  return best;
}

}  // namespace

void SliceParams::validate() const {
  if (!(rho > 0.0) || !(r > 0.0)) {
    throw InvalidArgument("slice parameters require rho > 0 and r > 0");
  }
  if (d < 2) {
    throw InvalidArgument("slice parameters require d >= 2");
  }
}

int slice_dimension(int d) { return d + trace_free_coords(d); }

Eigen::VectorXd lifted_moments(const SliceParams& params, const Eigen::VectorXd& m,
                               const Eigen::MatrixXd& M, double weight_row) {
  const int d = params.d;
  Eigen::VectorXd out(slice_dimension(d) + 1);
  out.head(d) = m / params.r;
  write_trace_free(M * (params.rho / (params.r * params.r)), out.segment(d, trace_free_coords(d)));
  out(out.size() - 1) = weight_row;
  return out;
}

Eigen::VectorXd ConvexDecomposition::reconstruct_m() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(directions.empty() ? 0 : directions[0].size());
  for (std::size_t i = 0; i < size(); ++i) {
    m += weights[i] * directions[i];
  }
  return m;
}

Eigen::MatrixXd ConvexDecomposition::reconstruct_M(double rho) const {
  const Eigen::Index d = directions.empty() ? 0 : directions[0].size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < size(); ++i) {
    M += weights[i] * circ_product(directions[i]) / rho;
  }
  return M;
}

double ConvexDecomposition::residual(const SliceParams& params, const Eigen::VectorXd& m,
                                     const Eigen::MatrixXd& M) const {
  double wsum = 0.0;
  for (double w : weights) {
    wsum += w;
  }
  return (reconstruct_m() - m).norm() + (reconstruct_M(params.rho) - M).norm() +
         std::abs(wsum - 1.0);
}

ConvexDecomposition caratheodory_reduce(const ConvexDecomposition& dec, const SliceParams& params) {
  params.validate();
  ConvexDecomposition out = drop_zero_weights(dec);
  const int max_points = slice_dimension(params.d) + 1;
  while (out.size() > 1) {
    const Eigen::MatrixXd A = lifted_matrix(params, out.directions, 1.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::Index k = A.cols();
    const bool dependent =
        k > max_points || sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0));
    if (!dependent) {
      break;
    }
    Eigen::VectorXd v = svd.matrixV().col(k - 1);
    if (v.maxCoeff() <= 0.0) {
      v = -v;
    }
    double t = std::numeric_limits<double>::infinity();
    std::size_t drop = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (v(i) > 0.0) {
        const double ti = out.weights[static_cast<std::size_t>(i)] / v(i);
        if (ti < t) {
          t = ti;
          drop = static_cast<std::size_t>(i);
        }
      }
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      out.weights[static_cast<std::size_t>(i)] -= t * v(i);
    }
    out.weights[drop] = 0.0;
    out = drop_zero_weights(out, 1e-300);
    renormalize(out);
  }
  return out;
}

ConvexDecomposition caratheodory_decompose(const SliceParams& params, const Eigen::VectorXd& m,
                                           const Eigen::MatrixXd& M,
                                           const DecompositionOptions& options) {
  params.validate();
  if (m.size() != params.d || M.rows() != params.d || M.cols() != params.d) {
    throw InvalidArgument("caratheodory_decompose: dimension mismatch");
  }
  const double r = params.r;
  const double rho = params.rho;
  const double tol = options.tol * (1.0 + r * r / rho);

  // Extreme point of the slice.
  if (std::abs(m.norm() - r) <= 1e-12 * r &&
      (M - circ_product(m) / rho).norm() <= tol) {
    ConvexDecomposition single;
    single.weights = {1.0};
    single.directions = {m * (r / m.norm())};
    return single;
  }

  const double ek = e_kin(rho, m, M);
  const double bound = (1.0 - options.delta) * r * r / (2.0 * rho);
  if (ek > bound) {
    throw InfeasibleDecomposition("point is not strictly inside the slice hull: e_kin = " +
                                  std::to_string(ek) + " > " + std::to_string(bound));
  }

  const Eigen::VectorXd target = lifted_moments(params, m, M, 1.0);
  // The weight row is emphasised in the NNLS so that sum(lambda) = 1 dominates.
  const double wrow = 10.0;
  const Eigen::VectorXd target_w = lifted_moments(params, m, M, wrow);
  double best_residual = std::numeric_limits<double>::infinity();
  for (int n = options.initial_directions; n <= options.max_directions; n *= 2) {
    const int n_dirs = params.d == 2 ? n : 2 * n;
    const std::vector<Eigen::VectorXd> dirs = dictionary(params.d, n_dirs, r);
    const NnlsResult sol = nnls(lifted_matrix(params, dirs, wrow), target_w);
    ConvexDecomposition dec;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (sol.x(static_cast<Eigen::Index>(i)) > 0.0) {
        dec.weights.push_back(sol.x(static_cast<Eigen::Index>(i)));
        dec.directions.push_back(dirs[i]);
      }
    }
    if (dec.size() == 0) {
      continue;
    }
    renormalize(dec);
    dec = caratheodory_reduce(dec, params);
    dec = polish(dec, params, target);
    dec = caratheodory_reduce(dec, params);
    const double res = dec.residual(params, m, M);
    best_residual = std::min(best_residual, res);
    if (res <= tol) {
      return dec;
    }
  }
  throw InfeasibleDecomposition("decomposition did not reach tolerance; best residual " +
                                std::to_string(best_residual));
}

ConvexDecomposition perturb_antipodal(const ConvexDecomposition& dec, const SliceParams& params,
                                      double eta, std::uint64_t seed, int max_attempts) {
  params.validate();
  if (!(eta > 0.0) || eta >= 1.0) {
    throw InvalidArgument("perturb_antipodal: eta must lie in (0, 1)");
  }
  const double need = eta * params.r;
  if (dec.size() < 2 || min_pair_sum(dec) >= need) {
    return dec;
  }
  const Eigen::VectorXd target =
      lifted_moments(params, dec.reconstruct_m(), dec.reconstruct_M(params.rho), 1.0);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    ConvexDecomposition out = dec;
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        if ((out.directions[i] + out.directions[j]).norm() >= 2.0 * need) {
          continue;
        }
        // Rotate m_j by an angle in [4 eta, 8 eta) within a random plane.
        const Eigen::VectorXd u = out.directions[j] / params.r;
        Eigen::VectorXd w(params.d);
        for (int c = 0; c < params.d; ++c) {
          w(c) = normal(gen);
        }
        w -= u.dot(w) * u;
        if (w.norm() < 1e-12) {
          continue;
        }
        w.normalize();
        const double angle = 4.0 * eta * (1.0 + unit(gen));
        out.directions[j] = params.r * (std::cos(angle) * u + std::sin(angle) * w);
      }
    }
    const ConvexDecomposition polished = polish(out, params, target);
    if (min_pair_sum(polished) >= need) {
      return polished;
    }
    if (min_pair_sum(out) >= need) {
      return out;
    }
  }
  throw PerturbationFailed("could not separate antipodal directions within " +
                           std::to_string(max_attempts) + " attempts");
}

double slice_radius(const EulerState& z, const PressureLaw& law, RadiusRule rule) {
  const double d = static_cast<double>(z.dim());
  const double q = rule == RadiusRule::Hull ? z.Q - law.pressure(z.rho) : z.Q;
  if (!(q > 0.0)) {
    throw InvalidArgument("slice radius undefined: Q - p(rho) must be positive");
  }
  return std::sqrt(d * z.rho * q);
}

EulerState OscillationSegment::endpoint(double sign) const {
  EulerState e = center;
  e.m += sign * amplitude_m;
  e.M += sign * amplitude_M;
  return e;
}

double OscillationSegment::amplitude_floor() const {
  const int d = center.dim();
  const double N = static_cast<double>(state_space_dimension(d));
  return (r * r - center.m.squaredNorm()) / (4.0 * r * N);
}

OscillationSegment OscillationSegment::scaled(double s) const {
  OscillationSegment out = *this;
  out.amplitude_m *= s;
  out.amplitude_M *= s;
  return out;
}

OscillationSegment build_segment(const EulerState& z, const PressureLaw& law,
                                 const SegmentOptions& options) {
  z.validate();
  if (!(hull_functional(z, law) < 0.0)) {
    throw InvalidArgument("build_segment requires F(z) < 0");
  }
  SliceParams params{z.rho, slice_radius(z, law, options.radius_rule), z.dim()};
  ConvexDecomposition dec = caratheodory_decompose(params, z.m, z.M, options.decomposition);
  dec = perturb_antipodal(dec, params, options.antipodal_eta, options.seed);
  if (dec.size() < 2) {
    throw DegenerateSegment("decomposition has a single point; no oscillation available");
  }

  std::size_t one = 0;
  for (std::size_t i = 1; i < dec.size(); ++i) {
    if (dec.weights[i] > dec.weights[one]) {
      one = i;
    }
  }
  std::size_t jj = one;
  double best = -1.0;
  for (std::size_t i = 0; i < dec.size(); ++i) {
    if (i == one) {
      continue;
    }
    const double v = dec.weights[i] * (dec.directions[i] - dec.directions[one]).norm();
    if (v > best) {
      best = v;
      jj = i;
    }
  }

  OscillationSegment seg;
  seg.center = z;
  seg.endpoint_a = dec.directions[jj];
  seg.endpoint_b = dec.directions[one];
  seg.r = params.r;
  seg.lambda_max = dec.weights[one];
  seg.lambda_j = dec.weights[jj];
  seg.points = dec.size();
  const double half = 0.5 * seg.lambda_j;
  seg.amplitude_m = half * (seg.endpoint_a - seg.endpoint_b);
  seg.amplitude_M =
      half * (circ_product(seg.endpoint_a) - circ_product(seg.endpoint_b)) / z.rho;

  if (seg.amplitude_m.norm() <= 1e-12 * params.r) {
    throw DegenerateSegment("segment amplitude vanishes");
  }
  for (double sign : {-1.0, 1.0}) {
    if (!(hull_functional(seg.endpoint(sign), law) < 0.0)) {
      throw DegenerateSegment("segment endpoint leaves the open hull");
    }
  }
  return seg;
}

}  // namespace wildeuler

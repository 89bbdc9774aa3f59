#include "wildeuler/grid.hpp"

#include <cmath>
#include <string>

#include "wildeuler/errors.hpp"

namespace wildeuler {

namespace {

// zeta range with Q_zeta = zeta h + [-h/2, h/2] inside [lo, hi].
std::pair<int, int> zeta_range(double lo, double hi, double h) {
  const int a = static_cast<int>(std::ceil(lo / h + 0.5 - 1e-9));
  const int b = static_cast<int>(std::floor(hi / h - 0.5 + 1e-9));
  return {a, b};
}

}  // namespace

void GridSpec::validate(bool require_fine) const {
  if (!(h > 0.0) || (require_fine && h > 0.5 * epsilon * (1.0 + 1e-12))) {
    throw InvalidArgument("grid size must satisfy 0 < h <= eps/2 (h = " + std::to_string(h) +
                          ", eps = " + std::to_string(epsilon) + ")");
  }
  if (!(epsilon > 0.0) || !(epsilon < 0.5 * T)) {
    throw InvalidArgument("time margin must satisfy 0 < eps < T/2");
  }
  if (omega_lo.size() < 2 || omega_lo.size() != omega_hi.size()) {
    throw InvalidArgument("Omega_0 must be a box of dimension >= 2");
  }
  for (Eigen::Index k = 0; k < omega_lo.size(); ++k) {
    if (!(omega_lo(k) < omega_hi(k)) || omega_lo(k) < 0.0 || omega_hi(k) > period) {
      throw InvalidArgument("Omega_0 must be a nonempty box inside one torus period");
    }
  }
}

double GridSpec::omega_volume() const { return (omega_hi - omega_lo).prod(); }

GridSpec GridSpec::unit(int d, double h, double epsilon, double T) {
  GridSpec g;
  g.h = h;
  g.epsilon = epsilon;
  g.T = T;
  g.omega_lo = Eigen::VectorXd::Zero(d);
  g.omega_hi = Eigen::VectorXd::Ones(d);
  return g;
}

SpacetimeCutoff Cell::cutoff(double h) const {
  const Eigen::Index d = x_lo.size();
  SpacetimeCutoff c;
  c.center.resize(d + 1);
  c.center.head(d) = x_center();
  c.center(d) = t_center();
  c.h = h;
  return c;
}

std::vector<Cell> build_grid(const GridSpec& spec) {
  return build_grid(spec, spec.epsilon, spec.T - spec.epsilon);
}

std::vector<Cell> build_grid(const GridSpec& spec, double t_min, double t_max) {
  spec.validate(false);
  const int d = spec.dim();
  const double h = spec.h;
  std::vector<std::pair<int, int>> ranges;
  for (int k = 0; k < d; ++k) {
    ranges.push_back(zeta_range(spec.omega_lo(k), spec.omega_hi(k), h));
    if (ranges.back().first > ranges.back().second) {
      throw EmptyGrid("no spatial cube of size h fits in Omega_0");
    }
  }
  std::vector<Cell> cells;
  std::vector<int> zeta(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) zeta[static_cast<std::size_t>(k)] = ranges[static_cast<std::size_t>(k)].first;
  while (true) {
    long sum = 0;
    for (int z : zeta) sum += z;
    const int parity = parity_of(sum);
    const double shift = parity == 0 ? 0.0 : -0.5;
    // time slab [(i + shift) h, (i + 1 + shift) h] inside [t_min, t_max]
    const int i_lo = static_cast<int>(std::ceil(t_min / h - shift - 1e-9));
    const int i_hi = static_cast<int>(std::floor(t_max / h - shift - 1.0 + 1e-9));
    for (int i = i_lo; i <= i_hi; ++i) {
      Cell c;
      c.i = i;
      c.zeta = zeta;
      c.parity = parity;
      c.t_lo = (i + shift) * h;
      c.t_hi = (i + 1 + shift) * h;
      c.x_lo.resize(d);
      c.x_hi.resize(d);
      for (int k = 0; k < d; ++k) {
        c.x_lo(k) = (zeta[static_cast<std::size_t>(k)] - 0.5) * h;
        c.x_hi(k) = (zeta[static_cast<std::size_t>(k)] + 0.5) * h;
      }
      cells.push_back(std::move(c));
    }
    int k = 0;
    while (k < d && ++zeta[static_cast<std::size_t>(k)] > ranges[static_cast<std::size_t>(k)].second) {
      zeta[static_cast<std::size_t>(k)] = ranges[static_cast<std::size_t>(k)].first;
      ++k;
    }
    if (k == d) break;
  }
  if (cells.empty()) {
    throw EmptyGrid("no grid cell fits in the time window");
  }
  spec.validate();
  return cells;
}

CellLocator::CellLocator(const GridSpec& spec, const std::vector<Cell>& cells)
    : h_(spec.h), d_(spec.dim()) {
  if (cells.empty()) {
    throw EmptyGrid("cell locator needs at least one cell");
  }
  zeta_min_.assign(static_cast<std::size_t>(d_), 1 << 30);
  std::vector<int> zeta_max(static_cast<std::size_t>(d_), -(1 << 30));
  int i_max = -(1 << 30);
  i_min_ = 1 << 30;
  for (const Cell& c : cells) {
    for (int k = 0; k < d_; ++k) {
      zeta_min_[static_cast<std::size_t>(k)] = std::min(zeta_min_[static_cast<std::size_t>(k)], c.zeta[static_cast<std::size_t>(k)]);
      zeta_max[static_cast<std::size_t>(k)] = std::max(zeta_max[static_cast<std::size_t>(k)], c.zeta[static_cast<std::size_t>(k)]);
    }
    i_min_ = std::min(i_min_, c.i);
    i_max = std::max(i_max, c.i);
  }
  i_count_ = i_max - i_min_ + 1;
  long total = i_count_;
  zeta_count_.resize(static_cast<std::size_t>(d_));
  for (int k = 0; k < d_; ++k) {
    zeta_count_[static_cast<std::size_t>(k)] = zeta_max[static_cast<std::size_t>(k)] - zeta_min_[static_cast<std::size_t>(k)] + 1;
    total *= zeta_count_[static_cast<std::size_t>(k)];
  }
  table_.assign(static_cast<std::size_t>(total), -1);
  for (std::size_t n = 0; n < cells.size(); ++n) {
    long idx = cells[n].i - i_min_;
    for (int k = 0; k < d_; ++k) {
      idx = idx * zeta_count_[static_cast<std::size_t>(k)] + (cells[n].zeta[static_cast<std::size_t>(k)] - zeta_min_[static_cast<std::size_t>(k)]);
    }
    table_[static_cast<std::size_t>(idx)] = static_cast<long>(n);
  }
}

long CellLocator::locate(double t, const Eigen::VectorXd& x) const {
  long sum = 0;
  long idx = 0;
  std::vector<int> zeta(static_cast<std::size_t>(d_));
  for (int k = 0; k < d_; ++k) {
    const int z = static_cast<int>(std::floor(x(k) / h_ + 0.5));
    const int rel = z - zeta_min_[static_cast<std::size_t>(k)];
    if (rel < 0 || rel >= zeta_count_[static_cast<std::size_t>(k)]) return -1;
    zeta[static_cast<std::size_t>(k)] = rel;
    sum += z;
  }
  const int i = parity_of(sum) == 0 ? static_cast<int>(std::floor(t / h_))
                                     : static_cast<int>(std::floor(t / h_ + 0.5));
  const int irel = i - i_min_;
  if (irel < 0 || irel >= i_count_) return -1;
  idx = irel;
  for (int k = 0; k < d_; ++k) {
    idx = idx * zeta_count_[static_cast<std::size_t>(k)] + zeta[static_cast<std::size_t>(k)];
  }
  return table_[static_cast<std::size_t>(idx)];
}

long CellLocator::locate2(double t, double x1, double x2) const {
  const double inv = 1.0 / h_;
  const int z1 = static_cast<int>(fast_floor(x1 * inv + 0.5));
  const int z2 = static_cast<int>(fast_floor(x2 * inv + 0.5));
  const int r1 = z1 - zeta_min_[0];
  const int r2 = z2 - zeta_min_[1];
  if (r1 < 0 || r1 >= zeta_count_[0] || r2 < 0 || r2 >= zeta_count_[1]) return -1;
  const int i = ((z1 + z2) & 1) == 0 ? static_cast<int>(fast_floor(t * inv))
                                     : static_cast<int>(fast_floor(t * inv + 0.5));
  const int irel = i - i_min_;
  if (irel < 0 || irel >= i_count_) return -1;
  return table_[static_cast<std::size_t>((static_cast<long>(irel) * zeta_count_[0] + r1) * zeta_count_[1] + r2)];
}

double Box::volume() const { return (hi - lo).prod(); }

bool Box::contains(const Eigen::VectorXd& x) const {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x(k) < lo(k) || x(k) > hi(k)) return false;
  }
  return true;
}

std::vector<Box> omega_region(const GridSpec& spec, int s) {
  spec.validate();
  if (s != 1 && s != 2) {
    throw InvalidArgument("parity region index must be 1 (even) or 2 (odd)");
  }
  const int d = spec.dim();
  const double h = spec.h;
  std::vector<std::pair<int, int>> ranges;
  for (int k = 0; k < d; ++k) {
    ranges.push_back(zeta_range(spec.omega_lo(k), spec.omega_hi(k), h));
    if (ranges.back().first > ranges.back().second) return {};
  }
  std::vector<Box> out;
  std::vector<int> zeta(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) zeta[static_cast<std::size_t>(k)] = ranges[static_cast<std::size_t>(k)].first;
  while (true) {
    long sum = 0;
    for (int z : zeta) sum += z;
    if (parity_of(sum) == s - 1) {
      Box b;
      b.lo.resize(d);
      b.hi.resize(d);
      for (int k = 0; k < d; ++k) {
        b.lo(k) = zeta[static_cast<std::size_t>(k)] * h - 0.375 * h;
        b.hi(k) = zeta[static_cast<std::size_t>(k)] * h + 0.375 * h;
      }
      out.push_back(std::move(b));
    }
    int k = 0;
    while (k < d && ++zeta[static_cast<std::size_t>(k)] > ranges[static_cast<std::size_t>(k)].second) {
      zeta[static_cast<std::size_t>(k)] = ranges[static_cast<std::size_t>(k)].first;
      ++k;
    }
    if (k == d) break;
  }
  return out;
}

double region_volume(const std::vector<Box>& region) {
  double v = 0.0;
  for (const Box& b : region) v += b.volume();
  return v;
}

int plateau_region_at(double t, double h) {
  // Even slabs [ih, (i+1)h] have their plateau where t - ih in [h/8, 7h/8].
  const double even = t / h - std::floor(t / h);
  if (even >= 0.125 && even <= 0.875) return 1;
  return 2;
}

std::vector<double> step_function_Eh(const FieldEvaluator& fields, const PressureLaw& law,
                                     const std::vector<Cell>& cells) {
  std::vector<double> out;
  out.reserve(cells.size());
  for (const Cell& c : cells) {
    const EulerState z = fields(c.t_center(), c.x_center());
    out.push_back(constraint_defect(z, law));
  }
  return out;
}

}  // namespace wildeuler

#pragma once

// Shifted space-time grid: cells C_{i,zeta} whose time slab is staggered by
// h/2 according to the parity of |zeta|, plateau cutoffs, parity regions and
// the step function E^h.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "wildeuler/euler_state.hpp"
#include "wildeuler/waves.hpp"

namespace wildeuler {

struct GridSpec {
  double h = 0.025;
  double epsilon = 0.1;
  double T = 1.0;
  Eigen::VectorXd omega_lo;  // spatial box Omega_0 inside one torus period
  Eigen::VectorXd omega_hi;
  double period = 1.0;

  int dim() const { return static_cast<int>(omega_lo.size()); }
  /// 0 < h <= eps/2, eps < T/2, Omega_0 a nonempty box inside [0, period]^d.
  /// With require_fine = false the h < eps/2 condition is skipped.
  void validate(bool require_fine = true) const;
  double omega_volume() const;
  /// Default torus box [0,1]^d.
  static GridSpec unit(int d, double h, double epsilon, double T);
};

struct Cell {
  int i = 0;
  std::vector<int> zeta;
  int parity = 0;  // |zeta| mod 2
  double t_lo = 0.0;
  double t_hi = 0.0;
  Eigen::VectorXd x_lo;
  Eigen::VectorXd x_hi;

  double t_center() const { return 0.5 * (t_lo + t_hi); }
  Eigen::VectorXd x_center() const { return 0.5 * (x_lo + x_hi); }
  /// Space-time cutoff 1 on the centred 3h/4 block, 0 outside the cell.
  SpacetimeCutoff cutoff(double h) const;
};

/// Parity of an integer sum, in {0, 1}.
inline int parity_of(long s) { return static_cast<int>(((s % 2) + 2) % 2); }

/// Cells with C_{i,zeta} inside [eps, T - eps] x Omega_0. Throws EmptyGrid.
std::vector<Cell> build_grid(const GridSpec& spec);
/// Cells inside [t_min, t_max] x Omega_0.
std::vector<Cell> build_grid(const GridSpec& spec, double t_min, double t_max);

/// O(1) point location: the unique cell of a list built by build_grid that
/// contains (t, x), or -1.
class CellLocator {
 public:
  CellLocator(const GridSpec& spec, const std::vector<Cell>& cells);

  long locate(double t, const Eigen::VectorXd& x) const;
  long locate2(double t, double x1, double x2) const;

 private:
  double h_;
  int d_;
  std::vector<int> zeta_min_;
  std::vector<int> zeta_count_;
  int i_min_ = 0;
  int i_count_ = 0;
  std::vector<long> table_;
};

/// Shrunken cube zeta h + [-3h/8, 3h/8]^d.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  double volume() const;
  bool contains(const Eigen::VectorXd& x) const;
};

/// Omega_s^h: union of shrunken cubes with |zeta| even (s = 1) or odd (s = 2)
/// and Q_zeta inside Omega_0.
std::vector<Box> omega_region(const GridSpec& spec, int s);
double region_volume(const std::vector<Box>& region);

/// Which region is covered by the plateau of the time slabs at t: 1 if the
/// even cells are on their plateau in time, 2 if the odd cells are.
int plateau_region_at(double t, double h);

using FieldEvaluator = std::function<EulerState(double, const Eigen::VectorXd&)>;

/// E^h = p(rho) + |m|^2/(d rho) - Q at each cell's own centre.
std::vector<double> step_function_Eh(const FieldEvaluator& fields, const PressureLaw& law,
                                     const std::vector<Cell>& cells);

}  // namespace wildeuler

#pragma once

// Subsolutions as base fields plus accumulated layers of localized waves,
// evaluable pointwise in closed form. Density and generalized pressure come
// from the base only; waves add (0, m, M, 0).

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "wildeuler/euler_state.hpp"
#include "wildeuler/grid.hpp"
#include "wildeuler/waves.hpp"

namespace wildeuler {

/// Pointwise d = 2 state: rho, m1, m2, M11, M12, Q.
struct State2 {
  double rho = 1.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double M11 = 0.0;
  double M12 = 0.0;
  double Q = 0.0;

  EulerState to_state() const;
};

class BaseFields {
 public:
  using Function = std::function<EulerState(double, const Eigen::VectorXd&)>;

  static BaseFields constant(const EulerState& z);
  /// Closed-form fields; must return states of dimension d.
  static BaseFields function(int d, Function f);

  int dim() const { return d_; }
  bool is_constant() const { return constant_; }
  EulerState evaluate(double t, const Eigen::VectorXd& x) const;
  State2 evaluate2(double t, double x1, double x2) const;

 private:
  int d_ = 2;
  bool constant_ = true;
  EulerState value_;
  State2 value2_;
  Function f_;
};

/// All waves of one perturbation step: common frequency and profile, at most
/// one active wave per point (cells of a grid partition space-time).
class WaveLayer {
 public:
  WaveLayer(const GridSpec& grid, std::vector<Cell> cells, std::vector<LocalizedWave> waves,
            std::vector<long> wave_of_cell);

  int frequency() const { return j_; }
  double h() const { return h_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<LocalizedWave>& waves() const { return waves_; }
  std::size_t size() const { return waves_.size(); }

  /// Adds (m1, m2, M11, M12) of the layer at (t, x) to acc.
  void accumulate2(double t, double x1, double x2, double* acc) const;
  /// Same for arbitrary dimension through the generic wave evaluator.
  void accumulate(double t, const Eigen::VectorXd& x, Eigen::VectorXd& m, Eigen::MatrixXd& M) const;

 private:
  struct Fast {
    std::array<double, 3> xi;
    std::array<double, 3> center;
    std::array<double, 4> vbar;             // m1, m2, M11, M12
    std::array<std::array<double, 4>, 20> D;  // same components per multi-index
  };

  double h_;
  int j_;
  std::vector<Cell> cells_;
  std::vector<LocalizedWave> waves_;
  std::vector<long> wave_of_cell_;
  CellLocator locator_;
  std::shared_ptr<const OscillationProfile> profile_;
  std::vector<Fast> fast_;
  std::array<std::array<int, 3>, 20> exps_{};
  std::array<int, 20> orders_{};
};

class FieldEnsemble {
 public:
  explicit FieldEnsemble(BaseFields base);

  const BaseFields& base() const { return base_; }
  int dim() const { return base_.dim(); }
  const std::vector<std::shared_ptr<const WaveLayer>>& layers() const { return layers_; }
  std::size_t wave_count() const;
  /// Largest wave frequency over all layers, 0 without waves.
  int max_frequency() const;

  /// New ensemble sharing the existing layers plus one more.
  FieldEnsemble with_layer(std::shared_ptr<const WaveLayer> layer) const;

  EulerState evaluate(double t, const Eigen::VectorXd& x) const;
  State2 evaluate2(double t, double x1, double x2) const;
  /// Base fields at (t, x) with the waves of the first n layers.
  State2 evaluate2_layers(double t, double x1, double x2, std::size_t n) const;
  FieldEvaluator evaluator() const;

 private:
  BaseFields base_;
  std::vector<std::shared_ptr<const WaveLayer>> layers_;
};

}  // namespace wildeuler

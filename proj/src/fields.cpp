#include "wildeuler/fields.hpp"

#include <cmath>

#include "wildeuler/errors.hpp"

namespace wildeuler {

EulerState State2::to_state() const {
  EulerState z;
  z.rho = rho;
  z.m.resize(2);
  z.m << m1, m2;
  z.M.resize(2, 2);
  z.M << M11, M12, M12, -M11;
  z.Q = Q;
  return z;
}

BaseFields BaseFields::constant(const EulerState& z) {
  z.validate();
  BaseFields b;
  b.d_ = z.dim();
  b.constant_ = true;
  b.value_ = z;
  if (b.d_ == 2) {
    b.value2_ = {z.rho, z.m(0), z.m(1), z.M(0, 0), z.M(0, 1), z.Q};
  }
  return b;
}

BaseFields BaseFields::function(int d, Function f) {
  if (!f) {
    throw InvalidArgument("base field function is empty");
  }
  BaseFields b;
  b.d_ = d;
  b.constant_ = false;
  b.f_ = std::move(f);
  return b;
}

EulerState BaseFields::evaluate(double t, const Eigen::VectorXd& x) const {
  if (constant_) {
    return value_;
  }
  EulerState z = f_(t, x);
  if (z.dim() != d_) {
    throw InvalidArgument("base field returned a state of the wrong dimension");
  }
  return z;
}

State2 BaseFields::evaluate2(double t, double x1, double x2) const {
  if (constant_) {
    return value2_;
  }
  Eigen::VectorXd x(2);
  x << x1, x2;
  const EulerState z = evaluate(t, x);
  return {z.rho, z.m(0), z.m(1), z.M(0, 0), z.M(0, 1), z.Q};
}

WaveLayer::WaveLayer(const GridSpec& grid, std::vector<Cell> cells,
                     std::vector<LocalizedWave> waves, std::vector<long> wave_of_cell)
    : h_(grid.h),
      j_(0),
      cells_(std::move(cells)),
      waves_(std::move(waves)),
      wave_of_cell_(std::move(wave_of_cell)),
      locator_(grid, cells_) {
  if (wave_of_cell_.size() != cells_.size()) {
    throw InvalidArgument("wave layer: one wave index per cell required");
  }
  if (waves_.empty()) {
    return;
  }
  j_ = waves_.front().frequency();
  for (const LocalizedWave& w : waves_) {
    if (w.frequency() != j_) {
      throw InvalidArgument("all waves of a layer share one frequency");
    }
    if (w.direction().dim() != 2) {
      throw InvalidArgument("wave layers are implemented for d = 2");
    }
  }
  profile_ = std::shared_ptr<const OscillationProfile>(waves_.front().profile_ptr());
  const auto& lower = waves_.front().lower_indices();
  for (std::size_t a = 0; a < lower.size() && a < 20; ++a) {
    exps_[a] = {lower[a][0], lower[a][1], lower[a][2]};
    orders_[a] = lower[a][0] + lower[a][1] + lower[a][2];
  }
  // packed pair order (0,0) (0,1) (0,2) (1,1) (1,2) (2,2)
  for (const LocalizedWave& w : waves_) {
    Fast f{};
    for (int k = 0; k < 3; ++k) {
      f.xi[static_cast<std::size_t>(k)] = w.direction().xi(k);
      f.center[static_cast<std::size_t>(k)] = w.cutoff().center(k);
    }
    const Eigen::MatrixXd& V = w.amplitude();
    f.vbar = {V(0, 2), V(1, 2), V(0, 0), V(0, 1)};
    const Eigen::MatrixXd& D = w.leibniz();
    for (Eigen::Index a = 0; a < D.rows(); ++a) {
      f.D[static_cast<std::size_t>(a)] = {D(a, 2), D(a, 4), D(a, 0), D(a, 1)};
    }
    fast_.push_back(f);
  }
}

void WaveLayer::accumulate2(double t, double x1, double x2, double* acc) const {
  if (fast_.empty()) return;
  const long c = locator_.locate2(t, x1, x2);
  if (c < 0) return;
  const long wi = wave_of_cell_[static_cast<std::size_t>(c)];
  if (wi < 0) return;
  const Fast& f = fast_[static_cast<std::size_t>(wi)];
  const double y[3] = {x1 - f.center[0], x2 - f.center[1], t - f.center[2]};
  const double s = j_ * (x1 * f.xi[0] + x2 * f.xi[1] + t * f.xi[2]);
  const double plateau = 0.375 * h_;
  if (std::abs(y[0]) <= plateau && std::abs(y[1]) <= plateau && std::abs(y[2]) <= plateau) {
    const double hv = profile_->h(s);
    for (int k = 0; k < 4; ++k) acc[k] += hv * f.vbar[static_cast<std::size_t>(k)];
    return;
  }
  const Bump1D bump{h_};
  std::array<double, 4> jet[3];
  for (int k = 0; k < 3; ++k) {
    if (!bump.in_support(y[k])) return;
    jet[k] = bump.jet(y[k]);
  }
  double psi[4];
  profile_->all_levels(s, psi);
  const double inv_j = 1.0 / j_;
  psi[1] *= inv_j;
  psi[2] *= inv_j * inv_j;
  psi[3] *= inv_j * inv_j * inv_j;
  for (std::size_t a = 0; a < 20; ++a) {
    const auto& e = exps_[a];
    const double coef = psi[orders_[a]] * jet[0][static_cast<std::size_t>(e[0])] *
                        jet[1][static_cast<std::size_t>(e[1])] *
                        jet[2][static_cast<std::size_t>(e[2])];
    if (coef == 0.0) continue;
    for (int k = 0; k < 4; ++k) acc[k] += coef * f.D[a][static_cast<std::size_t>(k)];
  }
}

void WaveLayer::accumulate(double t, const Eigen::VectorXd& x, Eigen::VectorXd& m,
                           Eigen::MatrixXd& M) const {
  if (x.size() == 2) {
    double acc[4] = {0, 0, 0, 0};
    accumulate2(t, x(0), x(1), acc);
    m(0) += acc[0];
    m(1) += acc[1];
    M(0, 0) += acc[2];
    M(1, 1) -= acc[2];
    M(0, 1) += acc[3];
    M(1, 0) += acc[3];
    return;
  }
  throw InvalidArgument("wave layers are implemented for d = 2");
}

FieldEnsemble::FieldEnsemble(BaseFields base) : base_(std::move(base)) {}

std::size_t FieldEnsemble::wave_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l->size();
  return n;
}

int FieldEnsemble::max_frequency() const {
  int j = 0;
  for (const auto& l : layers_) j = std::max(j, l->frequency());
  return j;
}

FieldEnsemble FieldEnsemble::with_layer(std::shared_ptr<const WaveLayer> layer) const {
  if (base_.dim() != 2) {
    throw InvalidArgument("wave layers are implemented for d = 2");
  }
  FieldEnsemble out = *this;
  out.layers_.push_back(std::move(layer));
  return out;
}

EulerState FieldEnsemble::evaluate(double t, const Eigen::VectorXd& x) const {
  EulerState z = base_.evaluate(t, x);
  for (const auto& l : layers_) l->accumulate(t, x, z.m, z.M);
  return z;
}

State2 FieldEnsemble::evaluate2(double t, double x1, double x2) const {
  return evaluate2_layers(t, x1, x2, layers_.size());
}

State2 FieldEnsemble::evaluate2_layers(double t, double x1, double x2, std::size_t n) const {
  State2 z = base_.evaluate2(t, x1, x2);
  double acc[4] = {0, 0, 0, 0};
  for (std::size_t k = 0; k < n && k < layers_.size(); ++k) {
    layers_[k]->accumulate2(t, x1, x2, acc);
  }
  z.m1 += acc[0];
  z.m2 += acc[1];
  z.M11 += acc[2];
  z.M12 += acc[3];
  return z;
}

FieldEvaluator FieldEnsemble::evaluator() const {
  FieldEnsemble copy = *this;
  return [copy](double t, const Eigen::VectorXd& x) { return copy.evaluate(t, x); };
}

}  // namespace wildeuler

#pragma once

#include <vector>

namespace wildeuler {

/// floor for |x| < 2^62 without a libm call.
inline double fast_floor(double x) {
  const double t = static_cast<double>(static_cast<long long>(x));
  return t > x ? t - 1.0 : t;
}

/// Dense polynomial with ascending coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  const std::vector<double>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double operator()(double u) const;

  Polynomial derivative() const;
  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const;
  /// p(alpha u + beta).
  Polynomial compose_affine(double alpha, double beta) const;
  Polynomial operator*(double s) const;
  Polynomial operator+(double s) const;
  Polynomial operator*(const Polynomial& other) const;

 private:
  std::vector<double> c_;
};

/// 1-periodic piecewise polynomial on [0, 1). Piece k covers
/// [breaks[k], breaks[k+1]) and is stored in the local variable u = s - breaks[k].
class PeriodicPiecewise {
 public:
  PeriodicPiecewise(std::vector<double> breaks, std::vector<Polynomial> pieces);

  double operator()(double s) const;
  /// Antiderivative with value 0 at s = 0. Periodic only if the mean is zero.
  PeriodicPiecewise antiderivative() const;
  PeriodicPiecewise derivative() const;
  double mean() const;
  PeriodicPiecewise shifted(double c) const;

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<Polynomial>& pieces() const { return pieces_; }

 private:
  std::vector<double> breaks_;
  std::vector<Polynomial> pieces_;
};

}  // namespace wildeuler

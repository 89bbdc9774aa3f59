#include "wildeuler/piecewise_poly.hpp"

#include <cmath>

#include "wildeuler/errors.hpp"

namespace wildeuler {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) {
    c_.push_back(0.0);
  }
}

double Polynomial::operator()(double u) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    acc = acc * u + *it;
  }
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) {
    return Polynomial({0.0});
  }
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) {
    d[k - 1] = static_cast<double>(k) * c_[k];
  }
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> a(c_.size() + 1, 0.0);
  for (std::size_t k = 0; k < c_.size(); ++k) {
    a[k + 1] = c_[k] / static_cast<double>(k + 1);
  }
  return Polynomial(std::move(a));
}

Polynomial Polynomial::compose_affine(double alpha, double beta) const {
  // Horner in polynomial arithmetic: acc = acc * (alpha u + beta) + c_k.
  std::vector<double> acc{0.0};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    std::vector<double> next(acc.size() + 1, 0.0);
    for (std::size_t k = 0; k < acc.size(); ++k) {
      next[k] += beta * acc[k];
      next[k + 1] += alpha * acc[k];
    }
    next[0] += *it;
    acc = std::move(next);
  }
  return Polynomial(std::move(acc));
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> out = c_;
  for (double& v : out) {
    v *= s;
  }
  return Polynomial(std::move(out));
}

Polynomial Polynomial::operator+(double s) const {
  std::vector<double> out = c_;
  out[0] += s;
  return Polynomial(std::move(out));
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  std::vector<double> out(c_.size() + other.c_.size() - 1, 0.0);
  for (std::size_t a = 0; a < c_.size(); ++a) {
    for (std::size_t b = 0; b < other.c_.size(); ++b) {
      out[a + b] += c_[a] * other.c_[b];
    }
  }
  return Polynomial(std::move(out));
}

PeriodicPiecewise::PeriodicPiecewise(std::vector<double> breaks, std::vector<Polynomial> pieces)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
  if (breaks_.size() != pieces_.size() + 1 || breaks_.front() != 0.0 || breaks_.back() != 1.0) {
    throw InvalidArgument("periodic piecewise polynomial needs breaks 0 = b0 < ... < bn = 1");
  }
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
    if (!(breaks_[k] < breaks_[k + 1])) {
      throw InvalidArgument("breaks must be strictly increasing");
    }
  }
}

double PeriodicPiecewise::operator()(double s) const {
  s -= std::floor(s);
  std::size_t k = 0;
  while (k + 2 < breaks_.size() && s >= breaks_[k + 1]) {
    ++k;
  }
  return pieces_[k](s - breaks_[k]);
}

PeriodicPiecewise PeriodicPiecewise::antiderivative() const {
  std::vector<Polynomial> out;
  double start = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    Polynomial q = pieces_[k].antiderivative() + start;
    start = q(breaks_[k + 1] - breaks_[k]);
    out.push_back(std::move(q));
  }
  return PeriodicPiecewise(breaks_, std::move(out));
}

PeriodicPiecewise PeriodicPiecewise::derivative() const {
  std::vector<Polynomial> out;
  for (const Polynomial& p : pieces_) {
    out.push_back(p.derivative());
  }
  return PeriodicPiecewise(breaks_, std::move(out));
}

double PeriodicPiecewise::mean() const {
  double total = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    total += pieces_[k].antiderivative()(breaks_[k + 1] - breaks_[k]);
  }
  return total;
}

PeriodicPiecewise PeriodicPiecewise::shifted(double c) const {
  std::vector<Polynomial> out;
  for (const Polynomial& p : pieces_) {
    out.push_back(p + c);
  }
  return PeriodicPiecewise(breaks_, std::move(out));
}

}  // namespace wildeuler

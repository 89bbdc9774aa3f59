#include "wildeuler/toy_model.hpp"

#include <algorithm>
#include <cmath>

#include "wildeuler/errors.hpp"
#include "wildeuler/functionals.hpp"

namespace wildeuler {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr long kBlock = 4096;

}  // namespace

ToyPair::ToyPair(double u0, double v0) : cu_(u0), cv_(v0) {}

ToyPair::ToyPair(Function u0, Function v0) : u0f_(std::move(u0)), v0f_(std::move(v0)) {
  if (!u0f_ || !v0f_) throw InvalidArgument("toy base functions must be set");
}

double ToyPair::u0(double x) const { return u0f_ ? u0f_(x) : cu_; }
double ToyPair::v0(double x) const { return v0f_ ? v0f_(x) : cv_; }

double ToyPair::u(double x) const {
  double u = u0(x);
  const double av = std::abs(v0(x));
  for (long n : n_) {
    const double s = std::abs(u) + av;
    u += 0.5 * std::sin(kTwoPi * static_cast<double>(n) * x) * (1.0 - s * s);
  }
  return u;
}

double ToyPair::v(double x) const { return v0(x); }

long ToyPair::max_frequency() const {
  long m = 0;
  for (long n : n_) m = std::max(m, n);
  return m;
}

ToyPair ToyPair::with_term(long n) const {
  if (n < 1) throw InvalidArgument("toy frequencies must be positive integers");
  ToyPair out = *this;
  out.n_.push_back(n);
  return out;
}

long ToyQuadrature::points(long n_max) const {
  if (min_points < 1 || points_per_period < 1) {
    throw InvalidArgument("toy quadrature sizes must be positive");
  }
  return std::max(min_points, points_per_period * n_max);
}

ToyPass toy_pass(const ToyPair& pair, const ToyQuadrature& quad) {
  const long N = quad.points(pair.max_frequency());
  const double dx = 1.0 / static_cast<double>(N);
  const auto& ns = pair.frequencies();
  const std::size_t L = ns.size();
  std::vector<double> u(kBlock), av(kBlock);
  std::vector<double> bi, bj, bd;
  std::vector<double> tmp_i(kBlock), tmp_j(kBlock), tmp_d(kBlock);
  ToyPass out;
  out.points = N;
  // sin(2 pi n x_i) by rotation from the block start, resynced each block
  std::vector<double> rc(L), rs(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double step = kTwoPi * static_cast<double>(ns[l]) * dx;
    rc[l] = std::cos(step);
    rs[l] = std::sin(step);
  }
  for (long start = 0; start < N; start += kBlock) {
    const long len = std::min(kBlock, N - start);
    for (long i = 0; i < len; ++i) {
      const double x = (static_cast<double>(start + i) + 0.5) * dx;
      u[static_cast<std::size_t>(i)] = pair.u0(x);
      av[static_cast<std::size_t>(i)] = std::abs(pair.v0(x));
    }
    for (std::size_t l = 0; l < L; ++l) {
      // phase reduced modulo one period before calling libm
      const long long whole = static_cast<long long>(ns[l]) * (2 * start + 1);
      const long long period = 2 * N;
      const double frac = static_cast<double>(whole % period) / static_cast<double>(period);
      double s = std::sin(kTwoPi * frac);
      double c = std::cos(kTwoPi * frac);
      for (long i = 0; i < len; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double a = std::abs(u[k]) + av[k];
        u[k] += 0.5 * s * (1.0 - a * a);
        const double s2 = s * rc[l] + c * rs[l];
        c = c * rc[l] - s * rs[l];
        s = s2;
      }
    }
    for (long i = 0; i < len; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double a = std::abs(u[k]) + av[k];
      out.max_sum = std::max(out.max_sum, a);
      tmp_i[k] = a * a - 1.0;
      tmp_j[k] = (1.0 - a * a) * (1.0 - a * a);
      tmp_d[k] = (1.0 - a) * (1.0 - a);
    }
    bi.push_back(pairwise_sum(tmp_i.data(), static_cast<std::size_t>(len)));
    bj.push_back(pairwise_sum(tmp_j.data(), static_cast<std::size_t>(len)));
    bd.push_back(pairwise_sum(tmp_d.data(), static_cast<std::size_t>(len)));
  }
  out.I = pairwise_sum(bi.data(), bi.size()) * dx;
  out.jensen = 0.125 * pairwise_sum(bj.data(), bj.size()) * dx;
  out.distance_sq = pairwise_sum(bd.data(), bd.size()) * dx;
  return out;
}

double I_toy(const ToyPair& pair, const ToyQuadrature& quad) { return toy_pass(pair, quad).I; }

ToyPair perturb_toy(const ToyPair& pair, long n, const ToyQuadrature& quad) {
  const ToyPass p = toy_pass(pair, quad);
  if (!(p.max_sum < 1.0)) throw NotStrict("toy pair is not strict: max |u| + |v| >= 1");
  return pair.with_term(n);
}

ToyTrace iterate_toy(const ToyPair& initial, const std::vector<long>& schedule,
                     double stop_tolerance, const ToyQuadrature& quad) {
  ToyTrace tr{{}, initial, toy_pass(initial, quad), {}};
  ToyPass cur = tr.initial;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (std::abs(cur.I) < stop_tolerance) break;
    if (!(cur.max_sum < 1.0)) throw NotStrict("toy pair is not strict: max |u| + |v| >= 1");
    ToyPair next = tr.final_pair.with_term(schedule[k]);
    const ToyPass np = toy_pass(next, quad);
    ToyStep st;
    st.step = static_cast<int>(k);
    st.n = schedule[k];
    st.I_before = cur.I;
    st.I_after = np.I;
    st.gain = np.I - cur.I;
    st.floor = cur.I * cur.I / 16.0;
    st.max_sum = np.max_sum;
    st.points = np.points;
    tr.steps.push_back(st);
    tr.final_pair = std::move(next);
    cur = np;
  }
  tr.final_pass = cur;
  return tr;
}

std::vector<long> doubling_schedule(long n0, int steps) {
  if (n0 < 1 || steps < 0) throw InvalidArgument("doubling schedule needs n0 >= 1, steps >= 0");
  std::vector<long> out;
  long n = n0;
  for (int k = 0; k < steps; ++k) {
    out.push_back(n);
    n *= 2;
  }
  return out;
}

}  // namespace wildeuler

#pragma once

// The model problem |u| + |v| = 1 on [0, 1]: functional, perturbation and
// iteration, with perturbations kept as closed-form sine terms.

#include <functional>
#include <vector>

namespace wildeuler {

/// u = u0 + chain of terms 1/2 sin(2 pi n x) (1 - (|u| + |v|)^2), v = v0.
class ToyPair {
 public:
  using Function = std::function<double(double)>;

  /// Constant base pair.
  ToyPair(double u0 = 0.0, double v0 = 0.0);
  ToyPair(Function u0, Function v0);

  double u(double x) const;
  double v(double x) const;
  /// Base values at x.
  double u0(double x) const;
  double v0(double x) const;
  bool constant_base() const { return !u0f_; }

  /// Integer frequencies n (k = 2 pi n) of the accumulated terms.
  const std::vector<long>& frequencies() const { return n_; }
  long max_frequency() const;
  ToyPair with_term(long n) const;

 private:
  double cu_ = 0.0;
  double cv_ = 0.0;
  Function u0f_;
  Function v0f_;
  std::vector<long> n_;
};

/// Midpoint rule with max(min_points, points_per_period * n_max) points.
struct ToyQuadrature {
  long min_points = 1L << 16;
  long points_per_period = 8;

  long points(long n_max) const;
};

struct ToyPass {
  double I = 0.0;             // int (|u| + |v|)^2 - 1
  double max_sum = 0.0;       // max |u| + |v|
  double jensen = 0.0;        // 1/8 int (1 - (|u| + |v|)^2)^2
  double distance_sq = 0.0;   // int (1 - (|u| + |v|))^2
  long points = 0;
};

ToyPass toy_pass(const ToyPair& pair, const ToyQuadrature& quad = {});
double I_toy(const ToyPair& pair, const ToyQuadrature& quad = {});

/// u_k = u + 1/2 sin(2 pi n x)(1 - (|u| + |v|)^2), v unchanged. Throws NotStrict
/// unless |u| + |v| < 1 at every quadrature sample.
ToyPair perturb_toy(const ToyPair& pair, long n, const ToyQuadrature& quad = {});

struct ToyStep {
  int step = 0;
  long n = 0;
  double I_before = 0.0;
  double I_after = 0.0;
  double gain = 0.0;
  double floor = 0.0;  // I_before^2 / 16
  double max_sum = 0.0;
  long points = 0;
};

struct ToyTrace {
  std::vector<ToyStep> steps;
  ToyPair final_pair;
  ToyPass initial;
  ToyPass final_pass;
};

/// Applies the schedule of integer frequencies until |I| < stop_tolerance.
ToyTrace iterate_toy(const ToyPair& initial, const std::vector<long>& schedule,
                     double stop_tolerance = 0.0, const ToyQuadrature& quad = {});

/// n0, 2 n0, 4 n0, ... (steps entries).
std::vector<long> doubling_schedule(long n0, int steps);

}  // namespace wildeuler

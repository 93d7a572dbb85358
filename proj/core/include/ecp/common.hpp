#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: coefficient positivity, index windows, unsupported problem ids.
struct DomainError : Error {
  using Error::Error;
};

// Grid/mesh too coarse for the requested quantity, or a zero whose order
// cannot be resolved (order > 3).
struct ResolutionError : Error {
  using Error::Error;
};

// Degenerate data that defeats the algorithm (e.g. all Liouville cofactors
// vanish, no spectral cluster matches).
struct DegeneracyError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

// Coarse/fine eigenvalue lists could not be matched for extrapolation.
struct PairingError : Error {
  using Error::Error;
};

// Deterministic RNG. std::*_distribution output is implementation-defined,
// so the mappings are spelled out here; results are stable across stdlibs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t raw() { return eng_(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

using ScalarFn = std::function<double(double)>;
using PlaneFn = std::function<double(double, double)>;

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return s;
}

// Composite Simpson on a uniform grid given by an evaluator; n is rounded up
// to an even panel count.
inline double simpson(const ScalarFn& f, double a, double b, int n) {
  if (n % 2) ++n;
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Piecewise-linear evaluation of a tabulated function; xs strictly increasing.
inline double lerp_eval(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return (1.0 - t) * ys[i] + t * ys[i + 1];
}

// 4th-order first derivative of uniformly tabulated values. Non-periodic
// boundaries use one-sided 5-point stencils of the same order.
std::vector<double> fd_derivative(const std::vector<double>& v, double h, bool periodic);

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace ecp

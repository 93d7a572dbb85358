#pragma once

#include <vector>

#include "ecp/common.hpp"

namespace ecp::sl1d {

enum class Boundary { dirichlet, neumann, periodic };

// -(K u')' + Q u = lambda G u with K, G > 0 on the closed domain.
struct CoefficientTriple {
  ScalarFn K, Q, G;
};

struct SLProblem {
  CoefficientTriple coeff;
  Boundary boundary = Boundary::dirichlet;
  double a = 0.0;
  double b = 1.0;  // periodic problems live on [0, 2*pi), a/b ignored
};

inline CoefficientTriple sine_coefficients() {
  return {[](double) { return 1.0; }, [](double) { return 0.0; },
          [](double) { return 1.0; }};
}

inline CoefficientTriple mathieu_coefficients(double amplitude) {
  return {[](double) { return 1.0; },
          [amplitude](double x) { return amplitude * std::cos(x); },
          [](double) { return 1.0; }};
}

struct SLSpectrum {
  Boundary boundary = Boundary::dirichlet;
  std::vector<double> grid;     // strictly increasing samples; periodic: [0, 2*pi)
  std::vector<double> weights;  // lumped-mass quadrature weights per sample
  std::vector<double> eigenvalues;                  // ascending
  std::vector<std::vector<double>> eigenfunctions;  // B-normalized, first
                                                    // significant sample > 0
  double period = 0.0;  // 2*pi when periodic, else 0

  bool periodic() const { return boundary == Boundary::periodic; }
  double h() const { return grid[1] - grid[0]; }
  int count() const { return static_cast<int>(eigenvalues.size()); }
};

// Linear combination sum_{j=m}^{n} coeff[j-m] * V_j, 1-based window,
// coeff.front() and coeff.back() nonzero.
struct CombinationSpec {
  int m = 1;
  int n = 1;
  std::vector<double> coeff;
};

struct ZeroLocation {
  double x = 0.0;
  int order = 1;
  bool is_run = false;  // maximal run of snapped samples, counted once
};

struct ZeroReport {
  std::vector<ZeroLocation> zeros;
  int zeros_with_multiplicity = 0;
  int sign_changes = 0;
};

struct SturmCheck {
  int zeros_with_multiplicity = 0;
  int sign_changes = 0;
  int zero_bound = 0;         // interval: n-1; circle: zero count of V_n
  int sign_change_floor = 0;  // interval: m-1; circle: zero count of V_m
  bool upper_ok = false;
  bool lower_ok = false;
  ZeroReport detail;
};

// Second-order finite differences; interval problems reduce to a symmetric
// tridiagonal pencil, periodic ones to tridiagonal-plus-corner. count must
// not exceed grid_size/8.
SLSpectrum solve_sl(const SLProblem& problem, int grid_size, int count);

std::vector<double> combination_values(const SLSpectrum& s, const CombinationSpec& c);

// Sign changes between consecutive non-snapped samples (wrapping on the
// circle); snap tolerance is zero_tol_rel * max|values|.
int count_sign_changes(const std::vector<double>& values, bool periodic,
                       double zero_tol_rel = 1e-7);

// Zero locations with order estimates. derivatives[k] tabulates the
// (k+1)-th derivative on the same grid; up to order 3 is used. Interval
// endpoints are excluded. Orders above 3 raise ResolutionError.
ZeroReport count_zeros_with_multiplicity(
    const std::vector<double>& grid, const std::vector<double>& values,
    const std::vector<std::vector<double>>& derivatives, bool periodic,
    double zero_tol_rel = 1e-7);

// Zero/sign-change bounds for combinations: on the interval a combination
// over window [m, n] has at most n-1 zeros with multiplicity and at least
// m-1 sign changes; on the circle the bounds are the zero counts of V_n and
// V_m (even numbers).
SturmCheck sturm_bounds_check(const SLSpectrum& s, const CombinationSpec& c);

// Auxiliary combinations: interval Y_ell = sum (-lambda_j)^ell a_j V_j,
// circle Y_ell = sum (lambda_1 - lambda_j)^ell a_j V_j.
std::vector<double> y_ell(const SLSpectrum& s, const CombinationSpec& c, int ell);

struct LiouvilleResult {
  std::vector<double> values;     // tabulated on the spectrum grid
  std::vector<double> cofactors;  // expansion over V_1..V_{k+1}
};

// Determinant of [V_i at (z_1..z_k, x)], i = 1..k+1, as a function of x.
// Raises DegeneracyError when every cofactor vanishes.
LiouvilleResult liouville_determinant(const SLSpectrum& s, const std::vector<double>& z);

}  // namespace ecp::sl1d

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ecp/common.hpp"
#include "ecp/sl1d.hpp"

namespace ecp::gelfand {

// First n eigenfunctions of a 1D Schrodinger-type operator, used as rows of
// Slater determinants. Rows must be pairwise orthogonal in L2(weight dx) and
// carry a common norm (per-row unit norm is not required; every verdict
// downstream is invariant under a common row scale).
struct SlaterBasis {
  std::vector<ScalarFn> h;
  std::vector<double> eigenvalues;  // strictly increasing
  double lo = 0.0;
  double hi = 1.0;
  ScalarFn weight;  // defaults to 1

  int n() const { return static_cast<int>(h.size()); }
};

SlaterBasis make_slater_basis(std::vector<ScalarFn> h, std::vector<double> eigenvalues,
                              double lo, double hi, ScalarFn weight = {});

SlaterBasis sine_basis(int n);     // sin(j*pi*x) on [0,1]
SlaterBasis hermite_basis(int n);  // normalized H_k(x) exp(-x^2/2), k = 0..n-1

// Tabulated Sturm-Liouville eigenfunctions as basis rows (validated exactly
// on the solver grid, evaluated by linear interpolation).
SlaterBasis basis_from_spectrum(const sl1d::SLSpectrum& s, const sl1d::SLProblem& problem, int n);

// det[h_i(x_j)], rows i = functions, columns j = points.
double slater_eval(const SlaterBasis& basis, const std::vector<double>& x);

double linear_eval(const SlaterBasis& basis, const std::vector<double>& b, double x);

struct NonvanishingReport {
  int samples = 0;
  double min_abs = 0.0;
  double max_abs = 0.0;
  int sign = 0;  // sign on the ordered simplex
  bool ok = false;
  std::vector<std::vector<double>> witnesses;  // two points when the sign flips
};

// Samples the ordered simplex lo < x_1 < ... < x_n < hi with sorted uniform
// tuples and checks that the Slater determinant keeps one sign.
NonvanishingReport simplex_nonvanishing_check(const SlaterBasis& basis, int samples,
                                              std::uint64_t seed, double tolerance = 1e-9);

// Cofactor coefficients s_j of the expansion along the last column:
// det[h_i at (c_1..c_{n-1}, x)] = sum_j s_j h_j(x). Degenerate point sets
// (all minors vanish) raise DegeneracyError.
std::vector<double> slater_minors(const SlaterBasis& basis, const std::vector<double>& c);

struct SignStructureReport {
  bool zeros_ok = false;   // sign changes exactly at the c_j
  bool slabs_ok = false;   // slab sign = (-1)^{n-j} * simplex sign
  int global_sign = 0;
  std::vector<int> slab_signs;
  std::vector<double> zero_locations;
};

SignStructureReport sign_change_structure(const SlaterBasis& basis, const std::vector<double>& c,
                                          int grid_points = 4000);

struct CollinearityReport {
  bool applicable = false;  // found n-1 sign changes
  std::vector<double> zeros;
  double sine_angle = 0.0;
  bool extra_zeros = false;  // tangential dips beyond the sign changes
  bool ok = false;
};

// If sum b_j h_j has n-1 sign changes, its coefficient vector must be
// collinear with the minor vector of those zeros.
CollinearityReport collinearity_check(const SlaterBasis& basis, const std::vector<double>& b,
                                      int grid_points = 8000, double sine_tol = 1e-6);

struct HermiteClosedFormReport {
  double constant = 0.0;     // fitted C_n
  double max_rel_dev = 0.0;  // of the ratio against the fitted constant
  bool ok = false;
};

// Slater determinant of the first n Hermite functions against
// C_n * prod_{i<j}(x_i - x_j) * exp(-|x|^2/2) at random tuples.
HermiteClosedFormReport hermite_closed_form_check(int n, int samples, std::uint64_t seed,
                                                  double rel_tol = 1e-8);

ScalarFn hermite_function(int k);

}  // namespace ecp::gelfand

#include "ecp/gelfand.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace ecp::gelfand {

namespace {

constexpr int kMinN = 2;
constexpr int kMaxN = 8;

void validate_basis(const SlaterBasis& b) {
  const int n = b.n();
  if (n < kMinN || n > kMaxN) throw DomainError("slater basis: n must lie in [2, 8]");
  if (static_cast<int>(b.eigenvalues.size()) != n)
    throw DomainError("slater basis: eigenvalue count mismatch");
  for (int j = 0; j + 1 < n; ++j)
    if (!(b.eigenvalues[j] < b.eigenvalues[j + 1]))
      throw DomainError("slater basis: eigenvalues must be strictly increasing");
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double g = simpson(
          [&](double x) {
            double w = b.weight ? b.weight(x) : 1.0;
            return b.h[i](x) * b.h[j](x) * w;
          },
          b.lo, b.hi, 4000);
      gram(i, j) = gram(j, i) = g;
    }
  for (int i = 0; i < n; ++i) {
    if (!(gram(i, i) > 0.0)) throw DomainError("slater basis: degenerate row norm");
    if (std::abs(gram(i, i) - gram(0, 0)) > 1e-6 * gram(0, 0))
      throw DomainError("slater basis: rows must share a common norm");
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(gram(i, j)) > 1e-6 * std::sqrt(gram(i, i) * gram(j, j)))
        throw DomainError("slater basis: rows must be pairwise orthogonal");
}

Eigen::MatrixXd evaluate_matrix(const SlaterBasis& b, const std::vector<double>& x) {
  const int n = b.n();
  Eigen::MatrixXd m(n, static_cast<int>(x.size()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < static_cast<int>(x.size()); ++j) m(i, j) = b.h[i](x[j]);
  return m;
}

}  // namespace

SlaterBasis make_slater_basis(std::vector<ScalarFn> h, std::vector<double> eigenvalues,
                              double lo, double hi, ScalarFn weight) {
  SlaterBasis b{std::move(h), std::move(eigenvalues), lo, hi, std::move(weight)};
  validate_basis(b);
  return b;
}

SlaterBasis sine_basis(int n) {
  std::vector<ScalarFn> h;
  std::vector<double> lam;
  for (int j = 1; j <= n; ++j) {
    h.push_back([j](double x) { return std::sin(j * M_PI * x); });
    lam.push_back(j * j * M_PI * M_PI);
  }
  return make_slater_basis(std::move(h), std::move(lam), 0.0, 1.0);
}

ScalarFn hermite_function(int k) {
  return [k](double x) {
    double h0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (k == 0) return h0;
    double h1 = std::sqrt(2.0) * x * h0;
    for (int j = 2; j <= k; ++j) {
      double h2 = std::sqrt(2.0 / j) * x * h1 - std::sqrt((j - 1.0) / j) * h0;
      h0 = h1;
      h1 = h2;
    }
    return h1;
  };
}

SlaterBasis hermite_basis(int n) {
  std::vector<ScalarFn> h;
  std::vector<double> lam;
  for (int k = 0; k < n; ++k) {
    h.push_back(hermite_function(k));
    lam.push_back(2.0 * k + 1.0);
  }
  return make_slater_basis(std::move(h), std::move(lam), -12.0, 12.0);
}

SlaterBasis basis_from_spectrum(const sl1d::SLSpectrum& s, const sl1d::SLProblem& problem,
                                int n) {
  if (n > s.count()) throw DomainError("slater basis: spectrum too short");
  if (n < kMinN || n > kMaxN) throw DomainError("slater basis: n must lie in [2, 8]");
  // Orthonormality is exact in the solver's lumped inner product; re-checking
  // interpolants by generic quadrature would only add interpolation noise.
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double g = 0.0;
      for (std::size_t t = 0; t < s.grid.size(); ++t)
        g += s.weights[t] * problem.coeff.G(s.grid[t]) * s.eigenfunctions[i][t] *
             s.eigenfunctions[j][t];
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-6)
        throw DomainError("slater basis: spectrum rows not orthonormal");
    }
  SlaterBasis b;
  for (int i = 0; i < n; ++i) {
    b.h.push_back([grid = s.grid, vals = s.eigenfunctions[i]](double x) {
      return lerp_eval(grid, vals, x);
    });
    b.eigenvalues.push_back(s.eigenvalues[i]);
  }
  b.lo = s.grid.front();
  b.hi = s.grid.back();
  b.weight = problem.coeff.G;
  return b;
}

double slater_eval(const SlaterBasis& basis, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != basis.n())
    throw DomainError("slater_eval: point count must equal n");
  return evaluate_matrix(basis, x).determinant();
}

double linear_eval(const SlaterBasis& basis, const std::vector<double>& b, double x) {
  if (static_cast<int>(b.size()) != basis.n())
    throw DomainError("linear_eval: coefficient count must equal n");
  double s = 0.0;
  for (int j = 0; j < basis.n(); ++j) s += b[j] * basis.h[j](x);
  return s;
}

NonvanishingReport simplex_nonvanishing_check(const SlaterBasis& basis, int samples,
                                              std::uint64_t seed, double tolerance) {
  if (samples < 1) throw DomainError("nonvanishing: need at least one sample");
  const int n = basis.n();
  Rng rng(seed);
  NonvanishingReport rep;
  rep.samples = samples;
  std::vector<std::vector<double>> points(samples, std::vector<double>(n));
  std::vector<double> dets(samples);
  rep.min_abs = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    auto& x = points[s];
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(basis.lo, basis.hi);
    std::sort(x.begin(), x.end());
    dets[s] = slater_eval(basis, x);
    rep.min_abs = std::min(rep.min_abs, std::abs(dets[s]));
    rep.max_abs = std::max(rep.max_abs, std::abs(dets[s]));
  }
  // The determinant vanishes on the simplex boundary, so tuples with nearly
  // coincident entries sit arbitrarily close to zero; samples below the
  // relative floor carry no usable sign and only enter min_abs.
  rep.ok = true;
  int first_significant = -1;
  for (int s = 0; s < samples; ++s) {
    if (std::abs(dets[s]) <= tolerance * rep.max_abs) continue;
    int sign = dets[s] > 0.0 ? 1 : -1;
    if (rep.sign == 0) {
      rep.sign = sign;
      first_significant = s;
    } else if (sign != rep.sign && rep.witnesses.empty()) {
      rep.ok = false;
      rep.witnesses = {points[first_significant], points[s]};
    }
  }
  return rep;
}

std::vector<double> slater_minors(const SlaterBasis& basis, const std::vector<double>& c) {
  const int n = basis.n();
  if (static_cast<int>(c.size()) != n - 1)
    throw DomainError("slater_minors: need n-1 points");
  for (int j = 0; j + 1 < n - 1; ++j)
    if (!(c[j] < c[j + 1])) throw DomainError("slater_minors: points must be increasing");
  Eigen::MatrixXd m = evaluate_matrix(basis, c);  // n x (n-1)
  std::vector<double> s(n, 0.0);
  Eigen::MatrixXd minor(n - 1, n - 1);
  double hadamard = 0.0;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int p = 0; p < n; ++p) {
      if (p == i) continue;
      minor.row(r++) = m.row(p);
    }
    double had = 1.0;
    for (int j = 0; j < n - 1; ++j) had *= minor.col(j).norm();
    hadamard = std::max(hadamard, had);
    double sign = ((i + n - 1) % 2 == 0) ? 1.0 : -1.0;
    s[i] = sign * minor.determinant();
  }
  if (max_abs(s) <= 1e-12 * std::max(hadamard, 1e-300))
    throw DegeneracyError("slater_minors: degenerate point configuration");
  return s;
}

SignStructureReport sign_change_structure(const SlaterBasis& basis, const std::vector<double>& c,
                                          int grid_points) {
  const int n = basis.n();
  if (!(c.front() > basis.lo && c.back() < basis.hi))
    throw DomainError("sign_change_structure: points must be interior");
  std::vector<double> s = slater_minors(basis, c);
  const double h = (basis.hi - basis.lo) / grid_points;
  std::vector<double> vals(grid_points + 1);
  for (int i = 0; i <= grid_points; ++i)
    vals[i] = linear_eval(basis, s, basis.lo + i * h);
  double vmax = max_abs(vals);
  double tol = 1e-9 * vmax;

  SignStructureReport rep;
  int prev_sign = 0;
  double prev_x = basis.lo;
  for (int i = 0; i <= grid_points; ++i) {
    double x = basis.lo + i * h;
    int sg = std::abs(vals[i]) < tol ? 0 : (vals[i] > 0 ? 1 : -1);
    if (sg == 0) continue;
    if (prev_sign != 0 && sg != prev_sign)
      rep.zero_locations.push_back(0.5 * (prev_x + x));
    prev_sign = sg;
    prev_x = x;
  }
  rep.zeros_ok = static_cast<int>(rep.zero_locations.size()) == n - 1;
  if (rep.zeros_ok)
    for (int j = 0; j < n - 1; ++j)
      if (std::abs(rep.zero_locations[j] - c[j]) > 2.0 * h) rep.zeros_ok = false;

  // Slab j lies between c_{j-1} and c_j (with the domain ends as sentinels);
  // the last slab carries the simplex sign.
  rep.slab_signs.assign(n, 0);
  for (int j = 0; j < n; ++j) {
    double a = j == 0 ? basis.lo : c[j - 1];
    double b = j == n - 1 ? basis.hi : c[j];
    double v = linear_eval(basis, s, 0.5 * (a + b));
    rep.slab_signs[j] = v > 0 ? 1 : (v < 0 ? -1 : 0);
  }
  rep.global_sign = rep.slab_signs[n - 1];
  rep.slabs_ok = rep.global_sign != 0;
  for (int j = 0; j < n && rep.slabs_ok; ++j) {
    int expected = ((n - 1 - j) % 2 == 0) ? rep.global_sign : -rep.global_sign;
    if (rep.slab_signs[j] != expected) rep.slabs_ok = false;
  }
  return rep;
}

CollinearityReport collinearity_check(const SlaterBasis& basis, const std::vector<double>& b,
                                      int grid_points, double sine_tol) {
  const int n = basis.n();
  if (static_cast<int>(b.size()) != n)
    throw DomainError("collinearity_check: coefficient count must equal n");
  const double h = (basis.hi - basis.lo) / grid_points;
  std::vector<double> vals(grid_points + 1);
  for (int i = 0; i <= grid_points; ++i)
    vals[i] = linear_eval(basis, b, basis.lo + i * h);
  double vmax = max_abs(vals);
  if (vmax == 0.0) throw DegeneracyError("collinearity_check: zero combination");
  double tol = 1e-9 * vmax;

  CollinearityReport rep;
  for (int i = 0; i < grid_points; ++i) {
    double vi = vals[i], vj = vals[i + 1];
    if (std::abs(vi) < tol || std::abs(vj) < tol || (vi > 0) == (vj > 0)) continue;
    double a = basis.lo + i * h, c = a + h;
    for (int it = 0; it < 80; ++it) {  // bisection to ~1e-13
      double mid = 0.5 * (a + c);
      double vm = linear_eval(basis, b, mid);
      if ((vm > 0) == (vi > 0))
        a = mid;
      else
        c = mid;
    }
    rep.zeros.push_back(0.5 * (a + c));
  }
  // Tangential dips: interior samples that nearly vanish without a change of
  // sign break the simple-zero picture and are only flagged.
  for (int i = 1; i < grid_points; ++i) {
    if (std::abs(vals[i]) > tol) continue;
    bool near_change = false;
    for (const double z : rep.zeros)
      if (std::abs(basis.lo + i * h - z) < 2.0 * h) near_change = true;
    if (!near_change) rep.extra_zeros = true;
  }

  if (static_cast<int>(rep.zeros.size()) < n - 1) {
    rep.applicable = false;
    rep.ok = true;  // fewer sign changes than the bound: nothing to verify
    return rep;
  }
  rep.applicable = true;
  std::vector<double> c(rep.zeros.begin(), rep.zeros.begin() + (n - 1));
  std::vector<double> s = slater_minors(basis, c);
  double bs = 0.0, bb = 0.0, ss = 0.0;
  for (int j = 0; j < n; ++j) {
    bs += b[j] * s[j];
    bb += b[j] * b[j];
    ss += s[j] * s[j];
  }
  double cos2 = (bs * bs) / (bb * ss);
  rep.sine_angle = std::sqrt(std::max(0.0, 1.0 - cos2));
  rep.ok = rep.sine_angle < sine_tol && static_cast<int>(rep.zeros.size()) == n - 1 &&
           !rep.extra_zeros;
  return rep;
}

HermiteClosedFormReport hermite_closed_form_check(int n, int samples, std::uint64_t seed,
                                                  double rel_tol) {
  SlaterBasis basis = hermite_basis(n);
  Rng rng(seed);
  HermiteClosedFormReport rep;
  std::vector<double> ratios;
  std::vector<double> x(n);
  while (static_cast<int>(ratios.size()) < samples) {
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-3.0, 3.0);
    double vdm = 1.0, norm2 = 0.0, mingap = 1e9;
    for (int i = 0; i < n; ++i) {
      norm2 += x[i] * x[i];
      for (int j = i + 1; j < n; ++j) {
        vdm *= x[i] - x[j];
        mingap = std::min(mingap, std::abs(x[i] - x[j]));
      }
    }
    if (mingap < 1e-3) continue;  // ratio ill-conditioned near coincidence
    ratios.push_back(slater_eval(basis, x) / (vdm * std::exp(-0.5 * norm2)));
  }
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= ratios.size();
  rep.constant = mean;
  for (double r : ratios)
    rep.max_rel_dev = std::max(rep.max_rel_dev, std::abs(r - mean) / std::abs(mean));
  rep.ok = rep.max_rel_dev < rel_tol;
  return rep;
}

}  // namespace ecp::gelfand

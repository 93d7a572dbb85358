#include "ecp/sl1d.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace ecp {

std::vector<double> fd_derivative(const std::vector<double>& v, double h, bool periodic) {
  const int n = static_cast<int>(v.size());
  if (n < 5) throw DomainError("fd_derivative: need at least 5 samples");
  std::vector<double> d(n);
  auto central = [&](int im2, int im1, int ip1, int ip2) {
    return (v[im2] - 8.0 * v[im1] + 8.0 * v[ip1] - v[ip2]) / (12.0 * h);
  };
  if (periodic) {
    for (int i = 0; i < n; ++i)
      d[i] = central((i - 2 + n) % n, (i - 1 + n) % n, (i + 1) % n, (i + 2) % n);
    return d;
  }
  d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
  d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
  for (int i = 2; i < n - 2; ++i) d[i] = central(i - 2, i - 1, i + 1, i + 2);
  d[n - 2] = -(-3.0 * v[n - 1] - 10.0 * v[n - 2] + 18.0 * v[n - 3] - 6.0 * v[n - 4] + v[n - 5]) /
             (12.0 * h);
  d[n - 1] = -(-25.0 * v[n - 1] + 48.0 * v[n - 2] - 36.0 * v[n - 3] + 16.0 * v[n - 4] -
               3.0 * v[n - 5]) /
             (12.0 * h);
  return d;
}

}  // namespace ecp

namespace ecp::sl1d {

namespace {

void validate_problem(const SLProblem& p, int grid_size, int count) {
  if (grid_size < 64) throw DomainError("solve_sl: grid_size must be at least 64");
  if (count < 1) throw DomainError("solve_sl: count must be positive");
  if (count > grid_size / 8)
    throw DomainError("solve_sl: count exceeds grid_size/8; refine the grid");
  if (p.boundary != Boundary::periodic && !(p.a < p.b))
    throw DomainError("solve_sl: empty interval");
}

void check_positive(double v, const char* name, double x) {
  if (!(v > 0.0))
    throw DomainError(std::string("solve_sl: coefficient ") + name +
                      " must be positive (violated at x=" + std::to_string(x) + ")");
}

// Symmetric eigensolve of the pencil A u = lambda B u with B diagonal
// positive: T = B^{-1/2} A B^{-1/2}, u = B^{-1/2} w.
struct Pencil {
  std::vector<double> diag, off;  // off[i] couples i and i+1
  double corner = 0.0;            // periodic wrap coupling (first/last)
  std::vector<double> bdiag;
};

void solve_pencil(Pencil& pen, int count, bool periodic, std::vector<double>& lambda,
                  std::vector<std::vector<double>>& vecs) {
  const int n = static_cast<int>(pen.diag.size());
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = 1.0 / std::sqrt(pen.bdiag[i]);
  lambda.assign(n, 0.0);
  std::vector<double> z;
  if (!periodic) {
    std::vector<double> d(n), e(n - 1);
    for (int i = 0; i < n; ++i) d[i] = pen.diag[i] * s[i] * s[i];
    for (int i = 0; i + 1 < n; ++i) e[i] = pen.off[i] * s[i] * s[i + 1];
    z.assign(static_cast<std::size_t>(n) * n, 0.0);
    lapack_int info =
        LAPACKE_dstevd(LAPACK_ROW_MAJOR, 'V', n, d.data(), e.data(), z.data(), n);
    if (info != 0) throw ConvergenceError("solve_sl: tridiagonal eigensolve failed");
    lambda = d;
  } else {
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] = pen.diag[i] * s[i] * s[i];
    for (int i = 0; i + 1 < n; ++i) {
      double v = pen.off[i] * s[i] * s[i + 1];
      a[static_cast<std::size_t>(i) * n + i + 1] = v;
      a[static_cast<std::size_t>(i + 1) * n + i] = v;
    }
    double cw = pen.corner * s[0] * s[n - 1];
    a[n - 1] += cw;
    a[static_cast<std::size_t>(n - 1) * n] += cw;
    lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'V', 'L', n, a.data(), n, lambda.data());
    if (info != 0) throw ConvergenceError("solve_sl: dense eigensolve failed");
    z.swap(a);
  }
  vecs.assign(count, std::vector<double>(n));
  for (int j = 0; j < count; ++j)
    for (int i = 0; i < n; ++i) vecs[j][i] = z[static_cast<std::size_t>(i) * n + j] * s[i];
  lambda.resize(count);
}

void fix_sign(std::vector<double>& u) {
  double m = max_abs(u);
  for (double x : u)
    if (std::abs(x) > 1e-7 * m) {
      if (x < 0.0)
        for (double& y : u) y = -y;
      return;
    }
}

void check_interval_simplicity(const std::vector<double>& lam) {
  for (std::size_t j = 0; j + 1 < lam.size(); ++j) {
    double scale = std::max({1.0, std::abs(lam[j]), std::abs(lam[j + 1])});
    if (lam[j + 1] - lam[j] <= 1e-8 * scale)
      throw DegeneracyError("solve_sl: interval spectrum must be simple");
  }
}

void check_circle_pattern(const std::vector<double>& lam) {
  auto close = [&](double a, double b) {
    return std::abs(b - a) <= 1e-8 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  const int n = static_cast<int>(lam.size());
  if (n >= 2 && close(lam[0], lam[1]))
    throw DegeneracyError("solve_sl: circle ground eigenvalue must be simple");
  // 1-based pattern lambda_{2k} <= lambda_{2k+1} < lambda_{2k+2}
  for (int j = 1; j + 2 < n; j += 2) {
    if (close(lam[j], lam[j + 1]) && close(lam[j + 1], lam[j + 2]))
      throw DegeneracyError("solve_sl: circle eigenvalue of multiplicity above 2");
    if (close(lam[j], lam[j + 2]))
      throw DegeneracyError("solve_sl: circle pair boundaries must be strict");
  }
}

}  // namespace

SLSpectrum solve_sl(const SLProblem& p, int grid_size, int count) {
  validate_problem(p, grid_size, count);
  SLSpectrum out;
  out.boundary = p.boundary;
  const bool periodic = p.boundary == Boundary::periodic;
  const double a = periodic ? 0.0 : p.a;
  const double b = periodic ? 2.0 * M_PI : p.b;

  if (periodic) {
    for (const auto* f : {&p.coeff.K, &p.coeff.Q, &p.coeff.G}) {
      double v0 = (*f)(0.0), v1 = (*f)(2.0 * M_PI);
      if (std::abs(v0 - v1) > 1e-10 * std::max(1.0, std::abs(v0)))
        throw DomainError("solve_sl: coefficients must be 2*pi-periodic");
    }
    const int n = grid_size;
    const double h = (b - a) / n;
    out.grid.resize(n);
    out.weights.assign(n, h);
    for (int i = 0; i < n; ++i) out.grid[i] = a + i * h;
    Pencil pen;
    pen.diag.assign(n, 0.0);
    pen.off.assign(n - 1, 0.0);
    pen.bdiag.assign(n, 0.0);
    std::vector<double> kmid(n);
    for (int i = 0; i < n; ++i) {
      double xm = a + (i + 0.5) * h;
      kmid[i] = p.coeff.K(xm);  // couples node i and i+1 (mod n)
      check_positive(kmid[i], "K", xm);
    }
    for (int i = 0; i < n; ++i) {
      double q = p.coeff.Q(out.grid[i]);
      double g = p.coeff.G(out.grid[i]);
      check_positive(g, "G", out.grid[i]);
      double kl = kmid[(i - 1 + n) % n], kr = kmid[i];
      pen.diag[i] = (kl + kr) / h + q * h;
      pen.bdiag[i] = g * h;
      if (i + 1 < n) pen.off[i] = -kr / h;
    }
    pen.corner = -kmid[n - 1] / h;
    out.period = 2.0 * M_PI;
    solve_pencil(pen, count, true, out.eigenvalues, out.eigenfunctions);
    check_circle_pattern(out.eigenvalues);
  } else {
    const int n = grid_size;  // samples including endpoints
    const double h = (b - a) / (n - 1);
    out.grid.resize(n);
    out.weights.assign(n, h);
    out.weights.front() = out.weights.back() = h / 2.0;
    for (int i = 0; i < n; ++i) out.grid[i] = a + i * h;
    std::vector<double> kmid(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
      double xm = a + (i + 0.5) * h;
      kmid[i] = p.coeff.K(xm);
      check_positive(kmid[i], "K", xm);
    }
    std::vector<double> q(n), g(n);
    for (int i = 0; i < n; ++i) {
      q[i] = p.coeff.Q(out.grid[i]);
      g[i] = p.coeff.G(out.grid[i]);
      check_positive(g[i], "G", out.grid[i]);
    }
    const bool dirichlet = p.boundary == Boundary::dirichlet;
    const int lo = dirichlet ? 1 : 0;
    const int hi = dirichlet ? n - 2 : n - 1;
    const int m = hi - lo + 1;
    Pencil pen;
    pen.diag.assign(m, 0.0);
    pen.off.assign(m - 1, 0.0);
    pen.bdiag.assign(m, 0.0);
    for (int i = lo; i <= hi; ++i) {
      double kl = i > 0 ? kmid[i - 1] : 0.0;
      double kr = i + 1 < n ? kmid[i] : 0.0;
      double w = (i == 0 || i == n - 1) ? h / 2.0 : h;
      pen.diag[i - lo] = (kl + kr) / h + q[i] * w;
      pen.bdiag[i - lo] = g[i] * w;
      if (i < hi) pen.off[i - lo] = -kmid[i] / h;
    }
    std::vector<std::vector<double>> vecs;
    solve_pencil(pen, count, false, out.eigenvalues, vecs);
    check_interval_simplicity(out.eigenvalues);
    out.eigenfunctions.assign(count, std::vector<double>(n, 0.0));
    for (int j = 0; j < count; ++j)
      for (int i = lo; i <= hi; ++i) out.eigenfunctions[j][i] = vecs[j][i - lo];
  }
  for (auto& u : out.eigenfunctions) fix_sign(u);
  return out;
}

std::vector<double> combination_values(const SLSpectrum& s, const CombinationSpec& c) {
  if (c.m < 1 || c.n < c.m || c.n > s.count())
    throw DomainError("combination: index window out of range");
  if (static_cast<int>(c.coeff.size()) != c.n - c.m + 1)
    throw DomainError("combination: coefficient count does not match window");
  if (c.coeff.front() == 0.0 || c.coeff.back() == 0.0)
    throw DomainError("combination: window edge coefficients must be nonzero");
  std::vector<double> v(s.grid.size(), 0.0);
  for (int j = c.m; j <= c.n; ++j) {
    double aj = c.coeff[j - c.m];
    const auto& Vj = s.eigenfunctions[j - 1];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += aj * Vj[i];
  }
  return v;
}

namespace {

int compressed_sign_changes(const std::vector<int>& sgn, bool periodic) {
  std::vector<int> nz;
  for (int s : sgn)
    if (s != 0) nz.push_back(s);
  if (nz.size() < 2) return 0;
  int changes = 0;
  for (std::size_t i = 0; i + 1 < nz.size(); ++i)
    if (nz[i] != nz[i + 1]) ++changes;
  if (periodic && nz.front() != nz.back()) ++changes;
  return changes;
}

}  // namespace

int count_sign_changes(const std::vector<double>& values, bool periodic, double zero_tol_rel) {
  double m = max_abs(values);
  if (m == 0.0) throw DegeneracyError("count_sign_changes: identically zero field");
  double tol = zero_tol_rel * m;
  std::vector<int> sgn(values.size());
  bool any = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sgn[i] = std::abs(values[i]) < tol ? 0 : (values[i] > 0.0 ? 1 : -1);
    any = any || sgn[i] != 0;
  }
  if (!any) throw DegeneracyError("count_sign_changes: identically zero field");
  return compressed_sign_changes(sgn, periodic);
}

namespace {

struct OrderEstimator {
  const std::vector<double>& grid;
  const std::vector<std::vector<double>>& derivs;
  double h;
  bool periodic;

  // Order of vanishing at x0: the first derivative that is nonzero at the
  // local window scale. Global thresholds alone are defeated by the O(h^2)
  // error of tabulated derivatives.
  int estimate(double x0) const {
    const int n = static_cast<int>(grid.size());
    const int win = 8;
    for (std::size_t k = 0; k < derivs.size() && k < 3; ++k) {
      const auto& d = derivs[k];
      double val = lerp_eval(grid, d, x0);
      int i0 = static_cast<int>(std::lround((x0 - grid[0]) / h));
      double wmax = 0.0;
      for (int j = -win; j <= win; ++j) {
        int i = i0 + j;
        if (periodic)
          i = (i % n + n) % n;
        else if (i < 0 || i >= n)
          continue;
        wmax = std::max(wmax, std::abs(d[i]));
      }
      double gmax = max_abs(d);
      if (std::abs(val) > std::max(0.25 * wmax, 1e-7 * gmax)) return static_cast<int>(k) + 1;
    }
    return 0;  // unresolved
  }
};

}  // namespace

ZeroReport count_zeros_with_multiplicity(const std::vector<double>& grid,
                                         const std::vector<double>& values,
                                         const std::vector<std::vector<double>>& derivatives,
                                         bool periodic, double zero_tol_rel) {
  const int n = static_cast<int>(values.size());
  if (n != static_cast<int>(grid.size()) || n < 8)
    throw DomainError("count_zeros: grid/value size mismatch");
  double m = max_abs(values);
  if (m == 0.0)
    throw DegeneracyError("count_zeros: identically zero field");
  const double tol = zero_tol_rel * m;
  const double h = grid[1] - grid[0];
  std::vector<int> sgn(n);
  bool any = false;
  for (int i = 0; i < n; ++i) {
    sgn[i] = std::abs(values[i]) < tol ? 0 : (values[i] > 0.0 ? 1 : -1);
    any = any || sgn[i] != 0;
  }
  if (!any) throw DegeneracyError("count_zeros: identically zero field");

  OrderEstimator est{grid, derivatives, h, periodic};
  ZeroReport rep;
  rep.sign_changes = compressed_sign_changes(sgn, periodic);

  auto resolve = [&](double x0, bool crossing, int flank_parity) {
    // flank_parity: +1 odd required, +2 even required, 0 unknown
    int order = 1;
    if (!derivatives.empty()) {
      order = est.estimate(x0);
      if (order == 0) {
        if (static_cast<int>(derivatives.size()) >= 3)
          throw ResolutionError("count_zeros: zero order above 3 cannot be resolved");
        order = static_cast<int>(derivatives.size()) + 1;
      }
    }
    if (flank_parity == 1 && order % 2 == 0) ++order;
    if (flank_parity == 2 && order % 2 == 1 && !crossing) ++order;
    if (order > 3) throw ResolutionError("count_zeros: zero order above 3 cannot be resolved");
    return order;
  };

  std::vector<bool> in_run(n, false);

  // Maximal runs of snapped samples (one location each). On the interval a
  // run consisting of a lone endpoint sample is the trivial boundary zero.
  std::vector<std::pair<int, int>> runs;
  if (periodic) {
    int i = 0;
    while (i < n) {
      if (sgn[i] != 0) {
        ++i;
        continue;
      }
      int j = i;
      while (j + 1 < n && sgn[j + 1] == 0) ++j;
      runs.emplace_back(i, j);
      i = j + 1;
    }
    if (runs.size() >= 2 && runs.front().first == 0 && runs.back().second == n - 1) {
      runs.front().first = runs.back().first - n;  // wrapped run
      runs.pop_back();
    }
  } else {
    int i = 0;
    while (i < n) {
      if (sgn[i] != 0) {
        ++i;
        continue;
      }
      int j = i;
      while (j + 1 < n && sgn[j + 1] == 0) ++j;
      bool lone_endpoint = (i == j) && (i == 0 || i == n - 1);
      if (!lone_endpoint) runs.emplace_back(i, j);
      i = j + 1;
    }
  }
  for (auto [i, j] : runs) {
    for (int t = i; t <= j; ++t) in_run[(t % n + n) % n] = true;
    double xc = 0.5 * (grid[(i % n + n) % n] + grid[(j % n + n) % n]);
    if (i < 0) xc = grid[(i % n + n) % n] + 0.5 * (j - i) * h;  // wrapped
    int left = (i - 1 >= 0 || periodic) ? sgn[((i - 1) % n + n) % n] : 0;
    int right = (j + 1 < n || periodic) ? sgn[(j + 1) % n] : 0;
    int parity = (left != 0 && right != 0) ? (left != right ? 1 : 2) : 0;
    rep.zeros.push_back({xc, resolve(xc, false, parity), true});
  }

  // Crossings between adjacent non-snapped samples. The order is odd; it is
  // 3 only when the flanking slopes are as small as a pure cubic through the
  // crossing would make them (about h^2 |f'''|). Slopes inside the decision
  // band cannot be told apart from zero at this pitch.
  const int last_pair = periodic ? n - 1 : n - 2;
  for (int i = 0; i <= last_pair; ++i) {
    int j = (i + 1) % n;
    if (sgn[i] == 0 || sgn[j] == 0 || sgn[i] == sgn[j]) continue;
    double vi = values[i], vj = values[j];
    double x0 = grid[i] + h * vi / (vi - vj);
    int order = 1;
    if (derivatives.size() >= 3) {
      double fl = std::max(std::abs(derivatives[0][i]), std::abs(derivatives[0][j]));
      double w3 = 0.0;
      for (int t = -2; t <= 2; ++t) {
        int p = i + t;
        if (periodic) p = (p % n + n) % n;
        else p = std::clamp(p, 0, n - 1);
        w3 = std::max(w3, std::abs(derivatives[2][p]));
      }
      double band = h * h * w3;
      if (fl <= 1.5 * band) order = 3;
      else if (fl <= 6.0 * band)
        throw ResolutionError("count_zeros: crossing order 1 vs 3 too close to call");
    }
    rep.zeros.push_back({x0, order, false});
  }

  // Tangential zeros: local |value| dips below the curvature scale without a
  // sign change. Requires second-derivative data; order-1 estimates are
  // rejected as ordinary extrema.
  if (derivatives.size() >= 2) {
    const auto& d2 = derivatives[1];
    int lo = periodic ? 0 : 1, hi = periodic ? n - 1 : n - 2;
    for (int i = lo; i <= hi; ++i) {
      if (sgn[i] == 0 || in_run[i]) continue;
      int im = (i - 1 + n) % n, ip = (i + 1) % n;
      if (!periodic && (i == 0 || i == n - 1)) continue;
      if (std::abs(values[i]) > std::abs(values[im]) ||
          std::abs(values[i]) > std::abs(values[ip]))
        continue;
      if (sgn[im] != sgn[i] || sgn[ip] != sgn[i]) continue;  // handled as crossing
      if (std::abs(values[i]) >= 3.0 * h * h * std::abs(d2[i])) continue;
      // The parabola through the three samples recovers the extremum height;
      // a genuine tangency sits at zero up to the cubic interpolation error,
      // while a narrow one-signed minimum stays clear of it. Dips inside the
      // error band cannot be classified at this resolution.
      double vm = values[im], v0 = values[i], vp = values[ip];
      double curv = vp - 2.0 * v0 + vm;
      double vstar = v0;
      if (curv != 0.0) vstar = v0 - (vp - vm) * (vp - vm) / (8.0 * curv);
      double fit_err = tol;
      if (derivatives.size() >= 3) fit_err += 0.25 * h * h * h * std::abs(derivatives[2][i]);
      if (std::abs(vstar) > 4.0 * fit_err) continue;
      if (std::abs(vstar) > fit_err)
        throw ResolutionError("count_zeros: tangential dip too close to call at this pitch");
      int order = est.estimate(grid[i]);
      if (order <= 1) continue;  // ordinary extremum
      if (order % 2 == 1)
        throw ResolutionError("count_zeros: parity conflict at tangential zero");
      rep.zeros.push_back({grid[i], order, false});
    }
  }

  std::sort(rep.zeros.begin(), rep.zeros.end(),
            [](const ZeroLocation& a, const ZeroLocation& b) { return a.x < b.x; });
  for (const auto& z : rep.zeros) rep.zeros_with_multiplicity += z.order;
  return rep;
}

SturmCheck sturm_bounds_check(const SLSpectrum& s, const CombinationSpec& c) {
  std::vector<double> v = combination_values(s, c);
  const double h = s.h();
  const bool per = s.periodic();
  std::vector<std::vector<double>> derivs;
  derivs.push_back(fd_derivative(v, h, per));
  derivs.push_back(fd_derivative(derivs[0], h, per));
  derivs.push_back(fd_derivative(derivs[1], h, per));
  SturmCheck chk;
  chk.detail = count_zeros_with_multiplicity(s.grid, v, derivs, per);
  chk.zeros_with_multiplicity = chk.detail.zeros_with_multiplicity;
  chk.sign_changes = chk.detail.sign_changes;
  if (!per) {
    chk.zero_bound = c.n - 1;
    chk.sign_change_floor = c.m - 1;
  } else {
    chk.zero_bound = count_sign_changes(s.eigenfunctions[c.n - 1], true);
    chk.sign_change_floor =
        c.m == 1 ? 0 : count_sign_changes(s.eigenfunctions[c.m - 1], true);
  }
  chk.upper_ok = chk.zeros_with_multiplicity <= chk.zero_bound;
  chk.lower_ok = chk.sign_changes >= chk.sign_change_floor;
  return chk;
}

std::vector<double> y_ell(const SLSpectrum& s, const CombinationSpec& c, int ell) {
  if (ell < 0) throw DomainError("y_ell: ell must be nonnegative");
  if (c.m < 1 || c.n < c.m || c.n > s.count())
    throw DomainError("y_ell: index window out of range");
  std::vector<double> v(s.grid.size(), 0.0);
  for (int j = c.m; j <= c.n; ++j) {
    double lam = s.eigenvalues[j - 1];
    double factor = s.periodic() ? s.eigenvalues[0] - lam : -lam;
    double w = c.coeff[j - c.m] * std::pow(factor, ell);
    const auto& Vj = s.eigenfunctions[j - 1];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += w * Vj[i];
  }
  return v;
}

LiouvilleResult liouville_determinant(const SLSpectrum& s, const std::vector<double>& z) {
  const int k = static_cast<int>(z.size());
  if (k < 1) throw DomainError("liouville_determinant: need at least one point");
  if (k + 1 > s.count())
    throw DomainError("liouville_determinant: spectrum too short for k+1 rows");
  for (int j = 0; j + 1 < k; ++j)
    if (!(z[j] < z[j + 1]))
      throw DomainError("liouville_determinant: points must be strictly increasing");
  if (!(z.front() > s.grid.front() && z.back() < s.grid.back()))
    throw DomainError("liouville_determinant: points must be interior");

  Eigen::MatrixXd vz(k + 1, k);  // V_i(z_j)
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j < k; ++j)
      vz(i, j) = lerp_eval(s.grid, s.eigenfunctions[i], z[j]);

  LiouvilleResult res;
  res.cofactors.assign(k + 1, 0.0);
  double hadamard = 0.0;
  Eigen::MatrixXd minor(k, k);
  for (int i = 0; i <= k; ++i) {
    int r = 0;
    for (int p = 0; p <= k; ++p) {
      if (p == i) continue;
      minor.row(r++) = vz.row(p);
    }
    double had = 1.0;
    for (int j = 0; j < k; ++j) had *= minor.col(j).norm();
    hadamard = std::max(hadamard, had);
    double sign = ((i + k) % 2 == 0) ? 1.0 : -1.0;  // cofactor of the last column
    res.cofactors[i] = sign * minor.determinant();
  }
  double cmax = max_abs(res.cofactors);
  if (cmax <= 1e-12 * std::max(hadamard, 1e-300))
    throw DegeneracyError("liouville_determinant: degenerate point configuration");

  res.values.assign(s.grid.size(), 0.0);
  for (int i = 0; i <= k; ++i) {
    const auto& Vi = s.eigenfunctions[i];
    for (std::size_t t = 0; t < res.values.size(); ++t)
      res.values[t] += res.cofactors[i] * Vi[t];
  }
  return res;
}

}  // namespace ecp::sl1d

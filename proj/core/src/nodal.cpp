#include "ecp/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <utility>

#include "ecp/triangle.hpp"

namespace ecp {

namespace {

// Chunked fork/join over [0, n); exceptions from workers are rethrown once.
void parallel_range(int n, const std::function<void(int, int)>& run) {
  unsigned hw = std::thread::hardware_concurrency();
  int nt = static_cast<int>(std::min<unsigned>(hw ? hw : 1u, 16u));
  if (nt <= 1 || n < 256) {
    run(0, n);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  int chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    int lo = t * chunk;
    int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        run(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct UnionFind {
  std::vector<std::int32_t> parent;

  explicit UnionFind(std::size_t n) : parent(n, -1) {}

  std::int32_t find(std::int32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }

  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b)
      parent[b] = a;
    else
      parent[a] = b;
  }
};

}  // namespace

GridSpec rhombus_grid(int n) {
  if (n < 3) throw DomainError("rhombus_grid: need at least 3 points per side");
  return GridSpec{0.0, 1.5, 0.0, triangle::kSqrt3 / 2.0, n, n};
}

GridSpec unit_square_grid(int n) {
  if (n < 3) throw DomainError("unit_square_grid: need at least 3 points per side");
  return GridSpec{0.0, 1.0, 0.0, 1.0, n, n};
}

DomainMask rhombus_mask() {
  return [](double x, double y) { return triangle::in_rhombus({x, y}, 1e-9); };
}

DomainMask all_inside_mask() {
  return [](double, double) { return true; };
}

SampledField sample_field(const PlaneFn& f, const GridSpec& grid, const DomainMask& mask) {
  if (grid.nx < 3 || grid.ny < 3) throw DomainError("sample_field: grid too small");
  if (!(grid.xmax > grid.xmin) || !(grid.ymax > grid.ymin))
    throw DomainError("sample_field: empty bounding box");
  SampledField out;
  out.grid = grid;
  const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
  out.values.assign(n, 0.0);
  out.inside.assign(n, 0);
  const double hx = grid.hx(), hy = grid.hy();
  std::vector<double> row_max(grid.ny, 0.0);
  std::vector<std::size_t> row_inside(grid.ny, 0);
  parallel_range(grid.ny, [&](int jlo, int jhi) {
    for (int j = jlo; j < jhi; ++j) {
      const double y = grid.ymin + j * hy;
      for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.xmin + i * hx;
        if (!mask(x, y)) continue;
        const std::size_t id = out.idx(i, j);
        const double v = f(x, y);
        if (!std::isfinite(v)) throw DomainError("sample_field: non-finite value");
        out.values[id] = v;
        out.inside[id] = 1;
        ++row_inside[j];
        row_max[j] = std::max(row_max[j], std::fabs(v));
      }
    }
  });
  for (int j = 0; j < grid.ny; ++j) {
    out.inside_count += row_inside[j];
    out.max_abs = std::max(out.max_abs, row_max[j]);
  }
  if (out.inside_count == 0) throw DomainError("sample_field: mask selects no points");
  return out;
}

SampledField combine_fields(const SampledField& a, const SampledField& b, double t) {
  if (a.grid.nx != b.grid.nx || a.grid.ny != b.grid.ny ||
      a.grid.xmin != b.grid.xmin || a.grid.xmax != b.grid.xmax ||
      a.grid.ymin != b.grid.ymin || a.grid.ymax != b.grid.ymax ||
      a.inside != b.inside)
    throw DomainError("combine_fields: fields live on different grids");
  SampledField out;
  out.grid = a.grid;
  out.inside = a.inside;
  out.inside_count = a.inside_count;
  const std::size_t n = a.values.size();
  out.values.resize(n);
  double ma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = a.values[i] + t * b.values[i];
    out.values[i] = v;
    if (a.inside[i]) ma = std::max(ma, std::fabs(v));
  }
  out.max_abs = ma;
  return out;
}

NodalPartition label_components(const SampledField& f, double amplitude_floor) {
  if (amplitude_floor < 0.0 || amplitude_floor >= 1.0)
    throw DomainError("label_components: amplitude floor must lie in [0, 1)");
  const int nx = f.grid.nx, ny = f.grid.ny;
  if (f.inside_count == 0) throw DomainError("label_components: empty field");
  if (f.max_abs <= 0.0) throw DomainError("label_components: identically zero field");

  const double hx = f.grid.hx(), hy = f.grid.hy();
  const double h = f.grid.pitch();
  const std::size_t n = f.values.size();

  // Local gradient magnitude from one-sided / central differences restricted
  // to inside neighbors.
  std::vector<double> gmag(n, 0.0);
  std::vector<double> row_gmax(ny, 0.0);
  parallel_range(ny, [&](int jlo, int jhi) {
    for (int j = jlo; j < jhi; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t id = f.idx(i, j);
        if (!f.inside[id]) continue;
        const double v = f.values[id];
        const bool xm = i > 0 && f.inside[id - 1];
        const bool xp = i + 1 < nx && f.inside[id + 1];
        const bool ym = j > 0 && f.inside[id - nx];
        const bool yp = j + 1 < ny && f.inside[id + nx];
        double gx = 0.0, gy = 0.0;
        if (xm && xp)
          gx = (f.values[id + 1] - f.values[id - 1]) / (2.0 * hx);
        else if (xp)
          gx = (f.values[id + 1] - v) / hx;
        else if (xm)
          gx = (v - f.values[id - 1]) / hx;
        if (ym && yp)
          gy = (f.values[id + nx] - f.values[id - nx]) / (2.0 * hy);
        else if (yp)
          gy = (f.values[id + nx] - v) / hy;
        else if (ym)
          gy = (v - f.values[id - nx]) / hy;
        const double g = std::hypot(gx, gy);
        gmag[id] = g;
        row_gmax[j] = std::max(row_gmax[j], g);
      }
    }
  });
  double gmax = 0.0;
  for (int j = 0; j < ny; ++j) gmax = std::max(gmax, row_gmax[j]);

  if (gmax * h >= 0.1 * f.max_abs) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "label_components: pitch too coarse (max|grad|*h = %.3e, max|f| = %.3e)",
                  gmax * h, f.max_abs);
    throw ResolutionError(buf);
  }

  NodalPartition part;
  part.grid = f.grid;
  part.labels.assign(n, -1);
  part.inside_count = f.inside_count;

  // Zero band: within 3h of the nodal set by the local linear model, plus an
  // absolute floor so exact zeros (saddles) are always banded, plus the
  // caller's amplitude noise floor.
  const double floor = std::max(1e-12, amplitude_floor) * f.max_abs;
  std::vector<std::uint8_t> solid(n, 0);
  parallel_range(ny, [&](int jlo, int jhi) {
    for (int j = jlo; j < jhi; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t id = f.idx(i, j);
        if (!f.inside[id]) continue;
        if (std::fabs(f.values[id]) <= 3.0 * h * gmag[id] + floor)
          part.labels[id] = 0;
        else
          solid[id] = 1;
      }
    }
  });

  UnionFind uf(n);
  for (std::size_t id = 0; id < n; ++id)
    if (solid[id]) uf.parent[id] = static_cast<std::int32_t>(id);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t id = f.idx(i, j);
      if (!solid[id]) continue;
      const bool pos = f.values[id] > 0.0;
      if (i + 1 < nx && solid[id + 1] && (f.values[id + 1] > 0.0) == pos)
        uf.unite(static_cast<std::int32_t>(id), static_cast<std::int32_t>(id + 1));
      if (j + 1 < ny && solid[id + nx] && (f.values[id + nx] > 0.0) == pos)
        uf.unite(static_cast<std::int32_t>(id), static_cast<std::int32_t>(id + nx));
    }
  }

  std::vector<std::int32_t> root_to_id(n, 0);
  std::vector<std::int8_t> raw_sign;
  std::vector<std::size_t> raw_size;
  int raw_count = 0;
  for (std::size_t id = 0; id < n; ++id) {
    if (!solid[id]) continue;
    const std::int32_t root = uf.find(static_cast<std::int32_t>(id));
    if (root_to_id[root] == 0) {
      root_to_id[root] = ++raw_count;
      raw_sign.push_back(f.values[id] > 0.0 ? 1 : -1);
      raw_size.push_back(0);
    }
    part.labels[id] = root_to_id[root];
    ++raw_size[root_to_id[root] - 1];
  }

  // A component spanning fewer than ~5 pitches in each direction cannot be
  // told from discretization noise of the sampled model; such specks join
  // the zero band instead of the count.
  constexpr std::size_t kMinComponentSamples = 25;
  std::vector<std::int32_t> remap(raw_count + 1, 0);
  for (int c = 1; c <= raw_count; ++c) {
    if (raw_size[c - 1] >= kMinComponentSamples) {
      remap[c] = ++part.beta0;
      part.component_sign.push_back(raw_sign[c - 1]);
    } else {
      ++part.discarded_specks;
    }
  }
  if (part.discarded_specks > 0 || part.beta0 != raw_count)
    for (std::size_t id = 0; id < n; ++id)
      if (part.labels[id] > 0) part.labels[id] = remap[part.labels[id]];

  part.band_count = 0;
  for (std::size_t id = 0; id < n; ++id)
    if (part.labels[id] == 0) ++part.band_count;
  part.uncertain_fraction =
      static_cast<double>(part.band_count) / static_cast<double>(part.inside_count);
  if (part.beta0 == 0)
    throw ResolutionError("label_components: the zero band swallowed the whole domain");
  return part;
}

StableCount count_nodal_domains_stable(const PlaneFn& f, const GridSpec& grid,
                                       const DomainMask& mask, double amplitude_floor) {
  SampledField base = sample_field(f, grid, mask);
  SampledField fine = sample_field(f, grid.refined(), mask);
  StableCount out;
  out.partition = label_components(base, amplitude_floor);
  NodalPartition refined = label_components(fine, amplitude_floor);
  out.beta0 = out.partition.beta0;
  out.refined_beta0 = refined.beta0;
  out.stable = out.beta0 == out.refined_beta0;
  out.uncertain_fraction = out.partition.uncertain_fraction;
  return out;
}

NodalPartition count_nodal_domains(const PlaneFn& f, const GridSpec& grid,
                                   const DomainMask& mask) {
  StableCount sc = count_nodal_domains_stable(f, grid, mask);
  if (!sc.stable) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "count_nodal_domains: counts disagree across refinement (%d vs %d)",
                  sc.beta0, sc.refined_beta0);
    throw ResolutionError(buf);
  }
  return std::move(sc.partition);
}

CourantIndex kappa_index(const std::vector<double>& spectrum, double mu, double rel_tol) {
  if (spectrum.empty()) throw DomainError("kappa_index: empty spectrum");
  if (!(rel_tol > 0.0)) throw DomainError("kappa_index: tolerance must be positive");
  if (!std::is_sorted(spectrum.begin(), spectrum.end()))
    throw DomainError("kappa_index: spectrum must be sorted ascending");
  const auto tol = [rel_tol](double a, double b) {
    return rel_tol * std::max({std::fabs(a), std::fabs(b), 1.0});
  };
  int best = -1;
  double best_gap = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double gap = std::fabs(spectrum[i] - mu);
    if (best < 0 || gap < best_gap) {
      best = static_cast<int>(i);
      best_gap = gap;
    }
  }
  if (best_gap > tol(spectrum[best], mu)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "kappa_index: %.9g matches no cluster (nearest %.9g)", mu,
                  spectrum[best]);
    throw DomainError(buf);
  }
  int first = best;
  while (first > 0 && std::fabs(spectrum[first] - spectrum[first - 1]) <=
                          tol(spectrum[first], spectrum[first - 1]))
    --first;
  return CourantIndex{first + 1, spectrum[best], rel_tol};
}

namespace {

ECPReport make_ecp_report(const StableCount& sc, const CourantIndex& ci, double mu_m,
                          std::string description) {
  ECPReport r;
  r.description = std::move(description);
  r.beta0 = sc.beta0;
  r.kappa = ci.kappa;
  r.mu_m = mu_m;
  r.stable = sc.stable;
  r.uncertain_fraction = sc.uncertain_fraction;
  const bool trusted = sc.stable && sc.uncertain_fraction < kUncertainGate;
  if (r.beta0 > r.kappa)
    r.verdict = trusted ? "VIOLATION" : "inconclusive";
  else
    r.verdict = "consistent";
  char buf[128];
  std::snprintf(buf, sizeof buf, "zero band %.3g%% of the domain; refined count %d%s",
                100.0 * sc.uncertain_fraction, sc.refined_beta0,
                sc.stable ? "" : " (disagrees)");
  r.note = buf;
  return r;
}

}  // namespace

ECPReport ecp_check(const PlaneFn& combination, const std::string& description,
                    const std::vector<double>& spectrum, double mu_m, const GridSpec& grid,
                    const DomainMask& mask, double cluster_rel_tol) {
  const CourantIndex ci = kappa_index(spectrum, mu_m, cluster_rel_tol);
  try {
    const StableCount sc = count_nodal_domains_stable(combination, grid, mask);
    return make_ecp_report(sc, ci, mu_m, description);
  } catch (const ResolutionError& e) {
    ECPReport r;
    r.description = description;
    r.kappa = ci.kappa;
    r.mu_m = mu_m;
    r.verdict = "inconclusive";
    r.note = e.what();
    return r;
  }
}

PlaneFn rhombus_extend_from_quarter(fem::P1Field field, int sigma, int tau) {
  if (sigma * sigma != 1 || tau * tau != 1)
    throw DomainError("rhombus_extend_from_quarter: parities must be +1 or -1");
  const double s3 = triangle::kSqrt3;
  return [field = std::move(field), sigma, tau, s3](double x, double y) -> double {
    double sign = 1.0;
    // Fold across the long diagonal D (line through the origin at 30 deg).
    if (-0.5 * x + 0.5 * s3 * y > 0.0) {
      const triangle::Vec2 q = triangle::reflect_D({x, y});
      x = q.x;
      y = q.y;
      sign *= sigma;
    }
    // Fold across the short diagonal M (line through (1,0) at 120 deg).
    if (0.5 * s3 * (x - 1.0) + 0.5 * y > 0.0) {
      const triangle::Vec2 q = triangle::reflect_M({x, y});
      x = q.x;
      y = q.y;
      sign *= tau;
    }
    // The folded quarter maps isometrically onto the reference triangle:
    // (0,0) fixed, (1,0) -> hypotenuse end, rhombus center -> right angle.
    const double qx = 0.5 * s3 * x + 0.5 * y;
    const double qy = 0.5 * x - 0.5 * s3 * y;
    return sign * field(qx, qy);
  };
}

namespace {

triangle::SpectrumColumn analytic_column(const std::array<char, 3>& letters, double cutoff) {
  triangle::MixedProblem p;
  p.shape = triangle::Shape::hemiequilateral;
  p.letters = letters;
  triangle::SpectrumColumn col;
  col.letters = letters;
  for (const auto& e : triangle::enumerate_mixed_spectrum(p, cutoff)) {
    for (int m = 0; m < e.multiplicity; ++m) {
      col.values.push_back(e.value);
      col.errors.push_back(0.0);
    }
  }
  return col;
}

SegmentCheck check_segment(const PlaneFn& f, std::array<double, 2> a, std::array<double, 2> b,
                           int samples) {
  SegmentCheck s;
  s.a = a;
  s.b = b;
  s.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
    const double x = a[0] + t * (b[0] - a[0]);
    const double y = a[1] + t * (b[1] - a[1]);
    s.max_abs = std::max(s.max_abs, std::fabs(f(x, y)));
  }
  return s;
}

}  // namespace

RhombusCounterexampleReport counterexample_rhombus_neumann(int grid_n, int fem_level,
                                                           unsigned seed) {
  if (grid_n < 101) throw DomainError("counterexample_rhombus_neumann: grid too small");
  if (fem_level < 2 || fem_level > 10)
    throw DomainError("counterexample_rhombus_neumann: fem_level out of range");

  // Assemble the Neumann rhombus spectrum: two explicit columns plus the two
  // computed ones.
  const double unit = triangle::kLambdaUnit;
  std::vector<triangle::SpectrumColumn> cols;
  cols.push_back(analytic_column({'n', 'n', 'n'}, 10.0 * unit));
  cols.push_back(analytic_column({'n', 'd', 'n'}, 10.0 * unit));
  for (const char* cls : {"nnd", "ndd"}) {
    fem::Extrapolated ex = fem::solve_extrapolated(fem::RefDomain::hemiequilateral, cls,
                                                   fem_level, 4, seed);
    triangle::SpectrumColumn col;
    col.letters = {cls[0], cls[1], cls[2]};
    col.values = ex.values;
    col.errors = ex.error_estimates;
    cols.push_back(col);
  }
  double cutoff = cols[0].values.back();
  for (const auto& c : cols) cutoff = std::min(cutoff, c.values.back());
  const triangle::AssembledSpectrum assembled =
      triangle::rhombus_spectrum_assemble('n', cols, cutoff * (1.0 - 1e-12));

  RhombusCounterexampleReport rep;
  for (const auto& e : assembled.values) rep.nu.push_back(e.value);

  const PlaneFn f = [](double x, double y) { return 1.0 + triangle::phi2_neumann(x, y); };
  const GridSpec grid = rhombus_grid(grid_n);
  const DomainMask mask = rhombus_mask();

  SampledField base = sample_field(f, grid, mask);
  SampledField fine = sample_field(f, grid.refined(), mask);
  StableCount sc;
  sc.partition = label_components(base);
  NodalPartition refined = label_components(fine);
  sc.beta0 = sc.partition.beta0;
  sc.refined_beta0 = refined.beta0;
  sc.stable = sc.beta0 == sc.refined_beta0;
  sc.uncertain_fraction = sc.partition.uncertain_fraction;

  const CourantIndex ci = kappa_index(rep.nu, unit, 1e-4);
  rep.ecp = make_ecp_report(sc, ci, unit, "1 + phi2 on the Neumann rhombus");
  rep.partition = std::move(sc.partition);

  const double s3 = triangle::kSqrt3;
  rep.vertical = check_segment(f, {0.75, 0.0}, {0.75, s3 / 2.0}, 200);
  rep.diagonal = check_segment(f, {9.0 / 8.0, s3 / 8.0}, {3.0 / 8.0, 3.0 * s3 / 8.0}, 200);

  // Off the two segments the combination must stay away from zero: probe
  // every grid point at distance > 0.05 from both lines.
  double min_ratio = 1.0;
  std::size_t probes = 0;
  const double hx = grid.hx(), hy = grid.hy();
  for (int j = 0; j < grid.ny; ++j) {
    const double y = grid.ymin + j * hy;
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t id = base.idx(i, j);
      if (!base.inside[id]) continue;
      const double x = grid.xmin + i * hx;
      const double d1 = std::fabs(x - 0.75);
      const double d2 = 0.5 * std::fabs(x + s3 * y - 1.5);
      if (d1 <= 0.05 || d2 <= 0.05) continue;
      ++probes;
      min_ratio = std::min(min_ratio, std::fabs(base.values[id]) / base.max_abs);
    }
  }
  rep.transversal_min = min_ratio;
  rep.transversal_points = probes;
  rep.transversal_ok = probes > 0 && min_ratio >= 1e-3;
  return rep;
}

SweepResult coefficient_sweep(const SampledField& u, const SampledField& u_fine,
                              const SampledField& v, const SampledField& v_fine,
                              const std::vector<double>& t_values, double amplitude_floor) {
  if (t_values.empty()) throw DomainError("coefficient_sweep: no t values");
  if (!std::is_sorted(t_values.begin(), t_values.end()))
    throw DomainError("coefficient_sweep: t values must be sorted");
  SweepResult res;
  res.points.resize(t_values.size());
  const int n = static_cast<int>(t_values.size());
  parallel_range(n, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      SweepPoint pt;
      pt.t = t_values[i];
      try {
        NodalPartition pb = label_components(combine_fields(u, v, pt.t), amplitude_floor);
        NodalPartition pf =
            label_components(combine_fields(u_fine, v_fine, pt.t), amplitude_floor);
        pt.beta0 = pb.beta0;
        pt.refined_beta0 = pf.beta0;
        pt.stable = pb.beta0 == pf.beta0;
        pt.uncertain_fraction = pb.uncertain_fraction;
      } catch (const Error&) {
        pt.beta0 = -1;
        pt.refined_beta0 = -1;
        pt.stable = false;
        pt.uncertain_fraction = 1.0;
      }
      res.points[i] = pt;
    }
  });
  res.max_beta0 = 0;
  for (const auto& pt : res.points) {
    if (pt.stable && pt.beta0 > res.max_beta0) {
      res.max_beta0 = pt.beta0;
      res.argmax_t = pt.t;
    }
  }
  for (std::size_t i = 1; i < res.points.size(); ++i) {
    const auto& a = res.points[i - 1];
    const auto& b = res.points[i];
    if (a.beta0 >= 0 && b.beta0 >= 0 && a.beta0 != b.beta0)
      res.change_intervals.push_back({a.t, b.t});
  }
  return res;
}

namespace {

std::vector<double> signed_log_grid(int steps, double tmin, double tmax) {
  const int npos = (steps + 1) / 2;
  const int nneg = steps - npos;
  std::vector<double> ts;
  ts.reserve(steps);
  const auto mag = [&](int i, int count) {
    if (count == 1) return tmin;
    return tmin * std::pow(tmax / tmin, static_cast<double>(i) / (count - 1));
  };
  for (int i = nneg - 1; i >= 0; --i) ts.push_back(-mag(i, nneg));
  for (int i = 0; i < npos; ++i) ts.push_back(mag(i, npos));
  std::sort(ts.begin(), ts.end());
  return ts;
}

std::vector<std::vector<double>> direction_set(std::size_t dim) {
  if (dim == 1) return {{1.0}};
  if (dim == 2) {
    const double c = std::sqrt(0.5);
    return {{1.0, 0.0}, {c, c}, {0.0, 1.0}, {-c, c}};
  }
  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> d(dim, 0.0);
    d[i] = 1.0;
    dirs.push_back(std::move(d));
  }
  return dirs;
}

SampledField weighted_sum(const std::vector<SampledField>& fields,
                          const std::vector<double>& w) {
  SampledField acc = fields.at(0);
  for (auto& v : acc.values) v *= w.at(0);
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto& f = fields[i];
    for (std::size_t j = 0; j < acc.values.size(); ++j) acc.values[j] += w[i] * f.values[j];
  }
  acc.max_abs = 0.0;
  for (std::size_t j = 0; j < acc.values.size(); ++j)
    if (acc.inside[j]) acc.max_abs = std::max(acc.max_abs, std::fabs(acc.values[j]));
  return acc;
}

}  // namespace

SweepScenarioReport rhombus_sweep_scenario(char boundary, int low_index, int high_index,
                                           int target_beta0, int grid_n, int fem_level,
                                           int steps, unsigned seed) {
  if (boundary != 'n' && boundary != 'd')
    throw DomainError("rhombus_sweep_scenario: boundary must be 'n' or 'd'");
  if (low_index < 1 || high_index <= low_index)
    throw DomainError("rhombus_sweep_scenario: need 1 <= low < high");
  if (steps < 3) throw DomainError("rhombus_sweep_scenario: need at least 3 sweep steps");
  if (fem_level < 3 || fem_level > 10)
    throw DomainError("rhombus_sweep_scenario: fem_level out of range");

  // Solve the four symmetry classes on the reference triangle and assemble
  // the rhombus spectrum; the cluster tolerance is loose enough to pair the
  // numerically degenerate columns.
  std::map<std::string, fem::FemLevel> fine_levels;
  std::vector<triangle::SpectrumColumn> cols;
  for (const char* legs : {"nn", "nd", "dn", "dd"}) {
    std::string cls{boundary};
    cls += legs;
    fem::FemLevel coarse =
        fem::solve_level(fem::RefDomain::hemiequilateral, cls, fem_level - 1, 6, seed);
    fem::FemLevel fine =
        fem::solve_level(fem::RefDomain::hemiequilateral, cls, fem_level, 6, seed);
    fem::Extrapolated ex = fem::extrapolate(coarse, fine);
    triangle::SpectrumColumn col;
    col.letters = {cls[0], cls[1], cls[2]};
    col.values = ex.values;
    col.errors = ex.error_estimates;
    cols.push_back(col);
    fine_levels.emplace(cls, std::move(fine));
  }
  double cutoff = cols[0].values.back();
  for (const auto& c : cols) cutoff = std::min(cutoff, c.values.back());
  const triangle::AssembledSpectrum assembled =
      triangle::rhombus_spectrum_assemble(boundary, cols, cutoff * (1.0 - 1e-12), 1e-3);
  const auto& entries = assembled.values;
  if (static_cast<int>(entries.size()) < high_index)
    throw ConvergenceError("rhombus_sweep_scenario: assembled spectrum too short");

  SweepScenarioReport rep;
  for (const auto& e : entries) rep.spectrum.push_back(e.value);
  rep.mu_low = entries[low_index - 1].value;
  rep.mu_high = entries[high_index - 1].value;
  rep.kappa = entries[high_index - 1].kappa;

  const GridSpec grid = rhombus_grid(grid_n);
  const GridSpec fine_grid = grid.refined();
  const DomainMask mask = rhombus_mask();

  // Sample every eigenspace member once per resolution.
  const auto members_of = [&](int cluster_first) {
    std::vector<const triangle::LabeledEigenvalue*> m;
    for (const auto& e : entries)
      if (e.kappa == cluster_first) m.push_back(&e);
    return m;
  };
  const auto sample_members = [&](const std::vector<const triangle::LabeledEigenvalue*>& ms,
                                  std::vector<SampledField>& base,
                                  std::vector<SampledField>& fine) {
    for (const auto* e : ms) {
      const fem::FemLevel& lev = fine_levels.at(e->source);
      PlaneFn ext = rhombus_extend_from_quarter(
          fem::eigenfield(lev.mesh, lev.eig, e->index_in_source - 1), e->sigma, e->tau);
      SampledField b = sample_field(ext, grid, mask);
      SampledField f = sample_field(ext, fine_grid, mask);
      // One shared scale for both resolutions, so the refined field is an
      // exact resampling of the base one.
      if (b.max_abs <= 0.0) throw DomainError("rhombus_sweep_scenario: zero eigenfield");
      const double s = 1.0 / b.max_abs;
      for (auto& v : b.values) v *= s;
      for (auto& v : f.values) v *= s;
      b.max_abs = 1.0;
      f.max_abs *= s;
      base.push_back(std::move(b));
      fine.push_back(std::move(f));
    }
  };
  std::vector<SampledField> low_base, low_fine, high_base, high_fine;
  const auto low_members = members_of(entries[low_index - 1].kappa);
  const auto high_members = members_of(entries[high_index - 1].kappa);
  sample_members(low_members, low_base, low_fine);
  sample_members(high_members, high_base, high_fine);

  // Sign structure below the eigenfunctions' own accuracy is meaningless:
  // near the short-diagonal corners the members vanish like r^(3/2), and at
  // sweep values where the corner-leading coefficients cancel, discretization
  // noise would otherwise mint zero-area "domains". Floor the counts at the
  // extrapolation error estimate of the member eigenvalues.
  double member_rel_err = 0.0;
  for (const auto* e : low_members)
    member_rel_err = std::max(member_rel_err,
                              e->error_estimate / std::max(std::fabs(e->value), 1.0));
  for (const auto* e : high_members)
    member_rel_err = std::max(member_rel_err,
                              e->error_estimate / std::max(std::fabs(e->value), 1.0));
  rep.amplitude_floor = std::max(1e-4, member_rel_err);

  const auto low_dirs = direction_set(low_base.size());
  const auto high_dirs = direction_set(high_base.size());
  rep.candidates = static_cast<int>(low_dirs.size() * high_dirs.size());

  char desc[160];
  std::snprintf(desc, sizeof desc,
                "rhombus '%c': combinations across eigenvalues #%d (%.6g) and #%d (%.6g)",
                boundary, low_index, rep.mu_low, high_index, rep.mu_high);
  rep.description = desc;

  const std::vector<double> base_ts = signed_log_grid(steps, 0.05, 20.0);
  int best_candidate = -1;
  double best_t = 0.0;
  int max_beta0 = 0;

  struct Candidate {
    SampledField u, uf, v, vf;
    std::vector<std::array<double, 2>> intervals;
  };
  std::vector<Candidate> cands;
  for (const auto& ld : low_dirs) {
    for (const auto& hd : high_dirs) {
      Candidate c{weighted_sum(low_base, ld), weighted_sum(low_fine, ld),
                  weighted_sum(high_base, hd), weighted_sum(high_fine, hd), {}};
      cands.push_back(std::move(c));
    }
  }

  const auto run_candidate = [&](int ci, const std::vector<double>& ts) {
    Candidate& c = cands[ci];
    SweepResult r = coefficient_sweep(c.u, c.uf, c.v, c.vf, ts, rep.amplitude_floor);
    for (auto& pt : r.points) {
      pt.candidate = ci;
      rep.sweep.points.push_back(pt);
      if (pt.stable && pt.beta0 > max_beta0) {
        max_beta0 = pt.beta0;
        best_candidate = ci;
        best_t = pt.t;
      }
    }
    for (const auto& iv : r.change_intervals) {
      c.intervals.push_back(iv);
      rep.sweep.change_intervals.push_back(iv);
    }
  };

  for (std::size_t ci = 0; ci < cands.size(); ++ci)
    run_candidate(static_cast<int>(ci), base_ts);

  // The published six-domain members are found numerically; if the coarse
  // sweep misses the target, zoom into every interval where the count moved.
  for (int round = 0; round < 3 && target_beta0 > 0 && max_beta0 < target_beta0; ++round) {
    bool refined_any = false;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      std::vector<std::array<double, 2>> todo;
      todo.swap(cands[ci].intervals);
      std::vector<double> ts;
      for (const auto& iv : todo) {
        const double lo = iv[0], hi = iv[1];
        if (lo <= 0.0 && hi >= 0.0) continue;  // the grid never brackets zero
        const double m0 = std::fabs(lo), m1 = std::fabs(hi);
        const double sgn = lo > 0.0 ? 1.0 : -1.0;
        for (int i = 1; i <= 12; ++i) {
          const double m = m0 * std::pow(m1 / m0, static_cast<double>(i) / 13.0);
          ts.push_back(sgn * m);
        }
      }
      if (ts.empty()) continue;
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
      run_candidate(static_cast<int>(ci), ts);
      refined_any = true;
    }
    if (!refined_any) break;
  }

  std::stable_sort(rep.sweep.points.begin(), rep.sweep.points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) {
                     return a.candidate != b.candidate ? a.candidate < b.candidate : a.t < b.t;
                   });
  rep.max_beta0 = max_beta0;
  rep.sweep.max_beta0 = max_beta0;
  rep.best_t = best_t;
  rep.best_candidate = std::max(best_candidate, 0);
  rep.sweep.argmax_t = best_t;
  rep.sweep.argmax_candidate = rep.best_candidate;

  if (best_candidate >= 0) {
    const Candidate& c = cands[best_candidate];
    rep.best_partition =
        label_components(combine_fields(c.u, c.v, best_t), rep.amplitude_floor);
  }

  if (max_beta0 > rep.kappa)
    rep.verdict = "violation_confirmed";
  else if (target_beta0 > 0 && max_beta0 < target_beta0)
    rep.verdict = "inconclusive";
  else
    rep.verdict = "consistent";
  return rep;
}

ProductLiftReport product_lift(const std::vector<double>& base_spectrum, double mu_m,
                               int base_beta0, const std::vector<double>& fiber_spectrum,
                               double epsilon, double cluster_rel_tol) {
  if (!(epsilon > 0.0)) throw DomainError("product_lift: epsilon must be positive");
  if (base_spectrum.empty() || fiber_spectrum.size() < 2)
    throw DomainError("product_lift: need a base spectrum and at least two fiber values");
  if (!std::is_sorted(base_spectrum.begin(), base_spectrum.end()) ||
      !std::is_sorted(fiber_spectrum.begin(), fiber_spectrum.end()))
    throw DomainError("product_lift: spectra must be sorted ascending");
  if (!(mu_m > 0.0)) throw DomainError("product_lift: mu_m must be positive");

  ProductLiftReport rep;
  rep.epsilon = epsilon;
  rep.mu_m = mu_m;
  rep.beta0 = base_beta0;
  rep.epsilon_star = std::sqrt(fiber_spectrum[1] / mu_m);
  rep.collapsed = epsilon < rep.epsilon_star;
  rep.base_kappa = kappa_index(base_spectrum, mu_m, cluster_rel_tol).kappa;

  // Complete prefix of the sum spectrum: every sum below the cutoff is
  // present because both factors are enumerated up to it.
  const double inv2 = 1.0 / (epsilon * epsilon);
  const double cut = std::min(base_spectrum.back(), inv2 * fiber_spectrum.back());
  for (double lam : base_spectrum) {
    if (lam > cut) break;
    for (double mu : fiber_spectrum) {
      const double s = lam + inv2 * mu;
      if (s > cut) break;
      rep.lifted_spectrum.push_back(s);
    }
  }
  std::sort(rep.lifted_spectrum.begin(), rep.lifted_spectrum.end());

  if (!rep.collapsed) {
    rep.verdict = "not_collapsed";
    return rep;
  }
  rep.lifted_kappa = kappa_index(rep.lifted_spectrum, mu_m, cluster_rel_tol).kappa;
  rep.verdict = base_beta0 > rep.lifted_kappa ? "violation_confirmed" : "consistent";
  return rep;
}

std::vector<double> circle_spectrum(int count) {
  if (count < 1) throw DomainError("circle_spectrum: count must be positive");
  std::vector<double> v(count);
  for (int j = 1; j <= count; ++j) {
    const double k = j / 2;  // 0, 1, 1, 2, 2, ...
    v[j - 1] = k * k;
  }
  return v;
}

namespace {

long long binom_ll(int n, int r) {
  if (r < 0 || n < 0 || r > n) return 0;
  r = std::min(r, n - r);
  unsigned long long acc = 1;
  for (int i = 1; i <= r; ++i) {
    const unsigned long long factor = static_cast<unsigned long long>(n - r + i);
    if (acc > (~0ULL) / factor) throw DomainError("sphere_bounds: binomial overflow");
    acc = acc * factor / i;
  }
  if (acc > static_cast<unsigned long long>(std::numeric_limits<long long>::max()))
    throw DomainError("sphere_bounds: binomial overflow");
  return static_cast<long long>(acc);
}

}  // namespace

SphereBounds sphere_bounds(int d, int k) {
  if (d < 1 || k < 0) throw DomainError("sphere_bounds: need d >= 1 and k >= 0");
  SphereBounds b;
  b.d = d;
  b.k = k;
  b.courant = binom_ll(d + k - 1, d) + binom_ll(d + k - 2, d) + 1;
  b.effective = b.courant;
  if (d == 2) {
    b.leydold = static_cast<long long>(k) * (k - 1) + 2;
    b.effective = std::min(b.courant, b.leydold);
  }
  return b;
}

}  // namespace ecp

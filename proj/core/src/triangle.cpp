#include "ecp/triangle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ecp::triangle {

namespace {

constexpr double kCx = 0.75;               // rhombus center
constexpr double kCy = 0.25 * kSqrt3;

// Reflection across the line through p0 with unit direction d.
Vec2 reflect(Vec2 p, Vec2 p0, Vec2 d) {
  double px = p.x - p0.x, py = p.y - p0.y;
  double t = px * d.x + py * d.y;
  return {p0.x + 2.0 * t * d.x - px, p0.y + 2.0 * t * d.y - py};
}

double half_plane(Vec2 p, Vec2 a, Vec2 b) {  // >0 left of a->b
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

const Vec2 kR0{0.0, 0.0}, kR1{1.0, 0.0}, kR2{1.5, 0.5 * kSqrt3}, kR3{0.5, 0.5 * kSqrt3};

}  // namespace

Vec2 reflect_D(Vec2 p) { return reflect(p, kR0, {0.5 * kSqrt3, 0.5}); }

Vec2 reflect_M(Vec2 p) { return reflect(p, kR1, {-0.5, 0.5 * kSqrt3}); }

bool in_te1(Vec2 p, double pad) {
  return half_plane(p, kR0, kR1) >= -pad && half_plane(p, kR1, kR3) >= -pad &&
         half_plane(p, kR3, kR0) >= -pad;
}

bool in_te2(Vec2 p, double pad) {
  return half_plane(p, kR1, kR2) >= -pad && half_plane(p, kR2, kR3) >= -pad &&
         half_plane(p, kR3, kR1) >= -pad;
}

bool in_rhombus(Vec2 p, double pad) {
  return half_plane(p, kR0, kR1) >= -pad && half_plane(p, kR1, kR2) >= -pad &&
         half_plane(p, kR2, kR3) >= -pad && half_plane(p, kR3, kR0) >= -pad;
}

double lambda_hat(int m, int n) {
  if (m < 0 || n < 0) throw DomainError("lambda_hat: indices must be nonnegative");
  return kLambdaUnit * (m * m + m * n + n * n);
}

std::string MixedProblem::name() const {
  std::string s(shape == Shape::equilateral ? "Te," : "Th,");
  s += letters[0];
  s += letters[1];
  s += letters[2];
  return s;
}

std::vector<SpectrumEntry> enumerate_mixed_spectrum(const MixedProblem& p, double cutoff) {
  if (cutoff <= 0.0) throw DomainError("enumerate_mixed_spectrum: cutoff must be positive");
  for (char c : p.letters)
    if (c != 'n' && c != 'd')
      throw DomainError("enumerate_mixed_spectrum: letters must be 'n' or 'd'");
  const int smax = static_cast<int>(cutoff / kLambdaUnit + 1e-9);
  const int nmax = static_cast<int>(std::sqrt(static_cast<double>(smax))) + 1;

  std::map<int, std::vector<std::pair<int, int>>> table;
  auto admit = [&](int m, int n) {
    int s = m * m + m * n + n * n;
    if (s <= smax) table[s].emplace_back(m, n);
  };

  if (p.shape == Shape::hemiequilateral) {
    const char a = p.letters[0], b = p.letters[1], c = p.letters[2];
    if (a != c)
      throw DomainError("enumerate_mixed_spectrum: no closed form for " + p.name());
    if (a == 'n' && b == 'n') {  // nnn: 0 <= m <= n
      for (int n = 0; n <= nmax; ++n)
        for (int m = 0; m <= n; ++m) admit(m, n);
    } else if (a == 'n' && b == 'd') {  // ndn: 0 <= m < n
      for (int n = 1; n <= nmax; ++n)
        for (int m = 0; m < n; ++m) admit(m, n);
    } else if (a == 'd' && b == 'n') {  // dnd: 1 <= m <= n
      for (int n = 1; n <= nmax; ++n)
        for (int m = 1; m <= n; ++m) admit(m, n);
    } else {  // ddd: 1 <= m < n
      for (int n = 2; n <= nmax; ++n)
        for (int m = 1; m < n; ++m) admit(m, n);
    }
  } else {
    if (!(p.letters[0] == p.letters[1] && p.letters[1] == p.letters[2]))
      throw DomainError("enumerate_mixed_spectrum: no closed form for " + p.name());
    int lo = p.letters[0] == 'd' ? 1 : 0;  // ordered pairs carry multiplicity
    for (int n = lo; n <= nmax; ++n)
      for (int m = lo; m <= nmax; ++m) admit(m, n);
  }

  std::vector<SpectrumEntry> out;
  for (auto& [s, pairs] : table) {
    SpectrumEntry e;
    e.norm = s;
    e.value = kLambdaUnit * s;
    e.pairs = std::move(pairs);
    e.multiplicity = static_cast<int>(e.pairs.size());
    out.push_back(std::move(e));
  }
  return out;
}

double phi2_neumann(double x, double y) {
  double c1 = std::cos(2.0 * M_PI * x / 3.0);
  double c2 = std::cos(2.0 * M_PI * y / kSqrt3);
  return 2.0 * c1 * (c1 + c2) - 1.0;
}

namespace {

// Deterministic low-discrepancy samples of the open rhombus.
std::vector<Vec2> sample_points(int count) {
  std::vector<Vec2> pts;
  pts.reserve(count);
  double u = 0.5, v = 0.5;
  while (static_cast<int>(pts.size()) < count) {
    u += 0.6180339887498949;
    if (u >= 1.0) u -= 1.0;
    v += 0.7548776662466927;
    if (v >= 1.0) v -= 1.0;
    // skew coordinates cover the rhombus exactly
    Vec2 p{u + 0.5 * v, 0.5 * kSqrt3 * v};
    if (in_rhombus(p, -1e-6)) pts.push_back(p);
  }
  return pts;
}

int parity_of(const PlaneFn& f, Vec2 (*refl)(Vec2), const std::vector<Vec2>& pts) {
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, std::abs(f(p.x, p.y)));
  if (scale == 0.0) return 1;
  double dev_plus = 0.0, dev_minus = 0.0;
  for (const auto& p : pts) {
    Vec2 q = refl(p);
    double a = f(p.x, p.y), b = f(q.x, q.y);
    dev_plus = std::max(dev_plus, std::abs(b - a));
    dev_minus = std::max(dev_minus, std::abs(b + a));
  }
  if (dev_plus <= 1e-9 * scale) return 1;
  if (dev_minus <= 1e-9 * scale) return -1;
  return 0;
}

}  // namespace

RhombusFunction make_rhombus_function(PlaneFn f) {
  static const std::vector<Vec2> pts = sample_points(512);
  RhombusFunction rf;
  rf.sigma = parity_of(f, &reflect_D, pts);
  rf.tau = parity_of(f, &reflect_M, pts);
  rf.eval = std::move(f);
  return rf;
}

RhombusFunction reflect_extend(const PlaneFn& f_on_te1, int tau) {
  if (tau != 1 && tau != -1) throw DomainError("reflect_extend: tau must be +1 or -1");
  PlaneFn ext = [f_on_te1, tau](double x, double y) {
    Vec2 p{x, y};
    if (in_te1(p)) return f_on_te1(x, y);
    Vec2 q = reflect_M(p);
    return tau * f_on_te1(q.x, q.y);
  };
  RhombusFunction rf = make_rhombus_function(ext);
  rf.tau = tau;
  if (tau == -1) {
    double trace = 0.0, scale = 0.0;
    double u = 0.5, v = 0.5;
    for (int i = 0; i <= 64; ++i) {
      double t = i / 64.0;
      double x = 1.0 + t * (kR3.x - 1.0), y = t * kR3.y;
      trace = std::max(trace, std::abs(f_on_te1(x, y)));
      u += 0.6180339887498949;
      if (u >= 1.0) u -= 1.0;
      v += 0.7548776662466927;
      if (v >= 1.0) v -= 1.0;
      double a = u, b = v;
      if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
      }
      scale = std::max(scale, std::abs(f_on_te1(a + 0.5 * b, 0.5 * kSqrt3 * b)));
    }
    rf.continuous = trace <= 1e-9 * std::max(scale, 1e-300);
  }
  return rf;
}

std::array<RhombusFunction, 4> symmetry_project(const PlaneFn& f) {
  std::array<RhombusFunction, 4> out;
  const int sig[4] = {1, 1, -1, -1};
  const int tau[4] = {1, -1, 1, -1};
  for (int i = 0; i < 4; ++i) {
    int s = sig[i], t = tau[i];
    PlaneFn proj = [f, s, t](double x, double y) {
      Vec2 p{x, y};
      Vec2 dp = reflect_D(p), mp = reflect_M(p), dmp = reflect_D(mp);
      return 0.25 * (f(x, y) + s * f(dp.x, dp.y) + t * f(mp.x, mp.y) +
                     s * t * f(dmp.x, dmp.y));
    };
    out[i].eval = std::move(proj);
    out[i].sigma = s;
    out[i].tau = t;
  }
  return out;
}

AssembledSpectrum rhombus_spectrum_assemble(char outer,
                                            const std::vector<SpectrumColumn>& columns,
                                            double cutoff, double cluster_tol) {
  if (outer != 'n' && outer != 'd')
    throw DomainError("rhombus_spectrum_assemble: outer letter must be 'n' or 'd'");
  bool seen[2][2] = {{false, false}, {false, false}};
  AssembledSpectrum out;
  out.outer = outer;
  for (const auto& col : columns) {
    if (col.letters[0] != outer)
      throw DomainError("rhombus_spectrum_assemble: column outer letter mismatch");
    int bi = col.letters[1] == 'd' ? 1 : 0;
    int ci = col.letters[2] == 'd' ? 1 : 0;
    if (seen[bi][ci]) throw DomainError("rhombus_spectrum_assemble: duplicate column");
    seen[bi][ci] = true;
    if (col.errors.size() != col.values.size())
      throw DomainError("rhombus_spectrum_assemble: error list length mismatch");
    for (std::size_t i = 0; i < col.values.size(); ++i) {
      if (col.values[i] > cutoff) break;
      LabeledEigenvalue v;
      v.value = col.values[i];
      v.sigma = bi ? -1 : 1;  // reflection rule: n -> +, d -> -
      v.tau = ci ? -1 : 1;
      v.source = std::string() + col.letters[0] + col.letters[1] + col.letters[2];
      v.index_in_source = static_cast<int>(i) + 1;
      v.error_estimate = col.errors[i];
      out.values.push_back(v);
    }
  }
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c)
      if (!seen[b][c])
        throw DomainError("rhombus_spectrum_assemble: missing column for one symmetry class");
  std::sort(out.values.begin(), out.values.end(),
            [](const LabeledEigenvalue& a, const LabeledEigenvalue& b) {
              return a.value < b.value;
            });
  int cluster_start = 0;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (i > 0) {
      double scale = std::max({1.0, std::abs(out.values[i].value)});
      if (out.values[i].value - out.values[i - 1].value > cluster_tol * scale)
        cluster_start = static_cast<int>(i);
    }
    out.values[i].kappa = cluster_start + 1;
  }
  return out;
}

}  // namespace ecp::triangle

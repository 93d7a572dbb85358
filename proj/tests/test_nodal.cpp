#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "ecp/common.hpp"
#include "ecp/mesh.hpp"
#include "ecp/nodal.hpp"
#include "ecp/svg.hpp"
#include "ecp/triangle.hpp"

using namespace ecp;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec square(int n) {
  GridSpec g = unit_square_grid(n);
  return g;
}

SampledField sample_square(const PlaneFn& f, int n) {
  return sample_field(f, square(n), all_inside_mask());
}

}  // namespace

// ---------------------------------------------------------------------------
// Grids and sampling.
// ---------------------------------------------------------------------------

TEST_CASE("grid refinement halves the pitch and keeps the box") {
  GridSpec g = rhombus_grid(201);
  GridSpec r = g.refined();
  CHECK(r.nx == 2 * g.nx - 1);
  CHECK(r.ny == 2 * g.ny - 1);
  CHECK(r.xmin == g.xmin);
  CHECK(r.xmax == g.xmax);
  CHECK(r.hx() == doctest::Approx(0.5 * g.hx()).epsilon(1e-12));
  CHECK(g.pitch() == doctest::Approx(std::max(g.hx(), g.hy())).epsilon(1e-15));
}

TEST_CASE("the rhombus mask covers two thirds of its bounding box") {
  SampledField f = sample_field([](double, double) { return 1.0; },
                                rhombus_grid(401), rhombus_mask());
  double frac = static_cast<double>(f.inside_count) /
                (static_cast<double>(f.grid.nx) * f.grid.ny);
  CHECK(std::abs(frac - 2.0 / 3.0) < 0.01);
  CHECK(f.max_abs == doctest::Approx(1.0));
}

TEST_CASE("combine_fields forms a + t*b pointwise") {
  auto a = sample_square([](double x, double y) { return x + y; }, 51);
  auto b = sample_square([](double x, double y) { return x - y; }, 51);
  SampledField c = combine_fields(a, b, 0.5);
  for (std::size_t i = 0; i < c.values.size(); i += 97)
    CHECK(c.values[i] ==
          doctest::Approx(a.values[i] + 0.5 * b.values[i]).epsilon(1e-15));
  CHECK(c.inside_count == a.inside_count);
  CHECK(c.max_abs == doctest::Approx(2.0).epsilon(1e-9));  // 1.5x + 0.5y at (1,1)
}

// ---------------------------------------------------------------------------
// Component labeling.
// ---------------------------------------------------------------------------

TEST_CASE("constant fields have one nodal domain") {
  NodalPartition p = label_components(sample_square(
      [](double, double) { return 2.5; }, 101));
  CHECK(p.beta0 == 1);
  REQUIRE(p.component_sign.size() == 1);
  CHECK(p.component_sign[0] == 1);
  CHECK(p.discarded_specks == 0);
  CHECK(p.uncertain_fraction == doctest::Approx(0.0));
}

TEST_CASE("product eigenfunctions have the expected domain counts") {
  NodalPartition two = label_components(sample_square(
      [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(kPi * y); }, 201));
  CHECK(two.beta0 == 2);
  REQUIRE(two.component_sign.size() == 2);
  CHECK(two.component_sign[0] == 1);   // left half, first in scan order
  CHECK(two.component_sign[1] == -1);  // right half

  NodalPartition nine = label_components(sample_square(
      [](double x, double y) { return std::sin(3 * kPi * x) * std::sin(3 * kPi * y); },
      201));
  CHECK(nine.beta0 == 9);
  int plus = 0, minus = 0;
  for (auto s : nine.component_sign) (s > 0 ? plus : minus)++;
  CHECK(plus == 5);   // checkerboard: corners and center positive
  CHECK(minus == 4);
}

TEST_CASE("labeling is scale invariant and deterministic") {
  auto f = [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(kPi * y); };
  NodalPartition a = label_components(sample_square(f, 151));
  NodalPartition b = label_components(sample_square(
      [&](double x, double y) { return 1e-9 * f(x, y); }, 151));
  CHECK(a.beta0 == b.beta0);
  CHECK(a.labels == b.labels);
  NodalPartition c = label_components(sample_square(f, 151));
  CHECK(a.labels == c.labels);
  CHECK(a.band_count == c.band_count);
}

TEST_CASE("a one-sample sign island is folded into the band as a speck") {
  // Negative disk of radius 0.008 around (0.3, 0.5): at pitch 1/200 only the
  // center sample escapes the zero band, far below the five-pitch speck
  // threshold.
  const double r2 = 0.008 * 0.008;
  auto f = [&](double x, double y) {
    double d2 = (x - 0.3) * (x - 0.3) + (y - 0.5) * (y - 0.5);
    return d2 - r2;
  };
  NodalPartition p = label_components(sample_square(f, 201));
  CHECK(p.beta0 == 1);
  REQUIRE(p.component_sign.size() == 1);
  CHECK(p.component_sign[0] == 1);
  CHECK(p.discarded_specks == 1);
}

TEST_CASE("the amplitude floor suppresses low-amplitude cells") {
  // Left half scaled to 1e-4 of the right half's amplitude.
  auto f = [](double x, double y) {
    double v = std::sin(2 * kPi * x) * std::sin(kPi * y);
    return x < 0.5 ? 1e-4 * v : v;
  };
  SampledField field = sample_square(f, 201);
  NodalPartition keep = label_components(field, 0.0);
  CHECK(keep.beta0 == 2);
  NodalPartition drop = label_components(field, 1e-2);
  CHECK(drop.beta0 == 1);
  REQUIRE(drop.component_sign.size() == 1);
  CHECK(drop.component_sign[0] == -1);  // only the right half survives
}

TEST_CASE("the amplitude floor must be a relative level in [0, 1)") {
  SampledField field = sample_square(
      [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(kPi * y); }, 101);
  CHECK_THROWS_AS(label_components(field, -0.1), DomainError);
  CHECK_THROWS_AS(label_components(field, 1.0), DomainError);
}

TEST_CASE("coarse grids raise a resolution error instead of guessing") {
  GridSpec g = square(81);
  auto f = [](double x, double y) { return std::sin(20 * kPi * x) * std::sin(20 * kPi * y); };
  CHECK_THROWS_AS(label_components(sample_field(f, g, all_inside_mask())),
                  ResolutionError);
  CHECK_THROWS_AS(count_nodal_domains(f, g, all_inside_mask()), ResolutionError);
}

TEST_CASE("identically zero fields are rejected") {
  CHECK_THROWS_AS(label_components(sample_square(
                      [](double, double) { return 0.0; }, 101)),
                  DomainError);
}

TEST_CASE("stable counting agrees across refinement on a clean eigenfunction") {
  StableCount sc = count_nodal_domains_stable(
      [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(kPi * y); },
      square(801), all_inside_mask());
  CHECK(sc.stable);
  CHECK(sc.beta0 == 2);
  CHECK(sc.refined_beta0 == 2);
  CHECK(sc.uncertain_fraction < kUncertainGate);
}

// ---------------------------------------------------------------------------
// Courant index.
// ---------------------------------------------------------------------------

TEST_CASE("kappa is the one-based index of the first cluster member") {
  std::vector<double> s = {0.0, 0.5, 1.0, 1.0, 2.5};
  CHECK(kappa_index(s, 0.0).kappa == 1);
  CHECK(kappa_index(s, 0.5).kappa == 2);
  CHECK(kappa_index(s, 1.0).kappa == 3);
  CHECK(kappa_index(s, 2.5).kappa == 5);
  CHECK(kappa_index(s, 1.0).eigenvalue == doctest::Approx(1.0));
  // Near-degenerate values inside the relative tolerance share a cluster.
  std::vector<double> close = {1.0, 1.00005, 3.0};
  CHECK(kappa_index(close, 1.00005, 1e-4).kappa == 1);
  CHECK(kappa_index(close, 1.00005, 1e-7).kappa == 2);
}

TEST_CASE("kappa lookup validates its input") {
  std::vector<double> s = {0.0, 0.5, 1.0};
  CHECK_THROWS_AS(kappa_index(s, 0.7), DomainError);             // not in spectrum
  CHECK_THROWS_AS(kappa_index({1.0, 0.5}, 0.5), DomainError);    // unsorted
  CHECK_THROWS_AS(kappa_index({}, 0.5), DomainError);            // empty
}

// ---------------------------------------------------------------------------
// ECP checks.
// ---------------------------------------------------------------------------

TEST_CASE("an eigenfunction saturating the bound is consistent") {
  const double p2 = kPi * kPi;
  std::vector<double> spec = {2 * p2, 5 * p2, 5 * p2, 8 * p2};
  ECPReport rep = ecp_check(
      [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(kPi * y); },
      "square (2,1) mode", spec, 5 * p2, square(801), all_inside_mask());
  CHECK(rep.verdict == "consistent");
  CHECK(rep.beta0 == 2);
  CHECK(rep.kappa == 2);
  CHECK(rep.stable);
}

TEST_CASE("a count exceeding kappa on a trusted grid is a violation") {
  // Synthetic spectrum: mu = 2.0 sits at kappa = 2, but the field shows
  // three domains.
  std::vector<double> spec = {1.0, 2.0, 3.0};
  ECPReport rep = ecp_check(
      [](double x, double y) { return std::sin(3 * kPi * x) * std::sin(kPi * y); },
      "three bands", spec, 2.0, square(801), all_inside_mask());
  CHECK(rep.verdict == "VIOLATION");
  CHECK(rep.beta0 == 3);
  CHECK(rep.kappa == 2);
}

TEST_CASE("unresolvable grids yield an inconclusive ECP verdict") {
  std::vector<double> spec = {1.0, 2.0};
  ECPReport rep = ecp_check(
      [](double x, double y) { return std::sin(8 * kPi * x) * std::sin(8 * kPi * y); },
      "too coarse", spec, 2.0, square(41), all_inside_mask());
  CHECK(rep.verdict == "inconclusive");
  CHECK_FALSE(rep.note.empty());
}

// ---------------------------------------------------------------------------
// Quarter-fold extension.
// ---------------------------------------------------------------------------

TEST_CASE("quarter extensions satisfy the reflection identities") {
  auto mesh = std::make_shared<fem::TriangleMesh>(
      fem::reference_mesh(fem::RefDomain::hemiequilateral, 3));
  std::vector<double> vals(mesh->n_vertices());
  for (int v = 0; v < mesh->n_vertices(); ++v)
    vals[v] = 0.3 + mesh->vertices[v][0] + 2.0 * mesh->vertices[v][1];
  fem::P1Field field(mesh, vals);

  const triangle::Vec2 pts[] = {{0.4, 0.2}, {0.9, 0.35}, {1.05, 0.62}, {0.6, 0.5}};
  for (int sigma : {1, -1}) {
    for (int tau : {1, -1}) {
      PlaneFn ext = rhombus_extend_from_quarter(field, sigma, tau);
      for (auto p : pts) {
        triangle::Vec2 pd = triangle::reflect_D(p);
        triangle::Vec2 pm = triangle::reflect_M(p);
        double v = ext(p.x, p.y);
        CHECK(ext(pd.x, pd.y) == doctest::Approx(sigma * v).epsilon(1e-12));
        CHECK(ext(pm.x, pm.y) == doctest::Approx(tau * v).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(rhombus_extend_from_quarter(field, 0, 1), DomainError);
  CHECK_THROWS_AS(rhombus_extend_from_quarter(field, 1, 2), DomainError);
}

// ---------------------------------------------------------------------------
// Product lifts.
// ---------------------------------------------------------------------------

TEST_CASE("lifted spectrum is the complete sorted prefix of sums") {
  std::vector<double> base = {0.0, 1.0, 3.0, 4.0, 7.0, 9.0};
  std::vector<double> fiber = {0.0, 1.0, 1.0, 4.0, 4.0};
  ProductLiftReport rep = product_lift(base, 1.0, 2, fiber, 0.5);
  // cut = min(9, 4/0.25) = 9; sums lambda + 4*mu up to the cut.
  const double expect[] = {0, 1, 3, 4, 4, 4, 5, 5, 7, 7, 7, 8, 8, 9};
  REQUIRE(rep.lifted_spectrum.size() == 14);
  for (int i = 0; i < 14; ++i)
    CHECK(rep.lifted_spectrum[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("the collapse threshold matches the closed form") {
  // Base: leading rhombus Neumann values; fiber: the unit circle. The
  // threshold equals sqrt(fiber mu_2 / mu_m) = 3/(4 pi).
  const double unit = triangle::kLambdaUnit;
  std::vector<double> base = {0.0, 7.155340, unit, unit};
  std::vector<double> fiber = circle_spectrum(7);
  ProductLiftReport rep = product_lift(base, unit, 4, fiber, 0.2);
  CHECK(rep.epsilon_star == doctest::Approx(3.0 / (4.0 * kPi)).epsilon(1e-12));
  CHECK(rep.collapsed);
  CHECK(rep.base_kappa == 3);
  CHECK(rep.lifted_kappa == 3);
  CHECK(rep.beta0 == 4);
  CHECK(rep.verdict == "violation_confirmed");

  // Above the threshold the product does not collapse.
  ProductLiftReport wide = product_lift(base, unit, 4, fiber, 0.5);
  CHECK_FALSE(wide.collapsed);
  CHECK(wide.verdict == "not_collapsed");

  // A base count at kappa stays consistent.
  ProductLiftReport ok = product_lift(base, unit, 3, fiber, 0.2);
  CHECK(ok.verdict == "consistent");
}

TEST_CASE("product lift validates its inputs") {
  std::vector<double> base = {0.0, 1.0};
  std::vector<double> fiber = {0.0, 1.0};
  CHECK_THROWS_AS(product_lift(base, 1.0, 1, fiber, 0.0), DomainError);
  CHECK_THROWS_AS(product_lift({}, 1.0, 1, fiber, 0.5), DomainError);
  CHECK_THROWS_AS(product_lift(base, 1.0, 1, {0.0}, 0.5), DomainError);
  CHECK_THROWS_AS(product_lift({1.0, 0.0}, 1.0, 1, fiber, 0.5), DomainError);
  CHECK_THROWS_AS(product_lift(base, -1.0, 1, fiber, 0.5), DomainError);
}

// ---------------------------------------------------------------------------
// Circle spectrum and sphere bounds.
// ---------------------------------------------------------------------------

TEST_CASE("circle spectrum interleaves squared integers") {
  std::vector<double> s = circle_spectrum(7);
  const double expect[] = {0, 1, 1, 4, 4, 9, 9};
  REQUIRE(s.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(s[i] == expect[i]);
  CHECK_THROWS_AS(circle_spectrum(0), DomainError);
}

TEST_CASE("sphere bounds on S^2 follow the closed forms") {
  for (int k = 0; k <= 20; ++k) {
    SphereBounds b = sphere_bounds(2, k);
    CHECK(b.courant == static_cast<long long>(k) * k + 1);
    CHECK(b.leydold == static_cast<long long>(k) * (k - 1) + 2);
    CHECK(b.effective == std::min(b.courant, b.leydold));
  }
}

TEST_CASE("sphere bounds in other dimensions") {
  SphereBounds s1 = sphere_bounds(1, 3);
  CHECK(s1.courant == 6);
  CHECK(s1.leydold == -1);
  CHECK(s1.effective == 6);
  SphereBounds s3 = sphere_bounds(3, 2);
  CHECK(s3.courant == 6);
  CHECK(s3.leydold == -1);
  CHECK(s3.effective == 6);
  CHECK_THROWS_AS(sphere_bounds(0, 1), DomainError);
  CHECK_THROWS_AS(sphere_bounds(2, -1), DomainError);
}

// ---------------------------------------------------------------------------
// Rendering.
// ---------------------------------------------------------------------------

TEST_CASE("partition rendering is deterministic") {
  auto f = [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(kPi * y); };
  NodalPartition a = label_components(sample_square(f, 101));
  NodalPartition b = label_components(sample_square(f, 101));
  std::string svg_a = render_partition_svg(a, unit_square_outline());
  std::string svg_b = render_partition_svg(b, unit_square_outline());
  CHECK(svg_a == svg_b);
  CHECK(svg_a.find("<svg") != std::string::npos);
  CHECK(svg_a.find("</svg>") != std::string::npos);
  std::string pgm = render_label_pgm(a);
  CHECK(pgm.substr(0, 2) == "P2");
  CHECK(pgm.find("101 101") != std::string::npos);
}

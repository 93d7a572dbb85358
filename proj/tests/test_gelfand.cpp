#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "ecp/common.hpp"
#include "ecp/gelfand.hpp"
#include "ecp/sl1d.hpp"

using namespace ecp;
using namespace ecp::gelfand;

namespace {

constexpr double kPi = std::numbers::pi;

double sine_det2(double x1, double x2) {
  return std::sin(kPi * x1) * std::sin(2.0 * kPi * x2) -
         std::sin(kPi * x2) * std::sin(2.0 * kPi * x1);
}

double sine_det3(double x1, double x2, double x3) {
  double a[3][3];
  const double xs[3] = {x1, x2, x3};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = std::sin((i + 1) * kPi * xs[j]);
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

}  // namespace

// ---------------------------------------------------------------------------
// Determinant evaluation.
// ---------------------------------------------------------------------------

TEST_CASE("slater_eval matches hand-rolled 2x2 and 3x3 determinants") {
  SlaterBasis b2 = sine_basis(2);
  CHECK(slater_eval(b2, {0.2, 0.6}) == doctest::Approx(sine_det2(0.2, 0.6)).epsilon(1e-12));
  CHECK(slater_eval(b2, {0.1, 0.35}) ==
        doctest::Approx(sine_det2(0.1, 0.35)).epsilon(1e-12));
  SlaterBasis b3 = sine_basis(3);
  CHECK(slater_eval(b3, {0.15, 0.5, 0.8}) ==
        doctest::Approx(sine_det3(0.15, 0.5, 0.8)).epsilon(1e-12));
  CHECK_THROWS_AS(slater_eval(b3, {0.1, 0.2}), DomainError);
}

TEST_CASE("slater basis construction validates its arguments") {
  auto s1 = [](double x) { return std::sin(kPi * x); };
  auto s2 = [](double x) { return std::sin(2.0 * kPi * x); };
  CHECK_THROWS_AS(make_slater_basis({s1, s2}, {1.0}, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_slater_basis({s1, s2}, {2.0, 1.0}, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_slater_basis({s1}, {1.0}, 0.0, 1.0), DomainError);
  // Rows must be pairwise orthogonal in the configured inner product.
  CHECK_THROWS_AS(make_slater_basis({s1, s1}, {1.0, 2.0}, 0.0, 1.0), DomainError);
  CHECK_NOTHROW(make_slater_basis({s1, s2}, {1.0, 2.0}, 0.0, 1.0));
}

// ---------------------------------------------------------------------------
// Nonvanishing on the ordered simplex.
// ---------------------------------------------------------------------------

TEST_CASE("sine Slater determinants keep one sign on the simplex") {
  for (int n = 2; n <= 4; ++n) {
    SlaterBasis b = sine_basis(n);
    NonvanishingReport rep = simplex_nonvanishing_check(b, 400, 42);
    CHECK(rep.ok);
    CHECK(rep.samples == 400);
    CHECK(rep.min_abs > 0.0);
    CHECK(rep.sign != 0);
    CHECK(rep.witnesses.empty());
  }
}

TEST_CASE("simplex sign agrees with a direct evaluation") {
  SlaterBasis b = sine_basis(2);
  NonvanishingReport rep = simplex_nonvanishing_check(b, 200, 7);
  double direct = sine_det2(0.25, 0.5);
  REQUIRE(direct != 0.0);
  CHECK(rep.sign == (direct > 0.0 ? 1 : -1));
}

TEST_CASE("a gapped mode family fails the simplex check with witnesses") {
  // sin(pi x) and sin(3 pi x) are orthogonal with a common norm, but they are
  // not consecutive modes: their Slater determinant changes sign.
  auto s1 = [](double x) { return std::sin(kPi * x); };
  auto s3 = [](double x) { return std::sin(3.0 * kPi * x); };
  SlaterBasis gapped =
      make_slater_basis({s1, s3}, {kPi * kPi, 9.0 * kPi * kPi}, 0.0, 1.0);
  NonvanishingReport rep = simplex_nonvanishing_check(gapped, 400, 3);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.witnesses.size() == 2);
  // The recorded witnesses really produce opposite determinant signs.
  double d0 = slater_eval(gapped, rep.witnesses[0]);
  double d1 = slater_eval(gapped, rep.witnesses[1]);
  CHECK(d0 * d1 < 0.0);
}

TEST_CASE("hermite Slater determinants keep one sign on the simplex") {
  SlaterBasis b = hermite_basis(4);
  NonvanishingReport rep = simplex_nonvanishing_check(b, 300, 11);
  CHECK(rep.ok);
  CHECK(rep.sign != 0);
}

// ---------------------------------------------------------------------------
// Sign structure of minor combinations.
// ---------------------------------------------------------------------------

TEST_CASE("minor combination changes sign exactly at the chosen points") {
  SlaterBasis b = sine_basis(3);
  std::vector<double> c = {0.3, 0.7};
  SignStructureReport rep = sign_change_structure(b, c);
  CHECK(rep.zeros_ok);
  CHECK(rep.slabs_ok);
  CHECK(rep.global_sign != 0);
  REQUIRE(rep.zero_locations.size() == 2);
  CHECK(rep.zero_locations[0] == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(rep.zero_locations[1] == doctest::Approx(0.7).epsilon(1e-3));
  REQUIRE(rep.slab_signs.size() == 3);
  CHECK(rep.slab_signs[0] == rep.global_sign);   // (-1)^{n-j}, j = n
  CHECK(rep.slab_signs[1] == -rep.global_sign);  // middle slab flips
  CHECK(rep.slab_signs[2] == rep.global_sign);
}

TEST_CASE("minor vector reproduces the determinant with one column free") {
  SlaterBasis b = sine_basis(3);
  std::vector<double> c = {0.25, 0.6};
  std::vector<double> s = slater_minors(b, c);
  REQUIRE(s.size() == 3);
  for (double x : {0.1, 0.45, 0.9}) {
    double via_minors = linear_eval(b, s, x);
    double direct = sine_det3(0.25, 0.6, x);
    CHECK(via_minors == doctest::Approx(direct).epsilon(1e-10));
  }
  CHECK_THROWS_AS(slater_minors(b, std::vector<double>{0.25}), DomainError);
  CHECK_THROWS_AS(slater_minors(b, std::vector<double>{0.6, 0.25}), DomainError);
}


// ---------------------------------------------------------------------------
// Collinearity of coefficients with minors.
// ---------------------------------------------------------------------------

TEST_CASE("a minor-generated combination is collinear with its own minors") {
  SlaterBasis b = sine_basis(4);
  // Prescribed zeros must avoid the detector's sample lattice; a crossing
  // placed exactly on a sample would be skipped as a near-zero endpoint.
  const std::vector<double> c = {0.213717, 0.504137, 0.799313};
  std::vector<double> coeff = slater_minors(b, c);
  CollinearityReport rep = collinearity_check(b, coeff);
  CHECK(rep.applicable);
  REQUIRE(rep.zeros.size() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK(rep.zeros[i] == doctest::Approx(c[i]).epsilon(1e-6));
  CHECK(rep.sine_angle < 1e-9);
  CHECK_FALSE(rep.extra_zeros);
  CHECK(rep.ok);
}

TEST_CASE("random combinations with full sign change count pass collinearity") {
  SlaterBasis b = sine_basis(3);
  Rng rng(2024);
  int applicable = 0;
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> coeff(3);
    for (double& v : coeff) v = rng.uniform(-1.0, 1.0);
    CollinearityReport rep = collinearity_check(b, coeff);
    if (!rep.applicable) continue;
    ++applicable;
    CHECK(rep.ok);
    CHECK(rep.sine_angle < 1e-6);
  }
  CHECK(applicable >= 5);
}

TEST_CASE("combinations with fewer sign changes are reported inapplicable") {
  SlaterBasis b = sine_basis(3);
  // Pure ground state: no sign change at all.
  CollinearityReport rep = collinearity_check(b, {1.0, 0.0, 0.0});
  CHECK_FALSE(rep.applicable);
  CHECK(rep.zeros.size() < 2);
}

// ---------------------------------------------------------------------------
// Hermite closed form.
// ---------------------------------------------------------------------------

TEST_CASE("hermite determinant matches the Vandermonde-Gaussian closed form") {
  for (int n : {2, 3, 4}) {
    HermiteClosedFormReport rep = hermite_closed_form_check(n, 100, 99);
    CHECK(rep.ok);
    CHECK(rep.max_rel_dev < 1e-8);
    CHECK(std::abs(rep.constant) > 0.0);
  }
}

TEST_CASE("hermite functions are orthonormal and start at the Gaussian") {
  ScalarFn h0 = hermite_function(0);
  double expected = std::pow(kPi, -0.25);
  CHECK(h0(0.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(h0(1.3) == doctest::Approx(expected * std::exp(-1.3 * 1.3 / 2.0)).epsilon(1e-12));

  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      ScalarFn ha = hermite_function(a), hb = hermite_function(b);
      double ip = simpson([&](double x) { return ha(x) * hb(x); }, -10.0, 10.0, 4000);
      CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-8));
    }
  }
}

// ---------------------------------------------------------------------------
// Bases from tabulated spectra.
// ---------------------------------------------------------------------------

TEST_CASE("basis rows built from a solved spectrum interpolate its samples") {
  sl1d::SLProblem p;
  p.coeff = sl1d::sine_coefficients();
  p.boundary = sl1d::Boundary::dirichlet;
  p.a = 0.0;
  p.b = 1.0;
  sl1d::SLSpectrum s = sl1d::solve_sl(p, 512, 5);
  SlaterBasis b = basis_from_spectrum(s, p, 3);
  REQUIRE(b.n() == 3);
  CHECK(b.lo == doctest::Approx(0.0));
  CHECK(b.hi == doctest::Approx(1.0));
  for (int j = 0; j < 3; ++j) {
    CHECK(b.eigenvalues[j] == doctest::Approx(s.eigenvalues[j]));
    for (int i : {17, 255, 300})
      CHECK(b.h[j](s.grid[i]) == doctest::Approx(s.eigenfunctions[j][i]).epsilon(1e-12));
  }
  NonvanishingReport rep = simplex_nonvanishing_check(b, 200, 5);
  CHECK(rep.ok);
}

TEST_CASE("linear_eval validates coefficient length") {
  SlaterBasis b = sine_basis(3);
  CHECK_THROWS_AS(linear_eval(b, {1.0, 2.0}, 0.5), DomainError);
  CHECK(linear_eval(b, {0.0, 1.0, 0.0}, 0.25) ==
        doctest::Approx(std::sin(2.0 * kPi * 0.25)).epsilon(1e-12));
}

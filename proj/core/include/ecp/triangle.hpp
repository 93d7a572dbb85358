#pragma once

#include <array>
#include <string>
#include <vector>

#include "ecp/common.hpp"

namespace ecp::triangle {

// Geometry: rhombus (0,0), (1,0), (3/2, sqrt3/2), (1/2, sqrt3/2); long
// diagonal D from (0,0), short diagonal M between (1,0) and (1/2, sqrt3/2).
// Te1 is the equilateral half below M; Th is the reference hemiequilateral
// triangle (0,0), (sqrt3/2, 0), (sqrt3/2, 1/2) with sides tagged 1..3 in
// decreasing length (hypotenuse, long leg, short leg).
inline constexpr double kSqrt3 = 1.7320508075688772;
inline constexpr double kLambdaUnit = 16.0 * M_PI * M_PI / 9.0;

struct Vec2 {
  double x = 0.0, y = 0.0;
};

Vec2 reflect_D(Vec2 p);
Vec2 reflect_M(Vec2 p);
bool in_te1(Vec2 p, double pad = 1e-9);
bool in_te2(Vec2 p, double pad = 1e-9);
bool in_rhombus(Vec2 p, double pad = 1e-9);

double lambda_hat(int m, int n);  // 16*pi^2/9 * (m^2 + m*n + n^2)

enum class Shape { equilateral, hemiequilateral };

// Boundary letters per side, 'd' or 'n'; hemiequilateral sides ordered
// (hypotenuse, long leg on D, short leg on M), equilateral sides ordered
// (outer, outer, M side).
struct MixedProblem {
  Shape shape = Shape::hemiequilateral;
  std::array<char, 3> letters = {'n', 'n', 'n'};

  std::string name() const;
};

struct SpectrumEntry {
  double value = 0.0;
  int norm = 0;  // m^2 + m*n + n^2
  std::vector<std::pair<int, int>> pairs;
  int multiplicity = 0;
};

// Closed-form lattice spectra. Hemiequilateral problems require equal first
// and third letters (nnn, ndn, dnd, ddd); equilateral ones require a uniform
// letter. Everything else has no closed form here.
std::vector<SpectrumEntry> enumerate_mixed_spectrum(const MixedProblem& p, double cutoff);

// Second Neumann eigenfunction of Te1 (eigenvalue 16*pi^2/9), symmetric
// under both diagonal reflections of the rhombus.
double phi2_neumann(double x, double y);

struct RhombusFunction {
  PlaneFn eval;
  int sigma = 0;  // D-reflection parity: +1, -1, 0 = mixed
  int tau = 0;    // M-reflection parity
  bool continuous = true;
};

// Parity detection by deterministic sampling (tolerance 1e-9 relative).
RhombusFunction make_rhombus_function(PlaneFn f);

// Extend a function given on Te1 to the rhombus by (anti)symmetry across M;
// tau = -1 requires a vanishing trace on M to stay continuous.
RhombusFunction reflect_extend(const PlaneFn& f_on_te1, int tau);

// The four projections 1/4 (f + sigma D*f + tau M*f + sigma tau (DM)*f);
// index order (+,+), (+,-), (-,+), (-,-).
std::array<RhombusFunction, 4> symmetry_project(const PlaneFn& f);

struct LabeledEigenvalue {
  double value = 0.0;
  int sigma = 0, tau = 0;
  std::string source;      // hemiequilateral column, e.g. "nnd"
  int index_in_source = 0;  // 1-based mu index within the column
  double error_estimate = 0.0;
  int kappa = 0;  // 1-based min index of the cluster in the merged spectrum
};

struct AssembledSpectrum {
  char outer = 'n';
  std::vector<LabeledEigenvalue> values;  // ascending
};

struct SpectrumColumn {
  std::array<char, 3> letters;
  std::vector<double> values;  // ascending
  std::vector<double> errors;  // same length; zero for analytic columns
};

// Merge the four hemiequilateral columns sharing the outer letter into the
// rhombus spectrum; labels follow the reflection rule (n -> +, d -> -) for
// the letters on the D and M legs. kappa uses relative clustering tolerance
// cluster_tol.
AssembledSpectrum rhombus_spectrum_assemble(char outer,
                                            const std::vector<SpectrumColumn>& columns,
                                            double cutoff, double cluster_tol = 1e-4);

}  // namespace ecp::triangle

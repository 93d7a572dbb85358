#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ecp/common.hpp"
#include "ecp/fem.hpp"
#include "ecp/mesh.hpp"

namespace ecp {

// --------------------------------------------------------------------------
// Sampling grids
// --------------------------------------------------------------------------

struct GridSpec {
  double xmin = 0.0, xmax = 1.0;
  double ymin = 0.0, ymax = 1.0;
  int nx = 801;
  int ny = 801;

  double hx() const { return (xmax - xmin) / (nx - 1); }
  double hy() const { return (ymax - ymin) / (ny - 1); }
  double pitch() const { return hx() > hy() ? hx() : hy(); }
  // Same bounding box at half pitch; existing sample points are preserved.
  GridSpec refined() const {
    GridSpec g = *this;
    g.nx = 2 * nx - 1;
    g.ny = 2 * ny - 1;
    return g;
  }
};

using DomainMask = std::function<bool(double, double)>;

GridSpec rhombus_grid(int n = 801);
GridSpec unit_square_grid(int n = 801);
DomainMask rhombus_mask();
DomainMask all_inside_mask();

// Uniform lattice restricted to a domain; values at masked-out points are 0.
struct SampledField {
  GridSpec grid;
  std::vector<double> values;    // row-major, index j*nx + i
  std::vector<std::uint8_t> inside;
  std::size_t inside_count = 0;
  double max_abs = 0.0;

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * grid.nx + i;
  }
};

SampledField sample_field(const PlaneFn& f, const GridSpec& grid, const DomainMask& mask);
// a + t*b; both fields must share one grid and mask.
SampledField combine_fields(const SampledField& a, const SampledField& b, double t);

// --------------------------------------------------------------------------
// Nodal domain counting
// --------------------------------------------------------------------------

// Labels: -1 outside, 0 zero band, 1..beta0 component ids in scan-order of
// first appearance (deterministic).
struct NodalPartition {
  GridSpec grid;
  std::vector<std::int32_t> labels;
  std::vector<std::int8_t> component_sign;  // size beta0, entries +1/-1
  int beta0 = 0;
  std::size_t inside_count = 0;
  std::size_t band_count = 0;
  double uncertain_fraction = 0.0;
  // Sign specks spanning fewer than ~5 pitches that were folded into the
  // band rather than counted; nonzero values flag near-noise structure.
  int discarded_specks = 0;
};

// Single-resolution labeling. Throws DomainError on an identically-zero
// field and ResolutionError when the pitch is too coarse for the field's
// gradient (max|grad|*h must stay below 0.1*max|f|).
//
// `amplitude_floor` is a relative noise level: samples with
// |f| <= amplitude_floor * max|f| join the zero band, so sign cells whose
// amplitude never rises above the field's modeling accuracy (for instance
// discretization noise of an approximate eigenfunction near a corner) are
// not counted as nodal domains. Zero keeps every sign cell.
NodalPartition label_components(const SampledField& f, double amplitude_floor = 0.0);

struct StableCount {
  NodalPartition partition;  // base resolution
  int beta0 = 0;
  int refined_beta0 = 0;
  bool stable = false;
  double uncertain_fraction = 0.0;
};

// Counts at pitch h and h/2. `stable` records agreement instead of throwing.
StableCount count_nodal_domains_stable(const PlaneFn& f, const GridSpec& grid,
                                       const DomainMask& mask,
                                       double amplitude_floor = 0.0);
// Strict variant: refinement disagreement is a ResolutionError.
NodalPartition count_nodal_domains(const PlaneFn& f, const GridSpec& grid,
                                   const DomainMask& mask);

// --------------------------------------------------------------------------
// Courant index and ECP checks
// --------------------------------------------------------------------------

struct CourantIndex {
  int kappa = 0;        // 1-based position of the first cluster member
  double eigenvalue = 0.0;
  double cluster_tol = 0.0;
};

// `spectrum` must be sorted ascending. Adjacent values within
// rel_tol*max(|a|,|b|,1) belong to one cluster; mu must land in a cluster.
CourantIndex kappa_index(const std::vector<double>& spectrum, double mu,
                         double rel_tol = 1e-4);

struct ECPReport {
  std::string description;
  int beta0 = 0;
  int kappa = 0;
  double mu_m = 0.0;
  bool stable = false;
  double uncertain_fraction = 0.0;
  std::string verdict;  // "consistent" | "VIOLATION" | "inconclusive"
  std::string note;     // uncertainty / failure detail
};

// A count is trusted when it agrees across grid refinement and the zero band
// covers less than this fraction of the domain. The band is geometric (width
// ~3 pitches around the nodal set), so its area scales linearly with the
// pitch; the gate only rejects grossly under-resolved grids, while
// connectivity errors are caught by the refinement comparison.
inline constexpr double kUncertainGate = 0.05;

// Counts nodal domains of `combination` and compares with kappa(mu_m).
// VIOLATION requires beta0 > kappa and a trusted count; an untrusted excess
// is reported as inconclusive.
ECPReport ecp_check(const PlaneFn& combination, const std::string& description,
                    const std::vector<double>& spectrum, double mu_m,
                    const GridSpec& grid, const DomainMask& mask,
                    double cluster_rel_tol = 1e-4);

// --------------------------------------------------------------------------
// Rhombus scenarios
// --------------------------------------------------------------------------

// Extends a P1 field on the reference hemiequilateral triangle to the whole
// rhombus: fold across the long diagonal D (sign sigma) and the short
// diagonal M (sign tau), then map the quarter isometrically onto the
// reference triangle. sigma/tau = +1 for a Neumann leg, -1 for Dirichlet.
PlaneFn rhombus_extend_from_quarter(fem::P1Field field, int sigma, int tau);

struct SegmentCheck {
  std::array<double, 2> a{}, b{};
  int samples = 0;
  double max_abs = 0.0;  // max |field| along the segment
};

struct RhombusCounterexampleReport {
  std::vector<double> nu;  // assembled Neumann spectrum (first few)
  ECPReport ecp;           // expected: beta0 = 4 > kappa = 3
  SegmentCheck vertical;   // {x = 3/4}
  SegmentCheck diagonal;   // {x + sqrt(3) y = 3/2}
  double transversal_min = 0.0;  // min |f|/max|f| off the two segments
  std::size_t transversal_points = 0;
  bool transversal_ok = false;
  NodalPartition partition;
};

// The analytic combination 1 + phi2 on the Neumann rhombus. The spectrum is
// assembled from the two explicit columns plus a small FEM solve for the
// remaining ones; the field itself is closed-form.
RhombusCounterexampleReport counterexample_rhombus_neumann(int grid_n = 801,
                                                           int fem_level = 6,
                                                           unsigned seed = 1234);

struct SweepPoint {
  double t = 0.0;
  int candidate = 0;  // index into the candidate direction list
  int beta0 = 0;
  int refined_beta0 = 0;
  bool stable = false;
  double uncertain_fraction = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // ordered by (candidate, t)
  int max_beta0 = 0;               // over stable points only
  double argmax_t = 0.0;
  int argmax_candidate = 0;
  std::vector<std::array<double, 2>> change_intervals;  // t-intervals where the count moves
};

// beta0(u + t*v) for each t over pre-sampled fields (single candidate pair).
SweepResult coefficient_sweep(const SampledField& u, const SampledField& u_fine,
                              const SampledField& v, const SampledField& v_fine,
                              const std::vector<double>& t_values,
                              double amplitude_floor = 0.0);

struct SweepScenarioReport {
  std::string description;
  std::vector<double> spectrum;  // assembled rhombus spectrum
  double mu_low = 0.0, mu_high = 0.0;
  int kappa = 0;        // kappa(mu_high)
  int candidates = 0;   // candidate (low, high) direction pairs swept
  double amplitude_floor = 0.0;  // relative noise floor applied to counts
  SweepResult sweep;
  int max_beta0 = 0;
  double best_t = 0.0;
  int best_candidate = 0;
  std::string verdict;  // "violation_confirmed" | "consistent" | "inconclusive"
  NodalPartition best_partition;
};

// Sweeps combinations u + t*v with u in the eigenspace of the low_index-th
// rhombus eigenvalue and v in that of high_index (boundary 'n' or 'd').
// Degenerate eigenspaces contribute several candidate directions. When
// target_beta0 > 0 and the target is not reached, the sweep refines around
// the count-change intervals (up to three rounds) before giving up.
SweepScenarioReport rhombus_sweep_scenario(char boundary, int low_index, int high_index,
                                           int target_beta0, int grid_n = 801,
                                           int fem_level = 7, int steps = 101,
                                           unsigned seed = 1234);

// --------------------------------------------------------------------------
// Product construction and sphere bounds
// --------------------------------------------------------------------------

struct ProductLiftReport {
  double epsilon = 0.0;
  double epsilon_star = 0.0;  // sqrt(mu2_fiber / mu_m)
  bool collapsed = false;     // epsilon < epsilon_star
  std::vector<double> lifted_spectrum;  // complete prefix of sorted sums
  double mu_m = 0.0;
  int base_kappa = 0;
  int lifted_kappa = 0;
  int beta0 = 0;  // cylinder components: unchanged from the base
  std::string verdict;  // "violation_confirmed" | "consistent" | "not_collapsed"
};

// Spectrum of the product with a factor scaled by epsilon: sorted
// {lambda_i + mu_j / epsilon^2}. The combination carried over from the base
// keeps its nodal count (components become cylinders), so for epsilon below
// the threshold a base violation persists.
ProductLiftReport product_lift(const std::vector<double>& base_spectrum, double mu_m,
                               int base_beta0, const std::vector<double>& fiber_spectrum,
                               double epsilon, double cluster_rel_tol = 1e-4);

// First `count` eigenvalues of the unit circle: 0, 1, 1, 4, 4, 9, 9, ...
std::vector<double> circle_spectrum(int count);

struct SphereBounds {
  int d = 0, k = 0;
  long long courant = 0;        // C(d+k-1,d) + C(d+k-2,d) + 1
  long long leydold = -1;       // k(k-1)+2 when d == 2, else absent (-1)
  long long effective = 0;      // min of the bounds present
};

// Upper bounds for the nodal count of a degree-k spherical harmonic on S^d.
SphereBounds sphere_bounds(int d, int k);

}  // namespace ecp

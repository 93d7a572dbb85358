#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ecp/mesh.hpp"

namespace ecp::fem {

// side tag -> 'd' or 'n'; Dirichlet wins at shared corners.
using BCMap = std::map<int, char>;

BCMap bc_from_letters(const std::string& letters);  // tags 1..letters.size()
BCMap bc_uniform(const TriangleMesh& mesh, char letter);

struct AssembledSystem {
  Eigen::SparseMatrix<double> A;  // P1 stiffness on free dofs
  Eigen::SparseMatrix<double> B;  // consistent P1 mass on free dofs
  std::vector<int> free_to_vertex;
  int n_vertices = 0;
  bool all_neumann = false;
};

AssembledSystem assemble(const TriangleMesh& mesh, const BCMap& bc);

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending, k lowest
  Eigen::MatrixXd vectors;          // columns, B-orthonormal, on free dofs
  std::vector<int> free_to_vertex;
  int n_vertices = 0;
  int iterations = 0;
  std::vector<double> residuals;  // ||A v - lambda B v|| / ||B v||
};

// Shift-invert (shift 0, or -1 for all-Neumann) blocked subspace iteration
// with Rayleigh-Ritz; block k+5, residual target 1e-8, at most 500 rounds.
EigenResult solve_lowest(const AssembledSystem& sys, int k, std::uint64_t seed = 1234);

// Vertex field (Dirichlet dofs zero-filled) as a P1 interpolant.
P1Field eigenfield(std::shared_ptr<const TriangleMesh> mesh, const EigenResult& r, int index);

struct FemLevel {
  std::shared_ptr<const TriangleMesh> mesh;
  AssembledSystem sys;
  EigenResult eig;
  int level = 0;
};

FemLevel solve_level(RefDomain domain, const std::string& letters, int level, int k,
                     std::uint64_t seed = 1234);

struct Extrapolated {
  std::vector<double> values;           // (4*fine - coarse) / 3
  std::vector<double> error_estimates;  // |fine - coarse| / 3
  std::vector<double> correlations;     // prolonged-coarse vs fine, B inner product
};

// Richardson extrapolation of paired eigenvalues; pairs are validated by
// eigenvector correlation (cluster-aware), below 0.9 raises PairingError.
Extrapolated extrapolate(const FemLevel& coarse, const FemLevel& fine);

// Convenience: solve at level-1 and level, extrapolate.
Extrapolated solve_extrapolated(RefDomain domain, const std::string& letters, int level, int k,
                                std::uint64_t seed = 1234);

struct InequalityCheck {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  double margin = 0.0;        // rhs - lhs
  double combined_error = 0.0;
  std::string verdict;        // pass | fail | inconclusive
};

struct ColumnTable {
  // letters -> extrapolated values and error estimates for mu_1..mu_k
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> columns;
};

// Mixed-boundary comparisons on the hemiequilateral triangle for
// i = 1..i_max, plus the one-Dirichlet-side chain between the pure Neumann
// and pure Dirichlet ground states. Margins must beat the summed error
// estimates, otherwise the check is inconclusive.
std::vector<InequalityCheck> verify_inequalities(const ColumnTable& table, int i_max = 4);

}  // namespace ecp::fem

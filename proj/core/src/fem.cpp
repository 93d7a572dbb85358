#include "ecp/fem.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <set>

namespace ecp::fem {

BCMap bc_from_letters(const std::string& letters) {
  BCMap bc;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    char c = letters[i];
    if (c != 'n' && c != 'd') throw DomainError("bc_from_letters: letters must be 'n' or 'd'");
    bc[static_cast<int>(i) + 1] = c;
  }
  return bc;
}

BCMap bc_uniform(const TriangleMesh& mesh, char letter) {
  if (letter != 'n' && letter != 'd') throw DomainError("bc_uniform: letter must be 'n' or 'd'");
  BCMap bc;
  for (const auto& e : mesh.boundary) bc[e.tag] = letter;
  return bc;
}

AssembledSystem assemble(const TriangleMesh& mesh, const BCMap& bc) {
  const int nv = mesh.n_vertices();
  std::vector<bool> dirichlet(nv, false);
  bool any_d = false;
  for (const auto& e : mesh.boundary) {
    auto it = bc.find(e.tag);
    if (it == bc.end()) throw DomainError("assemble: boundary tag without a condition");
    if (it->second == 'd') {  // Dirichlet wins at shared corners
      dirichlet[e.a] = dirichlet[e.b] = true;
      any_d = true;
    }
  }
  AssembledSystem sys;
  sys.n_vertices = nv;
  sys.all_neumann = !any_d;
  std::vector<int> vertex_to_free(nv, -1);
  for (int i = 0; i < nv; ++i)
    if (!dirichlet[i]) {
      vertex_to_free[i] = static_cast<int>(sys.free_to_vertex.size());
      sys.free_to_vertex.push_back(i);
    }
  const int nf = static_cast<int>(sys.free_to_vertex.size());
  if (nf == 0) throw DomainError("assemble: no free dofs");

  std::vector<Eigen::Triplet<double>> ta, tb;
  ta.reserve(mesh.cells.size() * 9);
  tb.reserve(mesh.cells.size() * 9);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.cells[c];
    const auto &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
    double area = mesh.cell_area(c);
    if (!(area > 0.0)) throw DomainError("assemble: degenerate or flipped cell");
    // gradients of the barycentric functions
    double gx[3] = {(p1[1] - p2[1]), (p2[1] - p0[1]), (p0[1] - p1[1])};
    double gy[3] = {(p2[0] - p1[0]), (p0[0] - p2[0]), (p1[0] - p0[0])};
    for (int i = 0; i < 3; ++i) {
      gx[i] /= 2.0 * area;
      gy[i] /= 2.0 * area;
    }
    for (int i = 0; i < 3; ++i) {
      int fi = vertex_to_free[t[i]];
      if (fi < 0) continue;
      for (int j = 0; j < 3; ++j) {
        int fj = vertex_to_free[t[j]];
        if (fj < 0) continue;
        ta.emplace_back(fi, fj, area * (gx[i] * gx[j] + gy[i] * gy[j]));
        tb.emplace_back(fi, fj, area / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  sys.A.resize(nf, nf);
  sys.B.resize(nf, nf);
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.B.setFromTriplets(tb.begin(), tb.end());
  sys.A.makeCompressed();
  sys.B.makeCompressed();
  return sys;
}

EigenResult solve_lowest(const AssembledSystem& sys, int k, std::uint64_t seed) {
  const int n = static_cast<int>(sys.A.rows());
  if (k < 1 || k > n) throw DomainError("solve_lowest: k out of range");
  const int p = std::min(n, k + 5);
  const double shift = sys.all_neumann ? -1.0 : 0.0;

  Eigen::SparseMatrix<double> op = sys.A - shift * sys.B;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;  // AMD ordering
  solver.compute(op);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("solve_lowest: factorization failed");

  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = rng.normal();

  EigenResult res;
  res.free_to_vertex = sys.free_to_vertex;
  res.n_vertices = sys.n_vertices;
  Eigen::VectorXd theta(p);
  const int max_iter = 500;
  int iter = 0;
  for (iter = 1; iter <= max_iter; ++iter) {
    const int bs = static_cast<int>(X.cols());
    Eigen::MatrixXd Y = solver.solve(sys.B * X);
    // B-orthonormalize through the Gram eigendecomposition (robust to
    // near-dependent blocks early in the iteration)
    Eigen::MatrixXd G = Y.transpose() * (sys.B * Y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(G);
    double smax = ge.eigenvalues().maxCoeff();
    int kept = 0;
    Eigen::MatrixXd T(bs, bs);
    for (int j = 0; j < bs; ++j) {
      double s = ge.eigenvalues()(j);
      if (s > 1e-13 * smax) T.col(kept++) = ge.eigenvectors().col(j) / std::sqrt(s);
    }
    if (kept < k) throw ConvergenceError("solve_lowest: block collapsed");
    Eigen::MatrixXd Z = Y * T.leftCols(kept);
    Eigen::MatrixXd Ar = Z.transpose() * (sys.A * Z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(0.5 * (Ar + Ar.transpose()));
    X = Z * rr.eigenvectors();
    theta = rr.eigenvalues();

    bool done = true;
    res.residuals.assign(k, 0.0);
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXd r = sys.A * X.col(i) - theta(i) * (sys.B * X.col(i));
      double denom = (sys.B * X.col(i)).norm();
      res.residuals[i] = r.norm() / denom;
      if (res.residuals[i] >= 1e-8) done = false;
    }
    if (done) break;
  }
  res.iterations = std::min(iter, max_iter);
  if (res.residuals.empty() || *std::max_element(res.residuals.begin(), res.residuals.end()) >= 1e-8)
    throw ConvergenceError("solve_lowest: residual target not reached");

  res.eigenvalues.assign(theta.data(), theta.data() + k);
  res.vectors = X.leftCols(k);
  for (int j = 0; j < k; ++j) {
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < n; ++i)
      if (std::abs(res.vectors(i, j)) > best) {
        best = std::abs(res.vectors(i, j));
        arg = i;
      }
    if (res.vectors(arg, j) < 0.0) res.vectors.col(j) = -res.vectors.col(j);
  }
  return res;
}

P1Field eigenfield(std::shared_ptr<const TriangleMesh> mesh, const EigenResult& r, int index) {
  if (index < 0 || index >= static_cast<int>(r.eigenvalues.size()))
    throw DomainError("eigenfield: index out of range");
  std::vector<double> v(r.n_vertices, 0.0);
  for (std::size_t i = 0; i < r.free_to_vertex.size(); ++i)
    v[r.free_to_vertex[i]] = r.vectors(static_cast<int>(i), index);
  return P1Field(std::move(mesh), std::move(v));
}

FemLevel solve_level(RefDomain domain, const std::string& letters, int level, int k,
                     std::uint64_t seed) {
  FemLevel lv;
  lv.level = level;
  auto mesh = std::make_shared<TriangleMesh>(reference_mesh(domain, level));
  BCMap bc = letters.size() == 1 ? bc_uniform(*mesh, letters[0]) : bc_from_letters(letters);
  lv.sys = assemble(*mesh, bc);
  lv.eig = solve_lowest(lv.sys, k, seed);
  lv.mesh = std::move(mesh);
  return lv;
}

Extrapolated extrapolate(const FemLevel& coarse, const FemLevel& fine) {
  const int k = static_cast<int>(
      std::min(coarse.eig.eigenvalues.size(), fine.eig.eigenvalues.size()));
  const int nf = static_cast<int>(fine.sys.A.rows());

  // Prolong coarse eigenvectors by P1 interpolation at fine vertices.
  Eigen::MatrixXd P(nf, k);
  for (int j = 0; j < k; ++j) {
    P1Field field = eigenfield(coarse.mesh, coarse.eig, j);
    for (int i = 0; i < nf; ++i) {
      const auto& v = fine.mesh->vertices[fine.sys.free_to_vertex[i]];
      P(i, j) = field(v[0], v[1]);
    }
  }

  Extrapolated out;
  out.values.resize(k);
  out.error_estimates.resize(k);
  out.correlations.resize(k);
  int i = 0;
  while (i < k) {
    int j = i;  // cluster of near-equal fine eigenvalues
    double scale = std::max(1.0, std::abs(fine.eig.eigenvalues[i]));
    while (j + 1 < k &&
           fine.eig.eigenvalues[j + 1] - fine.eig.eigenvalues[j] < 1e-3 * scale)
      ++j;
    Eigen::MatrixXd W = P.middleCols(i, j - i + 1);
    // B-orthonormalize the prolonged cluster
    Eigen::MatrixXd G = W.transpose() * (fine.sys.B * W);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(G);
    Eigen::MatrixXd T(W.cols(), W.cols());
    int kept = 0;
    double smax = ge.eigenvalues().maxCoeff();
    for (int c = 0; c < W.cols(); ++c)
      if (ge.eigenvalues()(c) > 1e-12 * smax)
        T.col(kept++) = ge.eigenvectors().col(c) / std::sqrt(ge.eigenvalues()(c));
    Eigen::MatrixXd Wo = W * T.leftCols(kept);
    for (int c = i; c <= j; ++c) {
      Eigen::VectorXd u = fine.eig.vectors.col(c);
      double corr = (Wo.transpose() * (fine.sys.B * u)).norm();
      out.correlations[c] = corr;
      if (corr < 0.9)
        throw PairingError("extrapolate: coarse/fine eigenvector pairing failed");
      out.values[c] = (4.0 * fine.eig.eigenvalues[c] - coarse.eig.eigenvalues[c]) / 3.0;
      out.error_estimates[c] =
          std::abs(fine.eig.eigenvalues[c] - coarse.eig.eigenvalues[c]) / 3.0;
    }
    i = j + 1;
  }
  return out;
}

Extrapolated solve_extrapolated(RefDomain domain, const std::string& letters, int level, int k,
                                std::uint64_t seed) {
  if (level < 1) throw DomainError("solve_extrapolated: level must be at least 1");
  FemLevel coarse = solve_level(domain, letters, level - 1, k, seed);
  FemLevel fine = solve_level(domain, letters, level, k, seed);
  return extrapolate(coarse, fine);
}

namespace {

struct Col {
  const std::vector<double>* v;
  const std::vector<double>* e;
};

}  // namespace

std::vector<InequalityCheck> verify_inequalities(const ColumnTable& table, int i_max) {
  const char* needed[8] = {"nnn", "nnd", "ndn", "ndd", "dnn", "dnd", "ddn", "ddd"};
  std::map<std::string, Col> cols;
  for (const char* name : needed) {
    auto it = table.columns.find(name);
    if (it == table.columns.end())
      throw DomainError(std::string("verify_inequalities: missing column ") + name);
    cols[name] = {&it->second.first, &it->second.second};
  }
  auto mu = [&](const std::string& c, int i) -> double {
    if (i > static_cast<int>(cols[c].v->size()))
      throw DomainError("verify_inequalities: column too short: " + c);
    return (*cols[c].v)[i - 1];
  };
  auto err = [&](const std::string& c, int i) { return (*cols[c].e)[i - 1]; };

  std::vector<InequalityCheck> checks;
  auto strict = [&](const std::string& lo, int i, const std::string& hi, int j) {
    InequalityCheck c;
    c.name = "mu" + std::to_string(i) + "(" + lo + ") < mu" + std::to_string(j) + "(" + hi + ")";
    c.lhs = mu(lo, i);
    c.rhs = mu(hi, j);
    c.margin = c.rhs - c.lhs;
    c.combined_error = err(lo, i) + err(hi, j);
    c.verdict = c.margin > c.combined_error ? "pass"
                : c.margin < -c.combined_error ? "fail"
                                               : "inconclusive";
    checks.push_back(c);
  };
  auto equal = [&](const std::string& a, int i, const std::string& b, int j,
                   const std::string& label) {
    InequalityCheck c;
    c.name = label;
    c.lhs = mu(a, i);
    c.rhs = mu(b, j);
    c.margin = c.rhs - c.lhs;
    c.combined_error = err(a, i) + err(b, j) + 1e-6 * std::max(1.0, std::abs(c.lhs));
    c.verdict = std::abs(c.margin) <= c.combined_error ? "pass" : "fail";
    checks.push_back(c);
  };

  for (int i = 1; i <= i_max; ++i) {
    strict("nnn", i, "ndn", i);
    strict("ndn", i, "ndd", i);
    strict("nnn", i, "nnd", i);
    strict("nnd", i, "ndd", i);
    strict("dnn", i, "ddn", i);
    strict("ddn", i, "ddd", i);
    strict("dnn", i, "dnd", i);
    strict("dnd", i, "ddd", i);
  }
  {
    InequalityCheck c;  // ground Neumann eigenvalue is zero
    c.name = "mu1(nnn) == 0";
    c.lhs = mu("nnn", 1);
    c.rhs = 0.0;
    c.margin = -c.lhs;
    c.combined_error = err("nnn", 1) + 1e-6;
    c.verdict = std::abs(c.lhs) <= c.combined_error ? "pass" : "fail";
    checks.push_back(c);
  }
  strict("nnn", 1, "nnd", 1);
  strict("nnd", 1, "ndn", 1);
  equal("ndn", 1, "nnn", 2, "mu1(ndn) == mu2(nnn)");
  strict("ndn", 1, "dnn", 1);
  strict("dnn", 1, "ndd", 1);
  strict("ndd", 1, "dnd", 1);
  strict("dnd", 1, "ddn", 1);
  strict("ddn", 1, "ddd", 1);
  return checks;
}

}  // namespace ecp::fem

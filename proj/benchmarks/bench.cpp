#include <benchmark/benchmark.h>

#include <cmath>

#include "ecp/fem.hpp"
#include "ecp/gelfand.hpp"
#include "ecp/mesh.hpp"
#include "ecp/nodal.hpp"
#include "ecp/sl1d.hpp"
#include "ecp/triangle.hpp"

namespace {

void BM_assemble(benchmark::State& state) {
  int level = static_cast<int>(state.range(0));
  auto mesh = ecp::fem::reference_mesh(ecp::fem::RefDomain::hemiequilateral, level);
  auto bc = ecp::fem::bc_from_letters("nnd");
  for (auto _ : state) benchmark::DoNotOptimize(ecp::fem::assemble(mesh, bc));
  state.SetLabel(std::to_string(mesh.n_cells()) + " cells");
}
BENCHMARK(BM_assemble)->Arg(4)->Arg(5)->Arg(6);

void BM_label_components(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto f = [](double x, double y) { return 1.0 + ecp::triangle::phi2_neumann(x, y); };
  auto field = ecp::sample_field(f, ecp::rhombus_grid(n), ecp::rhombus_mask());
  for (auto _ : state) benchmark::DoNotOptimize(ecp::label_components(field));
}
BENCHMARK(BM_label_components)->Arg(201)->Arg(401)->Arg(801);

void BM_slater_eval(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto basis = ecp::gelfand::sine_basis(n);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = (i + 1.0) / (n + 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ecp::gelfand::slater_eval(basis, x));
}
BENCHMARK(BM_slater_eval)->Arg(2)->Arg(4)->Arg(6);

void BM_solve_sl(benchmark::State& state) {
  int grid = static_cast<int>(state.range(0));
  ecp::sl1d::SLProblem prob{ecp::sl1d::sine_coefficients(), ecp::sl1d::Boundary::dirichlet, 0.0,
                            1.0};
  for (auto _ : state) benchmark::DoNotOptimize(ecp::sl1d::solve_sl(prob, grid, 12));
}
BENCHMARK(BM_solve_sl)->Arg(401)->Arg(801);

}  // namespace

BENCHMARK_MAIN();

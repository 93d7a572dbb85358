#include "ecp/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecp/common.hpp"
#include "ecp/fem.hpp"
#include "ecp/gelfand.hpp"
#include "ecp/nodal.hpp"
#include "ecp/sl1d.hpp"
#include "ecp/svg.hpp"
#include "ecp/triangle.hpp"

namespace ecp::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {
    "sl1d-verify",
    "gelfand-verify",
    "triangle-tables",
    "fem-tables",
    "inequalities",
    "rhombus-neumann-counterexample",
    "rhombus-neumann-sweep",
    "rhombus-dirichlet-sweep",
    "product-lift",
    "sphere-bounds",
    "reproduce-all",
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void add_verdict(ReportEnvelope& env, std::string name, std::string verdict,
                 std::string detail) {
  env.verdicts.push_back({std::move(name), std::move(verdict), std::move(detail)});
}

void add_check(ReportEnvelope& env, std::string name, bool ok, std::string detail) {
  add_verdict(env, std::move(name), ok ? "pass" : "fail", std::move(detail));
}

bool wants(const RunConfig& cfg, const char* format) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

// Stable artifact names; content is written as-is (binary mode, LF only).
void write_artifact(const RunConfig& cfg, ReportEnvelope& env, const std::string& name,
                    const std::string& content) {
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(std::filesystem::path(cfg.out_dir) / name, std::ios::binary);
  if (!out) throw Error("cannot write artifact " + name);
  out << content;
  env.artifacts.push_back(name);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

json config_echo(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["formats"] = cfg.formats;
  j["grid"] = cfg.grid;
  j["mesh_level"] = cfg.mesh_level;
  j["out_dir"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  j["sphere_d"] = cfg.sphere_d;
  j["sphere_k"] = cfg.sphere_k;
  j["sweep_steps"] = cfg.sweep_steps;
  j["tol"] = cfg.tol;
  return j;
}

void validate_config(const RunConfig& cfg) {
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
    throw DomainError("unknown command '" + cfg.command + "'");
  if (cfg.grid < 101 || cfg.grid > 4001)
    throw DomainError("grid must lie in [101, 4001]");
  if (cfg.mesh_level < 3 || cfg.mesh_level > 9)
    throw DomainError("mesh-level must lie in [3, 9]");
  if (!(cfg.tol > 0.0) || cfg.tol > 0.1)
    throw DomainError("tol must lie in (0, 0.1]");
  if (cfg.sweep_steps < 3 || cfg.sweep_steps > 2001)
    throw DomainError("sweep steps must lie in [3, 2001]");
  if (cfg.sphere_d < 1 || cfg.sphere_d > 8)
    throw DomainError("sphere dimension must lie in [1, 8]");
  if (cfg.sphere_k < 0 || cfg.sphere_k > 60)
    throw DomainError("sphere degree must lie in [0, 60]");
  if (cfg.out_dir.empty()) throw DomainError("output directory must not be empty");
  if (cfg.formats.empty()) throw DomainError("at least one output format is required");
  for (const auto& f : cfg.formats)
    if (f != "json" && f != "csv" && f != "svg")
      throw DomainError("unknown format '" + f + "' (expected json, csv or svg)");
}

// ---------------------------------------------------------------------------
// sl1d-verify
// ---------------------------------------------------------------------------

void check_spectrum(ReportEnvelope& env, const std::string& name,
                    const std::vector<double>& got, const std::vector<double>& want) {
  double worst = 0.0;
  std::size_t n = std::min(got.size(), want.size());
  for (std::size_t i = 0; i < n; ++i) {
    double scale = std::max(std::abs(want[i]), 1.0);
    worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
  }
  add_check(env, name, n == want.size() && worst < 1e-3,
            fmt("%zu eigenvalues, max relative deviation %.2e", n, worst));
}

void cmd_sl1d_verify(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  using namespace sl1d;
  const int kInterval = 1201, kCircle = 800, kTop = 12;

  Timer spectra;
  {
    SLProblem dir{sine_coefficients(), Boundary::dirichlet, 0.0, 1.0};
    SLProblem neu{sine_coefficients(), Boundary::neumann, 0.0, 1.0};
    SLProblem per{sine_coefficients(), Boundary::periodic, 0.0, 1.0};
    std::vector<double> want_d, want_n, want_p;
    for (int k = 1; k <= kTop; ++k) want_d.push_back(k * M_PI * k * M_PI);
    for (int k = 0; k < kTop; ++k) want_n.push_back(k * M_PI * k * M_PI);
    for (int j = 0; j < kTop + 1; ++j) {
      int k = (j + 1) / 2;
      want_p.push_back(static_cast<double>(k) * k);
    }
    check_spectrum(env, "spectrum_dirichlet", solve_sl(dir, kInterval, kTop).eigenvalues, want_d);
    check_spectrum(env, "spectrum_neumann", solve_sl(neu, kInterval, kTop).eigenvalues, want_n);
    check_spectrum(env, "spectrum_periodic", solve_sl(per, kCircle, kTop + 1).eigenvalues, want_p);
  }
  env.timings.emplace_back("spectra", spectra.seconds());

  struct Suite {
    const char* name;
    SLProblem prob;
    int grid;
  };
  const std::vector<Suite> suites = {
      {"sturm_dirichlet_q0", {sine_coefficients(), Boundary::dirichlet, 0.0, 1.0}, kInterval},
      {"sturm_neumann_q0", {sine_coefficients(), Boundary::neumann, 0.0, 1.0}, kInterval},
      {"sturm_periodic_q0", {sine_coefficients(), Boundary::periodic, 0.0, 1.0}, kCircle},
      {"sturm_dirichlet_mathieu",
       {mathieu_coefficients(10.0), Boundary::dirichlet, 0.0, 2.0 * M_PI},
       kInterval},
      {"sturm_neumann_mathieu",
       {mathieu_coefficients(10.0), Boundary::neumann, 0.0, 2.0 * M_PI},
       kInterval},
      {"sturm_periodic_mathieu", {mathieu_coefficients(10.0), Boundary::periodic, 0.0, 1.0},
       kCircle},
  };

  const int kWindows = 500;
  json suite_stats = json::array();
  for (std::size_t si = 0; si < suites.size(); ++si) {
    Timer t;
    const Suite& suite = suites[si];
    SLSpectrum s = solve_sl(suite.prob, suite.grid, kTop + 1);
    Rng rng(mix_seed(cfg.seed, si));
    int failed = 0, skipped = 0;
    std::string first_failure;
    for (int w = 0; w < kWindows; ++w) {
      CombinationSpec c;
      c.m = rng.uniform_int(1, kTop);
      c.n = rng.uniform_int(c.m, kTop);
      for (int j = c.m; j <= c.n; ++j) c.coeff.push_back(rng.uniform(-1.0, 1.0));
      auto pin = [&](double& a) { a = (a < 0 ? -1.0 : 1.0) * (0.1 + 0.9 * std::abs(a)); };
      pin(c.coeff.front());
      pin(c.coeff.back());
      try {
        SturmCheck chk = sturm_bounds_check(s, c);
        if (!(chk.upper_ok && chk.lower_ok)) {
          ++failed;
          if (first_failure.empty())
            first_failure =
                fmt("; first failure m=%d n=%d: %d zeros (bound %d), %d sign changes (floor %d)",
                    c.m, c.n, chk.zeros_with_multiplicity, chk.zero_bound, chk.sign_changes,
                    chk.sign_change_floor);
        }
      } catch (const ResolutionError&) {
        ++skipped;  // a zero whose order the grid cannot resolve; not a bound violation
      }
    }
    add_check(env, suite.name, failed == 0,
              fmt("%d windows, %d failed, %d unresolved%s", kWindows, failed, skipped,
                  first_failure.c_str()));
    suite_stats.push_back({{"suite", suite.name}, {"failed", failed}, {"skipped", skipped}});
    env.timings.emplace_back(suite.name, t.seconds());
  }
  payload["sturm_suites"] = suite_stats;
  payload["windows_per_suite"] = kWindows;
}

// ---------------------------------------------------------------------------
// gelfand-verify
// ---------------------------------------------------------------------------

std::vector<double> random_interior_points(Rng& rng, int count, double lo, double hi,
                                           double min_gap) {
  for (;;) {
    std::vector<double> c;
    for (int i = 0; i < count; ++i) c.push_back(rng.uniform(lo, hi));
    std::sort(c.begin(), c.end());
    bool ok = true;
    for (int i = 0; i + 1 < count; ++i) ok = ok && (c[i + 1] - c[i] >= min_gap);
    if (ok) return c;
  }
}

void cmd_gelfand_verify(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  using namespace gelfand;

  Timer simplex;
  for (int n = 2; n <= 4; ++n) {
    auto rep = simplex_nonvanishing_check(sine_basis(n), 10000, mix_seed(cfg.seed, 100 + n));
    add_check(env, fmt("simplex_sine_n%d", n), rep.ok,
              fmt("%d samples, |det| in [%.3e, %.3e], sign %+d", rep.samples, rep.min_abs,
                  rep.max_abs, rep.sign));
  }
  env.timings.emplace_back("simplex", simplex.seconds());

  Timer structure;
  for (int n = 2; n <= 4; ++n) {
    SlaterBasis basis = sine_basis(n);
    Rng rng(mix_seed(cfg.seed, 200 + n));
    int bad = 0;
    for (int trial = 0; trial < 25; ++trial) {
      auto c = random_interior_points(rng, n - 1, 0.05, 0.95, 0.03);
      auto rep = sign_change_structure(basis, c);
      if (!(rep.zeros_ok && rep.slabs_ok)) ++bad;
    }
    add_check(env, fmt("sign_structure_n%d", n), bad == 0,
              fmt("25 interior point sets, %d failed", bad));
  }
  env.timings.emplace_back("sign_structure", structure.seconds());

  Timer coll;
  for (int n = 2; n <= 4; ++n) {
    SlaterBasis basis = sine_basis(n);
    Rng rng(mix_seed(cfg.seed, 300 + n));
    int applicable = 0, bad = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> b;
      do {
        b.clear();
        for (int j = 0; j < n; ++j) b.push_back(rng.uniform(-1.0, 1.0));
      } while (max_abs(b) < 0.1);
      auto rep = collinearity_check(basis, b);
      if (!rep.applicable) continue;
      ++applicable;
      worst = std::max(worst, rep.sine_angle);
      if (!rep.ok) ++bad;
    }
    // Constructed combinations whose zeros are prescribed: always applicable,
    // so the collinearity branch cannot be skipped silently.
    int constructed_bad = 0;
    for (int trial = 0; trial < 20; ++trial) {
      auto c = random_interior_points(rng, n - 1, 0.05, 0.95, 0.03);
      auto s = slater_minors(basis, c);
      auto rep = collinearity_check(basis, s);
      if (!(rep.applicable && rep.ok)) ++constructed_bad;
      else worst = std::max(worst, rep.sine_angle);
    }
    add_check(env, fmt("collinearity_n%d", n),
              bad == 0 && constructed_bad == 0 && applicable >= 10,
              fmt("%d/100 random combinations applicable (%d failed), 20 constructed "
                  "(%d failed), worst sin(angle) %.2e",
                  applicable, bad, constructed_bad, worst));
  }
  env.timings.emplace_back("collinearity", coll.seconds());

  Timer hermite;
  json hermite_stats = json::array();
  for (int n = 2; n <= 5; ++n) {
    auto rep = hermite_closed_form_check(n, 200, mix_seed(cfg.seed, 400 + n));
    add_check(env, fmt("hermite_n%d", n), rep.ok,
              fmt("fitted constant %.9e, max relative deviation %.2e", rep.constant,
                  rep.max_rel_dev));
    hermite_stats.push_back({{"n", n}, {"constant", rep.constant}, {"dev", rep.max_rel_dev}});
  }
  env.timings.emplace_back("hermite", hermite.seconds());
  payload["hermite"] = hermite_stats;
}

// ---------------------------------------------------------------------------
// triangle-tables
// ---------------------------------------------------------------------------

struct TableRow {
  int multiple;
  std::vector<std::pair<int, int>> pairs;  // window-respecting pairs
  int mu_a;                                // index in the first column
  int mu_b;                                // index in the second column, 0 = absent
};

std::string pair_display(const std::vector<std::pair<int, int>>& pairs) {
  std::string s;
  for (const auto& [m, n] : pairs) {
    if (!s.empty()) s += ", ";
    s += fmt("(%d,%d)", m, n);
    if (m != n) s += fmt(", (%d,%d)", n, m);
  }
  return s;
}

// Confirms that a closed-form column has exactly the expected simple
// eigenvalues (value, lattice norm, pairs) in order.
bool check_column(const triangle::MixedProblem& prob, const std::vector<TableRow>& rows,
                  bool first_column, std::string& note) {
  using triangle::kLambdaUnit;
  std::vector<const TableRow*> expected;
  for (const auto& r : rows)
    if (first_column || r.mu_b > 0) expected.push_back(&r);
  double cutoff = (expected.back()->multiple + 0.5) * kLambdaUnit;
  auto entries = triangle::enumerate_mixed_spectrum(prob, cutoff);
  if (entries.size() != expected.size()) {
    note = fmt("%s: %zu eigenvalues below cutoff, expected %zu", prob.name().c_str(),
               entries.size(), expected.size());
    return false;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto& r = *expected[i];
    int mu = first_column ? r.mu_a : r.mu_b;
    if (static_cast<int>(i) + 1 != mu || e.norm != r.multiple || e.multiplicity != 1 ||
        std::abs(e.value - r.multiple * kLambdaUnit) > 1e-9 * kLambdaUnit ||
        e.pairs != r.pairs) {
      note = fmt("%s: mu_%zu mismatch (norm %d, multiplicity %d)", prob.name().c_str(), i + 1,
                 e.norm, e.multiplicity);
      return false;
    }
  }
  return true;
}

std::string table_csv(const std::vector<TableRow>& rows, const char* col_a, const char* col_b) {
  std::string csv = fmt("multiple,eigenvalue,pairs,mu_%s,mu_%s\n", col_a, col_b);
  for (const auto& r : rows) {
    csv += fmt("%d,%.10g,%s,%d,", r.multiple, r.multiple * triangle::kLambdaUnit,
               csv_field(pair_display(r.pairs)).c_str(), r.mu_a);
    if (r.mu_b > 0) csv += fmt("%d", r.mu_b);
    csv += '\n';
  }
  return csv;
}

void cmd_triangle_tables(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  using triangle::MixedProblem;
  using triangle::Shape;

  const std::vector<TableRow> neumann_rows = {
      {0, {{0, 0}}, 1, 0}, {1, {{0, 1}}, 2, 1},  {3, {{1, 1}}, 3, 0},
      {4, {{0, 2}}, 4, 2}, {7, {{1, 2}}, 5, 3},  {9, {{0, 3}}, 6, 4},
  };
  const std::vector<TableRow> dirichlet_rows = {
      {3, {{1, 1}}, 1, 0},  {7, {{1, 2}}, 2, 1},  {12, {{2, 2}}, 3, 0},
      {13, {{1, 3}}, 4, 2}, {19, {{2, 3}}, 5, 3}, {21, {{1, 4}}, 6, 4},
  };

  std::string note;
  bool nnn_ok = check_column({Shape::hemiequilateral, {'n', 'n', 'n'}}, neumann_rows, true, note);
  bool ndn_ok = check_column({Shape::hemiequilateral, {'n', 'd', 'n'}}, neumann_rows, false, note);
  add_check(env, "neumann_table", nnn_ok && ndn_ok,
            nnn_ok && ndn_ok ? "6 nnn + 4 ndn eigenvalues exact, all simple" : note);

  bool dnd_ok = check_column({Shape::hemiequilateral, {'d', 'n', 'd'}}, dirichlet_rows, true, note);
  bool ddd_ok =
      check_column({Shape::hemiequilateral, {'d', 'd', 'd'}}, dirichlet_rows, false, note);
  add_check(env, "dirichlet_table", dnd_ok && ddd_ok,
            dnd_ok && ddd_ok ? "6 dnd + 4 ddd eigenvalues exact, all simple" : note);

  write_artifact(cfg, env, "triangle-tables-nnn-ndn.csv",
                 table_csv(neumann_rows, "nnn", "ndn"));
  write_artifact(cfg, env, "triangle-tables-dnd-ddd.csv",
                 table_csv(dirichlet_rows, "dnd", "ddd"));

  json mult = json::array();
  for (const auto& r : neumann_rows) mult.push_back(r.multiple);
  payload["neumann_multiples"] = mult;
  mult = json::array();
  for (const auto& r : dirichlet_rows) mult.push_back(r.multiple);
  payload["dirichlet_multiples"] = mult;
  payload["unit"] = triangle::kLambdaUnit;
}

// ---------------------------------------------------------------------------
// fem-tables
// ---------------------------------------------------------------------------

void cmd_fem_tables(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  using triangle::kLambdaUnit;
  struct Column {
    const char* letters;
    std::vector<double> reference;
    double rel_tol;
    const char* ref_kind;
  };
  const std::vector<Column> columns = {
      {"nnd", {7.16, 37.49, 90.06, 120.87}, 0.01, "reference"},
      {"ndd", {47.63, 110.36, 189.52, 224.68}, 0.01, "reference"},
      {"nnn", {0.0, kLambdaUnit, 3 * kLambdaUnit, 4 * kLambdaUnit}, 0.005, "closed form"},
      {"ndn", {kLambdaUnit, 4 * kLambdaUnit, 7 * kLambdaUnit, 9 * kLambdaUnit}, 0.005,
       "closed form"},
  };

  std::string csv = "letters,i,value,error_estimate,reference,rel_dev\n";
  json cols = json::object();
  for (std::size_t ci = 0; ci < columns.size(); ++ci) {
    const Column& col = columns[ci];
    Timer t;
    auto ex = fem::solve_extrapolated(fem::RefDomain::hemiequilateral, col.letters, cfg.mesh_level, 4,
                                      mix_seed(cfg.seed, 500 + ci));
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      double scale = std::max(std::abs(col.reference[i]), 1.0);
      double dev = std::abs(ex.values[i] - col.reference[i]) / scale;
      worst = std::max(worst, dev);
      csv += fmt("%s,%d,%.10g,%.3g,%.10g,%.3g\n", col.letters, i + 1, ex.values[i],
                 ex.error_estimates[i], col.reference[i], dev);
    }
    add_check(env, fmt("%s_column", col.letters), worst < col.rel_tol,
              fmt("max relative deviation %.2e against %s values (tolerance %.1g)", worst,
                  col.ref_kind, col.rel_tol));
    cols[col.letters] = {{"values", ex.values}, {"errors", ex.error_estimates}};
    env.timings.emplace_back(col.letters, t.seconds());
  }
  write_artifact(cfg, env, "fem-hemi-columns.csv", csv);
  payload["columns"] = cols;
  payload["mesh_level"] = cfg.mesh_level;
}

// ---------------------------------------------------------------------------
// inequalities
// ---------------------------------------------------------------------------

void cmd_inequalities(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  static const char* kLetters[] = {"nnn", "nnd", "ndn", "ndd", "dnn", "dnd", "ddn", "ddd"};
  fem::ColumnTable table;
  Timer solve;
  for (std::size_t i = 0; i < 8; ++i) {
    auto ex = fem::solve_extrapolated(fem::RefDomain::hemiequilateral, kLetters[i], cfg.mesh_level, 6,
                                      mix_seed(cfg.seed, 600 + i));
    table.columns[kLetters[i]] = {ex.values, ex.error_estimates};
  }
  env.timings.emplace_back("columns", solve.seconds());

  auto checks = fem::verify_inequalities(table, 4);
  for (const auto& c : checks)
    add_verdict(env, c.name, c.verdict,
                fmt("lhs %.6f, rhs %.6f, margin %.3e, error %.3e", c.lhs, c.rhs, c.margin,
                    c.combined_error));

  json cols = json::object();
  for (const auto& [letters, vals] : table.columns)
    cols[letters] = {{"values", vals.first}, {"errors", vals.second}};
  payload["columns"] = cols;
  payload["checks"] = checks.size();
}

// ---------------------------------------------------------------------------
// rhombus-neumann-counterexample
// ---------------------------------------------------------------------------

void cmd_counterexample(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  Timer t;
  auto rep = counterexample_rhombus_neumann(cfg.grid, cfg.mesh_level,
                                            static_cast<unsigned>(mix_seed(cfg.seed, 700)));
  env.timings.emplace_back("verification", t.seconds());

  std::string ecp_verdict = rep.ecp.verdict == "VIOLATION"      ? "violation_confirmed"
                            : rep.ecp.verdict == "inconclusive" ? "inconclusive"
                                                                : "fail";
  add_verdict(env, "ecp_violation", ecp_verdict,
              fmt("beta0 %d vs kappa %d%s%s", rep.ecp.beta0, rep.ecp.kappa,
                  rep.ecp.note.empty() ? "" : "; ", rep.ecp.note.c_str()));
  add_check(env, "nodal_count", rep.ecp.beta0 == 4, fmt("beta0 = %d, expected 4", rep.ecp.beta0));
  add_check(env, "courant_index", rep.ecp.kappa == 3,
            fmt("kappa = %d at eigenvalue %.6f, expected 3", rep.ecp.kappa, rep.ecp.mu_m));
  double seg = std::max(rep.vertical.max_abs, rep.diagonal.max_abs);
  add_check(env, "segment_residuals", seg < 1e-9,
            fmt("max |f| %.3e over %d points per segment", seg, rep.vertical.samples));
  add_check(env, "transversal_floor", rep.transversal_ok,
            fmt("min |f|/max %.3e over %zu probe points away from the two segments",
                rep.transversal_min, rep.transversal_points));
  add_check(env, "count_stability", rep.ecp.stable && rep.ecp.uncertain_fraction < kUncertainGate,
            fmt("stable %d, uncertain fraction %.4f", rep.ecp.stable ? 1 : 0,
                rep.ecp.uncertain_fraction));

  bool order_ok = rep.nu.size() >= 6 && std::abs(rep.nu[0]) < 1e-9 && rep.nu[1] > 1e-9 &&
                  rep.nu[1] < rep.nu[2] * (1.0 - 1e-6) &&
                  std::abs(rep.nu[2] - rep.nu[3]) <= cfg.tol * rep.nu[2] &&
                  rep.nu[3] < rep.nu[4] * (1.0 - 1e-6) && rep.nu[4] < rep.nu[5] * (1.0 - 1e-6);
  std::string head;
  for (std::size_t i = 0; i < std::min<std::size_t>(rep.nu.size(), 6); ++i)
    head += fmt("%s%.4f", i ? ", " : "", rep.nu[i]);
  add_check(env, "spectrum_ordering", order_ok,
            "nu_1..6 = " + head + " (0 = nu_1 < nu_2 < nu_3 = nu_4 < nu_5 < nu_6)");

  write_artifact(cfg, env, "rhombus-neumann-counterexample.svg",
                 render_partition_svg(rep.partition, rhombus_outline()));
  if (wants(cfg, "csv"))
    write_artifact(cfg, env, "rhombus-neumann-counterexample.pgm",
                   render_label_pgm(rep.partition));

  payload["nu"] = rep.nu;
  payload["beta0"] = rep.ecp.beta0;
  payload["kappa"] = rep.ecp.kappa;
  payload["segment_residual"] = seg;
  payload["transversal_min"] = rep.transversal_min;
  payload["band_fraction"] = rep.ecp.uncertain_fraction;
}

// ---------------------------------------------------------------------------
// sweeps
// ---------------------------------------------------------------------------

std::string sweep_points_csv(const SweepResult& sweep) {
  std::string csv = "candidate,t,beta0,refined_beta0,stable,uncertain_fraction\n";
  for (const auto& p : sweep.points)
    csv += fmt("%d,%.12g,%d,%d,%d,%.6f\n", p.candidate, p.t, p.beta0, p.refined_beta0,
               p.stable ? 1 : 0, p.uncertain_fraction);
  return csv;
}

void report_sweep(const RunConfig& cfg, ReportEnvelope& env, json& payload,
                  const SweepScenarioReport& rep, const char* stem) {
  std::string verdict = rep.verdict == "violation_confirmed" ? "violation_confirmed"
                        : rep.verdict == "inconclusive"      ? "inconclusive"
                                                             : "fail";
  add_verdict(env, "ecp_violation", verdict,
              fmt("max beta0 %d vs kappa %d over %d candidates, %zu sweep points",
                  rep.max_beta0, rep.kappa, rep.candidates, rep.sweep.points.size()));
  add_check(env, "six_domains", rep.max_beta0 == 6,
            fmt("max stable beta0 %d at t %.6g (candidate %d), expected exactly 6",
                rep.max_beta0, rep.best_t, rep.best_candidate));
  add_check(env, "courant_index", rep.kappa == 5,
            fmt("kappa = %d at eigenvalue %.4f, expected 5", rep.kappa, rep.mu_high));

  if (rep.best_partition.beta0 > 0)
    write_artifact(cfg, env, fmt("%s-best.svg", stem),
                   render_partition_svg(rep.best_partition, rhombus_outline()));
  if (wants(cfg, "csv"))
    write_artifact(cfg, env, fmt("%s-points.csv", stem), sweep_points_csv(rep.sweep));

  json spectrum = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(rep.spectrum.size(), 8); ++i)
    spectrum.push_back(rep.spectrum[i]);
  payload["spectrum_head"] = spectrum;
  payload["mu_low"] = rep.mu_low;
  payload["mu_high"] = rep.mu_high;
  payload["kappa"] = rep.kappa;
  payload["candidates"] = rep.candidates;
  payload["amplitude_floor"] = rep.amplitude_floor;
  payload["max_beta0"] = rep.max_beta0;
  payload["best_t"] = rep.best_t;
  payload["best_candidate"] = rep.best_candidate;
  payload["sweep_points"] = rep.sweep.points.size();
}

void cmd_neumann_sweep(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  Timer t;
  auto rep = rhombus_sweep_scenario('n', 2, 5, 6, cfg.grid, cfg.mesh_level, cfg.sweep_steps,
                                    static_cast<unsigned>(mix_seed(cfg.seed, 710)));
  env.timings.emplace_back("sweep", t.seconds());
  report_sweep(cfg, env, payload, rep, "rhombus-neumann-sweep");
}

void cmd_dirichlet_sweep(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  Timer t;
  auto rep = rhombus_sweep_scenario('d', 2, 5, 6, cfg.grid, cfg.mesh_level, cfg.sweep_steps,
                                    static_cast<unsigned>(mix_seed(cfg.seed, 720)));
  env.timings.emplace_back("sweep", t.seconds());
  report_sweep(cfg, env, payload, rep, "rhombus-dirichlet-sweep");

  // The fifth and sixth Dirichlet eigenvalues coincide (both are 7x the
  // lattice unit); the two FEM columns must agree with that value and with
  // each other.
  double unit7 = 7.0 * triangle::kLambdaUnit;
  bool degen_ok = false;
  std::string detail = "spectrum too short";
  if (rep.spectrum.size() >= 6) {
    double d5 = rep.spectrum[4], d6 = rep.spectrum[5];
    degen_ok = std::abs(d5 - unit7) < 1e-3 * unit7 && std::abs(d6 - unit7) < 1e-3 * unit7 &&
               std::abs(d5 - d6) < 2e-3 * unit7;
    detail = fmt("delta_5 %.4f, delta_6 %.4f, closed-form value %.4f", d5, d6, unit7);
  }
  add_check(env, "delta5_delta6_degenerate", degen_ok, detail);

  Timer ct;
  auto control = rhombus_sweep_scenario('d', 1, 4, 0, cfg.grid, cfg.mesh_level, cfg.sweep_steps,
                                        static_cast<unsigned>(mix_seed(cfg.seed, 721)));
  env.timings.emplace_back("negative_control", ct.seconds());
  add_check(env, "negative_control", control.max_beta0 <= 4 && control.verdict == "consistent",
            fmt("first-plus-fourth sweep: max beta0 %d (kappa %d), must stay at or below 4",
                control.max_beta0, control.kappa));
  if (control.best_partition.beta0 > 0)
    write_artifact(cfg, env, "rhombus-dirichlet-control-best.svg",
                   render_partition_svg(control.best_partition, rhombus_outline()));
  if (wants(cfg, "csv"))
    write_artifact(cfg, env, "rhombus-dirichlet-control-points.csv",
                   sweep_points_csv(control.sweep));
  payload["control_max_beta0"] = control.max_beta0;
  payload["control_kappa"] = control.kappa;
}

// ---------------------------------------------------------------------------
// product-lift
// ---------------------------------------------------------------------------

triangle::SpectrumColumn closed_form_column(const std::array<char, 3>& letters, double cutoff) {
  triangle::SpectrumColumn col;
  col.letters = letters;
  auto entries =
      triangle::enumerate_mixed_spectrum({triangle::Shape::hemiequilateral, letters}, cutoff);
  for (const auto& e : entries)
    for (int r = 0; r < e.multiplicity; ++r) col.values.push_back(e.value);
  col.errors.assign(col.values.size(), 0.0);
  return col;
}

void cmd_product_lift(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  using triangle::kLambdaUnit;

  Timer spec;
  std::vector<triangle::SpectrumColumn> cols;
  cols.push_back(closed_form_column({'n', 'n', 'n'}, 10.5 * kLambdaUnit));
  cols.push_back(closed_form_column({'n', 'd', 'n'}, 10.5 * kLambdaUnit));
  int salt = 730;
  for (const char* letters : {"nnd", "ndd"}) {
    auto ex = fem::solve_extrapolated(fem::RefDomain::hemiequilateral, letters, cfg.mesh_level, 4,
                                      mix_seed(cfg.seed, ++salt));
    triangle::SpectrumColumn col;
    col.letters = {letters[0], letters[1], letters[2]};
    col.values = ex.values;
    col.errors = ex.error_estimates;
    cols.push_back(col);
  }
  double cutoff = 1e300;
  for (const auto& c : cols) cutoff = std::min(cutoff, c.values.back() * (1.0 - 1e-12));
  auto assembled = triangle::rhombus_spectrum_assemble('n', cols, cutoff);
  std::vector<double> base;
  for (const auto& v : assembled.values) base.push_back(v.value);
  env.timings.emplace_back("base_spectrum", spec.seconds());

  Timer count;
  auto f = [](double x, double y) { return 1.0 + triangle::phi2_neumann(x, y); };
  auto base_count = count_nodal_domains_stable(f, rhombus_grid(cfg.grid), rhombus_mask());
  env.timings.emplace_back("base_count", count.seconds());
  add_check(env, "base_count", base_count.beta0 == 4 && base_count.stable,
            fmt("base combination has %d nodal domains (stable %d)", base_count.beta0,
                base_count.stable ? 1 : 0));

  auto fiber = circle_spectrum(12);
  auto lift = product_lift(base, kLambdaUnit, base_count.beta0, fiber, 0.01);
  add_check(env, "epsilon_star", std::abs(lift.epsilon_star - 3.0 / (4.0 * M_PI)) < 1e-12,
            fmt("epsilon* = %.12f, closed form 3/(4 pi) = %.12f", lift.epsilon_star,
                3.0 / (4.0 * M_PI)));
  add_verdict(env, "collapsed_lift",
              lift.verdict == "violation_confirmed" && lift.lifted_kappa == 3
                  ? "violation_confirmed"
                  : "fail",
              fmt("epsilon 0.01: beta0 %d vs lifted kappa %d (verdict %s)", lift.beta0,
                  lift.lifted_kappa, lift.verdict.c_str()));

  auto wide = product_lift(base, kLambdaUnit, base_count.beta0, fiber, 1.0);
  add_check(env, "supercritical", wide.verdict == "not_collapsed" && !wide.collapsed,
            fmt("epsilon 1.00 exceeds epsilon* = %.4f: lift not collapsed", wide.epsilon_star));

  json head = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(lift.lifted_spectrum.size(), 10); ++i)
    head.push_back(lift.lifted_spectrum[i]);
  payload["epsilon_star"] = lift.epsilon_star;
  payload["lifted_spectrum_head"] = head;
  payload["base_kappa"] = lift.base_kappa;
  payload["lifted_kappa"] = lift.lifted_kappa;
  payload["base_beta0"] = base_count.beta0;
}

// ---------------------------------------------------------------------------
// sphere-bounds
// ---------------------------------------------------------------------------

void cmd_sphere_bounds(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  auto req = sphere_bounds(cfg.sphere_d, cfg.sphere_k);
  add_verdict(env, "requested_bounds", "pass",
              fmt("d %d, degree %d: courant %lld, leydold %s, effective %lld", req.d, req.k,
                  req.courant, req.leydold >= 0 ? fmt("%lld", req.leydold).c_str() : "n/a",
                  req.effective));

  bool identity_ok = true, leydold_ok = true;
  json table = json::array();
  for (int k = 0; k <= 20; ++k) {
    auto b = sphere_bounds(2, k);
    identity_ok = identity_ok && b.courant == static_cast<long long>(k) * k + 1;
    leydold_ok = leydold_ok && b.leydold == static_cast<long long>(k) * (k - 1) + 2 &&
                 (k < 1 || b.leydold <= b.courant) &&
                 b.effective == std::min(b.courant, b.leydold);
    table.push_back({{"k", k}, {"courant", b.courant}, {"leydold", b.leydold},
                     {"effective", b.effective}});
  }
  add_check(env, "d2_identity", identity_ok,
            "two-sphere Courant bound equals k^2 + 1 for k = 0..20");
  add_check(env, "leydold_d2", leydold_ok,
            "two-sphere refined bound equals k(k-1) + 2 and improves on Courant for k >= 1");

  payload["requested"] = {{"d", req.d}, {"k", req.k}, {"courant", req.courant},
                          {"leydold", req.leydold}, {"effective", req.effective}};
  payload["d2_table"] = table;
}

// ---------------------------------------------------------------------------
// reproduce-all
// ---------------------------------------------------------------------------

void cmd_reproduce_all(const RunConfig& cfg, ReportEnvelope& env, json& payload) {
  int failed = 0;
  json runs = json::array();
  for (const auto& name : kCommands) {
    if (name == "reproduce-all") continue;
    RunConfig sub = cfg;
    sub.command = name;
    Timer t;
    CommandResult res = run_command(sub);
    env.timings.emplace_back(name, t.seconds());
    int bad = 0;
    for (const auto& v : res.envelope.verdicts)
      if (!verdict_ok(v.verdict)) ++bad;
    add_check(env, "sub:" + name, res.exit_code == 0,
              fmt("%zu verdicts, %d not ok, exit %d", res.envelope.verdicts.size(), bad,
                  res.exit_code));
    if (res.exit_code != 0) ++failed;
    runs.push_back({{"command", name}, {"exit", res.exit_code},
                    {"verdicts", res.envelope.verdicts.size()}});
  }
  payload["runs"] = runs;
  payload["failed"] = failed;
}

}  // namespace

const std::vector<std::string>& command_names() { return kCommands; }

CommandResult run_command(const RunConfig& cfg) {
  validate_config(cfg);

  ReportEnvelope env;
  env.command = cfg.command;
  env.config_json = config_echo(cfg).dump();
  json payload = json::object();

  Timer total;
  try {
    if (cfg.command == "sl1d-verify") cmd_sl1d_verify(cfg, env, payload);
    else if (cfg.command == "gelfand-verify") cmd_gelfand_verify(cfg, env, payload);
    else if (cfg.command == "triangle-tables") cmd_triangle_tables(cfg, env, payload);
    else if (cfg.command == "fem-tables") cmd_fem_tables(cfg, env, payload);
    else if (cfg.command == "inequalities") cmd_inequalities(cfg, env, payload);
    else if (cfg.command == "rhombus-neumann-counterexample") cmd_counterexample(cfg, env, payload);
    else if (cfg.command == "rhombus-neumann-sweep") cmd_neumann_sweep(cfg, env, payload);
    else if (cfg.command == "rhombus-dirichlet-sweep") cmd_dirichlet_sweep(cfg, env, payload);
    else if (cfg.command == "product-lift") cmd_product_lift(cfg, env, payload);
    else if (cfg.command == "sphere-bounds") cmd_sphere_bounds(cfg, env, payload);
    else cmd_reproduce_all(cfg, env, payload);
  } catch (const std::exception& e) {
    // Verification failed to run to completion; the report still gets written.
    add_verdict(env, "internal_error", "fail", e.what());
  }
  env.timings.emplace_back("total", total.seconds());
  env.payload_json = payload.dump();

  CommandResult result;
  result.envelope = env;
  result.paths = write_report(env, cfg.out_dir);
  result.exit_code = all_verdicts_ok(env) ? 0 : 1;
  return result;
}

}  // namespace ecp::cli

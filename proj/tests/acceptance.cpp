// Acceptance gate: one line per criterion, "ACCEPTANCE <i>: PASS|FAIL — detail".
// Exit code 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecp/commands.hpp"
#include "ecp/nodal.hpp"
#include "ecp/report.hpp"

namespace fs = std::filesystem;
using ecp::ReportEnvelope;
using ecp::VerdictEntry;
using ecp::cli::RunConfig;
using nlohmann::json;

namespace {

constexpr const char* kOutDir = "acceptance-reports";
constexpr const char* kReproDir = "acceptance-repro";

struct Run {
  bool ran = false;
  int exit_code = -1;
  double seconds = 0.0;
  ReportEnvelope env;
  json payload;
  std::string error;
};

Run execute(RunConfig cfg) {
  Run r;
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto res = ecp::cli::run_command(cfg);
    r.ran = true;
    r.exit_code = res.exit_code;
    r.env = res.envelope;
    r.payload = json::parse(res.envelope.payload_json);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

const VerdictEntry* find_verdict(const ReportEnvelope& env, const std::string& name) {
  for (const auto& v : env.verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

bool verdict_is(const Run& r, const std::string& name, const std::string& value) {
  const VerdictEntry* v = r.ran ? find_verdict(r.env, name) : nullptr;
  return v != nullptr && v->verdict == value;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Binomial coefficients from a Pascal triangle; the independent oracle for
// the sphere bound formula C(d+k-1,d) + C(d+k-2,d) + 1.
long long pascal(int n, int r) {
  if (r < 0 || r > n) return 0;
  std::vector<std::vector<long long>> t(n + 1);
  for (int i = 0; i <= n; ++i) {
    t[i].assign(i + 1, 1);
    for (int j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
  }
  return t[n][r];
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Bytes of every stable verdict report and SVG artifact in a directory.
std::map<std::string, std::string> stable_bytes(const std::string& dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const bool verdicts = name.size() > 14 && name.rfind("-verdicts.json") == name.size() - 14;
    const bool svg = name.size() > 4 && name.rfind(".svg") == name.size() - 4;
    if (verdicts || svg) out[name] = slurp(entry.path());
  }
  return out;
}

}  // namespace

int main() {
  fs::remove_all(kOutDir);
  fs::remove_all(kReproDir);

  auto with_defaults = [](const char* command) {
    RunConfig cfg;
    cfg.command = command;
    cfg.out_dir = kOutDir;
    return cfg;
  };

  std::map<std::string, Run> runs;
  for (const char* name : {"triangle-tables", "fem-tables", "rhombus-neumann-counterexample",
                           "rhombus-neumann-sweep", "rhombus-dirichlet-sweep", "sl1d-verify",
                           "gelfand-verify", "inequalities", "sphere-bounds"})
    runs[name] = execute(with_defaults(name));

  // Two identical reproduction runs into one directory; stable outputs must
  // not change between them.
  RunConfig repro;
  repro.command = "reproduce-all";
  repro.out_dir = kReproDir;
  repro.grid = 401;
  repro.sweep_steps = 41;
  Run repro1 = execute(repro);
  auto snapshot = stable_bytes(kReproDir);
  Run repro2 = execute(repro);
  auto snapshot2 = stable_bytes(kReproDir);

  struct Criterion {
    bool ok = false;
    std::string detail;
  };
  std::vector<Criterion> crit(11);  // 1-based

  // 1: analytic eigenvalue tables, exact multiples of 16 pi^2 / 9, < 1 s.
  {
    const Run& r = runs["triangle-tables"];
    const double unit = 16.0 * M_PI * M_PI / 9.0;
    bool tables = r.ran && r.exit_code == 0 && verdict_is(r, "neumann_table", "pass") &&
                  verdict_is(r, "dirichlet_table", "pass");
    bool multiples = r.ran && r.payload.value("neumann_multiples", json()) == json({0, 1, 3, 4, 7, 9}) &&
                     r.payload.value("dirichlet_multiples", json()) == json({3, 7, 12, 13, 19, 21}) &&
                     std::abs(r.payload.value("unit", 0.0) - unit) < 1e-12;
    bool fast = r.seconds < 1.0;
    crit[1].ok = tables && multiples && fast;
    crit[1].detail = fmt("multiples {0,1,3,4,7,9} and {3,7,12,13,19,21} of 16pi^2/9 %s, %.3f s",
                         tables && multiples ? "exact" : "WRONG", r.seconds);
  }

  // 2: FEM columns against reference values, 1% / 0.5%, <= 10 min.
  {
    const Run& r = runs["fem-tables"];
    const double unit = 16.0 * M_PI * M_PI / 9.0;
    struct Want {
      const char* letters;
      std::vector<double> values;
      double tol;
    };
    const std::vector<Want> wants = {
        {"nnd", {7.16, 37.49, 90.06, 120.87}, 0.01},
        {"ndd", {47.63, 110.36, 189.52, 224.68}, 0.01},
        {"nnn", {0.0, unit, 3 * unit, 4 * unit}, 0.005},
        {"ndn", {unit, 4 * unit, 7 * unit, 9 * unit}, 0.005},
    };
    bool ok = r.ran && r.exit_code == 0;
    double worst = 0.0;
    for (const auto& w : wants) {
      if (!r.ran || !r.payload.contains("columns") || !r.payload["columns"].contains(w.letters)) {
        ok = false;
        break;
      }
      auto got = r.payload["columns"][w.letters]["values"].get<std::vector<double>>();
      if (got.size() < 4) {
        ok = false;
        break;
      }
      for (int i = 0; i < 4 && ok; ++i) {
        double dev = std::abs(got[i] - w.values[i]) / std::max(std::abs(w.values[i]), 1.0);
        worst = std::max(worst, dev / w.tol);
        ok = ok && dev <= w.tol;
      }
    }
    ok = ok && r.seconds <= 600.0;
    crit[2].ok = ok;
    crit[2].detail = fmt("four columns at level 7, worst deviation %.0f%% of tolerance, %.1f s",
                         100.0 * worst, r.seconds);
  }

  // 3: spectrum ordering for both boundary types.
  {
    const Run& n = runs["rhombus-neumann-counterexample"];
    const Run& d = runs["rhombus-dirichlet-sweep"];
    bool neumann = false;
    std::string head = "spectrum missing";
    if (n.ran && n.payload.contains("nu") && n.payload["nu"].size() >= 6) {
      auto nu = n.payload["nu"].get<std::vector<double>>();
      neumann = std::abs(nu[0]) < 1e-9 && nu[1] > 1e-9 && nu[1] < nu[2] &&
                std::abs(nu[2] - nu[3]) <= 1e-4 * nu[2] && nu[3] < nu[4] && nu[4] < nu[5];
      head = fmt("nu2 %.3f < nu3 = nu4 %.3f < nu5 %.3f", nu[1], nu[2], nu[4]);
    }
    bool dirichlet = verdict_is(d, "delta5_delta6_degenerate", "pass");
    crit[3].ok = neumann && verdict_is(n, "spectrum_ordering", "pass") && dirichlet;
    crit[3].detail = fmt("%s; delta5 = delta6 %s", head.c_str(),
                         dirichlet ? "within FEM tolerance" : "NOT degenerate");
  }

  // 4: analytic counterexample, beta0 = 4 > kappa = 3, residuals < 1e-9, < 30 s.
  {
    const Run& r = runs["rhombus-neumann-counterexample"];
    double seg = r.ran ? r.payload.value("segment_residual", 1.0) : 1.0;
    bool ok = verdict_is(r, "ecp_violation", "violation_confirmed") &&
              verdict_is(r, "nodal_count", "pass") && verdict_is(r, "courant_index", "pass") &&
              verdict_is(r, "segment_residuals", "pass") && seg < 1e-9 && r.seconds < 30.0;
    crit[4].ok = ok;
    crit[4].detail = fmt("beta0 %d > kappa %d, segment residual %.2e, %.1f s",
                         r.ran ? r.payload.value("beta0", -1) : -1,
                         r.ran ? r.payload.value("kappa", -1) : -1, seg, r.seconds);
  }

  // 5: swept numerical counterexamples plus the negative control, <= 15 min.
  {
    const Run& n = runs["rhombus-neumann-sweep"];
    const Run& d = runs["rhombus-dirichlet-sweep"];
    bool neumann = verdict_is(n, "ecp_violation", "violation_confirmed") &&
                   verdict_is(n, "six_domains", "pass") && verdict_is(n, "courant_index", "pass");
    bool dirichlet = verdict_is(d, "ecp_violation", "violation_confirmed") &&
                     verdict_is(d, "six_domains", "pass") && verdict_is(d, "courant_index", "pass");
    bool control = verdict_is(d, "negative_control", "pass");
    double total = n.seconds + d.seconds;
    crit[5].ok = neumann && dirichlet && control && total <= 900.0;
    crit[5].detail = fmt("neumann max beta0 %d, dirichlet max beta0 %d, control max %d <= 4, %.0f s",
                         n.ran ? n.payload.value("max_beta0", -1) : -1,
                         d.ran ? d.payload.value("max_beta0", -1) : -1,
                         d.ran ? d.payload.value("control_max_beta0", -1) : -1, total);
  }

  // 6: Sturm bound suite, 500 windows per boundary type and potential, <= 2 min.
  {
    const Run& r = runs["sl1d-verify"];
    int suites = 0;
    bool all = r.ran && r.exit_code == 0;
    if (r.ran)
      for (const auto& v : r.env.verdicts)
        if (v.name.rfind("sturm_", 0) == 0) {
          ++suites;
          all = all && v.verdict == "pass";
        }
    crit[6].ok = all && suites == 6 && r.seconds <= 120.0 &&
                 r.ran && r.payload.value("windows_per_suite", 0) == 500;
    crit[6].detail = fmt("%d suites x 500 random windows, zero bound violations, %.1f s", suites,
                         r.seconds);
  }

  // 7: Gelfand suite, <= 2 min.
  {
    const Run& r = runs["gelfand-verify"];
    crit[7].ok = r.ran && r.exit_code == 0 && r.seconds <= 120.0;
    crit[7].detail = fmt("%zu checks (simplex, sign structure, collinearity, hermite), %.1f s",
                         r.ran ? r.env.verdicts.size() : 0, r.seconds);
  }

  // 8: inequality chains; inconclusive margins are reported, none violated.
  {
    const Run& r = runs["inequalities"];
    int pass = 0, inconclusive = 0, fail = 0;
    if (r.ran)
      for (const auto& v : r.env.verdicts) {
        if (v.verdict == "pass") ++pass;
        else if (v.verdict == "inconclusive") ++inconclusive;
        else ++fail;
      }
    crit[8].ok = r.ran && fail == 0 && (pass + inconclusive) == 41;
    crit[8].detail = fmt("41 ordering checks: %d pass, %d inconclusive, %d violated", pass,
                         inconclusive, fail);
  }

  // 9: sphere bound calculators against a direct binomial oracle.
  {
    const Run& r = runs["sphere-bounds"];
    bool formula = true;
    for (int d = 1; d <= 5 && formula; ++d)
      for (int k = 0; k <= 12 && formula; ++k) {
        auto b = ecp::sphere_bounds(d, k);
        long long want = pascal(d + k - 1, d) + pascal(d + k - 2, d) + 1;
        formula = b.courant == want;
      }
    bool d2 = true;
    for (int k = 0; k <= 20 && d2; ++k) {
      auto b = ecp::sphere_bounds(2, k);
      d2 = b.courant == static_cast<long long>(k) * k + 1 &&
           b.leydold == static_cast<long long>(k) * (k - 1) + 2 &&
           b.effective == std::min(b.courant, b.leydold);
    }
    crit[9].ok = formula && d2 && r.ran && r.exit_code == 0;
    crit[9].detail = fmt("binomial form matches Pascal oracle (d <= 5), k^2+1 and k(k-1)+2 at "
                         "d = 2 for k = 0..20%s",
                         formula && d2 ? "" : " — MISMATCH");
  }

  // 10: byte-identical stable reports and SVG artifacts across two runs.
  {
    bool same = repro1.ran && repro2.ran && repro1.exit_code == 0 && repro2.exit_code == 0 &&
                !snapshot.empty() && snapshot.size() == snapshot2.size();
    int differing = 0;
    std::size_t verdicts = 0, svgs = 0;
    for (const auto& [name, bytes] : snapshot) {
      (name.rfind(".svg") == name.size() - 4 ? svgs : verdicts)++;
      auto it = snapshot2.find(name);
      if (it == snapshot2.end() || it->second != bytes) ++differing;
    }
    same = same && differing == 0;
    crit[10].ok = same;
    crit[10].detail = fmt("%zu verdict reports and %zu svg artifacts identical across two runs%s",
                          verdicts, svgs,
                          differing ? fmt(" (%d files differ)", differing).c_str() : "");
  }

  bool all_ok = true;
  for (int i = 1; i <= 10; ++i) {
    all_ok = all_ok && crit[i].ok;
    std::printf("ACCEPTANCE %d: %s — %s\n", i, crit[i].ok ? "PASS" : "FAIL",
                crit[i].detail.c_str());
  }
  return all_ok ? 0 : 1;
}

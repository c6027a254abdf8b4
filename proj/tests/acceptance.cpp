// One line per acceptance criterion; exit status 1 when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hamlift/harness.hpp"

using namespace hamlift;
using namespace hamlift::harness;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::string tolerance;
  std::vector<ExperimentConfig> configs;
  // Extra verdict on top of "every check in every record passed"; returns a short note.
  std::function<bool(const std::vector<ResultRecord>&, std::string&)> extra;
};

ExperimentConfig make(Suite s, std::map<std::string, std::string> params) {
  ExperimentConfig c;
  c.suite = s;
  c.seed = kSeed;
  c.threads = 1;
  c.params = std::move(params);
  return c;
}

double q(const std::vector<ResultRecord>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (const Quantity* x = r.find_quantity(name)) return x->value;
  throw std::runtime_error("missing quantity " + name);
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

// cos^2(x t) - cos^2(y t) >= 3/(8 m^2) for all 0 <= x < y <= m, t = sqrt(3)/(2m).
bool cosine_drop_oracle(int m_max, double& min_slack) {
  min_slack = 1e300;
  for (int m = 1; m <= m_max; ++m) {
    const long double t = std::sqrt(3.0L) / (2.0L * m);
    const long double floor = 3.0L / (8.0L * m * m);
    for (int x = 0; x <= m; ++x)
      for (int y = x + 1; y <= m; ++y) {
        const long double cx = std::cos(x * t), cy = std::cos(y * t);
        min_slack = std::min(min_slack, static_cast<double>(cx * cx - cy * cy - floor));
      }
  }
  return min_slack > 0.0;
}

// 3 3^j (2^k | 4^k) expanded independently of the library's pattern matcher.
std::set<std::string> trapped_oracle(int b) {
  std::set<std::string> out;
  const int len = b + 1;
  for (int three = 1; three <= len; ++three)
    for (char tail : {'2', '4'}) out.insert(std::string(three, '3') + std::string(len - three, tail));
  return out;
}

std::vector<Criterion> criteria() {
  std::vector<Criterion> cs;
  cs.push_back({1, "history mapping contract", 120, "1e-10 (sandwich 1e-12)",
                {make(Suite::MappingVerify, {{"circuits", "50"}, {"max_work_qubits", "6"}, {"max_gates", "8"},
                                             {"kernel_vectors", "20"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  note = "max sim error " + num(q(rs, "max_simulation_error")) + ", clock weight error " +
                         num(q(rs, "max_clock_weight_error"));
                  return q(rs, "max_simulation_error") <= 1e-10 && q(rs, "max_clock_weight_error") <= 1e-10;
                }});
  cs.push_back({2, "flag and out formulas", 180, "1e-9",
                {make(Suite::Bounds, {{"parts", "flag"}, {"flag_m_max", "4"}, {"product_proofs", "100"},
                                      {"entangled_proofs", "50"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  const double f = q(rs, "flag_formula_max_error"), o = q(rs, "out_formula_max_error");
                  note = "max flag error " + num(f) + ", max out error " + num(o);
                  return f <= 1e-9 && o <= 1e-9;
                }});
  cs.push_back({3, "cosine drop", 1, "exact floor 3/(8m^2)",
                {make(Suite::Bounds, {{"parts", "drop"}, {"drop_m_max", "64"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  double slack = 0.0;
                  const bool ok = cosine_drop_oracle(64, slack);
                  note = "min slack " + num(q(rs, "cosine_drop_min_slack")) + " (long double oracle " + num(slack) +
                         "), floor(2) = " + num(q(rs, "cosine_drop_floor_m2"));
                  return ok && q(rs, "cosine_drop_floor_m2") == 0.09375 &&
                         std::abs(q(rs, "cosine_drop_min_slack") - slack) < 1e-12;
                }});
  cs.push_back({4, "exchange bound", 300, "zero violations (1e-12 roundoff)",
                {make(Suite::Bounds, {{"parts", "exchange"}, {"exchange_trials", "1000"}, {"exchange_m_max", "3"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  note = "1000 trials, min margin " + num(q(rs, "exchange_min_margin")) + ", min gain/eps " +
                         num(q(rs, "exchange_min_empirical_constant"));
                  return true;
                }});
  cs.push_back({5, "projection bounds", 120, "zero violations (1e-10 roundoff)",
                {make(Suite::Bounds, {{"parts", "projection"}, {"projection_trials", "200"},
                                      {"projection_max_qubits", "5"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  note = "200 trials, min slack " + num(q(rs, "projection_min_slack"));
                  return true;
                }});
  cs.push_back({6, "union bound", 30, "zero violations (1e-12 roundoff)",
                {make(Suite::Bounds, {{"parts", "union"}, {"union_trials", "1000"}, {"union_m_max", "5"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  note = "1000 trials, min margin " + num(q(rs, "union_min_margin"));
                  return true;
                }});
  cs.push_back({7, "lifting thresholds on toy YES/NO", 300, "suboptimality slack 1e-9",
                {make(Suite::ApxsimLift, {{"stage", "lift"}, {"truth", "both"}, {"suboptimal_cases", "20"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  const double gy = q(rs, "b_yes") - q(rs, "a_yes"), gn = q(rs, "b_no") - q(rs, "a_no");
                  note = "YES max<M1> " + num(q(rs, "worst_window_m1_yes")) + " <= a " + num(q(rs, "a_yes")) +
                         ", NO min<M1> " + num(q(rs, "worst_window_m1_no")) + " >= b " + num(q(rs, "b_no")) +
                         ", suboptimal margins " + num(q(rs, "suboptimal_min_margin_yes")) + "/" +
                         num(q(rs, "suboptimal_min_margin_no"));
                  return gy > 0 && gn > 0 && q(rs, "worst_window_m1_yes") <= q(rs, "a_yes") &&
                         q(rs, "worst_window_m1_no") >= q(rs, "b_no");
                }});
  cs.push_back({8, "binary-search decider", 60, "exact query count",
                {make(Suite::ApxsimLift, {{"stage", "decider"}, {"truth", "both"}, {"regime", "both"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  note = "queries yes/no poly " + num(q(rs, "decider_queries_yes-poly")) + "/" +
                         num(q(rs, "decider_queries_no-poly")) + ", exp " + num(q(rs, "decider_queries_yes-exp")) + "/" +
                         num(q(rs, "decider_queries_no-exp"));
                  return true;
                }});
  cs.push_back({9, "GSCON completeness N=3..6", 600, "final distance 1e-8, monotone 1e-12",
                {make(Suite::GsconLift, {{"truth", "yes"}, {"n", "3,4,5,6"}, {"schedule", "honest"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  const auto& r = rs.front();
                  bool rows = r.find_check("switch-rows-N4-yes-honest") != nullptr;
                  double worst = 0.0;
                  for (int n = 3; n <= 6; ++n) {
                    const std::string t = "N" + std::to_string(n) + "-yes-honest";
                    worst = std::max(worst, q(rs, "max_energy_" + t) / q(rs, "eta1_" + t));
                  }
                  note = "max energy/eta1 " + num(worst) + ", N=4 switch rows match the frozen reference";
                  return rows && worst <= 1.0;
                }});
  cs.push_back({10, "GSCON soundness N=3,4,5", 1200, "dichotomy eta2 / 1/2",
                {make(Suite::Audit, {{"n", "3,4,5"}, {"random_schedules", "100"}})},
                [](const std::vector<ResultRecord>& rs, std::string& note) {
                  std::size_t pairs = 0;
                  for (const auto& c : rs.front().checks) pairs += c.name.rfind("dichotomy-", 0) == 0;
                  note = std::to_string(pairs) + " (N, b) pairs x 101 schedules";
                  return pairs == 1 + 2 + 3;
                }});
  cs.push_back({11, "trapped subspace b=1..5", 10, "exact",
                {make(Suite::Traversal, {{"b_max", "5"}})},
                [](const std::vector<ResultRecord>&, std::string& note) {
                  bool ok = true;
                  for (int b = 1; b <= 5; ++b) {
                    const auto got = trapped_subspace(b);
                    ok = ok && std::set<std::string>(got.begin(), got.end()) == trapped_oracle(b);
                  }
                  note = "library enumeration equals the independent expansion";
                  return ok;
                }});
  return cs;
}

struct Outcome {
  bool passed = false;
  double seconds = 0.0;
  std::vector<ResultRecord> records;
  std::string note;
};

Outcome evaluate(const Criterion& c) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  bool checks = true;
  std::string failed;
  try {
    for (const auto& cfg : c.configs) {
      o.records.push_back(run(cfg));
      const auto& r = o.records.back();
      if (!r.error.empty()) failed += " error: " + r.error;
      for (const auto& ch : r.checks)
        if (!ch.passed) failed += " " + ch.name + " (" + ch.detail + ")";
      checks = checks && r.passed();
    }
  } catch (const std::exception& e) {
    checks = false;
    failed += std::string(" exception: ") + e.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool extra = false;
  if (checks) {
    try {
      extra = c.extra(o.records, o.note);
    } catch (const std::exception& e) {
      o.note = e.what();
    }
  }
  o.passed = checks && extra && o.seconds <= c.budget_s;
  if (!failed.empty()) o.note += " failed:" + failed;
  return o;
}

void print(int id, const std::string& title, bool ok, const std::string& tol, double secs, double budget,
           const std::string& note) {
  const std::string limit = budget > 0 ? num(budget) + "s" : "none";
  std::printf("criterion %2d %s: %s [tol %s] %.2fs (budget %s); %s\n", id, ok ? "PASS" : "FAIL", title.c_str(),
              tol.c_str(), secs, limit.c_str(), note.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  bool skip_rerun = false;
  app.add_option("--only", only, "criteria to run (1-11)")->delimiter(',');
  app.add_flag("--skip-rerun", skip_rerun, "skip the determinism rerun");
  CLI11_PARSE(app, argc, argv);

  const auto cs = criteria();
  bool all = true;
  std::vector<std::pair<const Criterion*, Outcome>> done;
  for (const auto& c : cs) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o = evaluate(c);
    print(c.id, c.title, o.passed, c.tolerance, o.seconds, c.budget_s, o.note);
    all = all && o.passed;
    done.emplace_back(&c, std::move(o));
  }

  if (!skip_rerun) {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t compared = 0, differing = 0;
    std::string which;
    for (const auto& [c, o] : done)
      for (std::size_t k = 0; k < c->configs.size(); ++k) {
        const ResultRecord again = run(c->configs[k]);
        ++compared;
        if (again.payload() != o.records[k].payload()) {
          ++differing;
          which += " " + std::to_string(c->id);
        }
      }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = differing == 0 && compared > 0;
    print(12, "bit-identical reruns", ok, "exact payload", secs, 0,
          std::to_string(compared) + " records rerun, " + std::to_string(differing) + " differ" +
              (which.empty() ? "" : " (criteria" + which + ")"));
    all = all && ok;
  }
  return all ? 0 : 1;
}

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hamlift/harness.hpp"

using namespace hamlift::harness;

namespace {

struct Flag {
  std::string cli;  // without leading dashes
  std::string key;  // suite parameter
  std::string help;
};

struct Command {
  std::string name;
  Suite suite;
  std::string help;
  std::vector<Flag> flags;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> cmds = {
      {"verify-mapping", Suite::MappingVerify, "Check the circuit-to-Hamiltonian history mapping on random circuits",
       {{"circuits", "circuits", "number of random circuits"},
        {"max-work-qubits", "max_work_qubits", "largest circuit width"},
        {"max-gates", "max_gates", "largest gate count T"},
        {"kernel-vectors", "kernel_vectors", "random kernel vectors per circuit"}}},
      {"bounds", Suite::Bounds, "Flag formula, cosine drop, exchange, projection and union bounds",
       {{"parts", "parts", "comma list of flag,drop,exchange,projection,union or all"},
        {"exchange-trials", "exchange_trials", "randomized exchange-bound trials"},
        {"projection-trials", "projection_trials", "randomized projection trials"},
        {"union-trials", "union_trials", "randomized union-bound trials"}}},
      {"lift-apxsim", Suite::ApxsimLift, "Lift the toy query instances and run the binary-search decider",
       {{"stage", "stage", "lift, decider or all"},
        {"truth", "truth", "yes, no or both"},
        {"zeta", "zeta", "verifier rotation angle"},
        {"alpha-margin", "alpha_margin", "factor above the alpha floor"},
        {"suboptimal-cases", "suboptimal_cases", "number of suboptimal proofs"},
        {"regime", "regime", "poly, exp or both"},
        {"bundle", "bundle", "verifier bundle file instead of the toy instance"}}},
      {"lift-gscon", Suite::GsconLift, "Run a traversal schedule on the lifted chain",
       {{"truth", "truth", "yes or no"},
        {"n", "n", "chain length(s), comma separated"},
        {"b", "b", "locality of cheat/random schedules"},
        {"schedule", "schedule", "honest, cheat or random"},
        {"penalty-weight", "penalty_weight", "string penalty weight"},
        {"epsilon-verifier", "epsilon_verifier", "verifier error of the surrogate family"},
        {"trace-out", "trace_out", "trace CSV path"}}},
      {"traverse", Suite::Traversal, "Trapped subspace, b-orthogonality and traversal bound",
       {{"b-max", "b_max", "largest b for the trapped subspace"},
        {"orth-b-max", "orth_b_max", "largest b for the window orthogonality check"}}},
      {"audit", Suite::Audit, "Soundness audit of cheating and random schedules on NO chains",
       {{"n", "n", "chain length(s), comma separated"},
        {"b", "b", "localities, comma separated (default 2..N-1)"},
        {"random-schedules", "random_schedules", "random schedules per (N, b)"},
        {"penalty-weight", "penalty_weight", "string penalty weight"},
        {"epsilon-verifier", "epsilon_verifier", "verifier error of the surrogate family"}}},
  };
  return cmds;
}

void print_record(const ResultRecord& r, std::ostream& os) {
  for (const auto& c : r.checks) os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  for (const auto& q : r.quantities) os << "  " << q.name << " = " << q.value << " (" << q.provenance << ")\n";
  if (!r.error.empty()) os << "ERROR " << r.error << '\n';
  os << (r.passed() ? "all checks passed" : "checks failed") << " in " << r.wall_seconds << " s, digest "
     << r.payload_digest() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hamlift: verification harness for circuit-to-Hamiltonian lifting constructions"};
  app.require_subcommand(1);

  long long seed = 0;
  int threads = 1;
  double tol = 0.0;
  std::string out_dir, config_path;
  std::vector<std::string> sets;
  auto* o_seed = app.add_option("--seed", seed, "64-bit seed for all randomness")->check(CLI::NonNegativeNumber);
  auto* o_threads = app.add_option("--threads", threads, "worker threads for trial fan-out");
  auto* o_tol = app.add_option("--tol", tol, "override every check tolerance");
  auto* o_out = app.add_option("--out-dir", out_dir, "directory for the result record, traces and plot CSVs");
  app.add_option("--config", config_path, "key = value config file with per-suite sections");
  app.add_option("--set", sets, "extra suite parameter as key=value (repeatable)");
  app.fallthrough();

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = sub;
    for (const auto& f : cmd.flags) sub->add_option("--" + f.cli, flag_values[cmd.name + "/" + f.key], f.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const Command* chosen = nullptr;
  for (const auto& cmd : commands())
    if (subs[cmd.name]->parsed()) chosen = &cmd;

  ResultRecord record;
  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = ExperimentConfig::parse_file(config_path);
      if (cfg.suite != chosen->suite)
        throw ConfigError("suite", std::string("config is for ") + to_string(cfg.suite) + ", not " + chosen->name);
    }
    cfg.suite = chosen->suite;
    if (o_seed->count()) cfg.seed = static_cast<std::uint64_t>(seed);
    if (o_threads->count()) cfg.threads = threads;
    if (o_tol->count()) cfg.tol = tol;
    if (o_out->count()) cfg.out_dir = out_dir;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError(s, "expected key=value");
      cfg.params[s.substr(0, eq)] = s.substr(eq + 1);
    }
    CLI::App* sub = subs[chosen->name];
    for (const auto& f : chosen->flags)
      if (sub->get_option("--" + f.cli)->count()) cfg.params[f.key] = flag_values[chosen->name + "/" + f.key];

    record = run(cfg);
    // Without an output directory the trace still goes to the path asked for.
    if (cfg.out_dir.empty() && cfg.has("trace_out"))
      for (const auto& t : record.traces) atomic_write(t.name, t.content);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << record.config.echo();
  print_record(record, std::cout);
  return record.passed() ? 0 : 1;
}

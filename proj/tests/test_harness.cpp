#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "doctest.h"
#include "hamlift/harness.hpp"

using namespace hamlift;
using namespace hamlift::harness;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return ExperimentConfig::parse(is);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hamlift_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const CsvArtifact* find_plot(const ResultRecord& r, const std::string& prefix) {
  for (const auto& p : r.plots)
    if (p.name.rfind(prefix, 0) == 0) return &p;
  return nullptr;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse(
      "# comment\nsuite = gscon-lift\nseed = 7\nthreads = 2\n[bounds]\nparts = drop\n[gscon-lift]\nn = 4  # inline\n"
      "truth = yes\n");
  CHECK(c.suite == Suite::GsconLift);
  CHECK(c.seed == 7);
  CHECK(c.threads == 2);
  CHECK(c.params.size() == 2);
  CHECK(c.get_int_list("n", {}) == std::vector<int>{4});
  CHECK(c.get_string("truth", "") == "yes");
  CHECK_NOTHROW(c.validate());

  const ExperimentConfig again = parse(c.echo());
  CHECK(again.params == c.params);
  CHECK(again.seed == c.seed);
}

TEST_CASE("config errors name the failing key") {
  auto key_of = [](const std::string& text) -> std::string {
    try {
      parse(text).validate();
    } catch (const ConfigError& e) {
      return e.key;
    }
    return "";
  };
  CHECK(key_of("seed = 1\n") == "suite");
  CHECK(key_of("suite = nope\n") == "suite");
  CHECK(key_of("suite = bounds\ncolour = red\n") == "colour");
  CHECK(key_of("suite = bounds\nthreads = 0\n") == "threads");
  CHECK(key_of("suite = bounds\nseed = x\n") == "seed");
  CHECK(key_of("suite = bounds\n[bounds]\nexchange_trials = -1\n") == "exchange_trials");
  CHECK(key_of("suite = bounds\n[bounds]\nparts = drop,bogus\n") == "parts");
  CHECK(key_of("suite = gscon-lift\n[gscon-lift]\nn = 4\nb = 4\n") == "b");
  CHECK(key_of("suite = gscon-lift\n[gscon-lift]\nn = 7\n") == "n");
  CHECK(key_of("suite = gscon-lift\n[gscon-lift]\nn = 4\npenalty_weight = 0.1\n") == "penalty_weight");
  CHECK(key_of("suite = gscon-lift\n[gscon-lift]\nn = 3\nepsilon_verifier = 0.5\n") == "epsilon_verifier");
  CHECK(key_of("suite = apxsim-lift\n[apxsim-lift]\nalpha_margin = 0.5\n") == "alpha_margin");
  CHECK(key_of("suite = traversal\n[traversal]\nunknown = 1\n") == "unknown");
  CHECK(key_of("suite = audit\n[audit]\nn = 3\nb = 1\n") == "b");
}

TEST_CASE("malformed config leaves no outputs") {
  const fs::path dir = scratch("malformed");
  ExperimentConfig c = parse("suite = gscon-lift\n[gscon-lift]\nn = 4\nb = 4\n");
  c.out_dir = dir.string();
  CHECK_THROWS_AS(run(c), ConfigError);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("atomic write") {
  const fs::path dir = scratch("atomic");
  atomic_write(dir / "a.txt", "first");
  atomic_write(dir / "a.txt", "second");
  std::ifstream in(dir / "a.txt");
  std::string s;
  std::getline(in, s);
  CHECK(s == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  fs::remove_all(dir);
}

TEST_CASE("empty trace plots are header-only") {
  const LiftedGsconInstance inst = build_lifted(surrogate_family(Truth::Yes, 3));
  const EnergyTrace empty;
  CHECK(energy_plot_csv(inst, empty) == "step,energy,eta1,eta2\n");
  CHECK(read_csv(overlap_plot_csv(empty)).size() == 1);
}

TEST_CASE("bounds with defaults reports the cosine drop") {
  ExperimentConfig c = parse("suite = bounds\n[bounds]\nparts = drop\n");
  const ResultRecord r = run(c);
  REQUIRE(r.find_check("cosine-drop") != nullptr);
  CHECK(r.find_check("cosine-drop")->passed);
  CHECK(r.passed());
  CHECK(r.find_quantity("cosine_drop_floor_m2")->value == 0.09375);
}

TEST_CASE("gscon-lift YES N = 4 record and trace") {
  const fs::path dir = scratch("gscon");
  ExperimentConfig c = parse("suite = gscon-lift\n[gscon-lift]\nn = 4\ntruth = yes\ntrace_out = trace.csv\n");
  c.out_dir = dir.string();
  const ResultRecord r = run(c);
  CHECK(r.passed());
  CHECK(fs::exists(dir / "gscon-lift.json"));
  REQUIRE(fs::exists(dir / "trace.csv"));
  std::ifstream in(dir / "trace.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto rows = read_csv(ss.str());
  CHECK(rows.front() ==
        std::vector<std::string>{"step", "phase", "energy", "eta1", "eta2", "dominant_switch_string", "distance_to_target"});
  CHECK(rows.size() == 1 + 1 + static_cast<std::size_t>(2 * 7 + 7 * 4));  // header, start, steps
  const CsvArtifact* e = find_plot(r, "energy_vs_step");
  REQUIRE(e != nullptr);
  double eta1 = 0.0, emax = -1.0;
  const auto erows = read_csv(e->content);
  for (std::size_t k = 1; k < erows.size(); ++k) {
    emax = std::max(emax, std::stod(erows[k][1]));
    eta1 = std::stod(erows[k][2]);
  }
  CHECK(emax <= eta1);
  fs::remove_all(dir);
}

TEST_CASE("NO cheat plot has a row above eta2") {
  ExperimentConfig c = parse("suite = gscon-lift\n[gscon-lift]\nn = 4\ntruth = no\nschedule = cheat\n");
  const ResultRecord r = run(c);
  CHECK(r.passed());
  const CsvArtifact* e = find_plot(r, "energy_vs_step");
  REQUIRE(e != nullptr);
  bool above = false;
  const auto rows = read_csv(e->content);
  for (std::size_t k = 1; k < rows.size(); ++k) above = above || std::stod(rows[k][1]) >= std::stod(rows[k][3]);
  CHECK(above);
}

TEST_CASE("records are reproducible") {
  ExperimentConfig c = parse("suite = bounds\nseed = 99\n[bounds]\nparts = exchange,union\nexchange_trials = 50\n"
                             "union_trials = 50\n");
  const ResultRecord a = run(c), b = run(c);
  CHECK(a.payload() == b.payload());
  CHECK(a.payload_digest() == b.payload_digest());
  c.threads = 3;
  CHECK(run(c).payload_digest() == a.payload_digest());
  c.seed = 100;
  CHECK(run(c).payload_digest() != a.payload_digest());
}

TEST_CASE("module errors propagate into the record") {
  ExperimentConfig c = parse("suite = apxsim-lift\n[apxsim-lift]\nstage = lift\ntruth = yes\nzeta = 0.7\n");
  const ResultRecord r = run(c);
  CHECK_FALSE(r.passed());
  CHECK(r.error.find("promise gap") != std::string::npos);
}

TEST_CASE("bundle files") {
  const fs::path dir = scratch("bundle");
  fs::create_directories(dir);
  const double zeta = 0.04;
  for (int i = 0; i < 2; ++i) {
    std::ofstream v(dir / ("v" + std::to_string(i + 1) + ".circ"));
    write_circuit(v, toy_verifier(true, zeta));
  }
  {
    std::ofstream b(dir / "bad.cfg");
    b << "m = 2\nc = 0.4\ns = 0.6\nverifier.1 = v1.circ\nverifier.2 = v2.circ\n";
  }
  const double c = std::cos(zeta) * std::cos(zeta), s = std::sin(zeta) * std::sin(zeta);
  {
    std::ofstream b(dir / "good.cfg");
    b << std::setprecision(17) << "m = 2\nc = " << c << "\ns = " << s
      << "\nverifier.1 = v1.circ\nverifier.2 = v2.circ\nvalidity = yes,yes\naccept_set = 11\n";
  }
  const BundleFile f = load_bundle(dir / "good.cfg");
  CHECK(f.bundle.m == 2);
  CHECK(f.decision.accepts(3));
  CHECK_FALSE(f.decision.accepts(2));

  ExperimentConfig bad = parse("suite = apxsim-lift\n[apxsim-lift]\nstage = lift\n");
  bad.params["bundle"] = (dir / "bad.cfg").string();
  try {
    bad.validate();
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(e.key == "bundle");
  }

  ExperimentConfig good = parse("suite = apxsim-lift\n[apxsim-lift]\nstage = lift\nsuboptimal_cases = 2\n");
  good.params["bundle"] = (dir / "good.cfg").string();
  const ResultRecord r = run(good);
  CHECK(r.error.empty());
  CHECK(r.passed());
  CHECK(r.find_check("thresholds-bundle-yes") != nullptr);
  fs::remove_all(dir);
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS(parallel_for(10, 2, [](std::size_t i) {
    if (i == 5) throw std::runtime_error("boom");
  }));
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamlift/apx.hpp"
#include "hamlift/circuit.hpp"
#include "hamlift/gscon.hpp"
#include "hamlift/query.hpp"
#include "hamlift/rng.hpp"

namespace hamlift::harness {

enum class Suite { MappingVerify, Bounds, ApxsimLift, GsconLift, Traversal, Audit };

const char* to_string(Suite s);
Suite parse_suite(const std::string& name);

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key(key) {}
  std::string key;
};

// Flat text: top-level `key = value` lines, then `[suite-name]` sections of parameters.
// Only the section of the selected suite is read; `#` starts a comment.
struct ExperimentConfig {
  Suite suite = Suite::Bounds;
  std::uint64_t seed = 20240611;
  int threads = 1;
  double tol = 0.0;  // 0 keeps each check's own tolerance
  std::string out_dir;
  std::map<std::string, std::string> params;

  static ExperimentConfig parse(std::istream& is);
  static ExperimentConfig parse_file(const std::filesystem::path& path);

  // Rejects unknown keys and out-of-range values before any computation.
  void validate() const;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;

  std::string echo() const;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Quantity {
  std::string name;
  double value = 0.0;
  std::string provenance;  // simulated, closed-form, frozen-reference, exhaustive
};

struct CsvArtifact {
  std::string name;  // file name inside the output directory
  std::string content;
};

struct ResultRecord {
  ExperimentConfig config;
  std::vector<Check> checks;
  std::vector<Quantity> quantities;
  std::vector<CsvArtifact> traces;
  std::vector<CsvArtifact> plots;
  std::string error;
  double wall_seconds = 0.0;
  int threads = 1;
  double tol = 0.0;

  bool passed() const;
  const Check* find_check(const std::string& name) const;
  const Quantity* find_quantity(const std::string& name) const;
  void check(const std::string& name, bool ok, const std::string& detail = {});
  void quantity(const std::string& name, double value, const std::string& provenance);

  // Checks and quantities only, formatted with round-trip precision.
  std::string payload() const;
  std::string payload_digest() const;
  std::string to_json() const;
};

// Runs the suite and, when out_dir is set, persists the record, traces and plot data.
ResultRecord run(const ExperimentConfig& config);

void atomic_write(const std::filesystem::path& path, const std::string& content);
void emit_plot_data(const ResultRecord& record, const std::filesystem::path& dir);

// Plot tables for one trace: step, energy, eta1, eta2 and step, overlaps, distance.
std::string energy_plot_csv(const LiftedGsconInstance& inst, const EnergyTrace& trace);
std::string overlap_plot_csv(const EnergyTrace& trace);

// Calls f(0..n-1) across up to `threads` workers; f must only write to slots it owns.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

// Random circuits from X, Z, H, rotations, CNOT and Haar 1- and 2-qubit gates.
QuantumCircuit random_circuit(Rng& rng, int width, int gates);
// Verifier with the output on wire 0, `proof` proof wires after it, then ancillas.
QuantumCircuit random_verifier(Rng& rng, int proof, int ancilla, int gates);
VerifierBundle random_bundle(Rng& rng, int m);

// p(y) = <proof| (x)_i E_i^{y_i} |proof> from the individual acceptance operators.
OutcomeDistribution povm_distribution(const VerifierBundle& bundle, const StateVector& proof);

// key = value file: m, c, s, verifier.<i> (circuit path, 1-based), validity, accept_set.
struct BundleFile {
  VerifierBundle bundle;
  DecisionTable decision;
};
BundleFile load_bundle(const std::filesystem::path& path);

// Frozen switch rows of the honest N = 4, F = {1,3} run, one row per phase.
const std::vector<std::vector<std::string>>& reference_switch_rows();

}  // namespace hamlift::harness

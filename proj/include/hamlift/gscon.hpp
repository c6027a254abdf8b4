#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hamlift/apx.hpp"
#include "hamlift/circuit.hpp"
#include "hamlift/local_sum.hpp"
#include "hamlift/rng.hpp"

namespace hamlift {

inline constexpr int kSwitchLevels = 7;

// Local term h' on two neighbouring qubits; bonds are numbered 1..N-1.
struct TIStandardFamily {
  SparseHermitian local_term;
  int N = 0;
  int d = 2;
  double alpha = 0.0;
  double beta = 0.0;
  QuantumCircuit prep_circuit;
  std::vector<int> F;  // bonds with negative energy against psi_low
  Truth truth = Truth::Yes;
  double epsilon_verifier = 0.0;
  double f_threshold = 0.0;
  double ground_energy_hop = 0.0;  // lowest energy of the bare hopping chain
};

// Open XX chain h = -(XX+YY)/2 shifted per bond. YES places psi_low at energy alpha/2;
// NO adds the identity per bond so every term is positive semidefinite.
TIStandardFamily surrogate_family(Truth truth, int N, double epsilon_verifier = 1e-4,
                                  double f_threshold = 0.0);

SparseHermitian hopping_term();
SparseHermitian chain_hamiltonian(const SparseHermitian& local_term, int N);
QuantumCircuit givens_prep_circuit(int N, int particles);
std::vector<int> negative_bonds(const SparseHermitian& local_term, const StateVector& psi, int N,
                                double threshold = 0.0);

bool switch_allowed(int left, int right);
std::vector<std::vector<bool>> switch_table();
bool string_allowed(const std::vector<int>& s);

// Sub-sites alternate A_1, B_1, A_2, B_2, ... with dims d and 7.
struct LiftedGsconInstance {
  TIStandardFamily family;
  LocalOperatorSum h;
  double penalty_weight = 0.0;
  double hprime_norm = 0.0;
  double eta1 = 0.0, eta2 = 0.0, eta3 = 0.0, eta4 = 0.5;
  double delta_gap = 0.0;
  int m_budget = 0;
  int b = 2;

  int N() const { return family.N; }
  std::size_t psi_index() const { return 0; }
  std::size_t phi_index() const;
  StateVector psi_start() const;
  StateVector phi_target() const;
};

double default_penalty(const TIStandardFamily& family);
LiftedGsconInstance build_lifted(const TIStandardFamily& family, std::optional<double> penalty_weight = {},
                                 int b = 2);
// Penalty-weighted forbidden-pair projector summed over neighbouring switches, on B only.
LocalOperatorSum string_penalty(int N);

enum class Phase {
  Prepare,
  WarmUp,
  FullBlast,
  LeftDeke,
  RightDeke,
  CoolDown,
  CompleteShutdown,
  Uncompute,
  CheatShortcut,
  Random,
  Idle
};

const char* to_string(Phase p);

struct ScheduleStep {
  std::vector<std::size_t> subsites;  // register sub-sites the unitary acts on, in matrix order
  SpMat unitary;
  Phase phase = Phase::Prepare;

  std::vector<std::size_t> chain_sites() const;
};

struct TraversalSchedule {
  std::vector<ScheduleStep> steps;
  std::size_t locality() const;
};

ScheduleStep switch_flip(int site, int from, int to, Phase phase);  // site is 0-based

// The ten phases take 2L+6N steps; identity steps on B_N pad the schedule to m_budget.
TraversalSchedule honest_schedule(const LiftedGsconInstance& inst, bool allow_no = false);
TraversalSchedule cheat_schedule(const LiftedGsconInstance& inst, int b);
TraversalSchedule random_schedule(const LiftedGsconInstance& inst, int b, Rng& rng);

struct EnergyTrace {
  std::vector<double> energies;  // entry 0 is the start state
  std::vector<Phase> phases;     // phase of the step producing entry k (k >= 1)
  std::vector<std::string> switch_snapshots;
  std::vector<double> distances;       // ||psi_k - phi||
  std::vector<double> gamma1;          // weight on allowed switch strings
  std::vector<double> gamma2;          // weight on strings with a forbidden pair
  std::vector<double> outside_psi;     // <psi_k|(I - Pi_S012 - Pi_S456)|psi_k>
  std::vector<double> outside_gamma1;  // same restricted to the allowed strings
  double final_distance = 0.0;
  int window_b = 0;
};

struct RunOptions {
  int window_b = 0;  // width-1 of the S_012/S_456 window; defaults to inst.b
};

EnergyTrace run_schedule(const LiftedGsconInstance& inst, const TraversalSchedule& sched,
                         const RunOptions& opts = {});
std::string dominant_string(const std::vector<double>& switch_weights, int N);

struct TraversalAudit {
  bool applicable = false;
  std::string reason;
  double bound = 0.0;
  std::size_t witness = 0;
  double overlap = 0.0;
  bool holds = false;
};

// overlaps[k] = <psi_k|(I - Pi_S - Pi_T)|psi_k>; m steps.
TraversalAudit traversal_bound_audit(const std::vector<double>& overlaps, std::size_t m, double epsilon);
TraversalAudit traversal_bound_audit(const std::vector<StateVector>& states, const SparseHermitian& S,
                                     const SparseHermitian& T, std::size_t m, double epsilon);

bool b_orthogonal(const SparseHermitian& S, const SparseHermitian& T, int b);
// Spans of computational basis strings; orthogonal iff every pair differs on more than b sites.
bool b_orthogonal_strings(const std::vector<std::vector<int>>& S, const std::vector<std::vector<int>>& T, int b);

std::vector<std::string> trapped_subspace(int b);
bool matches_trapped_language(const std::string& s);

struct DecompositionReport {
  std::size_t step = 0;
  double gamma1_weight = 0.0;
  double gamma2_weight = 0.0;
  double overlap_outside_S = 0.0;  // of the allowed-string component
  double overlap_psi = 0.0;
  double energy = 0.0;
  bool literal_applicable = false;
  bool literal_holds = false;
  bool parametrized_holds = false;
  bool weights_sum_ok = false;
};

struct SoundnessReport {
  double max_energy = 0.0;
  double final_distance = 0.0;
  bool energy_branch = false;
  bool distance_branch = false;
  bool dichotomy() const { return energy_branch || distance_branch; }
  TraversalAudit traversal;
  DecompositionReport decomposition;
  EnergyTrace trace;
};

SoundnessReport soundness_audit(const LiftedGsconInstance& inst, const TraversalSchedule& sched);

void write_trace_csv(std::ostream& os, const LiftedGsconInstance& inst, const EnergyTrace& trace);

}  // namespace hamlift

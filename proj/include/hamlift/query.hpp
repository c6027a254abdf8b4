#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hamlift/circuit.hpp"

namespace hamlift {

enum class Validity { Yes, No, Invalid };

// Each verifier emits its answer on wire 0; proof wires are free, ancillas start at |0>.
struct VerifierBundle {
  int m = 0;
  std::vector<QuantumCircuit> verifiers;
  double c = 1.0;
  double s = 0.0;
  std::vector<Validity> query_validity;

  void validate() const;
  std::size_t proof_qubits() const;
};

// y is indexed with y_1 as the most significant bit.
struct DecisionTable {
  int m = 0;
  std::vector<bool> accept;

  static DecisionTable from_accept_set(int m, const std::vector<std::string>& accept_set);
  static DecisionTable all_of(int m);
  bool accepts(std::size_t y) const { return accept.at(y); }
  void validate() const;
};

struct OutcomeDistribution {
  int m = 0;
  std::vector<double> p;

  void validate() const;
};

OutcomeDistribution product_distribution(const std::vector<double>& accept_probs);

struct ProofBlock {
  int offset = 0;  // first wire of the block in the augmented circuit
  int width = 0;
  int output_wire = 0;
  std::vector<int> proof_wires;    // global indices
  std::vector<int> ancilla_wires;  // global indices
};

struct AugmentedCircuit {
  QuantumCircuit circuit;
  int m = 0;
  double flag_angle = 0.0;
  std::vector<ProofBlock> proof_wire_blocks;
  std::size_t verifier_gates = 0;  // gates before the flag rotations
};

double flag_angle_for(int m);
AugmentedCircuit build_augmented(const VerifierBundle& bundle, const DecisionTable& decision);

// Multi-controlled U from 1- and 2-qubit gates only.
void append_multi_controlled(std::vector<Gate>& out, const std::vector<int>& controls, int target,
                             const Mat& u);
std::vector<Gate> decision_gates(const DecisionTable& d, const std::vector<int>& y_wires, int out_wire);

double flag_prob(const OutcomeDistribution& dist);
double out_prob(const OutcomeDistribution& dist, const DecisionTable& decision);

double cosine_drop_floor(int m);
struct CosineDropCheck {
  int m_max = 0;
  std::size_t pairs = 0;
  double min_slack = 0.0;  // min over pairs of drop - floor
  int worst_m = 0;
  bool passed = false;
};
CosineDropCheck verify_cosine_drop(int m_max);

// Input to the augmented circuit with the proof placed on the proof wires (block order).
StateVector augmented_input(const AugmentedCircuit& aug, const StateVector& proof);
// Distribution of the verifier outputs for a joint proof.
OutcomeDistribution outcome_distribution(const AugmentedCircuit& aug, const StateVector& proof);
double acceptance_probability(const QuantumCircuit& verifier, const StateVector& proof);
// POVM element on the proof space: <anc 0| V^dag |1><1|_out V |anc 0>.
Mat acceptance_operator(const QuantumCircuit& verifier);
struct OptimalProof {
  double probability;
  StateVector proof;
};
OptimalProof optimal_proof(const QuantumCircuit& verifier);

struct ExchangeAudit {
  int m = 0;
  int query = 0;
  double epsilon = 0.0;
  double joint_accept = 0.0;
  double better_accept = 0.0;
  double joint_flag_zero = 0.0;
  double product_flag_zero = 0.0;
  double required_gain = 0.0;  // 3/(8m^2) * epsilon
  double margin = 0.0;         // joint - product - required
  double empirical_constant = 0.0;
  bool holds = false;
};

ExchangeAudit exchange_bound_audit(const VerifierBundle& bundle, const StateVector& joint_proof, int i,
                                   const StateVector& locally_better_proof);

void write_audit(std::ostream& os, const ExchangeAudit& a);

}  // namespace hamlift

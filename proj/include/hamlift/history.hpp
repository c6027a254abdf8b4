#pragma once

#include <iosfwd>
#include <vector>

#include "hamlift/circuit.hpp"
#include "hamlift/operator.hpp"

namespace hamlift {

// Space is clock (T+1 levels, site 0) tensored with the work qubits.
struct CircuitHamiltonian {
  SparseHermitian hw;
  SparseHermitian m1;
  SparseHermitian m2;
  SparseHermitian p_t;
  double g_value = 0.0;
  int T = 0;
  int clock_dim = 0;
  int work_qubits = 0;
  WireLabels labels;
  std::vector<int> pinned;

  std::vector<int> site_dims() const;
};

// h_t for gate index t (0-based), moving the clock from t to t+1.
SparseHermitian propagation_term(const Gate& g, int t, int T, int width);
// Same operator assembled from the outer-product sum over a basis of the work space.
SparseHermitian propagation_term_reference(const Gate& g, int t, int T, int width);

CircuitHamiltonian build_hw(const QuantumCircuit& circuit, const std::vector<int>& pinned);

struct HistoryState {
  StateVector vector;
  StateVector input;
};

HistoryState history_state(const QuantumCircuit& circuit, const StateVector& input,
                           const std::vector<int>& pinned = {});

struct MeasurementOps {
  SparseHermitian m1;
  SparseHermitian m2;
  SparseHermitian p_t;
};

// Output wires 0 and 1; a width-1 circuit measures wire 0 for both.
MeasurementOps measurement_ops(const CircuitHamiltonian& ch);

// Tr(|0><0|_wire U|phi><phi|U^dag)
double output_zero_probability(const QuantumCircuit& circuit, const StateVector& input, int wire);
// <psi_T|M|psi_T> with psi_T = P_T psi / ||P_T psi||.
double postselected_expectation(const SparseHermitian& m, const SparseHermitian& p_t, const StateVector& psi);

void write_circuit_hamiltonian(std::ostream& os, const CircuitHamiltonian& ch);
CircuitHamiltonian read_circuit_hamiltonian(std::istream& is);

enum class StructureKind { KLocal, NearestNeighbour1D, TranslationInvariant1D };

struct StructureDescriptor {
  StructureKind kind = StructureKind::KLocal;
  int k = 2;
  int local_dim = 2;

  static StructureDescriptor k_local(int k) { return {StructureKind::KLocal, k, 0}; }
  static StructureDescriptor nearest_neighbour(int d) { return {StructureKind::NearestNeighbour1D, 2, d}; }
  static StructureDescriptor translation_invariant(int d) {
    return {StructureKind::TranslationInvariant1D, 2, d};
  }
};

// Coefficients of h in the product Weyl basis X^a Z^b per site; multi-index with
// per-site local index a*d+b, site 0 most significant.
struct OperatorExpansion {
  std::vector<int> site_dims;
  std::vector<cplx> coeff;
  double scale = 0.0;
};

OperatorExpansion weyl_expansion(const SparseHermitian& h);
bool has_structure(const SparseHermitian& h, const StructureDescriptor& s);
bool conforms(const SparseHermitian& p, const SparseHermitian& h, const StructureDescriptor& s);

}  // namespace hamlift

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hamlift/operator.hpp"

namespace hamlift {

enum class GateKind { PauliX, PauliZ, Hadamard, Rotation, Controlled, Generic1q, Generic2q };

struct Gate {
  GateKind kind = GateKind::PauliX;
  double theta = 0.0;
  std::vector<int> wires;  // controlled: control first, then the inner gate's wires
  Mat matrix;              // generic kinds only
  std::vector<Gate> inner; // controlled only; exactly one element

  static Gate x(int w);
  static Gate z(int w);
  static Gate h(int w);
  static Gate rotation(double theta, int w);
  static Gate controlled(int control, Gate target);
  static Gate generic1(const Mat& u, int w);
  static Gate generic2(const Mat& u, int w0, int w1);
  static Gate cnot(int control, int target) { return controlled(control, x(target)); }

  // Unitary on `wires` in order (first wire most significant).
  Mat local_matrix() const;
  Gate adjoint() const;
  Gate shifted(int offset) const;
  std::size_t arity() const { return wires.size(); }
};

Mat rotation_matrix(double theta);

struct WireLabels {
  std::optional<int> q_out;
  std::optional<int> q_flag;
  std::vector<int> proof;
  std::vector<int> ancilla;
};

class QuantumCircuit {
 public:
  QuantumCircuit() = default;
  explicit QuantumCircuit(int width);

  int width() const { return width_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  const WireLabels& labels() const { return labels_; }
  void set_labels(WireLabels labels);

  void add(Gate g);
  void append(const QuantumCircuit& other, int offset = 0);
  // Gate-wise adjoint in reverse order.
  QuantumCircuit adjoint() const;

 private:
  int width_ = 0;
  std::vector<Gate> gates_;
  WireLabels labels_;
};

// Wire w addresses bit (width-1-w) of the basis index.
void apply_gate(Vec& amps, int width, const Gate& g);
StateVector simulate(const QuantumCircuit& c, const StateVector& input);
double prob_one(const StateVector& state, int wire);
double prob_one(const Vec& amps, int width, int wire);
int width_of(std::size_t dim);

SpMat gate_operator(const Gate& g, int width);
Mat circuit_unitary(const QuantumCircuit& c);

std::string format_gate(const Gate& g);
Gate parse_gate(const std::string& line);
void write_circuit(std::ostream& os, const QuantumCircuit& c);
QuantumCircuit read_circuit(std::istream& is);

}  // namespace hamlift

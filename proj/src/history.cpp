#include "hamlift/history.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace hamlift {

namespace {

std::vector<int> dims_for(int T, int width) {
  std::vector<int> d{T + 1};
  d.insert(d.end(), static_cast<std::size_t>(width), 2);
  return d;
}

void push_propagation(std::vector<Entry>& out, const SpMat& u, int t, std::size_t work_dim) {
  const std::size_t a = static_cast<std::size_t>(t) * work_dim;
  const std::size_t b = a + work_dim;
  for (std::size_t x = 0; x < work_dim; ++x) {
    out.push_back({a + x, a + x, 1.0});
    out.push_back({b + x, b + x, 1.0});
  }
  for (Eigen::Index r = 0; r < u.outerSize(); ++r)
    for (SpMat::InnerIterator it(u, r); it; ++it) {
      const std::size_t rr = static_cast<std::size_t>(it.row());
      const std::size_t cc = static_cast<std::size_t>(it.col());
      out.push_back({b + rr, a + cc, -it.value()});
      out.push_back({a + cc, b + rr, -std::conj(it.value())});
    }
}

std::size_t bit_of(int width, int wire) { return std::size_t{1} << (width - 1 - wire); }

SparseHermitian clock_output_projector(int T, int width, std::optional<int> wire) {
  const std::size_t work = std::size_t{1} << width;
  const std::size_t base = static_cast<std::size_t>(T) * work;
  std::vector<Entry> e;
  for (std::size_t x = 0; x < work; ++x)
    if (!wire || (x & bit_of(width, *wire)) == 0) e.push_back({base + x, base + x, 1.0});
  return SparseHermitian(dims_for(T, width), e);
}

void check_gates(const QuantumCircuit& c) {
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c.gates()[k].arity() > 2)
      throw std::invalid_argument("gate " + std::to_string(k) + " acts on more than two qubits");
}

}  // namespace

std::vector<int> CircuitHamiltonian::site_dims() const { return dims_for(T, work_qubits); }

SparseHermitian propagation_term(const Gate& g, int t, int T, int width) {
  if (t < 0 || t >= T) throw std::out_of_range("propagation step out of range");
  std::vector<Entry> e;
  push_propagation(e, gate_operator(g, width), t, std::size_t{1} << width);
  return SparseHermitian(dims_for(T, width), e);
}

SparseHermitian propagation_term_reference(const Gate& g, int t, int T, int width) {
  if (t < 0 || t >= T) throw std::out_of_range("propagation step out of range");
  const std::size_t work = std::size_t{1} << width;
  const std::size_t a = static_cast<std::size_t>(t) * work;
  const std::size_t b = a + work;
  const SpMat u = gate_operator(g, width);
  const Eigen::SparseMatrix<cplx> uc(u);  // column access
  std::vector<Entry> out;
  for (std::size_t e = 0; e < work; ++e) {
    // v_e = |t>|e> - |t+1> U|e>
    std::vector<std::pair<std::size_t, cplx>> v{{a + e, 1.0}};
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(uc, static_cast<Eigen::Index>(e)); it; ++it)
      v.push_back({b + static_cast<std::size_t>(it.row()), -it.value()});
    for (const auto& [i, vi] : v)
      for (const auto& [j, vj] : v) out.push_back({i, j, vi * std::conj(vj)});
  }
  return SparseHermitian(dims_for(T, width), out);
}

CircuitHamiltonian build_hw(const QuantumCircuit& circuit, const std::vector<int>& pinned) {
  const int T = static_cast<int>(circuit.size());
  if (T == 0) throw std::invalid_argument("circuit has no gates; no propagation terms");
  check_gates(circuit);
  const int width = circuit.width();
  std::vector<bool> seen(static_cast<std::size_t>(width), false);
  for (int w : pinned) {
    if (w < 0 || w >= width) throw std::out_of_range("pinned wire " + std::to_string(w) + " out of range");
    if (seen[static_cast<std::size_t>(w)]) throw std::invalid_argument("pinned wire listed twice");
    seen[static_cast<std::size_t>(w)] = true;
  }
  const std::size_t work = std::size_t{1} << width;
  std::vector<Entry> e;
  for (int t = 0; t < T; ++t) push_propagation(e, gate_operator(circuit.gates()[static_cast<std::size_t>(t)], width), t, work);
  for (std::size_t x = 0; x < work; ++x) {
    int ones = 0;
    for (int w : pinned) ones += (x & bit_of(width, w)) ? 1 : 0;
    if (ones) e.push_back({x, x, static_cast<double>(ones)});
  }

  CircuitHamiltonian ch;
  ch.T = T;
  ch.clock_dim = T + 1;
  ch.work_qubits = width;
  ch.g_value = 1.0 / (T + 1);
  ch.labels = circuit.labels();
  ch.pinned = pinned;
  ch.hw = SparseHermitian(dims_for(T, width), e);
  MeasurementOps ops = measurement_ops(ch);
  ch.m1 = std::move(ops.m1);
  ch.m2 = std::move(ops.m2);
  ch.p_t = std::move(ops.p_t);
  return ch;
}

HistoryState history_state(const QuantumCircuit& circuit, const StateVector& input, const std::vector<int>& pinned) {
  const int width = circuit.width();
  const std::size_t work = std::size_t{1} << width;
  if (input.dim() != work) throw std::invalid_argument("input dimension does not match circuit width");
  if (!input.is_normalized()) throw std::invalid_argument("input state is not normalized");
  for (int w : pinned) {
    double weight = 0.0;
    for (std::size_t x = 0; x < work; ++x)
      if (x & bit_of(width, w)) weight += std::norm(input[x]);
    if (weight > 1e-20)
      throw std::invalid_argument("input violates the pinned ancilla on wire " + std::to_string(w));
  }
  const int T = static_cast<int>(circuit.size());
  Vec out(static_cast<Eigen::Index>(work * static_cast<std::size_t>(T + 1)));
  Vec cur = input.vec();
  const double norm = 1.0 / std::sqrt(static_cast<double>(T + 1));
  const auto w = static_cast<Eigen::Index>(work);
  out.segment(0, w) = norm * cur;
  for (int t = 0; t < T; ++t) {
    apply_gate(cur, width, circuit.gates()[static_cast<std::size_t>(t)]);
    out.segment(static_cast<Eigen::Index>(t + 1) * w, w) = norm * cur;
  }
  return {StateVector(std::move(out)), input};
}

MeasurementOps measurement_ops(const CircuitHamiltonian& ch) {
  const int width = ch.work_qubits;
  const int w2 = width >= 2 ? 1 : 0;
  return {clock_output_projector(ch.T, width, 0), clock_output_projector(ch.T, width, w2),
          clock_output_projector(ch.T, width, std::nullopt)};
}

double output_zero_probability(const QuantumCircuit& circuit, const StateVector& input, int wire) {
  return 1.0 - prob_one(simulate(circuit, input), wire);
}

double postselected_expectation(const SparseHermitian& m, const SparseHermitian& p_t, const StateVector& psi) {
  Vec phi = p_t.apply(psi.vec());
  const double n2 = phi.squaredNorm();
  if (n2 == 0.0) throw std::domain_error("state has no weight on the final time step");
  return phi.dot(m.apply(phi)).real() / n2;
}

namespace {

void write_section(std::ostream& os, const char* name, const SparseHermitian& h) {
  std::ostringstream buf;
  write_operator(buf, h);
  std::string s = buf.str();
  std::size_t lines = 0;
  for (char c : s) lines += c == '\n';
  os << "operator " << name << ' ' << lines << '\n' << s;
}

SparseHermitian read_section(std::istream& is, const std::string& name) {
  std::string line;
  while (std::getline(is, line) && line.empty()) {
  }
  std::istringstream hs(line);
  std::string tag, got;
  std::size_t lines = 0;
  if (!(hs >> tag >> got >> lines) || tag != "operator" || got != name)
    throw std::runtime_error("expected operator section '" + name + "'");
  std::string body;
  for (std::size_t k = 0; k < lines; ++k) {
    if (!std::getline(is, line)) throw std::runtime_error("truncated operator section '" + name + "'");
    body += line + '\n';
  }
  std::istringstream bs(body);
  return read_operator(bs);
}

void write_list(std::ostream& os, const char* key, const std::vector<int>& v) {
  os << key;
  for (int x : v) os << ' ' << x;
  os << '\n';
}

}  // namespace

void write_circuit_hamiltonian(std::ostream& os, const CircuitHamiltonian& ch) {
  os << "circuit_hamiltonian\nT " << ch.T << "\ng_value " << std::setprecision(17) << ch.g_value
     << "\nwork_qubits " << ch.work_qubits << '\n';
  if (ch.labels.q_out) os << "output " << *ch.labels.q_out << '\n';
  if (ch.labels.q_flag) os << "flag " << *ch.labels.q_flag << '\n';
  write_list(os, "proof", ch.labels.proof);
  write_list(os, "ancilla", ch.labels.ancilla);
  write_list(os, "pinned", ch.pinned);
  write_section(os, "hw", ch.hw);
  write_section(os, "m1", ch.m1);
  write_section(os, "m2", ch.m2);
  write_section(os, "p_t", ch.p_t);
}

CircuitHamiltonian read_circuit_hamiltonian(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "circuit_hamiltonian")
    throw std::runtime_error("not a circuit_hamiltonian stream");
  CircuitHamiltonian ch;
  for (int k = 0; k < 8; ++k) {
    if (!std::getline(is, line)) throw std::runtime_error("truncated circuit_hamiltonian header");
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::vector<int> list;
    if (key == "T") ls >> ch.T;
    else if (key == "g_value") ls >> ch.g_value;
    else if (key == "work_qubits") ls >> ch.work_qubits;
    else if (key == "output") { int w; ls >> w; ch.labels.q_out = w; }
    else if (key == "flag") { int w; ls >> w; ch.labels.q_flag = w; }
    else {
      for (int x; ls >> x;) list.push_back(x);
      if (key == "proof") ch.labels.proof = list;
      else if (key == "ancilla") ch.labels.ancilla = list;
      else if (key == "pinned") { ch.pinned = list; break; }
      else throw std::runtime_error("unknown header key '" + key + "'");
    }
  }
  ch.clock_dim = ch.T + 1;
  ch.hw = read_section(is, "hw");
  ch.m1 = read_section(is, "m1");
  ch.m2 = read_section(is, "m2");
  ch.p_t = read_section(is, "p_t");
  if (ch.hw.dim() != static_cast<std::size_t>(ch.clock_dim) << ch.work_qubits)
    throw std::runtime_error("hw dimension disagrees with the header");
  return ch;
}

}  // namespace hamlift

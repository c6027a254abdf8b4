#include "hamlift/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace hamlift {

namespace {

void require_unitary(const Mat& u, Eigen::Index n, const char* what) {
  if (u.rows() != n || u.cols() != n)
    throw std::invalid_argument(std::string(what) + ": wrong matrix dimension");
  double err = (u.adjoint() * u - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (err > 1e-10) throw std::invalid_argument(std::string(what) + ": matrix is not unitary");
}

}  // namespace

Mat rotation_matrix(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Gate Gate::x(int w) { return Gate{GateKind::PauliX, 0.0, {w}, {}, {}}; }
Gate Gate::z(int w) { return Gate{GateKind::PauliZ, 0.0, {w}, {}, {}}; }
Gate Gate::h(int w) { return Gate{GateKind::Hadamard, 0.0, {w}, {}, {}}; }
Gate Gate::rotation(double theta, int w) { return Gate{GateKind::Rotation, theta, {w}, {}, {}}; }

Gate Gate::controlled(int control, Gate target) {
  Gate g;
  g.kind = GateKind::Controlled;
  g.wires.push_back(control);
  g.wires.insert(g.wires.end(), target.wires.begin(), target.wires.end());
  g.inner.push_back(std::move(target));
  return g;
}

Gate Gate::generic1(const Mat& u, int w) {
  require_unitary(u, 2, "generic-1q");
  return Gate{GateKind::Generic1q, 0.0, {w}, u, {}};
}

Gate Gate::generic2(const Mat& u, int w0, int w1) {
  require_unitary(u, 4, "generic-2q");
  return Gate{GateKind::Generic2q, 0.0, {w0, w1}, u, {}};
}

Mat Gate::local_matrix() const {
  Mat m;
  switch (kind) {
    case GateKind::PauliX:
      m = Mat::Zero(2, 2);
      m(0, 1) = m(1, 0) = 1.0;
      return m;
    case GateKind::PauliZ:
      m = Mat::Identity(2, 2);
      m(1, 1) = -1.0;
      return m;
    case GateKind::Hadamard:
      m = Mat::Constant(2, 2, 1.0 / std::sqrt(2.0));
      m(1, 1) = -1.0 / std::sqrt(2.0);
      return m;
    case GateKind::Rotation:
      return rotation_matrix(theta);
    case GateKind::Generic1q:
    case GateKind::Generic2q:
      return matrix;
    case GateKind::Controlled: {
      Mat in = inner.at(0).local_matrix();
      const Eigen::Index d = in.rows();
      m = Mat::Identity(2 * d, 2 * d);
      m.bottomRightCorner(d, d) = in;
      return m;
    }
  }
  throw std::logic_error("unknown gate kind");
}

Gate Gate::adjoint() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::Rotation:
      g.theta = -theta;
      break;
    case GateKind::Generic1q:
    case GateKind::Generic2q:
      g.matrix = matrix.adjoint();
      break;
    case GateKind::Controlled:
      g.inner[0] = inner.at(0).adjoint();
      break;
    default:
      break;
  }
  return g;
}

Gate Gate::shifted(int offset) const {
  Gate g = *this;
  for (int& w : g.wires) w += offset;
  if (!g.inner.empty()) g.inner[0] = inner[0].shifted(offset);
  return g;
}

QuantumCircuit::QuantumCircuit(int width) : width_(width) {
  if (width < 1) throw std::invalid_argument("circuit width must be at least 1");
}

void QuantumCircuit::set_labels(WireLabels labels) {
  auto in_range = [&](int w) { return w >= 0 && w < width_; };
  if (labels.q_out && (*labels.q_out != 0 || !in_range(0)))
    throw std::invalid_argument("q_out must be wire 0");
  if (labels.q_flag && (*labels.q_flag != 1 || !in_range(1)))
    throw std::invalid_argument("q_flag must be wire 1");
  for (int w : labels.proof)
    if (!in_range(w)) throw std::invalid_argument("proof wire out of range");
  for (int w : labels.ancilla)
    if (!in_range(w)) throw std::invalid_argument("ancilla wire out of range");
  labels_ = std::move(labels);
}

void QuantumCircuit::add(Gate g) {
  if (g.wires.empty()) throw std::invalid_argument("gate has no wires");
  for (int w : g.wires)
    if (w < 0 || w >= width_)
      throw std::invalid_argument("gate wire " + std::to_string(w) + " outside circuit width " +
                                  std::to_string(width_));
  auto sorted = g.wires;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("gate wires must be distinct");
  const Gate* cur = &g;
  std::size_t expected = g.wires.size();
  while (cur->kind == GateKind::Controlled) {
    if (cur->inner.size() != 1) throw std::invalid_argument("controlled gate needs one inner gate");
    --expected;
    cur = &cur->inner[0];
    if (cur->wires.size() != expected) throw std::invalid_argument("controlled gate wire mismatch");
  }
  std::size_t arity = (cur->kind == GateKind::Generic2q) ? 2 : 1;
  if (cur->wires.size() != arity) throw std::invalid_argument("gate arity mismatch");
  if (cur->kind == GateKind::Generic1q) require_unitary(cur->matrix, 2, "generic-1q");
  if (cur->kind == GateKind::Generic2q) require_unitary(cur->matrix, 4, "generic-2q");
  gates_.push_back(std::move(g));
}

void QuantumCircuit::append(const QuantumCircuit& other, int offset) {
  for (const Gate& g : other.gates_) add(offset ? g.shifted(offset) : g);
}

QuantumCircuit QuantumCircuit::adjoint() const {
  QuantumCircuit out(width_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.add(it->adjoint());
  out.labels_ = labels_;
  return out;
}

namespace {

void apply_masked(Vec& a, int width, const Gate& g, std::size_t mask, std::size_t val) {
  auto bit = [width](int w) { return std::size_t{1} << (width - 1 - w); };
  const std::size_t dim = static_cast<std::size_t>(a.size());
  if (g.kind == GateKind::Controlled) {
    std::size_t b = bit(g.wires[0]);
    apply_masked(a, width, g.inner[0], mask | b, val | b);
    return;
  }
  const Mat u = g.local_matrix();
  if (g.wires.size() == 1) {
    const std::size_t t = bit(g.wires[0]);
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & t) || (i & mask) != val) continue;
      cplx x0 = a[static_cast<Eigen::Index>(i)], x1 = a[static_cast<Eigen::Index>(i | t)];
      a[static_cast<Eigen::Index>(i)] = u00 * x0 + u01 * x1;
      a[static_cast<Eigen::Index>(i | t)] = u10 * x0 + u11 * x1;
    }
    return;
  }
  const std::size_t t0 = bit(g.wires[0]), t1 = bit(g.wires[1]);
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & t0) || (i & t1) || (i & mask) != val) continue;
    const std::size_t idx[4] = {i, i | t1, i | t0, i | t0 | t1};
    cplx x[4], y[4];
    for (int k = 0; k < 4; ++k) x[k] = a[static_cast<Eigen::Index>(idx[k])];
    for (int r = 0; r < 4; ++r) {
      y[r] = 0.0;
      for (int c = 0; c < 4; ++c) y[r] += u(r, c) * x[c];
    }
    for (int k = 0; k < 4; ++k) a[static_cast<Eigen::Index>(idx[k])] = y[k];
  }
}

}  // namespace

int width_of(std::size_t dim) {
  int w = 0;
  while ((std::size_t{1} << w) < dim) ++w;
  if ((std::size_t{1} << w) != dim) throw std::invalid_argument("dimension is not a power of two");
  return w;
}

void apply_gate(Vec& amps, int width, const Gate& g) {
  if (static_cast<std::size_t>(amps.size()) != (std::size_t{1} << width))
    throw std::invalid_argument("amplitude count does not match width");
  apply_masked(amps, width, g, 0, 0);
}

StateVector simulate(const QuantumCircuit& c, const StateVector& input) {
  if (input.dim() != (std::size_t{1} << c.width()))
    throw std::invalid_argument("input dimension " + std::to_string(input.dim()) +
                                " does not match circuit width " + std::to_string(c.width()));
  Vec a = input.vec();
  for (const Gate& g : c.gates()) apply_masked(a, c.width(), g, 0, 0);
  return StateVector(std::move(a));
}

double prob_one(const Vec& amps, int width, int wire) {
  if (wire < 0 || wire >= width) throw std::out_of_range("wire out of range");
  const std::size_t t = std::size_t{1} << (width - 1 - wire);
  double p = 0.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i)
    if (static_cast<std::size_t>(i) & t) p += std::norm(amps[i]);
  return p;
}

double prob_one(const StateVector& state, int wire) {
  return prob_one(state.vec(), width_of(state.dim()), wire);
}

SpMat gate_operator(const Gate& g, int width) {
  std::vector<std::size_t> sites(g.wires.begin(), g.wires.end());
  std::vector<int> dims(static_cast<std::size_t>(width), 2);
  return embed_matrix(SpMat(g.local_matrix().sparseView()), sites, dims);
}

Mat circuit_unitary(const QuantumCircuit& c) {
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << c.width());
  Mat u = Mat::Identity(n, n);
  for (const Gate& g : c.gates()) u = gate_operator(g, c.width()) * u;
  return u;
}

namespace {

const char* base_name(GateKind k) {
  switch (k) {
    case GateKind::PauliX: return "x";
    case GateKind::PauliZ: return "z";
    case GateKind::Hadamard: return "h";
    case GateKind::Rotation: return "rot";
    case GateKind::Generic1q: return "u1";
    case GateKind::Generic2q: return "u2";
    case GateKind::Controlled: return "ctrl";
  }
  return "?";
}

}  // namespace

std::string format_gate(const Gate& g) {
  std::ostringstream os;
  os << std::setprecision(17);
  const Gate* cur = &g;
  while (cur->kind == GateKind::Controlled) {
    os << "ctrl:";
    cur = &cur->inner[0];
  }
  os << base_name(cur->kind);
  if (cur->kind == GateKind::Rotation) os << ' ' << cur->theta;
  if (cur->kind == GateKind::Generic1q || cur->kind == GateKind::Generic2q)
    for (Eigen::Index r = 0; r < cur->matrix.rows(); ++r)
      for (Eigen::Index c = 0; c < cur->matrix.cols(); ++c)
        os << ' ' << cur->matrix(r, c).real() << ' ' << cur->matrix(r, c).imag();
  for (int w : g.wires) os << ' ' << w;
  return os.str();
}

Gate parse_gate(const std::string& line) {
  std::istringstream is(line);
  std::string kind;
  if (!(is >> kind)) throw std::runtime_error("empty gate line");
  int controls = 0;
  while (kind.rfind("ctrl:", 0) == 0) {
    ++controls;
    kind = kind.substr(5);
  }
  auto need = [&](double& v) {
    if (!(is >> v)) throw std::runtime_error("missing gate parameter in: " + line);
  };
  Gate base;
  std::size_t nwires = 1;
  Mat m;
  double theta = 0.0;
  if (kind == "rot") {
    need(theta);
  } else if (kind == "u1" || kind == "u2") {
    const Eigen::Index d = kind == "u1" ? 2 : 4;
    nwires = kind == "u1" ? 1 : 2;
    m.resize(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        double re, im;
        need(re);
        need(im);
        m(r, c) = {re, im};
      }
  } else if (kind != "x" && kind != "z" && kind != "h") {
    throw std::runtime_error("unknown gate kind '" + kind + "'");
  }
  std::vector<int> wires;
  int w;
  while (is >> w) wires.push_back(w);
  if (wires.size() != nwires + static_cast<std::size_t>(controls))
    throw std::runtime_error("wrong wire count in: " + line);
  std::vector<int> bw(wires.begin() + controls, wires.end());
  if (kind == "x") base = Gate::x(bw[0]);
  else if (kind == "z") base = Gate::z(bw[0]);
  else if (kind == "h") base = Gate::h(bw[0]);
  else if (kind == "rot") base = Gate::rotation(theta, bw[0]);
  else if (kind == "u1") base = Gate::generic1(m, bw[0]);
  else base = Gate::generic2(m, bw[0], bw[1]);
  for (int k = controls; k-- > 0;) base = Gate::controlled(wires[static_cast<std::size_t>(k)], base);
  return base;
}

void write_circuit(std::ostream& os, const QuantumCircuit& c) {
  os << "width " << c.width() << '\n';
  const auto& L = c.labels();
  if (L.q_out) os << "output " << *L.q_out << '\n';
  if (L.q_flag) os << "flag " << *L.q_flag << '\n';
  if (!L.proof.empty()) {
    os << "proof";
    for (int w : L.proof) os << ' ' << w;
    os << '\n';
  }
  if (!L.ancilla.empty()) {
    os << "ancilla";
    for (int w : L.ancilla) os << ' ' << w;
    os << '\n';
  }
  for (const Gate& g : c.gates()) os << format_gate(g) << '\n';
}

QuantumCircuit read_circuit(std::istream& is) {
  std::string line;
  QuantumCircuit c;
  bool have_width = false;
  WireLabels labels;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "width") {
      int w;
      if (!(ls >> w)) throw std::runtime_error("malformed width line");
      c = QuantumCircuit(w);
      have_width = true;
      continue;
    }
    if (!have_width) throw std::runtime_error("circuit must start with a width line");
    int w;
    if (key == "output") {
      if (!(ls >> w)) throw std::runtime_error("malformed output line");
      labels.q_out = w;
    } else if (key == "flag") {
      if (!(ls >> w)) throw std::runtime_error("malformed flag line");
      labels.q_flag = w;
    } else if (key == "proof") {
      while (ls >> w) labels.proof.push_back(w);
    } else if (key == "ancilla") {
      while (ls >> w) labels.ancilla.push_back(w);
    } else {
      c.add(parse_gate(line));
    }
  }
  if (!have_width) throw std::runtime_error("circuit stream has no width line");
  c.set_labels(labels);
  return c;
}

}  // namespace hamlift

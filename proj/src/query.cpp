#include "hamlift/query.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "hamlift/eigensolver.hpp"

namespace hamlift {

void VerifierBundle::validate() const {
  if (m < 1) throw std::invalid_argument("bundle needs m >= 1");
  if (static_cast<int>(verifiers.size()) != m)
    throw std::invalid_argument("bundle has " + std::to_string(verifiers.size()) +
                                " verifiers but m = " + std::to_string(m));
  if (!(c - s > 0.0)) throw std::invalid_argument("completeness must exceed soundness");
  if (c < 0 || c > 1 || s < 0 || s > 1) throw std::invalid_argument("c and s must lie in [0,1]");
  if (!query_validity.empty() && static_cast<int>(query_validity.size()) != m)
    throw std::invalid_argument("query_validity must have one label per query");
  for (int i = 0; i < m; ++i) {
    const auto& v = verifiers[static_cast<std::size_t>(i)];
    const auto& L = v.labels();
    if (L.q_out && *L.q_out != 0)
      throw std::invalid_argument("verifier " + std::to_string(i + 1) + " output must be wire 0");
    std::vector<int> seen(static_cast<std::size_t>(v.width()), 0);
    for (int w : L.proof) ++seen[static_cast<std::size_t>(w)];
    for (int w : L.ancilla) ++seen[static_cast<std::size_t>(w)];
    for (int w = 0; w < v.width(); ++w)
      if (seen[static_cast<std::size_t>(w)] != 1)
        throw std::invalid_argument("verifier " + std::to_string(i + 1) + " wire " + std::to_string(w) +
                                    " must be exactly one of proof or ancilla");
  }
}

std::size_t VerifierBundle::proof_qubits() const {
  std::size_t n = 0;
  for (const auto& v : verifiers) n += v.labels().proof.size();
  return n;
}

DecisionTable DecisionTable::from_accept_set(int m, const std::vector<std::string>& accept_set) {
  if (m < 1 || m > 16) throw std::invalid_argument("decision table needs 1 <= m <= 16");
  DecisionTable d{m, std::vector<bool>(std::size_t{1} << m, false)};
  for (const auto& y : accept_set) {
    if (static_cast<int>(y.size()) != m) throw std::invalid_argument("accept string '" + y + "' has wrong length");
    std::size_t idx = 0;
    for (char ch : y) {
      if (ch != '0' && ch != '1') throw std::invalid_argument("accept string '" + y + "' is not binary");
      idx = (idx << 1) | static_cast<std::size_t>(ch - '0');
    }
    d.accept[idx] = true;
  }
  return d;
}

DecisionTable DecisionTable::all_of(int m) {
  return from_accept_set(m, {std::string(static_cast<std::size_t>(m), '1')});
}

void DecisionTable::validate() const {
  if (m < 1) throw std::invalid_argument("decision table needs m >= 1");
  if (accept.size() != (std::size_t{1} << m))
    throw std::invalid_argument("decision table is not a total function on {0,1}^m");
}

void OutcomeDistribution::validate() const {
  if (p.size() != (std::size_t{1} << m)) throw std::invalid_argument("distribution has wrong size");
  double t = 0.0;
  for (double x : p) {
    if (x < -1e-12) throw std::invalid_argument("negative probability");
    t += x;
  }
  if (std::abs(t - 1.0) > 1e-10) throw std::invalid_argument("probabilities do not sum to 1");
}

OutcomeDistribution product_distribution(const std::vector<double>& accept_probs) {
  const int m = static_cast<int>(accept_probs.size());
  OutcomeDistribution d{m, std::vector<double>(std::size_t{1} << m, 1.0)};
  for (std::size_t y = 0; y < d.p.size(); ++y)
    for (int i = 0; i < m; ++i) {
      bool bit = (y >> (m - 1 - i)) & 1U;
      double q = accept_probs[static_cast<std::size_t>(i)];
      d.p[y] *= bit ? q : 1.0 - q;
    }
  return d;
}

double flag_angle_for(int m) { return std::sqrt(3.0) / (2.0 * m); }

namespace {

bool is_pauli_x(const Mat& u) {
  return std::abs(u(0, 0)) == 0.0 && std::abs(u(1, 1)) == 0.0 && u(0, 1) == cplx(1.0, 0.0) &&
         u(1, 0) == cplx(1.0, 0.0);
}

Gate single(const Mat& u, int w) { return is_pauli_x(u) ? Gate::x(w) : Gate::generic1(u, w); }

Mat sqrt_unitary(const Mat& u) {
  Eigen::ComplexSchur<Mat> schur(u);
  Mat t = schur.matrixT();
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = std::sqrt(t(0, 0));
  d(1, 1) = std::sqrt(t(1, 1));
  Mat q = schur.matrixU();
  return q * d * q.adjoint();
}

Mat pauli_x() {
  Mat x = Mat::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

}  // namespace

void append_multi_controlled(std::vector<Gate>& out, const std::vector<int>& controls, int target,
                             const Mat& u) {
  if (controls.empty()) {
    out.push_back(single(u, target));
    return;
  }
  if (controls.size() == 1) {
    out.push_back(Gate::controlled(controls[0], single(u, target)));
    return;
  }
  const Mat v = sqrt_unitary(u);
  const int last = controls.back();
  std::vector<int> rest(controls.begin(), controls.end() - 1);
  out.push_back(Gate::controlled(last, single(v, target)));
  append_multi_controlled(out, rest, last, pauli_x());
  out.push_back(Gate::controlled(last, single(v.adjoint(), target)));
  append_multi_controlled(out, rest, last, pauli_x());
  append_multi_controlled(out, rest, target, v);
}

std::vector<Gate> decision_gates(const DecisionTable& d, const std::vector<int>& y_wires, int out_wire) {
  d.validate();
  if (static_cast<int>(y_wires.size()) != d.m) throw std::invalid_argument("y wire count mismatch");
  // algebraic normal form: f(y) = XOR over monomials
  std::vector<int> anf(d.accept.size());
  for (std::size_t y = 0; y < anf.size(); ++y) anf[y] = d.accept[y] ? 1 : 0;
  for (int b = 0; b < d.m; ++b)
    for (std::size_t y = 0; y < anf.size(); ++y)
      if (y & (std::size_t{1} << b)) anf[y] ^= anf[y ^ (std::size_t{1} << b)];
  std::vector<Gate> gates;
  for (std::size_t S = 0; S < anf.size(); ++S) {
    if (!anf[S]) continue;
    std::vector<int> controls;
    for (int i = 0; i < d.m; ++i)
      if ((S >> (d.m - 1 - i)) & 1U) controls.push_back(y_wires[static_cast<std::size_t>(i)]);
    append_multi_controlled(gates, controls, out_wire, pauli_x());
  }
  return gates;
}

AugmentedCircuit build_augmented(const VerifierBundle& bundle, const DecisionTable& decision) {
  bundle.validate();
  decision.validate();
  if (decision.m != bundle.m) throw std::invalid_argument("decision table m does not match bundle m");
  int width = 2;
  for (const auto& v : bundle.verifiers) width += v.width();
  if (width > 24) throw std::invalid_argument("augmented circuit exceeds the simulator wire budget");

  AugmentedCircuit aug;
  aug.m = bundle.m;
  aug.flag_angle = flag_angle_for(bundle.m);
  QuantumCircuit c(width);
  WireLabels labels;
  labels.q_out = 0;
  labels.q_flag = 1;
  labels.ancilla = {0, 1};
  int offset = 2;
  std::vector<int> outputs;
  for (const auto& v : bundle.verifiers) {
    ProofBlock blk;
    blk.offset = offset;
    blk.width = v.width();
    blk.output_wire = offset;
    for (int w : v.labels().proof) blk.proof_wires.push_back(offset + w);
    for (int w : v.labels().ancilla) blk.ancilla_wires.push_back(offset + w);
    labels.proof.insert(labels.proof.end(), blk.proof_wires.begin(), blk.proof_wires.end());
    labels.ancilla.insert(labels.ancilla.end(), blk.ancilla_wires.begin(), blk.ancilla_wires.end());
    c.append(v, offset);
    outputs.push_back(offset);
    aug.proof_wire_blocks.push_back(std::move(blk));
    offset += v.width();
  }
  aug.verifier_gates = c.size();
  for (int y : outputs) c.add(Gate::controlled(y, Gate::rotation(aug.flag_angle, 1)));
  for (auto& g : decision_gates(decision, outputs, 0)) c.add(std::move(g));
  c.set_labels(labels);
  aug.circuit = std::move(c);
  return aug;
}

double flag_prob(const OutcomeDistribution& dist) {
  dist.validate();
  const double a = flag_angle_for(dist.m);
  double t = 0.0;
  for (std::size_t y = 0; y < dist.p.size(); ++y) {
    double s = std::sin(a * std::popcount(y));
    t += dist.p[y] * s * s;
  }
  return t;
}

double out_prob(const OutcomeDistribution& dist, const DecisionTable& decision) {
  dist.validate();
  if (decision.m != dist.m) throw std::invalid_argument("m mismatch");
  double t = 0.0;
  for (std::size_t y = 0; y < dist.p.size(); ++y)
    if (decision.accepts(y)) t += dist.p[y];
  return t;
}

double cosine_drop_floor(int m) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  return 3.0 / (8.0 * m * m);
}

CosineDropCheck verify_cosine_drop(int m_max) {
  CosineDropCheck r;
  r.m_max = m_max;
  r.min_slack = INFINITY;
  for (int m = 1; m <= m_max; ++m) {
    const double a = flag_angle_for(m);
    const double floor = cosine_drop_floor(m);
    for (int wx = 0; wx <= m; ++wx)
      for (int wy = wx + 1; wy <= m; ++wy) {
        double cx = std::cos(wx * a), cy = std::cos(wy * a);
        double slack = cx * cx - cy * cy - floor;
        ++r.pairs;
        if (slack < r.min_slack) {
          r.min_slack = slack;
          r.worst_m = m;
        }
      }
  }
  r.passed = r.min_slack >= 0.0;
  return r;
}

StateVector augmented_input(const AugmentedCircuit& aug, const StateVector& proof) {
  std::vector<int> wires;
  for (const auto& b : aug.proof_wire_blocks) wires.insert(wires.end(), b.proof_wires.begin(), b.proof_wires.end());
  if (proof.dim() != (std::size_t{1} << wires.size()))
    throw std::invalid_argument("proof dimension does not match the proof wires");
  const int width = aug.circuit.width();
  Vec v = Vec::Zero(static_cast<Eigen::Index>(std::size_t{1} << width));
  const int np = static_cast<int>(wires.size());
  for (std::size_t p = 0; p < proof.dim(); ++p) {
    std::size_t idx = 0;
    for (int k = 0; k < np; ++k)
      if ((p >> (np - 1 - k)) & 1U) idx |= std::size_t{1} << (width - 1 - wires[static_cast<std::size_t>(k)]);
    v[static_cast<Eigen::Index>(idx)] = proof[p];
  }
  return StateVector(std::move(v));
}

OutcomeDistribution outcome_distribution(const AugmentedCircuit& aug, const StateVector& proof) {
  const int width = aug.circuit.width();
  Vec a = augmented_input(aug, proof).vec();
  for (std::size_t k = 0; k < aug.verifier_gates; ++k) apply_gate(a, width, aug.circuit.gates()[k]);
  OutcomeDistribution d{aug.m, std::vector<double>(std::size_t{1} << aug.m, 0.0)};
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double w = std::norm(a[i]);
    if (w == 0.0) continue;
    std::size_t y = 0;
    for (const auto& b : aug.proof_wire_blocks)
      y = (y << 1) | ((static_cast<std::size_t>(i) >> (width - 1 - b.output_wire)) & 1U);
    d.p[y] += w;
  }
  return d;
}

namespace {

StateVector verifier_input(const QuantumCircuit& v, const StateVector& proof) {
  const auto& proof_wires = v.labels().proof;
  if (proof.dim() != (std::size_t{1} << proof_wires.size()))
    throw std::invalid_argument("proof dimension does not match verifier proof wires");
  const int width = v.width();
  const int np = static_cast<int>(proof_wires.size());
  Vec in = Vec::Zero(static_cast<Eigen::Index>(std::size_t{1} << width));
  for (std::size_t p = 0; p < proof.dim(); ++p) {
    std::size_t idx = 0;
    for (int k = 0; k < np; ++k)
      if ((p >> (np - 1 - k)) & 1U) idx |= std::size_t{1} << (width - 1 - proof_wires[static_cast<std::size_t>(k)]);
    in[static_cast<Eigen::Index>(idx)] = proof[p];
  }
  return StateVector(std::move(in));
}

}  // namespace

double acceptance_probability(const QuantumCircuit& verifier, const StateVector& proof) {
  return prob_one(simulate(verifier, verifier_input(verifier, proof)), 0);
}

Mat acceptance_operator(const QuantumCircuit& verifier) {
  const std::size_t np = verifier.labels().proof.size();
  const std::size_t pd = std::size_t{1} << np;
  const int width = verifier.width();
  const std::size_t half = std::size_t{1} << (width - 1);
  Mat A(static_cast<Eigen::Index>(half), static_cast<Eigen::Index>(pd));
  for (std::size_t j = 0; j < pd; ++j) {
    StateVector out = simulate(verifier, verifier_input(verifier, StateVector::basis(pd, j)));
    // rows with the output wire (most significant bit) equal to 1
    A.col(static_cast<Eigen::Index>(j)) = out.vec().tail(static_cast<Eigen::Index>(half));
  }
  Mat q = A.adjoint() * A;
  return 0.5 * (q + q.adjoint());
}

OptimalProof optimal_proof(const QuantumCircuit& verifier) {
  DenseEigen e = diagonalize(acceptance_operator(verifier));
  const Eigen::Index k = e.values.size() - 1;
  return {e.values[k], StateVector(Vec(e.vectors.col(k)))};
}

ExchangeAudit exchange_bound_audit(const VerifierBundle& bundle, const StateVector& joint_proof, int i,
                                   const StateVector& locally_better_proof) {
  bundle.validate();
  if (i < 0 || i >= bundle.m) throw std::out_of_range("query index out of range");
  const AugmentedCircuit aug = build_augmented(bundle, DecisionTable::from_accept_set(bundle.m, {}));
  const int width = aug.circuit.width();
  ExchangeAudit r;
  r.m = bundle.m;
  r.query = i;

  StateVector joint_out = simulate(aug.circuit, augmented_input(aug, joint_proof));
  r.joint_flag_zero = 1.0 - prob_one(joint_out.vec(), width, 1);
  r.joint_accept = prob_one(joint_out.vec(), width, aug.proof_wire_blocks[static_cast<std::size_t>(i)].output_wire);
  r.better_accept = acceptance_probability(bundle.verifiers[static_cast<std::size_t>(i)], locally_better_proof);
  r.epsilon = r.better_accept - r.joint_accept;
  if (r.epsilon < -1e-10)
    throw std::domain_error("the locally better proof is accepted less often than the joint proof");

  StateVector product = StateVector::basis(1, 0);
  for (const auto& v : bundle.verifiers) product = kron(product, optimal_proof(v).proof);
  StateVector prod_out = simulate(aug.circuit, augmented_input(aug, product));
  r.product_flag_zero = 1.0 - prob_one(prod_out.vec(), width, 1);

  const double eps = std::max(r.epsilon, 0.0);
  r.required_gain = cosine_drop_floor(bundle.m) * eps;
  r.margin = r.joint_flag_zero - r.product_flag_zero - r.required_gain;
  r.empirical_constant = eps > 1e-12 ? (r.joint_flag_zero - r.product_flag_zero) / eps : 0.0;
  r.holds = r.margin >= -1e-12;
  return r;
}

void write_audit(std::ostream& os, const ExchangeAudit& a) {
  os << std::setprecision(17) << "m = " << a.m << "\nquery = " << a.query + 1 << "\nepsilon = " << a.epsilon
     << "\njoint_accept = " << a.joint_accept << "\nbetter_accept = " << a.better_accept
     << "\njoint_flag_zero = " << a.joint_flag_zero << "\nproduct_flag_zero = " << a.product_flag_zero
     << "\nrequired_gain = " << a.required_gain << "\nmargin = " << a.margin
     << "\nempirical_constant = " << a.empirical_constant << "\nholds = " << (a.holds ? "true" : "false")
     << '\n';
}

}  // namespace hamlift

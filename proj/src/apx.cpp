#include "hamlift/apx.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "hamlift/eigensolver.hpp"

namespace hamlift {

double alpha_floor(double m2_norm, double gap) {
  if (!(gap > 0.0)) throw std::invalid_argument("spectral gap must be positive");
  if (!(m2_norm > 0.0)) throw std::invalid_argument("m2 has zero norm; the floor is unbounded");
  return std::max({4.0 * m2_norm / gap, gap / (3.0 * m2_norm * m2_norm), 1.0});
}

double choose_alpha(const CircuitHamiltonian& ch, double margin) {
  if (margin < 1.0) throw std::invalid_argument("alpha margin must be at least 1");
  const Spectrum sp = spectral_gap(ch.hw);
  return margin * alpha_floor(spectral_norm(ch.m2), sp.gap);
}

double epsilon_budget(double alpha, double m2_norm, double gap, int m, double g) {
  return (1.0 / alpha) * (1.0 / alpha + 12.0 * m2_norm * m2_norm / gap) * (8.0 * m * m / (3.0 * g));
}

double epsilon_budget(const LiftedApxInstance& inst) {
  return epsilon_budget(inst.alpha, inst.meta.m2_norm, inst.meta.gap, inst.meta.m, inst.meta.g_value);
}

Thresholds thresholds(double alpha, double m2_norm, double gap, const ApxParams& p, double g) {
  Thresholds t;
  t.epsilon = epsilon_budget(alpha, m2_norm, gap, p.m, g);
  const double x = std::max(1.0 - p.c + t.epsilon, p.s);
  const double shift = 12.0 * m2_norm / (alpha * gap);
  t.a = g * p.m * x + shift;
  t.b = g * (1.0 - p.m * x) - shift;
  return t;
}

SparseHermitian lifted_hamiltonian(const CircuitHamiltonian& ch, double alpha) {
  return ch.hw.scaled(alpha) + ch.m2;
}

LiftedApxInstance assemble(const CircuitHamiltonian& ch, double alpha, const ApxParams& params,
                           const std::optional<StructureDescriptor>& structure) {
  if (structure && !conforms(ch.m2, ch.hw, *structure))
    throw std::invalid_argument("m2 does not conform to hw under the declared structure");
  LiftedApxInstance inst;
  inst.meta.m = params.m;
  inst.meta.c = params.c;
  inst.meta.s = params.s;
  inst.meta.g_value = ch.g_value;
  inst.meta.T = ch.T;
  inst.meta.gap = spectral_gap(ch.hw).gap;
  inst.meta.m2_norm = spectral_norm(ch.m2);
  const double floor = alpha_floor(inst.meta.m2_norm, inst.meta.gap);
  if (!(alpha > floor))
    throw std::invalid_argument("alpha " + std::to_string(alpha) + " does not exceed the floor " +
                                std::to_string(floor));
  const Thresholds t = thresholds(alpha, inst.meta.m2_norm, inst.meta.gap, params, ch.g_value);
  if (!(t.b - t.a > 0.0))
    throw NoPromiseGap("no promise gap at these parameters (a - b = " + std::to_string(t.a - t.b) + ")",
                       t.a - t.b);
  inst.alpha = alpha;
  inst.delta = 1.0 / (alpha * alpha);
  inst.epsilon = t.epsilon;
  inst.a = t.a;
  inst.b = t.b;
  inst.hw = ch.hw;
  inst.m2 = ch.m2;
  inst.h = lifted_hamiltonian(ch, alpha);
  inst.observable = ch.m1;
  return inst;
}

WindowAnalysis analyse_window(const SparseHermitian& h, const SparseHermitian& observable, double delta,
                              const SparseHermitian* hw) {
  const DenseEigen e = diagonalize(h);
  const Eigen::Index n = e.values.size();
  const double scale = std::max(1.0, std::max(std::abs(e.values[0]), std::abs(e.values[n - 1])));
  const double allowance = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  WindowAnalysis w;
  w.lambda_min = e.values[0];
  w.window_top = w.lambda_min + delta + allowance;
  Eigen::Index k = 0;
  while (k < n && e.values[k] <= w.window_top) ++k;
  if (k == 0) throw std::logic_error("low-energy window is empty");
  w.window_size = static_cast<std::size_t>(k);
  const Mat V = e.vectors.leftCols(k);
  Mat A = V.adjoint() * (observable.matrix() * V);
  A = 0.5 * (A + A.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> ae(A);
  w.min_observable = ae.eigenvalues()[0];
  w.max_observable = ae.eigenvalues()[k - 1];
  if (hw) {
    const DenseEigen he = diagonalize(*hw);
    Eigen::Index nk = 0;
    while (nk < he.values.size() && he.values[nk] < 1e-9) ++nk;
    const Mat Q = he.vectors.leftCols(nk);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double inside = (Q.adjoint() * V.col(j)).squaredNorm();
      w.max_trace_distance = std::max(w.max_trace_distance, 2.0 * std::sqrt(std::max(0.0, 1.0 - inside)));
    }
  }
  return w;
}

ThresholdVerdict verify_thresholds(const LiftedApxInstance& inst, Truth truth) {
  ThresholdVerdict v;
  v.truth = truth;
  v.a = inst.a;
  v.b = inst.b;
  v.window = analyse_window(inst.h, inst.observable, inst.delta, &inst.hw);
  v.trace_bound = 12.0 * inst.meta.m2_norm / (inst.alpha * inst.meta.gap);
  if (truth == Truth::Yes) {
    v.worst_observable = v.window.max_observable;
    v.threshold_ok = v.worst_observable <= inst.a;
  } else {
    v.worst_observable = v.window.min_observable;
    v.threshold_ok = v.worst_observable >= inst.b;
  }
  v.trace_ok = v.window.max_trace_distance <= v.trace_bound;
  return v;
}

double ProjectionReport::min_slack() const {
  return std::min({energy_lower_slack, energy_upper_slack, overlap - overlap_floor,
                   perturbed_ceiling - perturbed_energy});
}

ProjectionReport projection_bounds(const ProjectionProblem& p, const StateVector& psi, double delta) {
  if (delta < 0) throw std::invalid_argument("delta must be non-negative");
  ProjectionReport r;
  r.J = p.J;
  r.K = p.K > 0.0 ? p.K : spectral_norm(p.h2);
  r.delta = delta;
  if (!(r.J > 2.0 * r.K)) throw std::invalid_argument("projection bounds need J > 2K");

  const DenseEigen e1 = diagonalize(p.h1);
  const double ztol = 1e-9 * std::max(1.0, r.J);
  Eigen::Index ns = 0;
  for (Eigen::Index i = 0; i < e1.values.size(); ++i) {
    const double lam = e1.values[i];
    if (std::abs(lam) <= ztol) ++ns;
    else if (lam < r.J - ztol) throw std::invalid_argument("h1 has an eigenvalue strictly between 0 and J");
  }
  if (ns == 0) throw std::invalid_argument("h1 has no zero eigenspace");
  const Mat S = e1.vectors.leftCols(ns);

  const SparseHermitian h = p.h1 + p.h2;
  r.lambda_min = lmin_dense(h);
  const double energy = expectation(h, psi);
  if (energy > r.lambda_min + delta + 1e-10 * std::max(1.0, std::abs(r.lambda_min)))
    throw std::invalid_argument("state is not within delta of the ground energy");

  Mat h2s = S.adjoint() * (p.h2.matrix() * S);
  h2s = 0.5 * (h2s + h2s.adjoint()).eval();
  r.lambda_s = Eigen::SelfAdjointEigenSolver<Mat>(h2s, Eigen::EigenvaluesOnly).eigenvalues()[0];

  const double gapJ = r.J - 2.0 * r.K;
  r.near_boundary = gapJ < 1e-4 * r.J;
  r.energy_lower_slack = r.lambda_min - (r.lambda_s - r.K * r.K / gapJ);
  r.energy_upper_slack = r.lambda_s - r.lambda_min;
  const double dev = (r.K + std::sqrt(r.K * r.K + delta * gapJ)) / gapJ;
  r.overlap_floor = 1.0 - dev * dev;

  Vec proj = S * (S.adjoint() * psi.vec());
  const double pn = proj.norm();
  if (pn == 0.0) {
    r.overlap = 0.0;
    r.perturbed_energy = std::numeric_limits<double>::infinity();
  } else {
    StateVector psi_p(proj / pn);
    r.overlap = std::norm(psi.inner(psi_p));
    r.perturbed_energy = expectation(h, psi_p);
  }
  r.perturbed_ceiling = r.lambda_min + delta + 2.0 * r.K * dev;

  const double tol = 1e-10 * std::max(1.0, r.J);
  r.energy_ok = r.energy_lower_slack >= -tol && r.energy_upper_slack >= -tol;
  r.deviation_ok = r.overlap >= r.overlap_floor - 1e-10;
  r.perturbed_ok = r.perturbed_energy <= r.perturbed_ceiling + tol;
  return r;
}

UnionBoundReport union_bound_check(const std::vector<SparseHermitian>& projectors, const StateVector& state) {
  for (std::size_t i = 0; i < projectors.size(); ++i)
    for (std::size_t j = i + 1; j < projectors.size(); ++j) {
      SpMat c = projectors[i].matrix() * projectors[j].matrix() - projectors[j].matrix() * projectors[i].matrix();
      double worst = 0.0;
      for (Eigen::Index r = 0; r < c.outerSize(); ++r)
        for (SpMat::InnerIterator it(c, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
      if (worst > 1e-10) throw NonCommutingError(i, j);
    }
  UnionBoundReport r;
  Vec v = state.vec();
  for (const auto& p : projectors) {
    v = p.apply(v);
    r.rhs += 1.0 - expectation(p, state);
  }
  r.lhs = 1.0 - v.squaredNorm();
  r.holds = r.lhs <= r.rhs + 1e-12;
  return r;
}

StateVector proof_history_state(const AugmentedCircuit& aug, const StateVector& proof) {
  return history_state(aug.circuit, augmented_input(aug, proof), aug.circuit.labels().ancilla).vector;
}

SuboptimalityCase suboptimality_check(const VerifierBundle& bundle, const AugmentedCircuit& aug,
                                      const LiftedApxInstance& inst, const StateVector& proof,
                                      std::optional<double> lambda_min) {
  SuboptimalityCase c;
  StateVector out = simulate(aug.circuit, augmented_input(aug, proof));
  for (int i = 0; i < bundle.m; ++i) {
    const double best = optimal_proof(bundle.verifiers[static_cast<std::size_t>(i)]).probability;
    const double got = prob_one(out, aug.proof_wire_blocks[static_cast<std::size_t>(i)].output_wire);
    c.epsilon = std::max(c.epsilon, best - got);
  }
  c.energy = expectation(inst.h, proof_history_state(aug, proof));
  c.lambda_min = lambda_min ? *lambda_min : lmin_dense(inst.h);
  const int m = inst.meta.m;
  c.required = c.lambda_min + 3.0 * inst.meta.g_value * c.epsilon / (8.0 * m * m);
  c.holds = c.energy >= c.required - 1e-9;
  return c;
}

Decision decide_via_oracle(const LiftedApxInstance& inst, GapRegime regime) {
  Decision d;
  const double lam = lmin_dense(inst.h);
  const int n = static_cast<int>(std::ceil(std::log2(static_cast<double>(inst.h.dim()))));
  d.eta = regime == GapRegime::Poly ? inst.delta / 2.0 : inst.delta * std::ldexp(1.0, -n);
  double lo = 0.0, hi = inst.meta.m2_norm;
  d.search_range = hi - lo;
  d.predicted_queries = static_cast<std::size_t>(std::ceil(std::log2(d.search_range / d.eta))) + 1;
  while (hi - lo > d.eta) {
    const double mid = 0.5 * (lo + hi);
    const bool below = lam <= mid;
    d.log.push_back({mid, below});
    (below ? hi : lo) = mid;
  }
  d.lambda_estimate = lo;
  const WindowAnalysis w = analyse_window(inst.h, inst.observable, inst.delta);
  d.window_min_observable = w.min_observable;
  d.log.push_back({lo + inst.delta, d.window_min_observable <= inst.a});
  if (d.window_min_observable <= inst.a) d.verdict = Verdict::Yes;
  else if (d.window_min_observable >= inst.b) d.verdict = Verdict::No;
  else d.verdict = Verdict::Invalid;
  return d;
}

QuantumCircuit toy_verifier(bool yes, double zeta) {
  QuantumCircuit v(2);
  if (yes) v.add(Gate::cnot(1, 0));
  v.add(Gate::rotation(zeta, 0));
  WireLabels l;
  l.q_out = 0;
  l.proof = {1};
  l.ancilla = {0};
  v.set_labels(l);
  return v;
}

VerifierBundle toy_bundle(const std::vector<bool>& yes, double zeta) {
  VerifierBundle b;
  b.m = static_cast<int>(yes.size());
  b.c = std::cos(zeta) * std::cos(zeta);
  b.s = std::sin(zeta) * std::sin(zeta);
  for (bool y : yes) {
    b.verifiers.push_back(toy_verifier(y, zeta));
    b.query_validity.push_back(y ? Validity::Yes : Validity::No);
  }
  b.validate();
  return b;
}

ToyApx build_toy_apx(Truth truth, double zeta, double alpha_margin) {
  ToyApx t;
  t.bundle = toy_bundle({true, truth == Truth::Yes}, zeta);
  t.decision = DecisionTable::all_of(2);
  t.aug = build_augmented(t.bundle, t.decision);
  t.ch = build_hw(t.aug.circuit, t.aug.circuit.labels().ancilla);
  const double alpha = choose_alpha(t.ch, alpha_margin);
  t.inst = assemble(t.ch, alpha, {t.bundle.m, t.bundle.c, t.bundle.s}, StructureDescriptor::k_local(3));
  return t;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "invalid";
  }
}

void write_verdict(std::ostream& os, const ThresholdVerdict& v) {
  os << std::setprecision(17) << "truth = " << (v.truth == Truth::Yes ? "yes" : "no") << "\na = " << v.a
     << "\nb = " << v.b << "\nlambda_min = " << v.window.lambda_min << "\nwindow_size = " << v.window.window_size
     << "\nworst_observable = " << v.worst_observable << "\nmax_trace_distance = " << v.window.max_trace_distance
     << "\ntrace_bound = " << v.trace_bound << "\nthreshold_ok = " << (v.threshold_ok ? "true" : "false")
     << "\ntrace_ok = " << (v.trace_ok ? "true" : "false") << '\n';
}

}  // namespace hamlift

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "hamlift/apx.hpp"
#include "hamlift/eigensolver.hpp"
#include "hamlift/gscon.hpp"
#include "hamlift/history.hpp"
#include "suites.hpp"

namespace hamlift::harness::detail {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

namespace {

// ---------------------------------------------------------------- validation

void require_keys(const ExperimentConfig& c, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : c.params)
    if (!allowed.count(k)) throw ConfigError(k, std::string("unknown key for suite ") + to_string(c.suite));
}

long long int_in(const ExperimentConfig& c, const std::string& key, long long fallback, long long lo, long long hi) {
  const long long v = c.get_int(key, fallback);
  if (v < lo || v > hi) throw ConfigError(key, "must lie in " + std::to_string(lo) + ".." + std::to_string(hi));
  return v;
}

std::string one_of(const ExperimentConfig& c, const std::string& key, const std::string& fallback,
                   const std::set<std::string>& options) {
  const std::string v = c.get_string(key, fallback);
  if (!options.count(v)) {
    std::string list;
    for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
    throw ConfigError(key, "must be one of " + list);
  }
  return v;
}

Truth truth_of(const std::string& s) { return s == "yes" ? Truth::Yes : Truth::No; }
const char* truth_name(Truth t) { return t == Truth::Yes ? "yes" : "no"; }

std::vector<Truth> truths_of(const std::string& s) {
  if (s == "both") return {Truth::Yes, Truth::No};
  return {truth_of(s)};
}

const std::vector<int> kDefaultGsconN = {3, 4, 5, 6};
const std::vector<int> kDefaultAuditN = {3, 4, 5};

void check_gscon_family_params(const ExperimentConfig& c, const std::vector<int>& ns) {
  for (int n : ns)
    if (n < 3 || n > 6) throw ConfigError("n", "chain length must lie in 3..6");
  const double eps = c.get_double("epsilon_verifier", 1e-4);
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("epsilon_verifier", "must lie in (0, 1)");
  c.get_double("f_threshold", 0.0);
  if (c.has("penalty_weight")) {
    const double pw = c.get_double("penalty_weight", 0.0);
    for (int n : ns) {
      const TIStandardFamily f = surrogate_family(Truth::No, n, eps);
      const double floor = 2.0 * spectral_norm(chain_hamiltonian(f.local_term, n));
      if (!(pw > floor)) throw ConfigError("penalty_weight", "must exceed 2||H'|| = " + fmt(floor) + " at N = " + std::to_string(n));
    }
  }
  for (int n : ns) {
    try {
      build_lifted(surrogate_family(Truth::No, n, eps, c.get_double("f_threshold", 0.0)));
    } catch (const std::exception& e) {
      throw ConfigError("epsilon_verifier", e.what());
    }
  }
}

}  // namespace

void validate_params(const ExperimentConfig& c) {
  switch (c.suite) {
    case Suite::MappingVerify:
      require_keys(c, {"circuits", "max_work_qubits", "max_gates", "kernel_vectors"});
      int_in(c, "circuits", 50, 1, 100000);
      int_in(c, "max_work_qubits", 6, 1, 8);
      int_in(c, "max_gates", 8, 1, 16);
      int_in(c, "kernel_vectors", 20, 0, 10000);
      break;
    case Suite::Bounds: {
      require_keys(c, {"parts", "flag_m_max", "product_proofs", "entangled_proofs", "drop_m_max", "exchange_trials",
                       "exchange_m_max", "projection_trials", "projection_max_qubits", "union_trials", "union_m_max",
                       "union_max_qubits"});
      for (const auto& p : c.get_list("parts", {"all"}))
        if (!std::set<std::string>{"all", "flag", "drop", "exchange", "projection", "union"}.count(p))
          throw ConfigError("parts", "unknown part '" + p + "'");
      int_in(c, "flag_m_max", 4, 1, 4);
      int_in(c, "product_proofs", 100, 0, 100000);
      int_in(c, "entangled_proofs", 50, 0, 100000);
      int_in(c, "drop_m_max", 64, 1, 1024);
      int_in(c, "exchange_trials", 1000, 0, 1000000);
      int_in(c, "exchange_m_max", 3, 1, 4);
      int_in(c, "projection_trials", 200, 0, 100000);
      int_in(c, "projection_max_qubits", 5, 1, 6);
      int_in(c, "union_trials", 1000, 0, 1000000);
      int_in(c, "union_m_max", 5, 1, 8);
      int_in(c, "union_max_qubits", 5, 1, 6);
      break;
    }
    case Suite::ApxsimLift: {
      require_keys(c, {"stage", "truth", "zeta", "alpha_margin", "suboptimal_cases", "regime", "bundle"});
      one_of(c, "stage", "all", {"all", "lift", "decider"});
      one_of(c, "truth", "both", {"both", "yes", "no"});
      one_of(c, "regime", "both", {"both", "poly", "exp"});
      const double zeta = c.get_double("zeta", 0.04);
      if (!(zeta > 0.0 && zeta < M_PI / 4)) throw ConfigError("zeta", "must lie in (0, pi/4)");
      const double margin = c.get_double("alpha_margin", 1e4);
      if (!(margin >= 1.0)) throw ConfigError("alpha_margin", "must be at least 1");
      int_in(c, "suboptimal_cases", 20, 0, 10000);
      if (c.has("bundle")) {
        if (c.has("truth")) throw ConfigError("truth", "is derived from the bundle validity labels");
        const BundleFile f = load_bundle(c.get_string("bundle", ""));
        if (f.bundle.query_validity.size() != static_cast<std::size_t>(f.bundle.m))
          throw ConfigError("bundle.validity", "needs one label per query");
        for (auto v : f.bundle.query_validity)
          if (v == Validity::Invalid) throw ConfigError("bundle.validity", "invalid queries have no defined truth");
      }
      break;
    }
    case Suite::GsconLift: {
      require_keys(c, {"truth", "n", "b", "schedule", "penalty_weight", "epsilon_verifier", "f_threshold", "trace_out"});
      const std::string truth = one_of(c, "truth", "yes", {"yes", "no"});
      const std::string sched = one_of(c, "schedule", "honest", {"honest", "cheat", "random"});
      const auto ns = c.get_int_list("n", kDefaultGsconN);
      check_gscon_family_params(c, ns);
      const int b = static_cast<int>(c.get_int("b", 2));
      for (int n : ns)
        if (b < 2 || b > n - 1) throw ConfigError("b", "must lie in 2..N-1 (N = " + std::to_string(n) + ")");
      if (c.has("trace_out") && ns.size() != 1) throw ConfigError("trace_out", "needs a single chain length");
      (void)truth;
      (void)sched;
      break;
    }
    case Suite::Traversal:
      require_keys(c, {"b_max", "orth_b_max"});
      int_in(c, "b_max", 5, 1, 7);
      int_in(c, "orth_b_max", 4, 1, 5);
      break;
    case Suite::Audit: {
      require_keys(c, {"n", "b", "random_schedules", "penalty_weight", "epsilon_verifier", "f_threshold"});
      const auto ns = c.get_int_list("n", kDefaultAuditN);
      check_gscon_family_params(c, ns);
      if (c.has("b"))
        for (int b : c.get_int_list("b", {}))
          for (int n : ns)
            if (b < 2 || b > n - 1) throw ConfigError("b", "must lie in 2..N-1 (N = " + std::to_string(n) + ")");
      int_in(c, "random_schedules", 100, 0, 100000);
      break;
    }
  }
}

namespace {

Rng suite_rng(const ExperimentConfig& c) { return Rng(c.seed, 1 + static_cast<std::uint64_t>(c.suite)); }

StateVector random_valid_input(Rng& rng, int width, const std::vector<int>& pinned) {
  const std::size_t dim = std::size_t{1} << width;
  Vec v = random_vector(rng, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (int w : pinned)
      if ((i >> (width - 1 - w)) & 1U) v[static_cast<Eigen::Index>(i)] = 0.0;
  return StateVector(v / v.norm());
}

// ------------------------------------------------------------ mapping-verify

struct MappingTrial {
  double sim_error = 0.0;
  double history_clock_error = 0.0;
  double kernel_clock_error = 0.0;
  double hw_residual = 0.0;
  double sandwich_defect = 0.0;
  bool kernel_dim_ok = false;
  int width = 0, T = 0;
};

}  // namespace

void run_mapping_verify(const ExperimentConfig& c, ResultRecord& r) {
  const int circuits = static_cast<int>(c.get_int("circuits", 50));
  const int max_q = static_cast<int>(c.get_int("max_work_qubits", 6));
  const int max_g = static_cast<int>(c.get_int("max_gates", 8));
  const int nk = static_cast<int>(c.get_int("kernel_vectors", 20));
  const double tol = tol_or(c, 1e-10);
  const double tol_sandwich = tol_or(c, 1e-12);
  const Rng base = suite_rng(c);

  std::vector<MappingTrial> trials(static_cast<std::size_t>(circuits));
  parallel_for(trials.size(), c.threads, [&](std::size_t k) {
    Rng rng = base.split(k);
    MappingTrial& t = trials[k];
    t.width = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_q)));
    t.T = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_g)));
    const QuantumCircuit circ = random_circuit(rng, t.width, t.T);
    std::vector<int> pinned;
    for (int w = 0; w < t.width; ++w)
      if (rng.uniform() < 0.5) pinned.push_back(w);
    const CircuitHamiltonian ch = build_hw(circ, pinned);
    const StateVector input = random_valid_input(rng, t.width, pinned);
    const HistoryState hs = history_state(circ, input, pinned);

    for (int i = 1; i <= 2; ++i) {
      const int wire = t.width == 1 ? 0 : i - 1;
      const double lhs = output_zero_probability(circ, input, wire);
      const double rhs = postselected_expectation(i == 1 ? ch.m1 : ch.m2, ch.p_t, hs.vector);
      t.sim_error = std::max(t.sim_error, std::abs(lhs - rhs));
    }
    const double g = 1.0 / (t.T + 1);
    t.history_clock_error = std::abs(expectation(ch.p_t, hs.vector) - g);
    t.hw_residual = ch.hw.apply(hs.vector.vec()).norm();

    const DenseEigen e = diagonalize(ch.hw);
    Eigen::Index kd = 0;
    while (kd < e.values.size() && std::abs(e.values[kd]) < 1e-9) ++kd;
    t.kernel_dim_ok = kd == (Eigen::Index{1} << (t.width - static_cast<int>(pinned.size())));
    const Mat K = e.vectors.leftCols(kd);
    for (int j = 0; j < nk && kd > 0; ++j) {
      Vec coeff = random_vector(rng, static_cast<std::size_t>(kd));
      Vec psi = K * coeff;
      StateVector s(psi / psi.norm());
      t.kernel_clock_error = std::max(t.kernel_clock_error, std::abs(expectation(ch.p_t, s) - g));
      t.hw_residual = std::max(t.hw_residual, ch.hw.apply(s.vec()).norm());
    }
    t.sandwich_defect = std::max((ch.m1 - ch.m1.sandwich(ch.p_t)).max_abs(), (ch.m2 - ch.m2.sandwich(ch.p_t)).max_abs());
  });

  MappingTrial worst;
  bool dims_ok = true;
  for (const auto& t : trials) {
    worst.sim_error = std::max(worst.sim_error, t.sim_error);
    worst.history_clock_error = std::max(worst.history_clock_error, t.history_clock_error);
    worst.kernel_clock_error = std::max(worst.kernel_clock_error, t.kernel_clock_error);
    worst.hw_residual = std::max(worst.hw_residual, t.hw_residual);
    worst.sandwich_defect = std::max(worst.sandwich_defect, t.sandwich_defect);
    dims_ok = dims_ok && t.kernel_dim_ok;
  }
  const std::string n = std::to_string(circuits) + " circuits";
  r.check("simulation-identity", worst.sim_error <= tol, n + ", max error " + fmt(worst.sim_error));
  r.check("clock-weight-history", worst.history_clock_error <= tol, "max error " + fmt(worst.history_clock_error));
  r.check("clock-weight-kernel", worst.kernel_clock_error <= tol,
          std::to_string(nk) + " kernel vectors per circuit, max error " + fmt(worst.kernel_clock_error));
  r.check("kernel-residual", worst.hw_residual <= tol, "max ||hw psi|| " + fmt(worst.hw_residual));
  r.check("measurement-sandwich", worst.sandwich_defect <= tol_sandwich, "max entry defect " + fmt(worst.sandwich_defect));
  r.check("kernel-dimension", dims_ok, "kernel dimension equals 2^(unpinned wires)");
  r.quantity("max_simulation_error", worst.sim_error, "simulated");
  r.quantity("max_clock_weight_error", std::max(worst.history_clock_error, worst.kernel_clock_error), "simulated");
  r.quantity("max_hw_residual", worst.hw_residual, "simulated");
  r.quantity("max_sandwich_defect", worst.sandwich_defect, "simulated");
}

// -------------------------------------------------------------------- bounds

namespace {

DecisionTable random_decision(Rng& rng, int m) {
  DecisionTable d{m, std::vector<bool>(std::size_t{1} << m)};
  for (std::size_t y = 0; y < d.accept.size(); ++y) d.accept[y] = rng.uniform() < 0.5;
  return d;
}

struct FlagTrial {
  double flag_error = 0.0;
  double out_error = 0.0;
};

void bounds_flag(const ExperimentConfig& c, ResultRecord& r, const Rng& base) {
  const int m_max = static_cast<int>(c.get_int("flag_m_max", 4));
  const int np = static_cast<int>(c.get_int("product_proofs", 100));
  const int ne = static_cast<int>(c.get_int("entangled_proofs", 50));
  const double tol = tol_or(c, 1e-9);
  double worst_flag = 0.0, worst_out = 0.0;
  std::size_t total = 0;
  for (int m = 1; m <= m_max; ++m) {
    std::vector<FlagTrial> trials(static_cast<std::size_t>(np + ne));
    parallel_for(trials.size(), c.threads, [&](std::size_t k) {
      Rng rng = base.split(1000 + static_cast<std::uint64_t>(m)).split(k);
      const VerifierBundle bundle = random_bundle(rng, m);
      const DecisionTable dec = random_decision(rng, m);
      const AugmentedCircuit aug = build_augmented(bundle, dec);
      OutcomeDistribution dist;
      StateVector proof;
      if (static_cast<int>(k) < np) {
        std::vector<double> acc;
        proof = StateVector::basis(1, 0);
        for (const auto& v : bundle.verifiers) {
          StateVector p = random_state(rng, std::size_t{1} << v.labels().proof.size());
          acc.push_back(acceptance_probability(v, p));
          proof = kron(proof, p);
        }
        dist = product_distribution(acc);
      } else {
        proof = random_state(rng, std::size_t{1} << bundle.proof_qubits());
        dist = povm_distribution(bundle, proof);
      }
      const StateVector out = simulate(aug.circuit, augmented_input(aug, proof));
      trials[k].flag_error = std::abs(prob_one(out, 1) - flag_prob(dist));
      trials[k].out_error = std::abs(prob_one(out, 0) - out_prob(dist, dec));
    });
    for (const auto& t : trials) {
      worst_flag = std::max(worst_flag, t.flag_error);
      worst_out = std::max(worst_out, t.out_error);
    }
    total += trials.size();
  }
  const std::string n = std::to_string(total) + " proofs over m <= " + std::to_string(m_max);
  r.check("flag-formula", worst_flag <= tol, n + ", max error " + fmt(worst_flag));
  r.check("out-formula", worst_out <= tol, n + ", max error " + fmt(worst_out));
  bool domain_ok = true;
  for (int m = 1; m <= 64; ++m) domain_ok = domain_ok && m * flag_angle_for(m) < M_PI / 2;
  r.check("flag-angle-domain", domain_ok, "m * sqrt(3)/(2m) < pi/2 for m <= 64");
  r.quantity("flag_formula_max_error", worst_flag, "simulated");
  r.quantity("out_formula_max_error", worst_out, "simulated");
}

void bounds_drop(const ExperimentConfig& c, ResultRecord& r) {
  const int m_max = static_cast<int>(c.get_int("drop_m_max", 64));
  const CosineDropCheck d = verify_cosine_drop(m_max);
  r.check("cosine-drop", d.passed,
          std::to_string(d.pairs) + " weight pairs, min slack " + fmt(d.min_slack) + " at m = " + std::to_string(d.worst_m));
  r.check("cosine-drop-floor-m2", cosine_drop_floor(2) == 0.09375, "3/(8*2^2) = " + fmt(cosine_drop_floor(2)));
  r.quantity("cosine_drop_min_slack", d.min_slack, "exhaustive");
  r.quantity("cosine_drop_floor_m2", cosine_drop_floor(2), "closed-form");
}

void bounds_exchange(const ExperimentConfig& c, ResultRecord& r, const Rng& base) {
  const int trials_n = static_cast<int>(c.get_int("exchange_trials", 1000));
  const int m_max = static_cast<int>(c.get_int("exchange_m_max", 3));
  std::vector<ExchangeAudit> audits(static_cast<std::size_t>(trials_n));
  parallel_for(audits.size(), c.threads, [&](std::size_t k) {
    Rng rng = base.split(2000).split(k);
    const int m = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(m_max)));
    const VerifierBundle bundle = random_bundle(rng, m);
    StateVector proof;
    if (rng.uniform() < 0.5) {
      proof = StateVector::basis(1, 0);
      for (const auto& v : bundle.verifiers) proof = kron(proof, random_state(rng, std::size_t{1} << v.labels().proof.size()));
    } else {
      proof = random_state(rng, std::size_t{1} << bundle.proof_qubits());
    }
    const int i = static_cast<int>(rng.below(static_cast<std::size_t>(m)));
    audits[k] = exchange_bound_audit(bundle, proof, i, optimal_proof(bundle.verifiers[static_cast<std::size_t>(i)]).proof);
  });
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double min_const = std::numeric_limits<double>::infinity();
  for (const auto& a : audits) {
    violations += !a.holds;
    min_margin = std::min(min_margin, a.margin);
    if (a.epsilon > 1e-6) min_const = std::min(min_const, a.empirical_constant);
  }
  r.check("exchange-bound", violations == 0 && trials_n > 0,
          std::to_string(trials_n) + " trials, " + std::to_string(violations) + " violations, min margin " + fmt(min_margin));
  r.quantity("exchange_min_margin", min_margin, "simulated");
  r.quantity("exchange_min_empirical_constant", min_const, "simulated");
}

void bounds_projection(const ExperimentConfig& c, ResultRecord& r, const Rng& base) {
  const int trials_n = static_cast<int>(c.get_int("projection_trials", 200));
  const int max_q = static_cast<int>(c.get_int("projection_max_qubits", 5));
  std::vector<ProjectionReport> reps(static_cast<std::size_t>(trials_n));
  parallel_for(reps.size(), c.threads, [&](std::size_t k) {
    Rng rng = base.split(3000).split(k);
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_q)));
    const std::size_t dim = std::size_t{1} << n;
    const std::vector<int> dims(static_cast<std::size_t>(n), 2);
    const double J = rng.uniform(1.0, 10.0);
    const std::size_t ns = 1 + rng.below(dim - 1 > 0 ? dim - 1 : 1);
    std::vector<double> d1(dim, 0.0);
    for (std::size_t i = ns; i < dim; ++i) d1[i] = J * (1.0 + rng.uniform());
    const Mat W = haar_unitary(rng, dim);
    Mat h1 = W * Eigen::VectorXd::Map(d1.data(), static_cast<Eigen::Index>(dim)).cast<cplx>().asDiagonal() * W.adjoint();
    h1 = 0.5 * (h1 + h1.adjoint()).eval();
    Mat h2 = random_hermitian(rng, dim);
    const double K = J * rng.uniform(0.05, 0.49);
    h2 *= K / Eigen::SelfAdjointEigenSolver<Mat>(h2, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    h2 = 0.5 * (h2 + h2.adjoint()).eval();
    ProjectionProblem p{SparseHermitian::from_dense(dims, h1), SparseHermitian::from_dense(dims, h2), J, 0.0};
    const double delta = K * rng.uniform(0.0, 0.5);
    const Mat h = h1 + h2;
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Vec g = es.eigenvectors().col(0);
    const double l0 = es.eigenvalues()[0];
    Vec v = random_vector(rng, dim);
    v -= g * g.dot(v);
    StateVector psi(g);
    if (v.norm() > 1e-12) {
      v /= v.norm();
      const double ev = v.dot(h * v).real();
      const double s2 = ev - l0 > 1e-14 ? std::min(1.0, 0.999 * rng.uniform() * delta / (ev - l0)) : 0.0;
      psi = StateVector(std::sqrt(1.0 - s2) * g + std::sqrt(s2) * v);
    }
    reps[k] = projection_bounds(p, psi, delta);
  });
  std::size_t fail_energy = 0, fail_dev = 0, fail_pert = 0, near = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& p : reps) {
    fail_energy += !p.energy_ok;
    fail_dev += !p.deviation_ok;
    fail_pert += !p.perturbed_ok;
    near += p.near_boundary;
    min_slack = std::min(min_slack, p.min_slack());
  }
  const std::string n = std::to_string(trials_n) + " trials";
  r.check("projection-energy", fail_energy == 0 && trials_n > 0, n + ", " + std::to_string(fail_energy) + " violations");
  r.check("projection-deviation", fail_dev == 0 && trials_n > 0, n + ", " + std::to_string(fail_dev) + " violations");
  r.check("projection-perturbed", fail_pert == 0 && trials_n > 0, n + ", " + std::to_string(fail_pert) + " violations");
  r.quantity("projection_min_slack", min_slack, "simulated");
  r.quantity("projection_near_boundary", static_cast<double>(near), "simulated");
}

void bounds_union(const ExperimentConfig& c, ResultRecord& r, const Rng& base) {
  const int trials_n = static_cast<int>(c.get_int("union_trials", 1000));
  const int m_max = static_cast<int>(c.get_int("union_m_max", 5));
  const int max_q = static_cast<int>(c.get_int("union_max_qubits", 5));
  std::vector<UnionBoundReport> reps(static_cast<std::size_t>(trials_n));
  parallel_for(reps.size(), c.threads, [&](std::size_t k) {
    Rng rng = base.split(4000).split(k);
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_q)));
    const std::size_t dim = std::size_t{1} << n;
    const std::vector<int> dims(static_cast<std::size_t>(n), 2);
    const int m = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(m_max)));
    const Mat W = haar_unitary(rng, dim);
    std::vector<SparseHermitian> ps;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd mask(static_cast<Eigen::Index>(dim));
      for (std::size_t i = 0; i < dim; ++i) mask[static_cast<Eigen::Index>(i)] = rng.uniform() < 0.7 ? 1.0 : 0.0;
      Mat p = W * mask.cast<cplx>().asDiagonal() * W.adjoint();
      ps.push_back(SparseHermitian::from_dense(dims, 0.5 * (p + p.adjoint())));
    }
    reps[k] = union_bound_check(ps, random_state(rng, dim));
  });
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& u : reps) {
    violations += !u.holds;
    min_margin = std::min(min_margin, u.rhs - u.lhs);
  }
  r.check("union-bound", violations == 0 && trials_n > 0,
          std::to_string(trials_n) + " trials, " + std::to_string(violations) + " violations, min margin " + fmt(min_margin));
  r.quantity("union_min_margin", min_margin, "simulated");
}

}  // namespace

void run_bounds(const ExperimentConfig& c, ResultRecord& r) {
  auto parts = c.get_list("parts", {"all"});
  auto want = [&](const std::string& p) {
    return std::find(parts.begin(), parts.end(), "all") != parts.end() ||
           std::find(parts.begin(), parts.end(), p) != parts.end();
  };
  const Rng base = suite_rng(c);
  if (want("flag")) bounds_flag(c, r, base);
  if (want("drop")) bounds_drop(c, r);
  if (want("exchange")) bounds_exchange(c, r, base);
  if (want("projection")) bounds_projection(c, r, base);
  if (want("union")) bounds_union(c, r, base);
}

// --------------------------------------------------------------- apxsim-lift

namespace {

struct ApxCase {
  std::string tag;
  Truth truth;
  VerifierBundle bundle;
  DecisionTable decision;
  AugmentedCircuit aug;
  LiftedApxInstance inst;
};

ApxCase build_case(const ExperimentConfig& c, Truth truth) {
  const double margin = c.get_double("alpha_margin", 1e4);
  ApxCase k;
  k.tag = truth_name(truth);
  k.truth = truth;
  ToyApx t = build_toy_apx(truth, c.get_double("zeta", 0.04), margin);
  k.bundle = std::move(t.bundle);
  k.decision = std::move(t.decision);
  k.aug = std::move(t.aug);
  k.inst = std::move(t.inst);
  return k;
}

ApxCase build_bundle_case(const ExperimentConfig& c) {
  const BundleFile f = load_bundle(c.get_string("bundle", ""));
  ApxCase k;
  std::size_t y = 0;
  for (auto v : f.bundle.query_validity) y = (y << 1) | (v == Validity::Yes ? 1U : 0U);
  k.truth = f.decision.accepts(y) ? Truth::Yes : Truth::No;
  k.tag = std::string("bundle-") + truth_name(k.truth);
  k.bundle = f.bundle;
  k.decision = f.decision;
  k.aug = build_augmented(f.bundle, f.decision);
  const CircuitHamiltonian ch = build_hw(k.aug.circuit, k.aug.circuit.labels().ancilla);
  k.inst = assemble(ch, choose_alpha(ch, c.get_double("alpha_margin", 1e4)), {f.bundle.m, f.bundle.c, f.bundle.s},
                    StructureDescriptor::k_local(3));
  return k;
}

void apx_lift(const ExperimentConfig& c, ResultRecord& r, const ApxCase& k, int cases, const Rng& base) {
  const ThresholdVerdict v = verify_thresholds(k.inst, k.truth);
  const std::string t = k.tag;
  r.check("promise-gap-" + t, k.inst.b - k.inst.a > 0.0, "b - a = " + fmt(k.inst.b - k.inst.a));
  r.check("parameters-" + t, k.bundle.c >= 0.99 && k.bundle.s <= 0.01,
          "c = " + fmt(k.bundle.c) + ", s = " + fmt(k.bundle.s) + ", m = " + std::to_string(k.bundle.m));
  r.check("thresholds-" + t, v.threshold_ok,
          std::string(k.truth == Truth::Yes ? "max <M1> " : "min <M1> ") + fmt(v.worst_observable) +
              (k.truth == Truth::Yes ? " <= a = " + fmt(k.inst.a) : " >= b = " + fmt(k.inst.b)) + ", window size " +
              std::to_string(v.window.window_size));
  r.check("trace-distance-" + t, v.trace_ok,
          "max distance " + fmt(v.window.max_trace_distance) + " <= " + fmt(v.trace_bound));
  r.quantity("alpha_" + t, k.inst.alpha, "closed-form");
  r.quantity("epsilon_" + t, k.inst.epsilon, "closed-form");
  r.quantity("a_" + t, k.inst.a, "closed-form");
  r.quantity("b_" + t, k.inst.b, "closed-form");
  r.quantity("delta_" + t, k.inst.delta, "closed-form");
  r.quantity("lambda_min_" + t, v.window.lambda_min, "simulated");
  r.quantity("worst_window_m1_" + t, v.worst_observable, "simulated");
  r.quantity("window_trace_distance_" + t, v.window.max_trace_distance, "simulated");

  if (cases <= 0) return;
  const double lam = v.window.lambda_min;
  std::vector<SuboptimalityCase> sc(static_cast<std::size_t>(cases));
  parallel_for(sc.size(), c.threads, [&](std::size_t j) {
    Rng rng = base.split(5000 + (k.truth == Truth::Yes ? 0 : 1)).split(j);
    StateVector proof = StateVector::basis(1, 0);
    if (j == 0) {
      for (const auto& ver : k.bundle.verifiers) proof = kron(proof, optimal_proof(ver).proof);
    } else if (j % 3 == 1) {
      // basis proofs: flip a subset of the optimal answers
      for (std::size_t i = 0; i < k.bundle.verifiers.size(); ++i) {
        const auto& ver = k.bundle.verifiers[i];
        const std::size_t pd = std::size_t{1} << ver.labels().proof.size();
        proof = kron(proof, StateVector::basis(pd, rng.below(pd)));
      }
    } else if (j % 3 == 2) {
      for (const auto& ver : k.bundle.verifiers)
        proof = kron(proof, random_state(rng, std::size_t{1} << ver.labels().proof.size()));
    } else {
      proof = random_state(rng, std::size_t{1} << k.bundle.proof_qubits());
    }
    sc[j] = suboptimality_check(k.bundle, k.aug, k.inst, proof, lam);
  });
  std::size_t fails = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : sc) {
    fails += !s.holds;
    min_margin = std::min(min_margin, s.energy - s.required);
  }
  r.check("suboptimal-energy-" + t, fails == 0,
          std::to_string(cases) + " proofs, " + std::to_string(fails) + " violations, min margin " + fmt(min_margin));
  r.quantity("suboptimal_min_margin_" + t, min_margin, "simulated");
}

void apx_decider(const ExperimentConfig& c, ResultRecord& r, const ApxCase& k) {
  const std::string reg = c.get_string("regime", "both");
  for (GapRegime g : {GapRegime::Poly, GapRegime::Exp}) {
    const std::string gname = g == GapRegime::Poly ? "poly" : "exp";
    if (reg != "both" && reg != gname) continue;
    const Decision d = decide_via_oracle(k.inst, g);
    const Verdict want = k.truth == Truth::Yes ? Verdict::Yes : Verdict::No;
    const std::string t = k.tag + "-" + gname;
    r.check("decider-verdict-" + t, d.verdict == want,
            std::string("verdict ") + to_string(d.verdict) + ", window min <M1> " + fmt(d.window_min_observable));
    r.check("decider-queries-" + t, d.log.size() == d.predicted_queries,
            std::to_string(d.log.size()) + " logged, " + std::to_string(d.predicted_queries) + " predicted");
    r.quantity("decider_queries_" + t, static_cast<double>(d.log.size()), "simulated");
    r.quantity("decider_eta_" + t, d.eta, "closed-form");
    r.quantity("decider_lambda_estimate_" + t, d.lambda_estimate, "simulated");
  }
}

}  // namespace

void run_apxsim_lift(const ExperimentConfig& c, ResultRecord& r) {
  const std::string stage = c.get_string("stage", "all");
  const int cases = static_cast<int>(c.get_int("suboptimal_cases", 20));
  const Rng base = suite_rng(c);
  std::vector<ApxCase> cs;
  if (c.has("bundle")) {
    cs.push_back(build_bundle_case(c));
  } else {
    for (Truth t : truths_of(c.get_string("truth", "both"))) cs.push_back(build_case(c, t));
  }
  for (const auto& k : cs) {
    if (stage != "decider") apx_lift(c, r, k, cases, base);
    if (stage != "lift") apx_decider(c, r, k);
  }
}

// ---------------------------------------------------------------- gscon-lift

namespace {

struct FrozenFamily {
  int N, L, m;
  std::vector<int> F;
};

const std::vector<FrozenFamily>& frozen_families() {
  static const std::vector<FrozenFamily> t = {
      {3, 3, 27, {}}, {4, 7, 42, {1, 3}}, {5, 9, 53, {1, 4}}, {6, 15, 72, {1, 3, 5}}};
  return t;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return "{" + s + "}";
}

LiftedGsconInstance lifted_for(const ExperimentConfig& c, Truth truth, int n, int b) {
  const TIStandardFamily f =
      surrogate_family(truth, n, c.get_double("epsilon_verifier", 1e-4), c.get_double("f_threshold", 0.0));
  std::optional<double> pw;
  if (c.has("penalty_weight")) pw = c.get_double("penalty_weight", 0.0);
  return build_lifted(f, pw, b);
}

std::string plot_thresholds_csv(const LiftedGsconInstance& inst) {
  std::ostringstream os;
  os << std::setprecision(17) << "name,value\n"
     << "eta1," << inst.eta1 << "\neta2," << inst.eta2 << "\neta3," << inst.eta3 << "\neta4," << inst.eta4
     << "\ndelta_gap," << inst.delta_gap << '\n';
  return os.str();
}

void add_artifacts(ResultRecord& r, const std::string& tag, const LiftedGsconInstance& inst, const EnergyTrace& tr,
                   const std::string& trace_name) {
  std::ostringstream csv;
  write_trace_csv(csv, inst, tr);
  r.traces.push_back({trace_name.empty() ? "trace_" + tag + ".csv" : trace_name, csv.str()});
  r.plots.push_back({"energy_vs_step_" + tag + ".csv", energy_plot_csv(inst, tr)});
  r.plots.push_back({"overlap_vs_step_" + tag + ".csv", overlap_plot_csv(tr)});
  r.plots.push_back({"thresholds_" + tag + ".csv", plot_thresholds_csv(inst)});
}

// Phase runs after the prepare phase and before the uncompute phase.
std::vector<std::vector<std::string>> switch_rows(const EnergyTrace& tr) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 1; k < tr.energies.size(); ++k) {
    const Phase p = tr.phases[k - 1];
    if (p == Phase::Prepare || p == Phase::Uncompute || p == Phase::Idle) continue;
    if (k == 1 || tr.phases[k - 2] != p) rows.push_back({tr.switch_snapshots[k - 1]});
    rows.back().push_back(tr.switch_snapshots[k]);
  }
  return rows;
}

void honest_checks(ResultRecord& r, const LiftedGsconInstance& inst, const TraversalSchedule& s, const EnergyTrace& tr,
                   const std::string& tag, double tol_mono, double tol_dist) {
  const int N = inst.N();
  const int L = static_cast<int>(inst.family.prep_circuit.size());
  r.check("schedule-length-" + tag, static_cast<int>(s.steps.size()) == 2 * L + 7 * N,
          std::to_string(s.steps.size()) + " steps, 2L+7N = " + std::to_string(2 * L + 7 * N));
  int padding = 0;
  for (const auto& st : s.steps) padding += st.phase == Phase::Idle;
  r.quantity("identity_padding_" + tag, padding, "simulated");
  double emax = -std::numeric_limits<double>::infinity();
  for (double e : tr.energies) emax = std::max(emax, e);
  r.check("energy-below-eta1-" + tag, emax <= inst.eta1, "max energy " + fmt(emax) + " <= eta1 = " + fmt(inst.eta1));
  bool mono = true;
  std::size_t fb = 0;
  for (std::size_t k = 2; k < tr.energies.size(); ++k)
    if (tr.phases[k - 1] == Phase::FullBlast && tr.phases[k - 2] == Phase::FullBlast) {
      mono = mono && tr.energies[k] >= tr.energies[k - 1] - tol_mono;
      ++fb;
    }
  r.check("full-blast-monotone-" + tag, mono, std::to_string(fb) + " consecutive full-blast pairs");
  r.check("final-distance-" + tag, tr.final_distance <= tol_dist, "||psi_m - phi|| = " + fmt(tr.final_distance));
  bool allowed = true;
  for (const auto& snap : tr.switch_snapshots) {
    if (snap == "superposed") {
      allowed = false;
      continue;
    }
    std::vector<int> digits;
    for (char ch : snap) digits.push_back(ch - '0');
    allowed = allowed && string_allowed(digits);
  }
  r.check("snapshots-allowed-" + tag, allowed, "every snapshot is a single string with no forbidden pair");
  r.quantity("max_energy_" + tag, emax, "simulated");
  r.quantity("final_distance_" + tag, tr.final_distance, "simulated");
  r.quantity("eta1_" + tag, inst.eta1, "closed-form");
  r.quantity("eta2_" + tag, inst.eta2, "closed-form");

  for (const auto& ff : frozen_families())
    if (ff.N == N && inst.family.truth == Truth::Yes) {
      r.check("frozen-family-" + tag, ff.L == L && ff.m == inst.m_budget && ff.F == inst.family.F,
              "L = " + std::to_string(L) + ", m = " + std::to_string(inst.m_budget) + ", F = " + join(inst.family.F));
    }
  if (N == 4 && inst.family.F == std::vector<int>{1, 3}) {
    const auto rows = switch_rows(tr);
    r.check("switch-rows-" + tag, rows == reference_switch_rows(),
            std::to_string(rows.size()) + " phase rows compared with the frozen honest N = 4 rows");
  }
}

}  // namespace

void run_gscon_lift(const ExperimentConfig& c, ResultRecord& r) {
  const Truth truth = truth_of(c.get_string("truth", "yes"));
  const std::string sched = c.get_string("schedule", "honest");
  const int b = static_cast<int>(c.get_int("b", 2));
  const Rng base = suite_rng(c);
  for (int n : c.get_int_list("n", kDefaultGsconN)) {
    const LiftedGsconInstance inst = lifted_for(c, truth, n, b);
    const std::string tag = "N" + std::to_string(n) + "-" + truth_name(truth) + "-" + sched;
    TraversalSchedule s;
    if (sched == "honest") s = honest_schedule(inst, true);
    else if (sched == "cheat") s = cheat_schedule(inst, b);
    else {
      Rng rng = base.split(static_cast<std::uint64_t>(n));
      s = random_schedule(inst, b, rng);
    }
    const EnergyTrace tr = run_schedule(inst, s);
    add_artifacts(r, tag, inst, tr, c.get_string("trace_out", ""));
    double emax = *std::max_element(tr.energies.begin(), tr.energies.end());
    if (truth == Truth::Yes && sched == "honest") {
      honest_checks(r, inst, s, tr, tag, tol_or(c, 1e-12), tol_or(c, 1e-8));
    } else {
      const bool energy_branch = emax >= inst.eta2;
      const bool distance_branch = tr.final_distance >= inst.eta4;
      if (truth == Truth::No)
        r.check("dichotomy-" + tag, energy_branch || distance_branch,
                "max energy " + fmt(emax) + " vs eta2 = " + fmt(inst.eta2) + ", final distance " + fmt(tr.final_distance));
      else
        r.check("completed-" + tag, true, "max energy " + fmt(emax) + ", final distance " + fmt(tr.final_distance));
      r.quantity("max_energy_" + tag, emax, "simulated");
      r.quantity("final_distance_" + tag, tr.final_distance, "simulated");
      r.quantity("eta2_" + tag, inst.eta2, "closed-form");
    }
  }
}

// ------------------------------------------------------------------- audit

void run_audit(const ExperimentConfig& c, ResultRecord& r) {
  const int nrand = static_cast<int>(c.get_int("random_schedules", 100));
  const Rng base = suite_rng(c);
  for (int n : c.get_int_list("n", kDefaultAuditN)) {
    std::vector<int> bs;
    if (c.has("b")) {
      bs = c.get_int_list("b", {});
    } else {
      for (int b = 2; b <= n - 1; ++b) bs.push_back(b);
    }
    for (int b : bs) {
      const LiftedGsconInstance inst = lifted_for(c, Truth::No, n, b);
      const std::string tag = "N" + std::to_string(n) + "-b" + std::to_string(b);
      std::vector<SoundnessReport> reps(static_cast<std::size_t>(nrand + 1));
      parallel_for(reps.size(), c.threads, [&](std::size_t k) {
        TraversalSchedule s;
        if (k == 0) {
          s = cheat_schedule(inst, b);
        } else {
          Rng rng = base.split(static_cast<std::uint64_t>(100 * n + b)).split(k);
          s = random_schedule(inst, b, rng);
        }
        reps[k] = soundness_audit(inst, s);
        reps[k].trace = EnergyTrace{};  // keep memory flat across schedules
      });
      std::size_t dich = 0, trav_app = 0, trav_ok = 0, dec_ok = 0, lit_app = 0, energy_b = 0;
      double min_ratio = std::numeric_limits<double>::infinity();
      for (const auto& s : reps) {
        dich += s.dichotomy();
        energy_b += s.energy_branch;
        if (s.traversal.applicable) {
          ++trav_app;
          trav_ok += s.traversal.holds;
          min_ratio = std::min(min_ratio, s.traversal.overlap / s.traversal.bound);
        }
        dec_ok += s.decomposition.parametrized_holds && s.decomposition.weights_sum_ok &&
                  (!s.decomposition.literal_applicable || s.decomposition.literal_holds);
        lit_app += s.decomposition.literal_applicable;
      }
      const std::size_t total = reps.size();
      r.check("dichotomy-" + tag, dich == total, std::to_string(dich) + "/" + std::to_string(total) + " schedules");
      r.check("cheat-energy-branch-" + tag, reps[0].energy_branch,
              "cheat max energy " + fmt(reps[0].max_energy) + " vs eta2 = " + fmt(inst.eta2));
      r.check("traversal-witness-" + tag, trav_ok == trav_app,
              std::to_string(trav_ok) + "/" + std::to_string(trav_app) + " applicable schedules");
      r.check("decomposition-" + tag, dec_ok == total,
              std::to_string(dec_ok) + "/" + std::to_string(total) + " schedules, literal form applicable on " +
                  std::to_string(lit_app));
      r.quantity("energy_branch_count_" + tag, static_cast<double>(energy_b), "simulated");
      r.quantity("traversal_applicable_" + tag, static_cast<double>(trav_app), "simulated");
      if (trav_app) r.quantity("traversal_min_overlap_ratio_" + tag, min_ratio, "simulated");
      r.quantity("cheat_max_energy_" + tag, reps[0].max_energy, "simulated");
      r.quantity("cheat_witness_step_" + tag, static_cast<double>(reps[0].traversal.witness), "simulated");
      r.quantity("cheat_witness_overlap_" + tag, reps[0].traversal.overlap, "simulated");
      r.quantity("cheat_gamma2_" + tag, reps[0].decomposition.gamma2_weight, "simulated");
      r.quantity("eta2_" + tag, inst.eta2, "closed-form");
    }
  }
}

// ---------------------------------------------------------------- traversal

namespace {

// 3 3^k (2^j | 4^j) of total length len, generated directly from the pattern.
std::set<std::string> expand_language(int len) {
  std::set<std::string> out;
  for (int threes = 1; threes <= len; ++threes) {
    const std::string head(static_cast<std::size_t>(threes), '3');
    const std::size_t tail = static_cast<std::size_t>(len - threes);
    out.insert(head + std::string(tail, '2'));
    out.insert(head + std::string(tail, '4'));
  }
  return out;
}

std::vector<std::vector<int>> allowed_strings(int len, int lo, int hi) {
  std::vector<std::vector<int>> out;
  std::vector<int> s(static_cast<std::size_t>(len), lo);
  for (;;) {
    if (string_allowed(s)) out.push_back(s);
    int k = len - 1;
    while (k >= 0 && s[static_cast<std::size_t>(k)] == hi) s[static_cast<std::size_t>(k--)] = lo;
    if (k < 0) break;
    ++s[static_cast<std::size_t>(k)];
  }
  return out;
}

}  // namespace

void run_traversal(const ExperimentConfig& c, ResultRecord& r) {
  const int b_max = static_cast<int>(c.get_int("b_max", 5));
  bool all_equal = true, all_regex = true, all_alphabet = true;
  std::string sizes;
  for (int b = 1; b <= b_max; ++b) {
    const auto brute = trapped_subspace(b);
    const std::set<std::string> got(brute.begin(), brute.end());
    all_equal = all_equal && got == expand_language(b + 1) && got.size() == brute.size();
    for (const auto& s : brute) {
      all_regex = all_regex && matches_trapped_language(s);
      all_alphabet = all_alphabet && s.find_first_not_of("234") == std::string::npos;
    }
    sizes += (sizes.empty() ? "" : ", ") + std::string("b=") + std::to_string(b) + ": " + std::to_string(brute.size());
    r.quantity("trapped_count_b" + std::to_string(b), static_cast<double>(brute.size()), "exhaustive");
  }
  r.check("trapped-language", all_equal, "brute force equals 33*(2*|4*) for b <= " + std::to_string(b_max) + " (" + sizes + ")");
  r.check("trapped-regex", all_regex, "every enumerated string matches the regex");
  r.check("trapped-alphabet", all_alphabet, "no symbol outside {2,3,4}");
  if (b_max >= 2) {
    const auto b2 = trapped_subspace(2);
    r.check("trapped-b2-reference", std::set<std::string>(b2.begin(), b2.end()) ==
                                        std::set<std::string>{"333", "332", "334", "322", "344"},
            "b = 2 yields {333, 332, 334, 322, 344}");
  }
  const auto b1 = trapped_subspace(1);
  r.check("trapped-b1-reference", std::set<std::string>(b1.begin(), b1.end()) == std::set<std::string>{"33", "32", "34"},
          "b = 1 yields {33, 32, 34}");

  const int ob = static_cast<int>(c.get_int("orth_b_max", 4));
  bool orth = true;
  for (int b = 1; b <= ob; ++b)
    orth = orth && b_orthogonal_strings(allowed_strings(b + 1, 0, 2), allowed_strings(b + 1, 4, 6), b);
  r.check("window-b-orthogonal", orth, "allowed {0,1,2} and {4,5,6} windows of b+1 sites for b <= " + std::to_string(ob));

  const std::vector<int> q3(3, 2);
  const SparseHermitian p000 = SparseHermitian::projector(q3, StateVector::basis(8, 0));
  const SparseHermitian p100 = SparseHermitian::projector(q3, StateVector::basis(8, 4));
  r.check("b-orthogonal-example", !b_orthogonal(p000, p100, 1), "|000> and |100> are not 1-orthogonal");

  const TraversalAudit a1 = traversal_bound_audit(std::vector<double>(11, 0.0), 10, 0.0);
  const TraversalAudit a2 = traversal_bound_audit(std::vector<double>(8, 0.0), 7, 0.49);
  r.check("traversal-bound-formula", std::abs(a1.bound - 0.01) < 1e-15 && std::abs(a2.bound - 0.005308) < 5e-7,
          "m=10, eps=0 -> " + fmt(a1.bound) + "; m=7, eps=0.49 -> " + fmt(a2.bound));
  r.quantity("traversal_bound_m7_eps049", a2.bound, "closed-form");
}

}  // namespace hamlift::harness::detail

namespace hamlift::harness {

std::string energy_plot_csv(const LiftedGsconInstance& inst, const EnergyTrace& tr) {
  std::ostringstream os;
  os << std::setprecision(17) << "step,energy,eta1,eta2\n";
  for (std::size_t k = 0; k < tr.energies.size(); ++k)
    os << k << ',' << tr.energies[k] << ',' << inst.eta1 << ',' << inst.eta2 << '\n';
  return os.str();
}

std::string overlap_plot_csv(const EnergyTrace& tr) {
  std::ostringstream os;
  os << std::setprecision(17) << "step,outside_window,gamma1,gamma2,outside_gamma1,distance_to_target\n";
  for (std::size_t k = 0; k < tr.energies.size(); ++k)
    os << k << ',' << tr.outside_psi[k] << ',' << tr.gamma1[k] << ',' << tr.gamma2[k] << ',' << tr.outside_gamma1[k]
       << ',' << tr.distances[k] << '\n';
  return os.str();
}

}  // namespace hamlift::harness

#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamlift/history.hpp"
#include "hamlift/query.hpp"

namespace hamlift {

struct ApxParams {
  int m = 1;
  double c = 1.0;
  double s = 0.0;
};

struct ApxMeta {
  int m = 0;
  double c = 0.0;
  double s = 0.0;
  double g_value = 0.0;
  double m2_norm = 0.0;
  double gap = 0.0;  // spectral gap of hw
  int T = 0;
};

struct LiftedApxInstance {
  SparseHermitian h;
  SparseHermitian observable;
  SparseHermitian hw;
  SparseHermitian m2;
  double alpha = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double a = 0.0;
  double b = 0.0;
  ApxMeta meta;
};

class NoPromiseGap : public std::runtime_error {
 public:
  NoPromiseGap(const std::string& what, double shortfall) : std::runtime_error(what), shortfall(shortfall) {}
  double shortfall;  // a - b
};

// max(4K/gap, gap/(3K^2), 1)
double alpha_floor(double m2_norm, double gap);
double choose_alpha(const CircuitHamiltonian& ch, double margin = 2.0);

double epsilon_budget(double alpha, double m2_norm, double gap, int m, double g);
double epsilon_budget(const LiftedApxInstance& inst);

struct Thresholds {
  double epsilon = 0.0;
  double a = 0.0;
  double b = 0.0;
};
Thresholds thresholds(double alpha, double m2_norm, double gap, const ApxParams& p, double g);

// alpha*hw + m2 with no parameter checks.
SparseHermitian lifted_hamiltonian(const CircuitHamiltonian& ch, double alpha);

LiftedApxInstance assemble(const CircuitHamiltonian& ch, double alpha, const ApxParams& params,
                           const std::optional<StructureDescriptor>& structure = std::nullopt);

enum class Truth { Yes, No };

struct WindowAnalysis {
  double lambda_min = 0.0;
  double window_top = 0.0;
  std::size_t window_size = 0;
  double min_observable = 0.0;
  double max_observable = 0.0;
  double max_trace_distance = 0.0;  // to the nearest kernel vector of hw
};

// Window of eigenvectors with energy <= lambda_min + delta (+ a roundoff allowance).
WindowAnalysis analyse_window(const SparseHermitian& h, const SparseHermitian& observable, double delta,
                              const SparseHermitian* hw = nullptr);

struct ThresholdVerdict {
  Truth truth = Truth::Yes;
  WindowAnalysis window;
  double a = 0.0;
  double b = 0.0;
  double worst_observable = 0.0;
  double trace_bound = 0.0;  // 12 K / (alpha gap)
  bool threshold_ok = false;
  bool trace_ok = false;
  bool passed() const { return threshold_ok && trace_ok; }
};

ThresholdVerdict verify_thresholds(const LiftedApxInstance& inst, Truth truth);

struct ProjectionProblem {
  SparseHermitian h1;
  SparseHermitian h2;
  double J = 0.0;
  double K = 0.0;  // spectral norm of h2; computed when left at 0
};

struct ProjectionReport {
  double J = 0.0, K = 0.0, delta = 0.0;
  double lambda_min = 0.0;
  double lambda_s = 0.0;  // lambda_min of h2 restricted to S
  double energy_lower_slack = 0.0;
  double energy_upper_slack = 0.0;
  double overlap = 0.0;        // |<psi|psi'>|^2
  double overlap_floor = 0.0;
  double perturbed_energy = 0.0;
  double perturbed_ceiling = 0.0;
  bool near_boundary = false;  // J - 2K tiny
  bool energy_ok = false, deviation_ok = false, perturbed_ok = false;
  bool passed() const { return energy_ok && deviation_ok && perturbed_ok; }
  double min_slack() const;
};

ProjectionReport projection_bounds(const ProjectionProblem& p, const StateVector& psi, double delta);

class NonCommutingError : public std::invalid_argument {
 public:
  NonCommutingError(std::size_t i, std::size_t j)
      : std::invalid_argument("projectors " + std::to_string(i) + " and " + std::to_string(j) + " do not commute"),
        first(i), second(j) {}
  std::size_t first, second;
};

struct UnionBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

UnionBoundReport union_bound_check(const std::vector<SparseHermitian>& projectors, const StateVector& state);

// History state of the augmented circuit for a given joint proof.
StateVector proof_history_state(const AugmentedCircuit& aug, const StateVector& proof);

struct SuboptimalityCase {
  double epsilon = 0.0;         // max_i (optimal - achieved) acceptance
  double energy = 0.0;          // <phi|H|phi>
  double lambda_min = 0.0;
  double required = 0.0;        // lambda_min + 3 g eps / (8 m^2)
  bool holds = false;
};

SuboptimalityCase suboptimality_check(const VerifierBundle& bundle, const AugmentedCircuit& aug,
                                      const LiftedApxInstance& inst, const StateVector& proof,
                                      std::optional<double> lambda_min = {});

enum class GapRegime { Poly, Exp };
enum class Verdict { Yes, No, Invalid };

struct OracleQuery {
  double threshold = 0.0;
  bool below = false;  // lambda_min <= threshold
};

struct Decision {
  Verdict verdict = Verdict::Invalid;
  double eta = 0.0;
  double search_range = 0.0;
  double lambda_estimate = 0.0;
  double window_min_observable = 0.0;
  std::vector<OracleQuery> log;  // threshold queries, then the window query
  std::size_t predicted_queries = 0;
};

Decision decide_via_oracle(const LiftedApxInstance& inst, GapRegime regime);

// Width-2 verifier: wire 0 output, wire 1 proof. YES copies the proof into the
// output before R(zeta); NO only rotates.
QuantumCircuit toy_verifier(bool yes, double zeta);
VerifierBundle toy_bundle(const std::vector<bool>& yes, double zeta);

struct ToyApx {
  VerifierBundle bundle;
  DecisionTable decision;
  AugmentedCircuit aug;
  CircuitHamiltonian ch;
  LiftedApxInstance inst;
};

// m = 2, decision AND; truth NO flips the second query.
ToyApx build_toy_apx(Truth truth, double zeta, double alpha_margin);

const char* to_string(Verdict v);
void write_verdict(std::ostream& os, const ThresholdVerdict& v);

}  // namespace hamlift

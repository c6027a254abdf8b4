#include "hamlift/gscon.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "hamlift/eigensolver.hpp"

namespace hamlift {

SparseHermitian hopping_term() {
  return SparseHermitian({2, 2}, std::vector<Entry>{{1, 2, -1.0}, {2, 1, -1.0}});
}

SparseHermitian chain_hamiltonian(const SparseHermitian& local_term, int N) {
  if (N < 2) throw std::invalid_argument("chain needs at least two sites");
  const int d = local_term.site_dims().front();
  std::vector<int> dims(static_cast<std::size_t>(N), d);
  SparseHermitian h = SparseHermitian::zero(dims);
  for (int i = 0; i + 1 < N; ++i) h = h + embed_local(local_term, static_cast<std::size_t>(i), dims);
  return h;
}

QuantumCircuit givens_prep_circuit(int N, int particles) {
  if (particles < 0 || particles > N) throw std::invalid_argument("particle count out of range");
  Eigen::MatrixXd hsp = Eigen::MatrixXd::Zero(N, N);
  for (int j = 0; j + 1 < N; ++j) hsp(j, j + 1) = hsp(j + 1, j) = -1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hsp);
  Eigen::MatrixXd M = es.eigenvectors().leftCols(particles).transpose();

  struct Rot {
    int j;
    double c, s;
  };
  std::vector<Rot> rots;
  for (int r = 0; r < particles; ++r)
    for (int j = N - 2; j >= r; --j) {
      const double a = M(r, j), b = M(r, j + 1);
      const double rho = std::hypot(a, b);
      const double c = rho > 0 ? a / rho : 1.0, s = rho > 0 ? b / rho : 0.0;
      Eigen::VectorXd cj = M.col(j), cj1 = M.col(j + 1);
      M.col(j) = c * cj + s * cj1;
      M.col(j + 1) = -s * cj + c * cj1;
      rots.push_back({j, c, s});
    }

  QuantumCircuit qc(N);
  for (int w = 0; w < particles; ++w) qc.add(Gate::x(w));
  for (auto it = rots.rbegin(); it != rots.rend(); ++it) {
    Mat u = Mat::Identity(4, 4);
    // basis |00>,|01>,|10>,|11>; |10> has the particle on mode j
    u(2, 2) = it->c;
    u(1, 2) = it->s;
    u(2, 1) = -it->s;
    u(1, 1) = it->c;
    qc.add(Gate::generic2(u, it->j, it->j + 1));
  }
  return qc;
}

std::vector<int> negative_bonds(const SparseHermitian& local_term, const StateVector& psi, int N, double threshold) {
  const int d = local_term.site_dims().front();
  std::vector<int> dims(static_cast<std::size_t>(N), d);
  std::vector<int> F;
  for (int i = 0; i + 1 < N; ++i)
    if (expectation(embed_local(local_term, static_cast<std::size_t>(i), dims), psi) < threshold) F.push_back(i + 1);
  return F;
}

TIStandardFamily surrogate_family(Truth truth, int N, double epsilon_verifier, double f_threshold) {
  if (N < 3) throw std::invalid_argument("surrogate family needs N >= 3");
  if (N > 10) throw std::invalid_argument("surrogate family is limited to N <= 10");
  if (!(epsilon_verifier > 0.0)) throw std::invalid_argument("epsilon_verifier must be positive");
  TIStandardFamily f;
  f.N = N;
  f.d = 2;
  f.truth = truth;
  f.epsilon_verifier = epsilon_verifier;
  f.f_threshold = f_threshold;
  f.alpha = epsilon_verifier / (static_cast<double>(N) * N);

  const SparseHermitian hop = hopping_term();
  const std::vector<int> dims2{2, 2};
  f.ground_energy_hop = lmin_dense(chain_hamiltonian(hop, N));
  const SparseHermitian no_term = hop + SparseHermitian::identity(dims2);
  f.beta = lmin_dense(chain_hamiltonian(no_term, N));
  if (truth == Truth::Yes) {
    const double s = (f.ground_energy_hop - f.alpha / 2.0) / (N - 1);
    f.local_term = hop - SparseHermitian::identity(dims2).scaled(s);
  } else {
    f.local_term = no_term;
  }

  f.prep_circuit = givens_prep_circuit(N, N / 2);
  const int L = static_cast<int>(f.prep_circuit.size());
  const int m = 2 * L + 7 * N;
  if (f.beta < 16.0 * m * f.alpha)
    throw std::invalid_argument("epsilon_verifier too large: beta < 16 (2L + 7N) alpha");
  const StateVector low = simulate(f.prep_circuit, StateVector::basis(std::size_t{1} << N, 0));
  f.F = negative_bonds(f.local_term, low, N, f_threshold);
  return f;
}

bool switch_allowed(int left, int right) {
  if (left < 0 || left >= kSwitchLevels || right < 0 || right >= kSwitchLevels)
    throw std::out_of_range("switch symbol out of range");
  static const bool table[7][7] = {
      {1, 1, 0, 0, 0, 0, 0}, {1, 1, 1, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0, 0}, {0, 0, 1, 1, 1, 0, 0},
      {0, 0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 1, 1, 1}, {0, 0, 0, 0, 0, 1, 1}};
  return table[left][right];
}

std::vector<std::vector<bool>> switch_table() {
  std::vector<std::vector<bool>> t(kSwitchLevels, std::vector<bool>(kSwitchLevels));
  for (int l = 0; l < kSwitchLevels; ++l)
    for (int r = 0; r < kSwitchLevels; ++r) t[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)] = switch_allowed(l, r);
  return t;
}

bool string_allowed(const std::vector<int>& s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (!switch_allowed(s[i], s[i + 1])) return false;
  return true;
}

std::size_t LiftedGsconInstance::phi_index() const {
  std::size_t idx = 0;
  for (int i = 0; i < N(); ++i) idx += 6 * h.reg().strides()[static_cast<std::size_t>(2 * i + 1)];
  return idx;
}

StateVector LiftedGsconInstance::psi_start() const { return StateVector::basis(h.dim(), psi_index()); }
StateVector LiftedGsconInstance::phi_target() const { return StateVector::basis(h.dim(), phi_index()); }

double default_penalty(const TIStandardFamily& family) {
  return 4.0 * spectral_norm(chain_hamiltonian(family.local_term, family.N)) + 1.0;
}

namespace {

SpMat forbidden_projector(double weight) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (int l = 0; l < kSwitchLevels; ++l)
    for (int r = 0; r < kSwitchLevels; ++r)
      if (!switch_allowed(l, r)) t.emplace_back(l * kSwitchLevels + r, l * kSwitchLevels + r, weight);
  SpMat m(49, 49);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

LocalOperatorSum string_penalty(int N) {
  LocalOperatorSum e(Register(std::vector<int>(static_cast<std::size_t>(N), kSwitchLevels)));
  for (int i = 0; i + 1 < N; ++i)
    e.add({static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1)}, forbidden_projector(1.0));
  return e;
}

LiftedGsconInstance build_lifted(const TIStandardFamily& family, std::optional<double> penalty_weight, int b) {
  const int N = family.N;
  if (b < 2 || b > N - 1) throw std::invalid_argument("locality b must lie in {2, ..., N-1}");
  LiftedGsconInstance inst;
  inst.family = family;
  inst.b = b;
  inst.hprime_norm = spectral_norm(chain_hamiltonian(family.local_term, N));
  inst.penalty_weight = penalty_weight ? *penalty_weight : 4.0 * inst.hprime_norm + 1.0;
  if (!(inst.penalty_weight > 2.0 * inst.hprime_norm))
    throw std::invalid_argument("penalty weight must exceed 2||H'|| = " + std::to_string(2.0 * inst.hprime_norm));

  const int d = family.d;
  std::vector<int> dims;
  for (int i = 0; i < N; ++i) {
    dims.push_back(d);
    dims.push_back(kSwitchLevels);
  }
  inst.h = LocalOperatorSum(Register(dims));

  // h' on (A_i, A_{i+1}) times |1..5><1..5| on B_i, ordered (A_i, B_i, A_{i+1})
  std::vector<Eigen::Triplet<cplx>> trip;
  for (const auto& e : family.local_term.entries()) {
    const int a = static_cast<int>(e.row) / d, ap = static_cast<int>(e.row) % d;
    const int c = static_cast<int>(e.col) / d, cp = static_cast<int>(e.col) % d;
    for (int beta = 1; beta <= 5; ++beta)
      trip.emplace_back((a * kSwitchLevels + beta) * d + ap, (c * kSwitchLevels + beta) * d + cp, e.value);
  }
  const int ld = d * kSwitchLevels * d;
  SpMat lifted(ld, ld);
  lifted.setFromTriplets(trip.begin(), trip.end());
  const SpMat pen = forbidden_projector(inst.penalty_weight);
  for (int i = 0; i + 1 < N; ++i) {
    const auto s = static_cast<std::size_t>(2 * i);
    inst.h.add({s, s + 1, s + 2}, lifted);
    inst.h.add({s + 1, s + 3}, pen);
  }

  const int L = static_cast<int>(family.prep_circuit.size());
  inst.m_budget = 2 * L + 7 * N;
  inst.eta1 = family.alpha;
  inst.eta2 = family.beta / (8.0 * inst.m_budget * inst.m_budget);
  inst.eta3 = 0.0;
  inst.eta4 = 0.5;
  inst.delta_gap = (inst.eta1 + inst.eta2) / 2.0;
  if (!(inst.eta2 > inst.eta1))
    throw std::invalid_argument("eta2 <= eta1 at these parameters; decrease epsilon_verifier");
  return inst;
}

TraversalAudit traversal_bound_audit(const std::vector<double>& overlaps, std::size_t m, double epsilon) {
  TraversalAudit a;
  if (m == 0) {
    a.reason = "no steps";
    return a;
  }
  if (!(epsilon < 0.5)) {
    a.reason = "final distance not below 1/2";
    return a;
  }
  if (overlaps.empty()) {
    a.reason = "no states";
    return a;
  }
  a.applicable = true;
  a.bound = std::pow((1.0 - epsilon) / static_cast<double>(m), 2);
  for (std::size_t k = 0; k < overlaps.size(); ++k)
    if (overlaps[k] > a.overlap) {
      a.overlap = overlaps[k];
      a.witness = k;
    }
  a.holds = a.overlap >= a.bound;
  return a;
}

TraversalAudit traversal_bound_audit(const std::vector<StateVector>& states, const SparseHermitian& S,
                                     const SparseHermitian& T, std::size_t m, double epsilon) {
  if (states.empty()) return traversal_bound_audit(std::vector<double>{}, m, epsilon);
  if (expectation(S, states.front()) < 1.0 - 1e-10) {
    TraversalAudit a;
    a.reason = "start state is not in S";
    return a;
  }
  std::vector<double> ov;
  for (const auto& s : states) ov.push_back(1.0 - expectation(S, s) - expectation(T, s));
  return traversal_bound_audit(ov, m, epsilon);
}

namespace {

Mat range_basis(const SparseHermitian& P) {
  const DenseEigen e = diagonalize(P);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double v = e.values[i];
    if (std::abs(v) > 1e-10 && std::abs(v - 1.0) > 1e-10) throw std::invalid_argument("operator is not a projector");
    if (v > 0.5) ++k;
  }
  return e.vectors.rightCols(k);
}

}  // namespace

bool b_orthogonal(const SparseHermitian& S, const SparseHermitian& T, int b) {
  if (S.dim() != T.dim()) throw std::invalid_argument("projector dimensions differ");
  const Mat vs = range_basis(S), vt = range_basis(T);
  if (vs.cols() == 0 || vt.cols() == 0) return true;
  const std::vector<int>& dims = S.site_dims();
  const std::size_t n = dims.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(b, 0)), n);
  std::vector<std::size_t> stride(n);
  {
    std::size_t acc = 1;
    for (std::size_t j = n; j-- > 0;) {
      stride[j] = acc;
      acc *= static_cast<std::size_t>(dims[j]);
    }
  }
  // every k-subset W: Tr_{W^c} |v><w| must vanish
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    std::size_t wdim = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (pick[j]) wdim *= static_cast<std::size_t>(dims[j]);
    const std::size_t D = S.dim();
    std::vector<std::size_t> widx(D), cidx(D);
    std::size_t cdim = D / wdim;
    for (std::size_t x = 0; x < D; ++x) {
      std::size_t wi = 0, ci = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t dig = (x / stride[j]) % static_cast<std::size_t>(dims[j]);
        if (pick[j]) wi = wi * static_cast<std::size_t>(dims[j]) + dig;
        else ci = ci * static_cast<std::size_t>(dims[j]) + dig;
      }
      widx[x] = wi;
      cidx[x] = ci;
    }
    for (Eigen::Index p = 0; p < vs.cols(); ++p)
      for (Eigen::Index q = 0; q < vt.cols(); ++q) {
        Mat vm = Mat::Zero(static_cast<Eigen::Index>(wdim), static_cast<Eigen::Index>(cdim));
        Mat wm = vm;
        for (std::size_t x = 0; x < D; ++x) {
          vm(static_cast<Eigen::Index>(widx[x]), static_cast<Eigen::Index>(cidx[x])) = vs(static_cast<Eigen::Index>(x), p);
          wm(static_cast<Eigen::Index>(widx[x]), static_cast<Eigen::Index>(cidx[x])) = vt(static_cast<Eigen::Index>(x), q);
        }
        const Mat red = vm * wm.adjoint();
        if (red.cwiseAbs().maxCoeff() > 1e-10) return false;
      }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return true;
}

bool b_orthogonal_strings(const std::vector<std::vector<int>>& S, const std::vector<std::vector<int>>& T, int b) {
  for (const auto& s : S)
    for (const auto& t : T) {
      if (s.size() != t.size()) throw std::invalid_argument("string lengths differ");
      int diff = 0;
      for (std::size_t k = 0; k < s.size(); ++k) diff += s[k] != t[k];
      if (diff <= b) return false;
    }
  return true;
}

std::vector<std::string> trapped_subspace(int b) {
  if (b < 1 || b > 7) throw std::invalid_argument("trapped subspace enumeration needs 1 <= b <= 7");
  const int len = b + 1;
  std::size_t total = 1;
  for (int k = 0; k < len; ++k) total *= kSwitchLevels;
  std::vector<std::string> out;
  std::vector<int> s(static_cast<std::size_t>(len));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int k = len - 1; k >= 0; --k) {
      s[static_cast<std::size_t>(k)] = static_cast<int>(r % kSwitchLevels);
      r /= kSwitchLevels;
    }
    if (!string_allowed(s)) continue;
    const bool low = std::all_of(s.begin(), s.end(), [](int c) { return c <= 2; });
    const bool high = std::all_of(s.begin(), s.end(), [](int c) { return c >= 4; });
    if (low || high) continue;
    std::string str;
    for (int c : s) str.push_back(static_cast<char>('0' + c));
    out.push_back(str);
  }
  return out;
}

bool matches_trapped_language(const std::string& s) {
  static const std::regex lang("33*(2*|4*)");
  return std::regex_match(s, lang);
}

}  // namespace hamlift

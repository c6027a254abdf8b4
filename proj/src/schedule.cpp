#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>

#include "hamlift/gscon.hpp"

namespace hamlift {

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Prepare: return "prepare";
    case Phase::WarmUp: return "warm-up";
    case Phase::FullBlast: return "full-blast";
    case Phase::LeftDeke: return "left-deke";
    case Phase::RightDeke: return "right-deke";
    case Phase::CoolDown: return "cool-down";
    case Phase::CompleteShutdown: return "complete-shutdown";
    case Phase::Uncompute: return "uncompute";
    case Phase::CheatShortcut: return "cheat-shortcut";
    case Phase::Random: return "random";
    case Phase::Idle: return "idle";
  }
  return "?";
}

std::vector<std::size_t> ScheduleStep::chain_sites() const {
  std::set<std::size_t> s;
  for (std::size_t k : subsites) s.insert(k / 2);
  return {s.begin(), s.end()};
}

std::size_t TraversalSchedule::locality() const {
  std::size_t b = 0;
  for (const auto& s : steps) b = std::max(b, s.chain_sites().size());
  return b;
}

namespace {

SpMat to_sparse(const Mat& m) {
  SpMat s = m.sparseView(1.0, 0.0);
  s.makeCompressed();
  return s;
}

SpMat swap_levels(int dim, std::size_t x, std::size_t y) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (std::size_t k = 0; k < static_cast<std::size_t>(dim); ++k) {
    std::size_t img = k == x ? y : (k == y ? x : k);
    t.emplace_back(static_cast<int>(img), static_cast<int>(k), 1.0);
  }
  SpMat m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

ScheduleStep gate_step(const Gate& g, Phase phase) {
  ScheduleStep s;
  for (int w : g.wires) s.subsites.push_back(static_cast<std::size_t>(2 * w));
  s.unitary = to_sparse(g.local_matrix());
  s.phase = phase;
  return s;
}

}  // namespace

ScheduleStep switch_flip(int site, int from, int to, Phase phase) {
  ScheduleStep s;
  s.subsites = {static_cast<std::size_t>(2 * site + 1)};
  s.unitary = swap_levels(kSwitchLevels, static_cast<std::size_t>(from), static_cast<std::size_t>(to));
  s.phase = phase;
  return s;
}

TraversalSchedule honest_schedule(const LiftedGsconInstance& inst, bool allow_no) {
  if (inst.family.truth != Truth::Yes && !allow_no)
    throw std::invalid_argument("honest schedule requires a YES family");
  const int N = inst.N();
  const auto& F = inst.family.F;
  std::vector<int> rest;
  for (int i = 1; i <= N; ++i)
    if (std::find(F.begin(), F.end(), i) == F.end()) rest.push_back(i);

  TraversalSchedule s;
  auto& st = s.steps;
  for (const auto& g : inst.family.prep_circuit.gates()) st.push_back(gate_step(g, Phase::Prepare));
  for (int i : F) st.push_back(switch_flip(i - 1, 0, 1, Phase::WarmUp));
  for (int i : rest) st.push_back(switch_flip(i - 1, 0, 1, Phase::FullBlast));
  for (int i = N; i >= 1; --i) st.push_back(switch_flip(i - 1, 1, 2, Phase::LeftDeke));
  for (int i = 1; i <= N; ++i) st.push_back(switch_flip(i - 1, 2, 3, Phase::RightDeke));
  for (int i = N; i >= 1; --i) st.push_back(switch_flip(i - 1, 3, 4, Phase::LeftDeke));
  for (int i = 1; i <= N; ++i) st.push_back(switch_flip(i - 1, 4, 5, Phase::RightDeke));
  for (auto it = rest.rbegin(); it != rest.rend(); ++it) st.push_back(switch_flip(*it - 1, 5, 6, Phase::CoolDown));
  for (auto it = F.rbegin(); it != F.rend(); ++it) st.push_back(switch_flip(*it - 1, 5, 6, Phase::CompleteShutdown));
  const auto& gates = inst.family.prep_circuit.gates();
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) st.push_back(gate_step(it->adjoint(), Phase::Uncompute));
  while (static_cast<int>(st.size()) < inst.m_budget) st.push_back(switch_flip(N - 1, 6, 6, Phase::Idle));
  return s;
}

TraversalSchedule cheat_schedule(const LiftedGsconInstance& inst, int b) {
  const int N = inst.N();
  if (b < 2 || b > N - 1) throw std::invalid_argument("cheat schedule needs 2 <= b <= N-1");
  TraversalSchedule s;
  const int head = N - b;
  for (int i = 0; i < head; ++i) s.steps.push_back(switch_flip(i, 0, 1, Phase::CheatShortcut));
  ScheduleStep jump;
  for (int i = head; i < N; ++i) jump.subsites.push_back(static_cast<std::size_t>(2 * i + 1));
  int dim = 1;
  for (int k = 0; k < b; ++k) dim *= kSwitchLevels;
  jump.unitary = swap_levels(dim, 0, static_cast<std::size_t>(dim - 1));  // 0^b <-> 6^b
  jump.phase = Phase::CheatShortcut;
  s.steps.push_back(std::move(jump));
  for (int i = head - 1; i >= 0; --i) s.steps.push_back(switch_flip(i, 1, 6, Phase::CheatShortcut));
  return s;
}

TraversalSchedule random_schedule(const LiftedGsconInstance& inst, int b, Rng& rng) {
  const int N = inst.N();
  if (b < 1 || b > N) throw std::invalid_argument("random schedule locality out of range");
  const int d = inst.family.d;
  TraversalSchedule s;
  for (int k = 0; k < inst.m_budget; ++k) {
    const int w = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(b)));
    const int start = static_cast<int>(rng.below(static_cast<std::size_t>(N - w + 1)));
    const double u = rng.uniform();
    ScheduleStep st;
    st.phase = Phase::Random;
    if (u < 0.6) {
      // rotation between two switch strings of the window
      int dim = 1;
      for (int j = 0; j < w; ++j) {
        st.subsites.push_back(static_cast<std::size_t>(2 * (start + j) + 1));
        dim *= kSwitchLevels;
      }
      const std::size_t x = rng.below(static_cast<std::size_t>(dim));
      std::size_t y = rng.below(static_cast<std::size_t>(dim - 1));
      if (y >= x) ++y;
      const double th = rng.uniform(0.0, M_PI / 2.0);
      std::vector<Eigen::Triplet<cplx>> t;
      for (int q = 0; q < dim; ++q)
        if (static_cast<std::size_t>(q) != x && static_cast<std::size_t>(q) != y) t.emplace_back(q, q, 1.0);
      const int xi = static_cast<int>(x), yi = static_cast<int>(y);
      t.emplace_back(xi, xi, std::cos(th));
      t.emplace_back(yi, xi, std::sin(th));
      t.emplace_back(xi, yi, -std::sin(th));
      t.emplace_back(yi, yi, std::cos(th));
      st.unitary = SpMat(dim, dim);
      st.unitary.setFromTriplets(t.begin(), t.end());
    } else if (u < 0.8) {
      int dim = 1;
      for (int j = 0; j < w; ++j) {
        st.subsites.push_back(static_cast<std::size_t>(2 * (start + j)));
        dim *= d;
      }
      st.unitary = to_sparse(haar_unitary(rng, static_cast<std::size_t>(dim)));
    } else {
      const int site = start + static_cast<int>(rng.below(static_cast<std::size_t>(w)));
      st.subsites = {static_cast<std::size_t>(2 * site), static_cast<std::size_t>(2 * site + 1)};
      st.unitary = to_sparse(haar_unitary(rng, static_cast<std::size_t>(d * kSwitchLevels)));
    }
    s.steps.push_back(std::move(st));
  }
  return s;
}

std::string dominant_string(const std::vector<double>& weights, int N) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < weights.size(); ++k)
    if (weights[k] > weights[best]) best = k;
  if (weights.empty() || weights[best] <= 0.99) return "superposed";
  std::string s(static_cast<std::size_t>(N), '0');
  for (int i = N - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = static_cast<char>('0' + best % kSwitchLevels);
    best /= kSwitchLevels;
  }
  return s;
}

namespace {

struct StringClasses {
  std::vector<char> allowed;
  std::vector<char> outside;  // window neither all-{0,1,2} nor all-{4,5,6}
};

StringClasses classify(int N, int window) {
  std::size_t total = 1;
  for (int i = 0; i < N; ++i) total *= kSwitchLevels;
  StringClasses c{std::vector<char>(total), std::vector<char>(total)};
  std::vector<int> s(static_cast<std::size_t>(N));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int i = N - 1; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] = static_cast<int>(r % kSwitchLevels);
      r /= kSwitchLevels;
    }
    c.allowed[idx] = string_allowed(s);
    bool low = true, high = true;
    for (int i = N - window; i < N; ++i) {
      low = low && s[static_cast<std::size_t>(i)] <= 2;
      high = high && s[static_cast<std::size_t>(i)] >= 4;
    }
    c.outside[idx] = !low && !high;
  }
  return c;
}

std::vector<double> switch_weights(const Vec& psi, const Register& reg, int N) {
  std::size_t total = 1;
  for (int i = 0; i < N; ++i) total *= kSwitchLevels;
  std::vector<double> w(total, 0.0);
  const std::size_t n = reg.size();
  std::vector<int> dig(n, 0);
  std::size_t sidx = 0;
  std::vector<std::size_t> spow(n, 0);
  {
    std::size_t p = 1;
    for (std::size_t k = n; k-- > 0;)
      if (k % 2 == 1) {
        spow[k] = p;
        p *= kSwitchLevels;
      }
  }
  const std::size_t D = reg.dim();
  const cplx* a = psi.data();
  for (std::size_t x = 0; x < D; ++x) {
    w[sidx] += std::norm(a[x]);
    for (std::size_t k = n; k-- > 0;) {
      if (++dig[k] < reg.dims()[k]) {
        if (k % 2 == 1) sidx += spow[k];
        break;
      }
      if (k % 2 == 1) sidx -= spow[k] * static_cast<std::size_t>(dig[k] - 1);
      dig[k] = 0;
    }
  }
  return w;
}

}  // namespace

EnergyTrace run_schedule(const LiftedGsconInstance& inst, const TraversalSchedule& sched, const RunOptions& opts) {
  if (static_cast<int>(sched.steps.size()) > inst.m_budget)
    throw std::invalid_argument("schedule longer than the step budget m = " + std::to_string(inst.m_budget));
  for (std::size_t k = 0; k < sched.steps.size(); ++k)
    if (static_cast<int>(sched.steps[k].chain_sites().size()) > inst.b)
      throw std::invalid_argument("step " + std::to_string(k + 1) + " acts on more than b = " +
                                  std::to_string(inst.b) + " chain sites");
  const int N = inst.N();
  EnergyTrace tr;
  tr.window_b = opts.window_b > 0 ? opts.window_b : inst.b;
  const int window = std::min(N, tr.window_b + 1);
  const StringClasses cls = classify(N, window);
  const Register& reg = inst.h.reg();
  std::vector<LocalTerm> terms;
  terms.reserve(sched.steps.size());
  for (const auto& st : sched.steps) terms.push_back(make_local_term(reg, st.subsites, st.unitary));

  Vec psi = Vec::Zero(static_cast<Eigen::Index>(reg.dim()));
  psi[static_cast<Eigen::Index>(inst.psi_index())] = 1.0;
  const auto phi = static_cast<Eigen::Index>(inst.phi_index());

  auto record = [&]() {
    tr.energies.push_back(inst.h.expectation(psi).value);
    const std::vector<double> w = switch_weights(psi, reg, N);
    tr.switch_snapshots.push_back(dominant_string(w, N));
    double g1 = 0.0, g2 = 0.0, out = 0.0, out1 = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (cls.allowed[k]) {
        g1 += w[k];
        if (cls.outside[k]) out1 += w[k];
      } else {
        g2 += w[k];
      }
      if (cls.outside[k]) out += w[k];
    }
    tr.gamma1.push_back(g1);
    tr.gamma2.push_back(g2);
    tr.outside_psi.push_back(out);
    tr.outside_gamma1.push_back(out1);
    const double d2 = psi.squaredNorm() + 1.0 - 2.0 * psi[phi].real();
    tr.distances.push_back(std::sqrt(std::max(0.0, d2)));
  };

  record();
  for (std::size_t k = 0; k < terms.size(); ++k) {
    apply_local(psi, reg, terms[k]);
    tr.phases.push_back(sched.steps[k].phase);
    record();
  }
  tr.final_distance = tr.distances.back();
  return tr;
}

SoundnessReport soundness_audit(const LiftedGsconInstance& inst, const TraversalSchedule& sched) {
  if (inst.family.truth != Truth::No) throw std::invalid_argument("soundness audit requires a NO family");
  SoundnessReport r;
  r.trace = run_schedule(inst, sched);
  const auto& e = r.trace.energies;
  r.max_energy = *std::max_element(e.begin(), e.end());
  r.final_distance = r.trace.final_distance;
  r.energy_branch = r.max_energy >= inst.eta2;
  r.distance_branch = r.final_distance >= inst.eta4;
  const std::size_t m = sched.steps.size();
  r.traversal = traversal_bound_audit(r.trace.outside_psi, m, r.final_distance);

  DecompositionReport& d = r.decomposition;
  std::size_t k = r.traversal.witness;
  if (!r.traversal.applicable)
    k = static_cast<std::size_t>(std::max_element(r.trace.outside_psi.begin(), r.trace.outside_psi.end()) -
                                 r.trace.outside_psi.begin());
  d.step = k;
  d.gamma1_weight = r.trace.gamma1[k];
  d.gamma2_weight = r.trace.gamma2[k];
  d.overlap_outside_S = r.trace.outside_gamma1[k];
  d.overlap_psi = r.trace.outside_psi[k];
  d.energy = e[k];
  d.weights_sum_ok = std::abs(d.gamma1_weight + d.gamma2_weight - 1.0) <= 1e-10;
  const double pw = inst.penalty_weight;
  d.literal_applicable = r.traversal.applicable && r.max_energy < inst.eta2;
  if (d.literal_applicable) {
    const double mm = static_cast<double>(m);
    d.literal_holds = d.gamma2_weight < inst.eta2 / pw &&
                      d.overlap_outside_S > 1.0 / (4.0 * mm * mm) - 2.0 * std::sqrt(inst.eta2 / pw);
  }
  const double ek = std::max(d.energy, 0.0);
  d.parametrized_holds = d.gamma2_weight <= ek / pw + 1e-12 &&
                         d.overlap_outside_S >= d.overlap_psi - 2.0 * std::sqrt(ek / pw) - 1e-12;
  return r;
}

void write_trace_csv(std::ostream& os, const LiftedGsconInstance& inst, const EnergyTrace& trace) {
  os << "step,phase,energy,eta1,eta2,dominant_switch_string,distance_to_target\n" << std::setprecision(17);
  for (std::size_t k = 0; k < trace.energies.size(); ++k) {
    os << k << ',' << (k == 0 ? "start" : to_string(trace.phases[k - 1])) << ',' << trace.energies[k] << ','
       << inst.eta1 << ',' << inst.eta2 << ',' << trace.switch_snapshots[k] << ',' << trace.distances[k] << '\n';
  }
}

}  // namespace hamlift

#include "hamlift/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include <openssl/evp.h>
#include <unistd.h>

#include "suites.hpp"

namespace hamlift::harness {

namespace {

struct SuiteName {
  Suite suite;
  const char* name;
};

constexpr SuiteName kSuites[] = {
    {Suite::MappingVerify, "mapping-verify"}, {Suite::Bounds, "bounds"},       {Suite::ApxsimLift, "apxsim-lift"},
    {Suite::GsconLift, "gscon-lift"},         {Suite::Traversal, "traversal"}, {Suite::Audit, "audit"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, data.data(), data.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

}  // namespace

const char* to_string(Suite s) {
  for (const auto& e : kSuites)
    if (e.suite == s) return e.name;
  return "?";
}

Suite parse_suite(const std::string& name) {
  for (const auto& e : kSuites)
    if (name == e.name) return e.suite;
  throw ConfigError("suite", "unknown suite '" + name + "'");
}

ExperimentConfig ExperimentConfig::parse(std::istream& is) {
  ExperimentConfig c;
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string section;
  bool have_suite = false;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      parse_suite(section);
      sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (!section.empty()) {
      sections[section][key] = value;
      continue;
    }
    if (key == "suite") {
      c.suite = parse_suite(value);
      have_suite = true;
    } else if (key == "seed") {
      const long long s = parse_int(key, value);
      if (s < 0) throw ConfigError(key, "must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "threads") {
      c.threads = static_cast<int>(parse_int(key, value));
    } else if (key == "tol") {
      c.tol = parse_double(key, value);
    } else if (key == "out_dir") {
      c.out_dir = value;
    } else {
      throw ConfigError(key, "unknown top-level key");
    }
  }
  if (!have_suite) throw ConfigError("suite", "missing");
  c.params = sections[to_string(c.suite)];
  return c;
}

ExperimentConfig ExperimentConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse(in);
}

void ExperimentConfig::validate() const {
  if (threads < 1 || threads > 256) throw ConfigError("threads", "must lie in 1..256");
  if (tol < 0.0 || tol >= 1.0) throw ConfigError("tol", "must lie in [0, 1)");
  detail::validate_params(*this);
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_int(key, it->second);
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_double(key, it->second);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError(key, "expected a boolean, got '" + it->second + "'");
}

std::vector<int> ExperimentConfig::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::vector<int> out;
  for (const auto& s : split_commas(it->second)) out.push_back(static_cast<int>(parse_int(key, s)));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::vector<std::string> ExperimentConfig::get_list(const std::string& key,
                                                    const std::vector<std::string>& fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  auto out = split_commas(it->second);
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::string ExperimentConfig::echo() const {
  std::ostringstream os;
  os << "suite = " << to_string(suite) << "\nseed = " << seed << "\nthreads = " << threads
     << "\ntol = " << std::setprecision(17) << tol << '\n';
  if (!out_dir.empty()) os << "out_dir = " << out_dir << '\n';
  os << '[' << to_string(suite) << "]\n";
  for (const auto& [k, v] : params) os << k << " = " << v << '\n';
  return os.str();
}

bool ResultRecord::passed() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* ResultRecord::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

const Quantity* ResultRecord::find_quantity(const std::string& name) const {
  for (const auto& q : quantities)
    if (q.name == name) return &q;
  return nullptr;
}

void ResultRecord::check(const std::string& name, bool ok, const std::string& detail) {
  checks.push_back({name, ok, detail});
}

void ResultRecord::quantity(const std::string& name, double value, const std::string& provenance) {
  quantities.push_back({name, value, provenance});
}

std::string ResultRecord::payload() const {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& c : checks) os << "check " << c.name << ' ' << (c.passed ? "pass" : "fail") << ' ' << c.detail << '\n';
  for (const auto& q : quantities) os << "quantity " << q.name << ' ' << q.provenance << ' ' << q.value << '\n';
  for (const auto& t : traces) os << "trace " << t.name << ' ' << sha256_hex(t.content) << '\n';
  for (const auto& p : plots) os << "plot " << p.name << ' ' << sha256_hex(p.content) << '\n';
  os << "error " << error << '\n';
  return os.str();
}

std::string ResultRecord::payload_digest() const { return sha256_hex(payload()); }

std::string ResultRecord::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = to_string(config.suite);
  j["config"] = {{"seed", config.seed}, {"threads", config.threads}, {"tol", config.tol},
                 {"out_dir", config.out_dir}, {"params", config.params}};
  j["passed"] = passed();
  j["error"] = error;
  auto& cs = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  auto& qs = j["quantities"] = nlohmann::ordered_json::array();
  for (const auto& q : quantities) qs.push_back({{"name", q.name}, {"value", q.value}, {"provenance", q.provenance}});
  auto& ts = j["files"] = nlohmann::ordered_json::array();
  for (const auto& t : traces) ts.push_back(t.name);
  for (const auto& p : plots) ts.push_back(p.name);
  j["wall_seconds"] = wall_seconds;
  j["solver"] = {{"threads", threads}, {"tol", tol}};
  j["payload_digest"] = payload_digest();
  return j.dump(2) + "\n";
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void emit_plot_data(const ResultRecord& record, const std::filesystem::path& dir) {
  for (const auto& p : record.plots) atomic_write(dir / p.name, p.content);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ResultRecord run(const ExperimentConfig& config) {
  config.validate();
  ResultRecord r;
  r.config = config;
  r.threads = config.threads;
  r.tol = config.tol;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (config.suite) {
      case Suite::MappingVerify: detail::run_mapping_verify(config, r); break;
      case Suite::Bounds: detail::run_bounds(config, r); break;
      case Suite::ApxsimLift: detail::run_apxsim_lift(config, r); break;
      case Suite::GsconLift: detail::run_gscon_lift(config, r); break;
      case Suite::Traversal: detail::run_traversal(config, r); break;
      case Suite::Audit: detail::run_audit(config, r); break;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!config.out_dir.empty()) {
    const std::filesystem::path dir(config.out_dir);
    for (const auto& t : r.traces) atomic_write(dir / t.name, t.content);
    emit_plot_data(r, dir);
    atomic_write(dir / (std::string(to_string(config.suite)) + ".json"), r.to_json());
  }
  return r;
}

QuantumCircuit random_circuit(Rng& rng, int width, int gates) {
  QuantumCircuit c(width);
  for (int k = 0; k < gates; ++k) {
    const int kind = static_cast<int>(rng.below(width >= 2 ? 7 : 5));
    const int w = static_cast<int>(rng.below(static_cast<std::size_t>(width)));
    int v = w;
    if (width >= 2) {
      v = static_cast<int>(rng.below(static_cast<std::size_t>(width - 1)));
      if (v >= w) ++v;
    }
    switch (kind) {
      case 0: c.add(Gate::x(w)); break;
      case 1: c.add(Gate::z(w)); break;
      case 2: c.add(Gate::h(w)); break;
      case 3: c.add(Gate::rotation(rng.uniform(-M_PI, M_PI), w)); break;
      case 4: c.add(Gate::generic1(haar_unitary(rng, 2), w)); break;
      case 5: c.add(Gate::cnot(w, v)); break;
      default: c.add(Gate::generic2(haar_unitary(rng, 4), w, v)); break;
    }
  }
  return c;
}

QuantumCircuit random_verifier(Rng& rng, int proof, int ancilla, int gates) {
  const int width = 1 + proof + ancilla;
  QuantumCircuit v = random_circuit(rng, width, gates);
  WireLabels l;
  l.q_out = 0;
  l.ancilla.push_back(0);
  for (int w = 1; w <= proof; ++w) l.proof.push_back(w);
  for (int w = proof + 1; w < width; ++w) l.ancilla.push_back(w);
  v.set_labels(l);
  return v;
}

VerifierBundle random_bundle(Rng& rng, int m) {
  VerifierBundle b;
  b.m = m;
  for (int i = 0; i < m; ++i) {
    const int proof = 1 + static_cast<int>(rng.below(2));
    const int ancilla = proof == 2 ? 0 : static_cast<int>(rng.below(2));
    b.verifiers.push_back(random_verifier(rng, proof, ancilla, 2 + static_cast<int>(rng.below(4))));
  }
  b.validate();
  return b;
}

namespace {

Mat kron_dense(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

OutcomeDistribution povm_distribution(const VerifierBundle& bundle, const StateVector& proof) {
  std::vector<Mat> accept;
  for (const auto& v : bundle.verifiers) accept.push_back(acceptance_operator(v));
  const int m = bundle.m;
  OutcomeDistribution d{m, std::vector<double>(std::size_t{1} << m, 0.0)};
  for (std::size_t y = 0; y < d.p.size(); ++y) {
    Mat op = Mat::Identity(1, 1);
    for (int i = 0; i < m; ++i) {
      const Mat& e = accept[static_cast<std::size_t>(i)];
      const bool bit = (y >> (m - 1 - i)) & 1U;
      op = kron_dense(op, bit ? e : Mat(Mat::Identity(e.rows(), e.cols()) - e));
    }
    if (op.rows() != static_cast<Eigen::Index>(proof.dim()))
      throw std::invalid_argument("proof dimension does not match the bundle");
    d.p[y] = proof.vec().dot(op * proof.vec()).real();
  }
  return d;
}

BundleFile load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("bundle", "cannot open " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("bundle", "expected key = value in " + path.string());
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto need = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw ConfigError("bundle." + k, "missing");
    return it->second;
  };
  BundleFile f;
  f.bundle.m = static_cast<int>(parse_int("bundle.m", need("m")));
  if (f.bundle.m < 1 || f.bundle.m > 8) throw ConfigError("bundle.m", "must lie in 1..8");
  f.bundle.c = parse_double("bundle.c", need("c"));
  f.bundle.s = parse_double("bundle.s", need("s"));
  for (int i = 1; i <= f.bundle.m; ++i) {
    const std::string key = "verifier." + std::to_string(i);
    std::filesystem::path vp = need(key);
    if (vp.is_relative()) vp = path.parent_path() / vp;
    std::ifstream vin(vp);
    if (!vin) throw ConfigError("bundle." + key, "cannot open " + vp.string());
    f.bundle.verifiers.push_back(read_circuit(vin));
  }
  if (kv.count("validity")) {
    for (const auto& s : split_commas(kv["validity"])) {
      if (s == "yes") f.bundle.query_validity.push_back(Validity::Yes);
      else if (s == "no") f.bundle.query_validity.push_back(Validity::No);
      else if (s == "invalid") f.bundle.query_validity.push_back(Validity::Invalid);
      else throw ConfigError("bundle.validity", "unknown label '" + s + "'");
    }
  }
  try {
    f.bundle.validate();
  } catch (const std::exception& e) {
    throw ConfigError("bundle", e.what());
  }
  const std::string acc = kv.count("accept_set") ? kv["accept_set"] : std::string();
  try {
    f.decision = DecisionTable::from_accept_set(f.bundle.m, split_commas(acc));
  } catch (const std::exception& e) {
    throw ConfigError("bundle.accept_set", e.what());
  }
  return f;
}

const std::vector<std::vector<std::string>>& reference_switch_rows() {
  static const std::vector<std::vector<std::string>> rows = {
      {"0000", "1000", "1010"},
      {"1010", "1110", "1111"},
      {"1111", "1112", "1122", "1222", "2222"},
      {"2222", "3222", "3322", "3332", "3333"},
      {"3333", "3334", "3344", "3444", "4444"},
      {"4444", "5444", "5544", "5554", "5555"},
      {"5555", "5556", "5656"},
      {"5656", "5666", "6666"},
  };
  return rows;
}

}  // namespace hamlift::harness

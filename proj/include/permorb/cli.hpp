#pragma once

// Batch driver behind the permorb tool: named check suites, JSON-lines
// records, and the summary exit status.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "permorb/changeofvars.hpp"
#include "permorb/qchar.hpp"
#include "permorb/twistor.hpp"

namespace permorb::cli {

enum ExitCode { kPass = 0, kFail = 1, kConfig = 2 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Check names in report order.
inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"char",    "conjugation", "delta",    "even-obstruction",
                                              "grading", "jacobi",      "lminus1",  "rep",
                                              "roundtrip", "supercomm"};
  return names;
}

/// Parses "2", "5/2" or "2.5" into twice the weight.
inline int parse_twice_weight(const std::string& s) {
  auto bad = [&] { return ConfigError("weight cutoff must be a nonnegative half-integer: " + s); };
  try {
    std::size_t pos = 0;
    if (auto slash = s.find('/'); slash != std::string::npos) {
      long long n = std::stoll(s.substr(0, slash), &pos);
      long long d = std::stoll(s.substr(slash + 1));
      if (d != 1 && d != 2) throw bad();
      if (n < 0) throw bad();
      return static_cast<int>(d == 1 ? 2 * n : n);
    }
    double x = std::stod(s, &pos);
    if (pos != s.size() || x < 0 || 2 * x != static_cast<double>(static_cast<long long>(2 * x)))
      throw bad();
    return static_cast<int>(2 * x);
  } catch (const std::logic_error&) {
    throw bad();
  }
}

struct RunConfig {
  std::vector<int> ks{3};
  int twice_cutoff = 4;
  /// x-type exponent window (x, x0, x1, x2 in [-window, window-1] and mode ranges).
  int window = 2;
  /// Order in z0 for the conjugation check.
  int z0_order = 3;
  std::vector<std::string> checks{"all"};
  std::string output;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const {
    if (ks.empty()) throw ConfigError("no k given");
    for (int k : ks)
      if (k < 1) throw ConfigError("k must be >= 1, got " + std::to_string(k));
    if (twice_cutoff < 0) throw ConfigError("cutoff must be nonnegative");
    if (window < 1) throw ConfigError("window must be positive");
    if (z0_order < 1) throw ConfigError("z0 window must be positive");
    if (jobs < 1) throw ConfigError("jobs must be positive");
    if (checks.empty()) throw ConfigError("no check selected");
    for (const auto& c : checks)
      if (c != "all" && std::find(check_names().begin(), check_names().end(), c) == check_names().end())
        throw ConfigError("unknown check: " + c);
  }

  std::vector<std::string> selected() const {
    std::vector<std::string> out;
    for (const auto& n : check_names())
      for (const auto& c : checks)
        if (c == "all" || c == n) {
          out.push_back(n);
          break;
        }
    return out;
  }
};

struct Record {
  std::string check;
  int k = 0;
  std::vector<std::string> anchors;
  std::string window;
  std::string status;
  nlohmann::json detail = nlohmann::json::object();

  nlohmann::json to_json() const {
    return {{"check", check}, {"k", k},           {"anchors", anchors},
            {"window", window}, {"status", status}, {"detail", detail}};
  }
};

struct RunResult {
  std::vector<Record> records;

  bool failed() const {
    return std::any_of(records.begin(), records.end(),
                       [](const Record& r) { return r.status == "fail"; });
  }
  int exit_status() const { return failed() ? kFail : kPass; }

  std::string jsonl() const {
    std::string out;
    for (const auto& r : records) out += r.to_json().dump() + "\n";
    return out;
  }

  nlohmann::json summary() const {
    nlohmann::json by = nlohmann::json::object();
    for (const auto& r : records) {
      auto& slot = by[r.check][r.status];
      slot = slot.is_null() ? 1 : slot.get<int>() + 1;
    }
    return {{"records", records.size()}, {"checks", by}, {"status", failed() ? "fail" : "pass"}};
  }
};

inline Record from_report(const std::string& check, int k, const CheckReport& rep) {
  Record r;
  r.check = check;
  r.k = k;
  r.anchors = {rep.anchor};
  r.window = rep.window;
  r.status = rep.pass ? "pass" : "fail";
  r.detail = {{"identity", rep.identity}, {"compared", rep.compared}, {"note", rep.detail}};
  if (!rep.pass) r.detail["first_mismatch"] = rep.first_mismatch;
  return r;
}

/// The even-k stand-in for checks that need the twisted module.
inline Record expected_obstruction(const std::string& check, int k) {
  FreeFermion V;
  DeltaOp D(V, k);
  auto cert = obstruction_report(D, FreeFermion::psi());
  Record r;
  r.check = check;
  r.k = k;
  r.anchors = {"Ybar(u,x) has exponents in |u|/2k + (1/k)Z"};
  r.window = "states of weight <= 1";
  r.status = "expected-obstruction";
  r.detail = {{"certificate", cert.to_json()}};
  return r;
}

namespace detail {

inline std::vector<FermionState> states_upto(int twice) { return FreeFermion::basis(twice); }

/// A random combination of two basis states, drawn from the seeded stream.
inline FermionVector sample_vector(std::mt19937_64& rng, int twice) {
  auto basis = FreeFermion::basis(twice);
  std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
  std::uniform_int_distribution<int> coef(1, 4);
  FermionVector v;
  for (int i = 0; i < 2; ++i) {
    int c = coef(rng);
    v += Scalar(c > 2 ? c - 5 : c) * FermionVector(basis[pick(rng)]);
  }
  return v.is_zero() ? FermionVector(basis.back()) : v;
}

inline std::vector<Record> run_delta(const RunConfig& cfg, int k) {
  std::vector<Record> out;
  const long long n = 2 * cfg.window;
  for (Frac r : {Frac(0), Frac(1, 3), Frac(1, 2)})
    for (const auto& rep : delta_identity_checks(k, r, n, n)) {
      auto rec = from_report("delta", k, rep);
      rec.detail["r"] = r.to_string();
      out.push_back(std::move(rec));
    }
  return out;
}

inline std::vector<Record> run_rep(const RunConfig& cfg, int k) {
  std::vector<Record> out;
  for (const auto& rep : rep_identity_check(k, 3 * cfg.window)) out.push_back(from_report("rep", k, rep));
  return out;
}

inline std::vector<Record> run_conjugation(const RunConfig& cfg, int k) {
  FreeFermion V;
  DeltaOp D(V, k);
  std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(k));
  std::vector<FermionVector> vs{FreeFermion::psi_vector(), FreeFermion::omega(),
                                sample_vector(rng, std::max(cfg.twice_cutoff, 1))};
  std::vector<Record> out;
  for (const auto& u : {FreeFermion::psi_vector(), FreeFermion::omega()})
    for (const auto& v : vs) out.push_back(from_report("conjugation", k, conjugation_check(D, u, v, cfg.z0_order)));
  return out;
}

inline std::vector<Record> run_supercomm(const RunConfig& cfg, int k) {
  FreeFermion V;
  DeltaOp D(V, k);
  const auto states = states_upto(std::min(cfg.twice_cutoff, 3));
  const Frac lo(-cfg.window), hi(cfg.window - 1);
  const FermionVector psi = FreeFermion::psi_vector(), om = FreeFermion::omega();
  std::vector<Record> out;
  if (k % 2) {
    for (const auto& u : {psi, om})
      for (const auto& v : {psi, om})
        out.push_back(from_report("supercomm", k, supercommutator_check(D, u, v, states, lo, hi)));
    return out;
  }
  out.push_back(from_report("supercomm", k, supercommutator_check(D, psi, psi, states, lo, hi, true)));
  out.push_back(from_report("supercomm", k, supercommutator_check(D, om, psi, states, lo, hi, false)));
  // Without the fractional factor the odd-odd identity must break.
  auto without = supercommutator_check(D, psi, psi, states, lo, hi, false);
  Record r = from_report("supercomm", k, without);
  r.status = without.pass ? "fail" : "pass";
  r.detail["identity"] = "fractional factor is necessary";
  r.detail["witness"] = without.first_mismatch;
  r.detail.erase("first_mismatch");
  out.push_back(std::move(r));
  return out;
}

inline std::vector<Record> run_jacobi(const RunConfig& cfg, int k) {
  if (k % 2 == 0) return {expected_obstruction("jacobi", k)};
  FreeFermion V;
  TwistedModule tm(V, k);
  const auto states = states_upto(std::min(cfg.twice_cutoff, 3));
  const Frac lo(-cfg.window), hi(cfg.window - 1);
  std::vector<std::pair<int, int>> slots{{1, 1}};
  if (k > 1) slots.emplace_back(1, 2);
  std::vector<Record> out;
  for (auto [a, b] : slots)
    for (const auto& u : {FreeFermion::psi_vector(), FreeFermion::omega()})
      for (const auto& v : {FreeFermion::psi_vector(), FreeFermion::omega()})
        out.push_back(from_report(
            "jacobi", k, twisted_jacobi_check(tm, a, u, b, v, states, -cfg.window, cfg.window - 1, lo, hi)));
  return out;
}

inline std::vector<Record> run_lminus1(const RunConfig& cfg, int k) {
  FreeFermion V;
  DeltaOp D(V, k);
  const auto states = states_upto(cfg.twice_cutoff);
  std::vector<Record> out;
  for (const auto& u : {FreeFermion::vac_vector(), FreeFermion::psi_vector(), FreeFermion::omega()})
    out.push_back(from_report("lminus1", k, lminus1_check(D, u, states, Frac(-cfg.window - 1), Frac(cfg.window))));
  for (const auto& u : {FreeFermion::psi_vector(), FreeFermion::omega(), FermionVector(FermionState{{-2}})})
    out.push_back(from_report("lminus1", k, mode_formula_check(D, u, states, Frac(cfg.window + 1))));
  return out;
}

inline std::vector<Record> run_grading(const RunConfig& cfg, int k) {
  if (k % 2 == 0) return {expected_obstruction("grading", k)};
  FreeFermion V;
  TwistedModule tm(V, k);
  std::vector<FermionState> gens{FreeFermion::psi(), FermionState{{-2, -1}}, FermionState{{-2}}};
  std::vector<Record> out;
  for (const auto& rep : grading_check(tm, gens, states_upto(cfg.twice_cutoff), Frac(cfg.window + 1)))
    out.push_back(from_report("grading", k, rep));
  out.push_back(from_report("grading", k, irreducibility_proxy(tm, cfg.twice_cutoff)));
  return out;
}

inline std::vector<Record> run_roundtrip(const RunConfig& cfg, int k) {
  if (k % 2 == 0) return {expected_obstruction("roundtrip", k)};
  FreeFermion V;
  TwistedModule tm(V, k);
  std::vector<FermionVector> us{FreeFermion::psi_vector(), FreeFermion::omega(),
                                FermionVector(FermionState{{-2}})};
  std::vector<Record> out;
  for (const auto& rep : roundtrip_check(tm, us, states_upto(cfg.twice_cutoff), cfg.window + 1))
    out.push_back(from_report("roundtrip", k, rep));
  return out;
}

inline std::vector<Record> run_char(const RunConfig& cfg, int k) {
  const int twice = std::max(2 * cfg.twice_cutoff, 4);
  if (k % 2 == 0) {
    Record r = expected_obstruction("char", k);
    r.detail = evidence_even(k, twice);
    return {r};
  }
  std::vector<Record> out;
  out.push_back(from_report("char", k, corollary_check(k, twice)));
  auto control = corollary_check(k, twice, perturbed_a2(k));
  Record r = from_report("char", k, control);
  r.status = control.pass ? "fail" : "pass";
  r.detail["identity"] = "perturbed a_2 is caught";
  r.detail["witness"] = control.first_mismatch;
  r.detail.erase("first_mismatch");
  out.push_back(std::move(r));
  return out;
}

inline std::vector<Record> run_even_obstruction(const RunConfig&, int k) {
  FreeFermion V;
  DeltaOp D(V, k);
  auto cert = obstruction_report(D, FreeFermion::psi());
  bool refused = false;
  try {
    TwistedModule tm(V, k);
  } catch (const ObstructionError&) {
    refused = true;
  }
  Record r;
  r.check = "even-obstruction";
  r.k = k;
  r.anchors = {"Ybar(u,x) has exponents in |u|/2k + (1/k)Z"};
  r.window = "states of weight <= 1, x in [-4, 2]";
  const bool even = k % 2 == 0;
  r.status = (even ? cert.obstructed() && refused : !cert.obstructed() && !refused) ? "pass" : "fail";
  r.detail = {{"certificate", cert.to_json()}, {"construction_refused", refused}};
  return {r};
}

inline std::vector<Record> run_one(const std::string& name, const RunConfig& cfg, int k) {
  if (name == "char") return run_char(cfg, k);
  if (name == "conjugation") return run_conjugation(cfg, k);
  if (name == "delta") return run_delta(cfg, k);
  if (name == "even-obstruction") return run_even_obstruction(cfg, k);
  if (name == "grading") return run_grading(cfg, k);
  if (name == "jacobi") return run_jacobi(cfg, k);
  if (name == "lminus1") return run_lminus1(cfg, k);
  if (name == "rep") return run_rep(cfg, k);
  if (name == "roundtrip") return run_roundtrip(cfg, k);
  if (name == "supercomm") return run_supercomm(cfg, k);
  throw ConfigError("unknown check: " + name);
}

}  // namespace detail

/// Runs the selected checks for every k. Tasks go to a pool of cfg.jobs
/// workers; records come back ordered by check name, then k.
inline RunResult run(const RunConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<std::string, int>> tasks;
  for (const auto& name : cfg.selected())
    for (int k : cfg.ks) tasks.emplace_back(name, k);
  std::vector<std::vector<Record>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) {
      const auto& [name, k] = tasks[i];
      try {
        results[i] = detail::run_one(name, cfg, k);
      } catch (const ObstructionError& e) {
        Record r = expected_obstruction(name, k);
        r.detail["message"] = e.what();
        results[i] = {r};
      } catch (const std::exception& e) {
        Record r;
        r.check = name;
        r.k = k;
        r.status = "fail";
        r.detail = {{"error", e.what()}};
        results[i] = {r};
      }
    }
  };
  const int n = std::min<int>(cfg.jobs, static_cast<int>(tasks.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  RunResult out;
  for (auto& rs : results)
    for (auto& r : rs) out.records.push_back(std::move(r));
  return out;
}

/// {k, j, a_j} rows for j = 1..order.
inline nlohmann::json coeffs_json(int k, int order) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (order < 1) throw ConfigError("order must be positive");
  auto c = compute_a(k, order);
  nlohmann::json rows = nlohmann::json::array();
  for (int j = 1; j <= order; ++j) rows.push_back({{"k", k}, {"j", j}, {"a_j", c.A[j - 1].to_string()}});
  return rows;
}

/// {k, j, status} rows for the Theta closed forms, plus the adopted Theta_0 convention.
inline nlohmann::json theta_json(int k, int N, int x_order) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (N < 1 || x_order < 1) throw ConfigError("orders must be positive");
  auto res = theta_verify(k, N, x_order);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    const auto& r = res.reports[i];
    rows.push_back({{"k", k},
                    {"identity", r.identity},
                    {"anchor", r.anchor},
                    {"window", r.window},
                    {"status", r.pass ? "pass" : "fail"},
                    {"first_mismatch", r.first_mismatch}});
  }
  return {{"k", k}, {"convention", res.convention}, {"rows", rows}, {"status", res.pass() ? "pass" : "fail"}};
}

/// Both sides of the character identity for odd k; the even-k evidence otherwise.
inline nlohmann::json char_json(int k, int twice_cutoff) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (k % 2 == 0) return evidence_even(k, twice_cutoff);
  FreeFermion V;
  TwistedModule tm(V, k);
  QSeries lhs = graded_dim(tm, twice_cutoff);
  QSeries rhs = corollary_rhs(graded_dim(V, twice_cutoff), k);
  auto rep = compare_qseries(lhs, rhs, "character identity", "dim_q T = q^((k^2-1)c/24k) dim_(q^(1/k)) M");
  return {{"k", k},
          {"twisted", lhs.to_json()},
          {"rescaled", rhs.to_json()},
          {"twisted_total_c", graded_dim(tm, twice_cutoff, true).to_json()},
          {"comparison", rep.to_json()}};
}

/// Explicit output path, else $PERMORB_REPORT_DIR/<stem>, else empty.
inline std::string report_path(const std::string& output, const std::string& stem) {
  if (!output.empty()) return output;
  if (const char* dir = std::getenv("PERMORB_REPORT_DIR"); dir && *dir)
    return (std::filesystem::path(dir) / stem).string();
  return {};
}

inline void write_file(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write report to " + path);
  f << text;
}

/// Report file stem for a run, e.g. "check-jacobi-k3.jsonl".
inline std::string report_stem(const std::string& prefix, const RunConfig& cfg) {
  std::string s = prefix;
  for (const auto& c : cfg.checks) s += "-" + c;
  s += "-k";
  for (std::size_t i = 0; i < cfg.ks.size(); ++i) s += (i ? "_" : "") + std::to_string(cfg.ks[i]);
  return s + ".jsonl";
}

}  // namespace permorb::cli

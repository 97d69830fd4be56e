#pragma once

// Invariant suites shared by `seqgauss verify` and the acceptance runner. Each check
// draws its random instances from the context seed and compares library results
// against the independent routines in the oracle library.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace seqgauss::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Named tolerances with documented defaults; see Tolerances::defaults().
class Tolerances {
 public:
  Tolerances();

  double get(const std::string& key) const;
  // Throws ConfigError("--tol <key>") for unknown keys or non-positive values.
  void set(const std::string& key, double value);
  // Parses "key=value".
  void set_from_string(const std::string& assignment);

  static const std::map<std::string, double>& defaults();

 private:
  std::map<std::string, double> values_;
};

struct Context {
  std::uint64_t seed = 1;
  long long samples = 100000;
  unsigned threads = 0;
  Tolerances tol;
};

// Check groups. Each returns one result per invariant it covers.
std::vector<CheckResult> hermite_checks(const Context& ctx);
std::vector<CheckResult> wick_equivalence_checks(const Context& ctx);
std::vector<CheckResult> wick_orthogonality_checks(const Context& ctx);
std::vector<CheckResult> measure_checks(const Context& ctx);
std::vector<CheckResult> condexp_checks(const Context& ctx);
std::vector<CheckResult> block_projection_checks(const Context& ctx);
std::vector<CheckResult> closure_checks(const Context& ctx);
std::vector<CheckResult> psd_checks(const Context& ctx);
std::vector<CheckResult> divergence_checks(const Context& ctx);
std::vector<CheckResult> linalg_identity_checks(const Context& ctx);

using CheckGroup = std::vector<CheckResult> (*)(const Context&);

struct Suite {
  std::string name;
  std::vector<CheckGroup> groups;
};

// core, hermite, wick, measure, chaos, closure.
const std::vector<Suite>& suites();

// Runs one suite, or every suite for "all". Throws ConfigError("--suite") for an unknown name.
std::vector<CheckResult> run_suite(const std::string& name, const Context& ctx);

}  // namespace seqgauss::verify

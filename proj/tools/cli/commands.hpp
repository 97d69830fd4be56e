#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seqgauss::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 1;
  long long samples = 100000;
  unsigned threads = 0;
  std::vector<std::string> tolerances;  // key=value
};

struct SampleArgs {
  std::string config;
  std::string out;  // empty: stdout
  std::optional<std::uint64_t> seed;
  std::optional<long long> samples;
  unsigned threads = 1;
};

struct CondexpArgs {
  std::string config;
  std::string out;  // JSON copy of the result
};

struct ClosureArgs {
  std::string config;
  std::string out;
};

struct HermiteArgs {
  int max_n = 5;
  std::string convention = "prob";
  double x_min = -3.0;
  double x_max = 3.0;
  int points = 13;
  std::string out;
};

// Default seed: $SEQGAUSS_SEED if set to a valid integer, else 1.
std::uint64_t default_seed();

int run_verify(const VerifyArgs& args);
int run_sample(const SampleArgs& args);
int run_condexp(const CondexpArgs& args);
int run_closure(const ClosureArgs& args);
int run_hermite(const HermiteArgs& args);

}  // namespace seqgauss::cli

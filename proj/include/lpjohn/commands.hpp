#pragma once

// Command implementations behind the lpjohn executable. Each returns the
// process exit code: 0 success, 1 suite failure, 2 invalid input, 3 numerical
// failure.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace lpjohn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSuiteFailure = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumerical = 3;

struct SolveArgs {
  std::string input;
  std::string p;
  int resolution = 0;
  double tol = 1e-6;
  std::string out;  // empty: no document written
  std::uint64_t seed = 7;
};

struct SweepArgs {
  std::string input;
  std::string p_list;
  int resolution = 0;
  double tol = 1e-6;
  std::string out;  // CSV; empty writes to the output stream
};

struct ValidateArgs {
  std::string corpus = "builtin";  // "builtin", "gaussian", or a corpus file
  std::string p_ladder;            // empty: default ladder
  std::uint64_t seed = 7;
  int resolution = 0;
  std::string out;  // result document
  std::string csv;
  bool corrupt_solver = false;
  bool skip_difference_quotients = false;
};

struct VariationArgs {
  std::string f;
  std::string g;
  std::string p;
  int resolution = 0;
  bool oracle = false;
  std::string out;
};

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);
int cmd_variation(const VariationArgs& args, std::ostream& out, std::ostream& err);

}  // namespace lpjohn

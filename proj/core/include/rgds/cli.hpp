#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rgds {

/// One invocation of the command line tool. Unset optionals fall back to
/// per-command defaults; `seed` defaults to 0.
struct RunConfig {
  std::string command;
  std::string spec_path;
  std::uint64_t seed = 0;
  std::optional<double> eps;
  std::vector<double> eps_schedule;
  std::optional<std::uint64_t> k;
  std::optional<std::uint64_t> m;
  std::optional<std::uint32_t> depth;
  std::optional<double> tol;
  std::string out_path;
  std::string csv_path;
  std::string svg_path;
  unsigned threads = 0;  // 0: RGDS_THREADS, then hardware concurrency
  bool no_timestamp = false;
  std::string mode = "one";  // one | inf
  std::string vertex;        // defaults to the first vertex
  std::optional<std::uint32_t> rounds;
  std::vector<double> s_values;
  bool with_s_H = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one command. Writes the JSON report to `out_path` (human summary to
/// `out`) or, without `out_path`, the JSON report to `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv into a RunConfig and runs it.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rgds

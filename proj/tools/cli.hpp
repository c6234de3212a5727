#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyperfovea/geometry.hpp"

namespace hyperfovea::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchConfig {
  FoveationParams params{};
  std::size_t boxes = 100;
  std::size_t batch = 4;
  std::size_t runs = 50;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct Timing {
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
};

struct BenchReport {
  Timing forward;
  Timing inverse;
  double forward_mean_iterations = 0.0;
  double newton_mean_iterations = 0.0;
  double fixed_point_mean_iterations = 0.0;  // damped residual iteration, same tol
  double fixed_point_eta = 0.0;
  double max_roundtrip_error = 0.0;
};

// Transforms boxes x batch random boxes to the foveated form and back, runs times.
BenchReport run_bench(const BenchConfig& config);

}  // namespace hyperfovea::cli

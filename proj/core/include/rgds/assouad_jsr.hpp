#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgds/matrix.hpp"
#include "rgds/system_model.hpp"

namespace rgds {

/// Square non-negative matrices of equal size. When `successors` is
/// non-empty, member i may only be followed by members in successors[i].
struct MatrixFamily {
  std::vector<Matrix> members;
  std::vector<std::string> labels;
  std::vector<std::vector<std::uint32_t>> successors;
};

struct JsrBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::uint32_t depth = 0;             // longest product length explored
  std::vector<std::uint32_t> witness;  // member indices of the best cycle
  bool loose = false;                  // depth cut short by the product budget
  std::uint64_t products = 0;
};

/// lower: max over admissible cycles of length k <= depth of rho(product)^(1/k).
/// upper: min over k <= depth of max admissible length-k product row norm^(1/k).
/// The search is exhaustive up to the deepest level whose cumulative product
/// count stays within `budget`; deeper levels are skipped and flagged.
JsrBounds jsr_bounds(const MatrixFamily& family, std::uint32_t depth, std::uint64_t budget = 100'000);

struct AssouadTraceRow {
  double eps = 0.0;
  std::uint32_t k_max = 0;
  std::size_t family_size = 0;
  double lower = 0.0;  // joint spectral radius bounds
  double upper = 0.0;
  std::string witness;
  bool loose = false;
  double dim_lower = 0.0;  // log lower / -log eps
  double dim_upper = 0.0;
};

struct AssouadResult {
  double lower_bound = 0.0;
  std::optional<double> value_if_ussc;
  double upper_estimate = 0.0;
  bool loose = false;
  std::vector<AssouadTraceRow> trace;
  std::string method;
};

/// Per eps: the family of layered matrices at s = 0, one per k_max-letter
/// prefix, with the shift successor relation between prefixes.
MatrixFamily layered_family(const SystemSpec& spec, double eps, std::size_t max_members = 1u << 16);

AssouadResult assouad_1var(const SystemSpec& spec, std::span<const double> eps_schedule, std::uint32_t depth = 8);

/// Max over choice trees of the spectral radius of the stopping-edge count
/// matrix. Exact (Pareto frontier of achievable rows) when same-vertex images
/// of the seed box are disjoint; otherwise a sampled lower bound.
AssouadResult assouad_inf(const SystemSpec& spec, std::span<const double> eps_schedule, std::uint64_t seed = 0,
                          std::size_t samples = 2000);

/// Count-matrix rows reachable from each vertex at one eps, Pareto-reduced.
std::vector<std::vector<std::vector<double>>> achievable_rows(const SystemSpec& spec, double eps,
                                                              std::size_t frontier_cap = 4096,
                                                              bool* truncated = nullptr);

/// eps;k_max;family_size;lower;upper;witness
std::string jsr_trace_csv(const AssouadResult& result);

}  // namespace rgds

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rgds/matrix.hpp"
#include "rgds/system_model.hpp"
#include "rgds/word_algebra.hpp"

namespace rgds {

/// Entry (v,w) = sum_i pi_i sum over v->w edges of graph i of c_e^s.
Matrix expectation_matrix(const SystemSpec& spec, double s);

struct InfRoot {
  double s_h = 0.0;
  double rho_at_zero = 0.0;
  int probes = 0;
};

/// Root of rho(expectation_matrix(s)) = 1. Throws NotSurviving when the
/// spectral radius at s = 0 does not exceed 1.
InfRoot solve_s_h_inf(const SystemSpec& spec, double tol = 1e-9);

struct InfDimensionReport {
  double s_h = 0.0;
  double rho_at_zero = 0.0;
  // Hausdorff, packing and box dimension coincide almost surely on survival.
  double hausdorff = 0.0;
  double packing = 0.0;
  double box = 0.0;
  std::string method;
};

InfDimensionReport inf_dimension_report(const SystemSpec& spec, double tol = 1e-9);

struct TreeNode {
  std::uint32_t parent = 0;  // self for the root
  EdgeId edge = 0;           // edge from the parent; unused for the root
  std::uint32_t depth = 0;
  VertexIndex vertex = 0;    // terminal vertex
  Letter label = 0;          // graph drawn at this node
  double ratio = 1.0;
  Similitude map;
  bool leaf = false;         // reached the stopping depth or ratio
};

struct GrowLimits {
  std::optional<std::uint32_t> depth;
  std::optional<double> eps;
  std::size_t node_budget = 10'000'000;
};

/// Random recursive construction from one root vertex. Each node draws its
/// graph from a hash of (seed, root, word), so the result does not depend on
/// traversal order.
struct RecursiveTree {
  std::uint64_t seed = 0;
  VertexIndex root = 0;
  std::vector<TreeNode> nodes;      // breadth-first
  std::vector<std::uint32_t> frontier;  // indices of leaves
  bool extinct = false;

  Word word_of(std::uint32_t node) const;
};

RecursiveTree grow_tree(const SystemSpec& spec, const RealizationStream& stream, VertexIndex root,
                        const GrowLimits& limits);

/// Frontier size at Gamma-depth `depth` without storing the tree.
std::uint64_t frontier_count(const SystemSpec& spec, std::uint64_t seed, VertexIndex root, std::uint32_t depth,
                             std::uint64_t node_budget = 10'000'000);

/// Graph drawn at a node, keyed by the node's word hash.
Letter node_label(const RealizationStream& stream, std::uint64_t word_hash);
std::uint64_t root_hash(std::uint64_t seed, VertexIndex root) noexcept;
std::uint64_t child_hash(std::uint64_t parent, EdgeId edge) noexcept;

/// word; graph label; terminal vertex; ratio -- one node per line.
std::string tree_dump(const SystemSpec& spec, const RecursiveTree& tree);

}  // namespace rgds

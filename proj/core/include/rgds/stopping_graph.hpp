#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rgds/system_model.hpp"
#include "rgds/word_algebra.hpp"

namespace rgds {

/// A path in the original graphs whose contraction first drops to <= eps at
/// its final edge. Step t of the path uses the graph of letter t.
struct StoppingEdge {
  Word word;
  VertexIndex from = 0;
  VertexIndex to = 0;
  std::uint32_t gamma_len = 0;
  double ratio = 1.0;
  Similitude map;  // S_{e1} o ... o S_{eq}
  OrientedBox image;
};

struct StoppingGraph {
  double epsilon = 0.0;
  std::uint32_t k_max = 0;
  std::vector<Letter> prefix;
  std::vector<StoppingEdge> edges;   // kept, lexicographic by word
  std::vector<StoppingEdge> pruned;  // lexicographic by word
  std::size_t vertex_count = 0;

  std::size_t kept_count() const noexcept { return edges.size(); }
  std::size_t pruned_count() const noexcept { return pruned.size(); }
  /// Number of kept edges leaving v.
  std::size_t out_degree(VertexIndex v) const;
};

/// Least k >= 1 with c_max^k < eps. eps must lie in (0, 1].
std::uint32_t k_max(const SystemSpec& spec, double eps);
std::uint32_t k_max(double c_max, double eps);

/// All stopping paths for the given letter prefix, lexicographic by word.
std::vector<StoppingEdge> enumerate_estar(const SystemSpec& spec, std::span<const Letter> letters,
                                          double eps);

struct Selection {
  std::vector<StoppingEdge> kept;
  std::vector<StoppingEdge> pruned;
};

/// Greedy inclusion-maximal selection of edges with pairwise disjoint images,
/// scanning in lexicographic word order. Disjointness is enforced among
/// edges that share a source vertex.
Selection select_disjoint(std::vector<StoppingEdge> edges, double tolerance = 1e-12);

StoppingGraph build_stopping_graph(const SystemSpec& spec, std::span<const Letter> letters, double eps);
StoppingGraph build_stopping_graph(const SystemSpec& spec, const RealizationStream& stream, double eps);

/// eta_q as arrangement matrices, q = 1..k_max (index q-1).
std::vector<ArrMatrix> stopping_arrangements(const StoppingGraph& sg);

/// word;from;to;gamma_len;ratio;image
std::string stopping_csv(const SystemSpec& spec, const StoppingGraph& sg);
std::string format_word(const Word& w);
std::string format_box(const OrientedBox& box);

}  // namespace rgds

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rgds {

using Point = std::array<double, 2>;
using EdgeId = std::uint32_t;
using Letter = std::uint32_t;
using VertexIndex = std::uint32_t;

/// x -> ratio * R(angle) * F * x + translation, where F is the reflection
/// (x, y) -> (-x, y) when `reflect` is set. In one dimension the angle is
/// always zero and F is x -> -x.
struct Similitude {
  double ratio = 1.0;
  double angle = 0.0;
  bool reflect = false;
  Point translation{0.0, 0.0};

  static Similitude identity() { return {}; }

  Point apply(const Point& p) const noexcept;
  /// (*this) o inner.
  Similitude compose(const Similitude& inner) const noexcept;

  bool operator==(const Similitude&) const = default;
};

/// Axis-aligned box; in one dimension only index 0 is used.
struct Box {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};

  double diameter(int dimension) const noexcept;
};

/// Rectangle (or interval when dimension == 1) in general position.
struct OrientedBox {
  int dimension = 1;
  Point center{0.0, 0.0};
  Point half{0.0, 0.0};
  double angle = 0.0;
  bool reflect = false;

  double lo() const noexcept { return center[0] - half[0]; }
  double hi() const noexcept { return center[0] + half[0]; }
  double diameter() const noexcept;
  std::array<Point, 4> corners() const noexcept;
};

OrientedBox to_oriented(const Box& box, int dimension) noexcept;

/// Exact image of a box under a similitude.
OrientedBox apply_map(const Similitude& map, const OrientedBox& box) noexcept;
OrientedBox apply_map(const Similitude& map, const Box& box, int dimension) noexcept;

/// Closed-set intersection test; gaps not exceeding `tolerance` count as
/// intersecting. Separating-axis test in two dimensions.
bool boxes_intersect(const OrientedBox& a, const OrientedBox& b, double tolerance = 1e-12) noexcept;
bool box_contained(const OrientedBox& inner, const Box& outer, double tolerance) noexcept;

struct EdgeSpec {
  VertexIndex from = 0;
  VertexIndex to = 0;
  Similitude map;
};

struct GraphSpec {
  double prob = 0.0;
  std::vector<EdgeSpec> edges;
};

/// A random graph-directed system: graphs on a shared vertex set, drawn
/// with probabilities `prob`, edges carrying contracting similitudes.
///
/// Edge ids are global and assigned by position: all edges of graph 0 in
/// order, then graph 1, and so on.
class SystemSpec {
 public:
  SystemSpec(int dimension, std::vector<std::string> vertices, Box seed_box,
             std::vector<GraphSpec> graphs);

  int dimension() const noexcept { return dimension_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t graph_count() const noexcept { return graphs_.size(); }
  std::size_t edge_count() const noexcept { return edge_graph_.size(); }

  const std::vector<std::string>& vertices() const noexcept { return vertices_; }
  const std::vector<GraphSpec>& graphs() const noexcept { return graphs_; }
  const GraphSpec& graph(Letter i) const { return graphs_.at(i); }
  const Box& seed_box() const noexcept { return seed_box_; }

  const EdgeSpec& edge(EdgeId id) const {
    return graphs_[edge_graph_.at(id)].edges[edge_local_[id]];
  }
  Letter graph_of(EdgeId id) const { return edge_graph_.at(id); }
  std::span<const double> ratios() const noexcept { return ratios_; }

  /// Global ids of edges of graph `i` leaving `v`, in declaration order.
  std::span<const EdgeId> out_edges(Letter i, VertexIndex v) const;

  std::vector<double> probabilities() const;
  bool deterministic() const noexcept { return graphs_.size() == 1; }

  double c_max() const noexcept { return c_max_; }
  double c_min() const noexcept { return c_min_; }

 private:
  int dimension_;
  std::vector<std::string> vertices_;
  Box seed_box_;
  std::vector<GraphSpec> graphs_;

  std::vector<std::uint32_t> edge_local_;
  std::vector<Letter> edge_graph_;
  std::vector<double> ratios_;
  std::vector<std::vector<std::vector<EdgeId>>> out_;  // [graph][vertex]
  double c_max_ = 0.0;
  double c_min_ = 0.0;
};

/// Deterministic counter-based letter source: letter(t) depends only on
/// (seed, cursor + t), so shifts are O(1) and independent consumers agree.
class RealizationStream {
 public:
  RealizationStream(std::uint64_t seed, std::vector<double> distribution, std::uint64_t cursor = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t cursor() const noexcept { return cursor_; }
  const std::vector<double>& distribution() const noexcept { return distribution_; }
  std::size_t alphabet_size() const noexcept { return distribution_.size(); }

  Letter letter(std::uint64_t t) const noexcept;
  RealizationStream shifted(std::uint64_t by) const;

 private:
  std::uint64_t seed_;
  std::uint64_t cursor_;
  std::vector<double> distribution_;
  std::vector<double> cumulative_;
};

RealizationStream make_stream(const SystemSpec& spec, std::uint64_t seed);

std::vector<Letter> sample_letters(const RealizationStream& stream, std::size_t count);

/// splitmix64 finaliser; also used to derive per-sample and per-node seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;
double unit_uniform(std::uint64_t bits) noexcept;

enum class Mode { OneVariable, InfiniteVariable };

struct Violation {
  std::string condition;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  std::vector<Violation> warnings;
  bool ussc_sufficient = false;
  bool surviving = false;
  bool strongly_connected = false;
};

ValidationReport validate_system(const SystemSpec& spec, Mode mode);

/// Transitive reachability over the union of all graphs: reach[v][w].
std::vector<std::vector<bool>> union_reachability(const SystemSpec& spec);

}  // namespace rgds

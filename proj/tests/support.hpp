#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rgds/spec_io.hpp"
#include "rgds/system_model.hpp"
#include "rgds/word_algebra.hpp"

namespace rgds::testing {

inline std::string data_path(const std::string& name) { return std::string(RGDS_TEST_DATA) + "/" + name; }

inline SystemSpec load(const std::string& name) { return load_spec(data_path(name)); }

inline EdgeSpec edge1(VertexIndex from, VertexIndex to, double ratio, double shift) {
  EdgeSpec e;
  e.from = from;
  e.to = to;
  e.map.ratio = ratio;
  e.map.translation = {shift, 0.0};
  return e;
}

/// One-vertex system on [0,1] from (ratio, shift) lists, one list per graph.
inline SystemSpec interval_system(const std::vector<std::vector<std::pair<double, double>>>& graphs,
                                  std::vector<double> probs = {}) {
  if (probs.empty()) probs.assign(graphs.size(), 1.0 / static_cast<double>(graphs.size()));
  std::vector<GraphSpec> gs;
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    GraphSpec spec{probs[g], {}};
    for (auto [c, t] : graphs[g]) spec.edges.push_back(edge1(0, 0, c, t));
    gs.push_back(std::move(spec));
  }
  Box box;
  box.hi = {1.0, 0.0};
  return SystemSpec(1, {"v"}, box, std::move(gs));
}

inline SystemSpec cantor_third() { return interval_system({{{1.0 / 3, 0.0}, {1.0 / 3, 2.0 / 3}}}); }

/// x -> a x + b on the line; reflection when a < 0.
struct Affine {
  double a = 1.0;
  double b = 0.0;
  Affine then_inner(const Affine& inner) const { return {a * inner.a, a * inner.b + b}; }
  std::pair<double, double> image(double lo, double hi) const {
    const double x = a * lo + b, y = a * hi + b;
    return {std::min(x, y), std::max(x, y)};
  }
};

inline Affine affine_of(const Similitude& s) { return {s.reflect ? -s.ratio : s.ratio, s.translation[0]}; }

/// Random small one-dimensional system: n vertices, g graphs, every vertex
/// with at least one outgoing edge per graph, at most `max_edges` edges per
/// graph, images inside [0,1].
inline SystemSpec random_system(std::mt19937_64& rng, std::size_t n, std::size_t g, std::size_t max_edges) {
  std::uniform_real_distribution<double> ratio(0.2, 0.6), unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.3);
  std::vector<GraphSpec> graphs;
  std::vector<double> weights;
  for (std::size_t i = 0; i < g; ++i) weights.push_back(0.2 + unit(rng));
  double total = 0.0;
  for (double w : weights) total += w;
  for (std::size_t i = 0; i < g; ++i) {
    GraphSpec gs{weights[i] / total, {}};
    const std::size_t extra = max_edges > n ? std::uniform_int_distribution<std::size_t>(0, max_edges - n)(rng) : 0;
    std::vector<VertexIndex> sources;
    for (VertexIndex v = 0; v < n; ++v) sources.push_back(v);
    for (std::size_t x = 0; x < extra; ++x)
      sources.push_back(static_cast<VertexIndex>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)));
    for (VertexIndex v : sources) {
      const double c = ratio(rng);
      EdgeSpec e = edge1(v, static_cast<VertexIndex>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)), c,
                         unit(rng) * (1.0 - c));
      if (coin(rng)) {
        e.map.reflect = true;
        e.map.translation[0] += c;
      }
      gs.edges.push_back(e);
    }
    // Last-weight fix so probabilities sum to one exactly enough.
    graphs.push_back(std::move(gs));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < g; ++i) acc += graphs[i].prob;
  graphs.back().prob = 1.0 - acc;
  std::vector<std::string> names;
  for (std::size_t v = 0; v < n; ++v) names.push_back("v" + std::to_string(v));
  Box box;
  box.hi = {1.0, 0.0};
  return SystemSpec(1, names, box, std::move(graphs));
}

/// Per-letter edge matrix: entry (v,w) holds the edges v -> w of that graph.
inline ArrMatrix letter_matrix(const SystemSpec& spec, Letter g) {
  ArrMatrix m(spec.vertex_count(), spec.vertex_count());
  for (VertexIndex v = 0; v < spec.vertex_count(); ++v)
    for (EdgeId id : spec.out_edges(g, v)) m(v, spec.edge(id).to) = arr_add(m(v, spec.edge(id).to), Arrangement::letter(id));
  return m;
}

inline double word_ratio(const SystemSpec& spec, const Word& w) {
  double r = 1.0;
  for (EdgeId e : w) r *= spec.ratios()[e];
  return r;
}

inline Affine word_affine(const SystemSpec& spec, const Word& w) {
  Affine f;
  for (EdgeId e : w) f = f.then_inner(affine_of(spec.edge(e).map));
  return f;
}

}  // namespace rgds::testing

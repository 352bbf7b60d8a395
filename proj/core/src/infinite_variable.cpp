#include "rgds/infinite_variable.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rgds/errors.hpp"
#include "rgds/pressure_engine.hpp"
#include "rgds/stopping_graph.hpp"

namespace rgds {

Matrix expectation_matrix(const SystemSpec& spec, double s) {
  const std::size_t n = spec.vertex_count();
  Matrix m(n, n);
  for (const auto& g : spec.graphs())
    for (const auto& e : g.edges) m(e.from, e.to) += g.prob * std::pow(e.map.ratio, s);
  return m;
}

InfRoot solve_s_h_inf(const SystemSpec& spec, double tol) {
  InfRoot out;
  auto f = [&](double s) {
    const double rho = spectral_radius(expectation_matrix(spec, s)).value;
    return rho > 0.0 ? std::log(rho) : -std::numeric_limits<double>::infinity();
  };
  out.rho_at_zero = spectral_radius(expectation_matrix(spec, 0.0)).value;
  if (!(out.rho_at_zero > 1.0)) {
    std::ostringstream os;
    os << "spectral radius of the expected edge counts is " << out.rho_at_zero << " <= 1";
    throw Error(ErrorKind::NotSurviving, os.str());
  }
  double hi = spec.dimension() + 5.0;
  for (int i = 0; f(hi) >= 0.0; ++i) {
    if (i == 12) throw Error(ErrorKind::BracketFailure, "no sign change in expectation spectral radius");
    hi *= 2.0;
  }
  out.s_h = bisect_decreasing(f, 0.0, hi, tol, &out.probes);
  return out;
}

InfDimensionReport inf_dimension_report(const SystemSpec& spec, double tol) {
  const auto root = solve_s_h_inf(spec, tol);
  InfDimensionReport r;
  r.s_h = root.s_h;
  r.rho_at_zero = root.rho_at_zero;
  r.hausdorff = r.packing = r.box = root.s_h;
  r.method = "bisection on log spectral radius of the expectation matrix";
  return r;
}

std::uint64_t root_hash(std::uint64_t seed, VertexIndex root) noexcept {
  return mix64(seed ^ mix64(0x243f6a8885a308d3ULL + root));
}

std::uint64_t child_hash(std::uint64_t parent, EdgeId edge) noexcept {
  return mix64(parent ^ mix64(0x13198a2e03707344ULL + edge));
}

Letter node_label(const RealizationStream& stream, std::uint64_t word_hash) {
  // letter(t) hashes (seed, t); feeding the word hash as t keeps one
  // sampling path for both constructions.
  return stream.letter(word_hash);
}

Word RecursiveTree::word_of(std::uint32_t node) const {
  Word w;
  while (nodes.at(node).depth > 0) {
    w.push_back(nodes[node].edge);
    node = nodes[node].parent;
  }
  return {w.rbegin(), w.rend()};
}

RecursiveTree grow_tree(const SystemSpec& spec, const RealizationStream& stream, VertexIndex root,
                        const GrowLimits& limits) {
  if (!limits.depth && !limits.eps) throw Error(ErrorKind::MalformedSpec, "grow_tree needs a depth or eps");
  if (limits.eps && (!(*limits.eps > 0.0) || *limits.eps > 1.0))
    throw Error(ErrorKind::BadEpsilon, "eps must lie in (0,1]");
  if (root >= spec.vertex_count()) throw Error(ErrorKind::MalformedSpec, "root vertex out of range");
  RecursiveTree tree;
  tree.seed = stream.seed();
  tree.root = root;
  std::vector<std::uint64_t> hashes;
  auto is_leaf = [&](const TreeNode& n) {
    if (limits.depth && n.depth >= *limits.depth) return true;
    if (limits.eps && n.depth > 0 && n.ratio <= *limits.eps * (1.0 + 1e-12)) return true;
    return false;
  };

  TreeNode r;
  r.vertex = root;
  tree.nodes.push_back(r);
  hashes.push_back(root_hash(stream.seed(), root));
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    TreeNode& node = tree.nodes[i];
    node.label = node_label(stream, hashes[i]);
    if (is_leaf(node)) {
      node.leaf = true;
      tree.frontier.push_back(static_cast<std::uint32_t>(i));
      continue;
    }
    const TreeNode parent = node;  // nodes may reallocate below
    for (EdgeId id : spec.out_edges(parent.label, parent.vertex)) {
      if (tree.nodes.size() >= limits.node_budget)
        throw Error(ErrorKind::DepthBudget, "tree exceeds " + std::to_string(limits.node_budget) + " nodes");
      const EdgeSpec& e = spec.edge(id);
      TreeNode child;
      child.parent = static_cast<std::uint32_t>(i);
      child.edge = id;
      child.depth = parent.depth + 1;
      child.vertex = e.to;
      child.ratio = parent.ratio * e.map.ratio;
      child.map = parent.map.compose(e.map);
      tree.nodes.push_back(child);
      hashes.push_back(child_hash(hashes[i], id));
    }
  }
  tree.extinct = tree.frontier.empty();
  return tree;
}

namespace {

struct Counter {
  const SystemSpec& spec;
  RealizationStream stream;
  std::uint32_t depth;
  std::uint64_t budget;
  std::uint64_t visited = 0;

  std::uint64_t count(VertexIndex v, std::uint64_t hash, std::uint32_t level) {
    if (++visited > budget) throw Error(ErrorKind::DepthBudget, "tree exceeds node budget");
    if (level == depth) return 1;
    std::uint64_t total = 0;
    for (EdgeId id : spec.out_edges(node_label(stream, hash), v))
      total += count(spec.edge(id).to, child_hash(hash, id), level + 1);
    return total;
  }
};

}  // namespace

std::uint64_t frontier_count(const SystemSpec& spec, std::uint64_t seed, VertexIndex root, std::uint32_t depth,
                             std::uint64_t node_budget) {
  Counter c{spec, make_stream(spec, seed), depth, node_budget};
  return c.count(root, root_hash(seed, root), 0);
}

std::string tree_dump(const SystemSpec& spec, const RecursiveTree& tree) {
  std::ostringstream os;
  char ratio[32];
  for (std::uint32_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    std::snprintf(ratio, sizeof ratio, "%.17g", n.ratio);
    os << format_word(tree.word_of(i)) << "; " << n.label << "; " << spec.vertices()[n.vertex] << "; " << ratio
       << '\n';
  }
  return os.str();
}

}  // namespace rgds

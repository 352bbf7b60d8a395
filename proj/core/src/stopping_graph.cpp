#include "rgds/stopping_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rgds/errors.hpp"

namespace rgds {

namespace {

// Relative slack on ratio comparisons so that eps = c^j hits exactly.
constexpr double kRatioSlack = 1e-12;

struct Walker {
  const SystemSpec& spec;
  std::span<const Letter> letters;
  double eps;
  OrientedBox delta;
  std::vector<StoppingEdge>& out;
  Word word;

  void walk(VertexIndex origin, VertexIndex at, const Similitude& map) {
    const std::size_t step = word.size();
    for (EdgeId id : spec.out_edges(letters[step], at)) {
      const EdgeSpec& e = spec.edge(id);
      const Similitude next = map.compose(e.map);
      word.push_back(id);
      if (next.ratio <= eps * (1.0 + kRatioSlack)) {
        StoppingEdge se;
        se.word = word;
        se.from = origin;
        se.to = e.to;
        se.gamma_len = static_cast<std::uint32_t>(word.size());
        se.ratio = next.ratio;
        se.map = next;
        se.image = apply_map(next, delta);
        out.push_back(std::move(se));
      } else {
        walk(origin, e.to, next);
      }
      word.pop_back();
    }
  }
};

}  // namespace

std::size_t StoppingGraph::out_degree(VertexIndex v) const {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(), [v](const StoppingEdge& e) { return e.from == v; }));
}

std::uint32_t k_max(double c_max, double eps) {
  if (!(eps > 0.0) || eps > 1.0 || !std::isfinite(eps))
    throw Error(ErrorKind::BadEpsilon, "eps must lie in (0,1]");
  if (!(c_max > 0.0) || c_max >= 1.0) throw Error(ErrorKind::NotContracting, "c_max must lie in (0,1)");
  std::uint32_t k = 1;
  double c = c_max;
  while (!(c < eps * (1.0 - kRatioSlack))) {
    c *= c_max;
    ++k;
  }
  return k;
}

std::uint32_t k_max(const SystemSpec& spec, double eps) { return k_max(spec.c_max(), eps); }

std::vector<StoppingEdge> enumerate_estar(const SystemSpec& spec, std::span<const Letter> letters,
                                          double eps) {
  const std::uint32_t kmax = k_max(spec, eps);
  if (letters.size() < kmax)
    throw Error(ErrorKind::PrefixTooShort, "need " + std::to_string(kmax) + " letters, got " +
                                               std::to_string(letters.size()));
  for (Letter l : letters.first(kmax))
    if (l >= spec.graph_count()) throw Error(ErrorKind::MalformedSpec, "letter out of range");
  std::vector<StoppingEdge> out;
  Walker w{spec, letters, eps, to_oriented(spec.seed_box(), spec.dimension()), out, {}};
  for (VertexIndex v = 0; v < spec.vertex_count(); ++v) w.walk(v, v, Similitude::identity());
  std::stable_sort(out.begin(), out.end(),
                   [](const StoppingEdge& a, const StoppingEdge& b) { return a.word < b.word; });
  return out;
}

Selection select_disjoint(std::vector<StoppingEdge> edges, double tolerance) {
  std::stable_sort(edges.begin(), edges.end(),
                   [](const StoppingEdge& a, const StoppingEdge& b) { return a.word < b.word; });
  Selection sel;
  // Indices of kept edges per source vertex.
  std::vector<std::vector<std::size_t>> kept_by_vertex;
  for (auto& e : edges) {
    if (e.from >= kept_by_vertex.size()) kept_by_vertex.resize(e.from + 1);
    auto& bucket = kept_by_vertex[e.from];
    const bool clash = std::any_of(bucket.begin(), bucket.end(), [&](std::size_t k) {
      return boxes_intersect(sel.kept[k].image, e.image, tolerance);
    });
    if (clash) {
      sel.pruned.push_back(std::move(e));
    } else {
      bucket.push_back(sel.kept.size());
      sel.kept.push_back(std::move(e));
    }
  }
  return sel;
}

StoppingGraph build_stopping_graph(const SystemSpec& spec, std::span<const Letter> letters, double eps) {
  StoppingGraph sg;
  sg.epsilon = eps;
  sg.k_max = k_max(spec, eps);
  sg.vertex_count = spec.vertex_count();
  auto estar = enumerate_estar(spec, letters, eps);
  sg.prefix.assign(letters.begin(), letters.begin() + sg.k_max);
  auto sel = select_disjoint(std::move(estar));
  sg.edges = std::move(sel.kept);
  sg.pruned = std::move(sel.pruned);
  return sg;
}

StoppingGraph build_stopping_graph(const SystemSpec& spec, const RealizationStream& stream, double eps) {
  const auto letters = sample_letters(stream, k_max(spec, eps));
  return build_stopping_graph(spec, letters, eps);
}

std::vector<ArrMatrix> stopping_arrangements(const StoppingGraph& sg) {
  const std::size_t n = sg.vertex_count;
  std::vector<ArrMatrix> eta(sg.k_max, ArrMatrix(n, n));
  for (const auto& e : sg.edges) {
    auto& cell = eta[e.gamma_len - 1](e.from, e.to);
    cell = arr_add(cell, Arrangement({e.word}));
  }
  return eta;
}

std::string format_word(const Word& w) {
  if (w.empty()) return "ε0";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += "·";
    s += std::to_string(w[i]);
  }
  return s;
}

std::string format_box(const OrientedBox& box) {
  char buf[192];
  if (box.dimension == 1) {
    std::snprintf(buf, sizeof buf, "[%.12g,%.12g]", box.lo(), box.hi());
  } else {
    std::snprintf(buf, sizeof buf, "c=(%.12g,%.12g) h=(%.12g,%.12g) a=%.12g%s", box.center[0],
                  box.center[1], box.half[0], box.half[1], box.angle, box.reflect ? " r" : "");
  }
  return buf;
}

std::string stopping_csv(const SystemSpec& spec, const StoppingGraph& sg) {
  std::ostringstream os;
  os << "word;from;to;gamma_len;ratio;image\n";
  char ratio[32];
  for (const auto& e : sg.edges) {
    std::snprintf(ratio, sizeof ratio, "%.17g", e.ratio);
    os << format_word(e.word) << ';' << spec.vertices()[e.from] << ';' << spec.vertices()[e.to] << ';'
       << e.gamma_len << ';' << ratio << ';' << format_box(e.image) << '\n';
  }
  return os.str();
}

}  // namespace rgds

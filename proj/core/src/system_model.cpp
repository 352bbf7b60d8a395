#include "rgds/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "rgds/errors.hpp"

namespace rgds {

namespace {

constexpr double kNearDuplicate = 1e-9;

Point rotate(const Point& p, double angle) noexcept {
  if (angle == 0.0) return p;
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p[0] - s * p[1], s * p[0] + c * p[1]};
}

double map_distance(const Similitude& a, const Similitude& b) {
  if (a.reflect != b.reflect) return std::numeric_limits<double>::infinity();
  double d = std::abs(a.ratio - b.ratio);
  d = std::max(d, std::abs(std::remainder(a.angle - b.angle, 2.0 * M_PI)));
  d = std::max(d, std::abs(a.translation[0] - b.translation[0]));
  d = std::max(d, std::abs(a.translation[1] - b.translation[1]));
  return d;
}

std::string fmt_edge(const SystemSpec& spec, EdgeId id) {
  std::ostringstream os;
  const auto& e = spec.edge(id);
  os << "edge " << id << " (graph " << spec.graph_of(id) << ", " << spec.vertices()[e.from] << "->"
     << spec.vertices()[e.to] << ")";
  return os.str();
}

}  // namespace

Point Similitude::apply(const Point& p) const noexcept {
  Point q = reflect ? Point{-p[0], p[1]} : p;
  q = rotate(q, angle);
  return {ratio * q[0] + translation[0], ratio * q[1] + translation[1]};
}

Similitude Similitude::compose(const Similitude& inner) const noexcept {
  Similitude out;
  out.ratio = ratio * inner.ratio;
  out.angle = reflect ? angle - inner.angle : angle + inner.angle;
  if (out.angle != 0.0) out.angle = std::remainder(out.angle, 2.0 * M_PI);
  out.reflect = reflect != inner.reflect;
  out.translation = apply(inner.translation);
  return out;
}

double Box::diameter(int dimension) const noexcept {
  const double w = hi[0] - lo[0];
  if (dimension == 1) return w;
  const double h = hi[1] - lo[1];
  return std::hypot(w, h);
}

double OrientedBox::diameter() const noexcept {
  return dimension == 1 ? 2.0 * half[0] : 2.0 * std::hypot(half[0], half[1]);
}

std::array<Point, 4> OrientedBox::corners() const noexcept {
  const Point u = rotate({half[0], 0.0}, angle);
  const Point v = rotate({0.0, half[1]}, angle);
  return {Point{center[0] - u[0] - v[0], center[1] - u[1] - v[1]},
          Point{center[0] + u[0] - v[0], center[1] + u[1] - v[1]},
          Point{center[0] + u[0] + v[0], center[1] + u[1] + v[1]},
          Point{center[0] - u[0] + v[0], center[1] - u[1] + v[1]}};
}

OrientedBox to_oriented(const Box& box, int dimension) noexcept {
  OrientedBox o;
  o.dimension = dimension;
  o.center = {0.5 * (box.lo[0] + box.hi[0]), dimension == 2 ? 0.5 * (box.lo[1] + box.hi[1]) : 0.0};
  o.half = {0.5 * (box.hi[0] - box.lo[0]), dimension == 2 ? 0.5 * (box.hi[1] - box.lo[1]) : 0.0};
  return o;
}

OrientedBox apply_map(const Similitude& map, const OrientedBox& box) noexcept {
  OrientedBox o;
  o.dimension = box.dimension;
  o.center = map.apply(box.center);
  o.half = {map.ratio * box.half[0], map.ratio * box.half[1]};
  if (box.dimension == 2) {
    o.angle = map.reflect ? map.angle - box.angle : map.angle + box.angle;
    if (o.angle != 0.0) o.angle = std::remainder(o.angle, 2.0 * M_PI);
  }
  o.reflect = map.reflect != box.reflect;
  return o;
}

OrientedBox apply_map(const Similitude& map, const Box& box, int dimension) noexcept {
  return apply_map(map, to_oriented(box, dimension));
}

bool boxes_intersect(const OrientedBox& a, const OrientedBox& b, double tolerance) noexcept {
  if (a.dimension == 1) {
    const double gap = std::max(a.lo() - b.hi(), b.lo() - a.hi());
    return gap <= tolerance;
  }
  const Point axes[4] = {rotate({1, 0}, a.angle), rotate({0, 1}, a.angle), rotate({1, 0}, b.angle),
                         rotate({0, 1}, b.angle)};
  const Point d{b.center[0] - a.center[0], b.center[1] - a.center[1]};
  auto radius = [](const OrientedBox& box, const Point& ax0, const Point& ax1, const Point& u) {
    return box.half[0] * std::abs(u[0] * ax0[0] + u[1] * ax0[1]) +
           box.half[1] * std::abs(u[0] * ax1[0] + u[1] * ax1[1]);
  };
  for (const Point& u : axes) {
    const double dist = std::abs(d[0] * u[0] + d[1] * u[1]);
    const double reach = radius(a, axes[0], axes[1], u) + radius(b, axes[2], axes[3], u);
    if (dist - reach > tolerance) return false;
  }
  return true;
}

bool box_contained(const OrientedBox& inner, const Box& outer, double tolerance) noexcept {
  if (inner.dimension == 1)
    return inner.lo() >= outer.lo[0] - tolerance && inner.hi() <= outer.hi[0] + tolerance;
  for (const Point& p : inner.corners()) {
    for (int k = 0; k < 2; ++k)
      if (p[k] < outer.lo[k] - tolerance || p[k] > outer.hi[k] + tolerance) return false;
  }
  return true;
}

SystemSpec::SystemSpec(int dimension, std::vector<std::string> vertices, Box seed_box,
                       std::vector<GraphSpec> graphs)
    : dimension_(dimension),
      vertices_(std::move(vertices)),
      seed_box_(seed_box),
      graphs_(std::move(graphs)) {
  if (dimension_ != 1 && dimension_ != 2)
    throw Error(ErrorKind::MalformedSpec, "dimension must be 1 or 2");
  if (vertices_.empty()) throw Error(ErrorKind::MalformedSpec, "no vertices");
  if (std::set<std::string>(vertices_.begin(), vertices_.end()).size() != vertices_.size())
    throw Error(ErrorKind::MalformedSpec, "duplicate vertex id");
  if (graphs_.empty()) throw Error(ErrorKind::MalformedSpec, "no graphs");
  for (int k = 0; k < dimension_; ++k) {
    if (!(seed_box_.lo[k] < seed_box_.hi[k]))
      throw Error(ErrorKind::MalformedSpec, "degenerate seed box");
  }
  if (dimension_ == 1) seed_box_.lo[1] = seed_box_.hi[1] = 0.0;

  const std::size_t n = vertices_.size();
  out_.assign(graphs_.size(), std::vector<std::vector<EdgeId>>(n));
  c_max_ = 0.0;
  c_min_ = std::numeric_limits<double>::infinity();
  for (Letter g = 0; g < graphs_.size(); ++g) {
    for (std::uint32_t local = 0; local < graphs_[g].edges.size(); ++local) {
      const EdgeSpec& e = graphs_[g].edges[local];
      if (e.from >= n || e.to >= n) throw Error(ErrorKind::MalformedSpec, "edge vertex out of range");
      if (!(e.map.ratio > 0.0) || !std::isfinite(e.map.ratio))
        throw Error(ErrorKind::MalformedSpec, "edge ratio must be positive");
      if (dimension_ == 1 && (e.map.angle != 0.0 || e.map.translation[1] != 0.0))
        throw Error(ErrorKind::MalformedSpec, "rotation given in dimension 1");
      const auto id = static_cast<EdgeId>(edge_graph_.size());
      edge_local_.push_back(local);
      edge_graph_.push_back(g);
      ratios_.push_back(e.map.ratio);
      out_[g][e.from].push_back(id);
      c_max_ = std::max(c_max_, e.map.ratio);
      c_min_ = std::min(c_min_, e.map.ratio);
    }
  }
  if (edge_graph_.empty()) throw Error(ErrorKind::MalformedSpec, "system has no edges");
}

std::span<const EdgeId> SystemSpec::out_edges(Letter i, VertexIndex v) const {
  return out_.at(i).at(v);
}

std::vector<double> SystemSpec::probabilities() const {
  std::vector<double> p;
  p.reserve(graphs_.size());
  for (const auto& g : graphs_) p.push_back(g.prob);
  return p;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

RealizationStream::RealizationStream(std::uint64_t seed, std::vector<double> distribution,
                                     std::uint64_t cursor)
    : seed_(seed), cursor_(cursor), distribution_(std::move(distribution)) {
  if (distribution_.empty()) throw Error(ErrorKind::MalformedSpec, "empty distribution");
  double total = 0.0;
  for (double p : distribution_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorKind::MalformedSpec, "negative probability");
    total += p;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::MalformedSpec, "probabilities sum to zero");
  cumulative_.resize(distribution_.size());
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < distribution_.size(); ++i) {
    acc += distribution_[i] / total;
    cumulative_[i] = acc;
    if (distribution_[i] > 0.0) last_positive = i;
  }
  // Rounding must never push a draw past the last letter with mass.
  for (std::size_t i = last_positive; i < cumulative_.size(); ++i) cumulative_[i] = 2.0;
}

Letter RealizationStream::letter(std::uint64_t t) const noexcept {
  if (cumulative_.size() == 1) return 0;
  const double u = unit_uniform(mix64(seed_ ^ mix64(cursor_ + t)));
  for (std::size_t i = 0; i < cumulative_.size(); ++i)
    if (u < cumulative_[i]) return static_cast<Letter>(i);
  return static_cast<Letter>(cumulative_.size() - 1);
}

RealizationStream RealizationStream::shifted(std::uint64_t by) const {
  RealizationStream s = *this;
  s.cursor_ += by;
  return s;
}

RealizationStream make_stream(const SystemSpec& spec, std::uint64_t seed) {
  return RealizationStream(seed, spec.probabilities());
}

std::vector<Letter> sample_letters(const RealizationStream& stream, std::size_t count) {
  std::vector<Letter> out(count);
  for (std::size_t t = 0; t < count; ++t) out[t] = stream.letter(t);
  return out;
}

std::vector<std::vector<bool>> union_reachability(const SystemSpec& spec) {
  const std::size_t n = spec.vertex_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) reach[v][v] = true;
  for (const auto& g : spec.graphs())
    for (const auto& e : g.edges) reach[e.from][e.to] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  return reach;
}

ValidationReport validate_system(const SystemSpec& spec, Mode mode) {
  ValidationReport r;
  const std::size_t n = spec.vertex_count();
  auto violate = [&](std::string id, std::string msg) {
    r.violations.push_back({std::move(id), std::move(msg)});
  };

  double total = 0.0;
  for (std::size_t g = 0; g < spec.graph_count(); ++g) {
    const double p = spec.graph(static_cast<Letter>(g)).prob;
    if (!(p > 0.0) || p > 1.0)
      violate("MalformedSpec", "graph " + std::to_string(g) + " probability outside (0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << total;
    violate("MalformedSpec", os.str());
  }

  for (Letter g = 0; g < spec.graph_count(); ++g) {
    if (mode == Mode::OneVariable && spec.graph(g).edges.empty())
      violate("outgoing_edges", "graph " + std::to_string(g) + " has no edges");
    for (VertexIndex v = 0; v < n && mode == Mode::OneVariable; ++v) {
      if (spec.out_edges(g, v).empty())
        violate("outgoing_edges", "vertex " + spec.vertices()[v] + " has no outgoing edge in graph " +
                                      std::to_string(g));
    }
  }

  // Expected out-degree per vertex.
  r.surviving = true;
  for (VertexIndex v = 0; v < n; ++v) {
    double expected = 0.0;
    for (Letter g = 0; g < spec.graph_count(); ++g)
      expected += spec.graph(g).prob * static_cast<double>(spec.out_edges(g, v).size());
    if (!(expected > 1.0)) {
      r.surviving = false;
      if (mode == Mode::InfiniteVariable) {
        std::ostringstream os;
        os << "vertex " << spec.vertices()[v] << " expects " << expected << " outgoing edges";
        violate("surviving", os.str());
      }
    }
  }

  const auto reach = union_reachability(spec);
  r.strongly_connected = true;
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = 0; w < n; ++w)
      if (!reach[v][w]) {
        if (r.strongly_connected)
          violate("strong_connectivity",
                  "vertex " + spec.vertices()[w] + " unreachable from " + spec.vertices()[v]);
        r.strongly_connected = false;
      }

  const Box& delta = spec.seed_box();
  for (EdgeId id = 0; id < spec.edge_count(); ++id) {
    const auto& e = spec.edge(id);
    if (e.map.ratio >= 1.0) violate("NotContracting", fmt_edge(spec, id) + " has ratio >= 1");
    if (!box_contained(apply_map(e.map, delta, spec.dimension()), delta, 1e-9))
      violate("SeedNotInvariant", fmt_edge(spec, id) + " maps the seed box outside itself");
  }

  r.ussc_sufficient = true;
  for (Letter g = 0; g < spec.graph_count() && r.ussc_sufficient; ++g) {
    for (VertexIndex v = 0; v < n && r.ussc_sufficient; ++v) {
      const auto ids = spec.out_edges(g, v);
      std::vector<OrientedBox> images;
      for (EdgeId id : ids) images.push_back(apply_map(spec.edge(id).map, delta, spec.dimension()));
      for (std::size_t a = 0; a < images.size() && r.ussc_sufficient; ++a)
        for (std::size_t b = a + 1; b < images.size(); ++b)
          if (boxes_intersect(images[a], images[b])) {
            r.ussc_sufficient = false;
            break;
          }
    }
  }

  bool distinct = false;
  bool near_duplicate = false;
  for (EdgeId a = 0; a < spec.edge_count(); ++a) {
    for (EdgeId b = a + 1; b < spec.edge_count(); ++b) {
      const auto& ma = spec.edge(a).map;
      const auto& mb = spec.edge(b).map;
      if (!(ma == mb)) {
        distinct = true;
        if (map_distance(ma, mb) < kNearDuplicate) near_duplicate = true;
      }
    }
  }
  if (!distinct)
    r.warnings.push_back({"distinct_maps", "all edges carry the same similitude"});
  if (near_duplicate)
    r.warnings.push_back({"near_duplicate_maps", "two maps differ by less than 1e-9 in every parameter"});

  r.ok = r.violations.empty();
  return r;
}

}  // namespace rgds

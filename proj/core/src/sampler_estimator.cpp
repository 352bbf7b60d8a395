#include "rgds/sampler_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "rgds/errors.hpp"
#include "rgds/pressure_engine.hpp"
#include "rgds/stopping_graph.hpp"

namespace rgds {

namespace {

constexpr double kSnap = 1e-9;
constexpr std::uint64_t kCellBudget = 50'000'000;

double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= kSnap ? r : x;
}

// Cells [floor(a), ceil(b)) along one axis, in units of delta.
std::pair<long long, long long> cell_range(double a, double b) {
  const long long lo = static_cast<long long>(std::floor(snap(a)));
  long long hi = static_cast<long long>(std::ceil(snap(b))) - 1;
  if (hi < lo) hi = lo;
  return {lo, hi};
}

bool axis_aligned(const OrientedBox& b) {
  const double q = b.angle / (0.5 * M_PI);
  return std::abs(q - std::round(q)) <= 1e-12;
}

double domain_size(const BoxCover& c) { return c.domain.diameter(c.dimension); }

}  // namespace

BoxCover prefractal_cover(const SystemSpec& spec, const RealizationStream& stream, VertexIndex vertex, double eps,
                          std::uint32_t rounds, std::size_t budget) {
  if (vertex >= spec.vertex_count()) throw Error(ErrorKind::MalformedSpec, "vertex out of range");
  BoxCover cover;
  cover.dimension = spec.dimension();
  cover.domain = spec.seed_box();
  cover.eps = eps;
  cover.rounds = rounds;
  cover.vertex = vertex;
  cover.seed = stream.seed();
  cover.elements.push_back({Similitude::identity(), vertex, 0});

  StoppingCache cache(spec, eps);
  const std::uint32_t l = cache.k_max();
  std::vector<Letter> letters;
  auto prefix_at = [&](std::uint64_t j) {
    const std::size_t need = static_cast<std::size_t>(j + l);
    if (letters.size() < need) {
      const std::size_t old = letters.size();
      letters.resize(need);
      for (std::size_t t = old; t < need; ++t) letters[t] = stream.letter(t);
    }
    return std::span<const Letter>(letters).subspan(static_cast<std::size_t>(j), l);
  };

  for (std::uint32_t r = 0; r < rounds; ++r) {
    std::vector<CoverElement> next;
    for (const auto& el : cover.elements) {
      const auto& sg = cache.graph(cache.index_for(prefix_at(el.offset)));
      for (const auto& e : sg.edges) {
        if (e.from != el.vertex) continue;
        if (next.size() >= budget)
          throw Error(ErrorKind::BudgetExceeded, "cover exceeds " + std::to_string(budget) + " boxes");
        next.push_back({el.map.compose(e.map), e.to, el.offset + e.gamma_len});
      }
    }
    cover.elements = std::move(next);
  }
  const OrientedBox delta = to_oriented(spec.seed_box(), spec.dimension());
  cover.boxes.reserve(cover.elements.size());
  for (const auto& el : cover.elements) cover.boxes.push_back(apply_map(el.map, delta));
  return cover;
}

BoxCover tree_cover(const SystemSpec& spec, const RecursiveTree& tree) {
  BoxCover cover;
  cover.dimension = spec.dimension();
  cover.domain = spec.seed_box();
  cover.vertex = tree.root;
  cover.seed = tree.seed;
  const OrientedBox delta = to_oriented(spec.seed_box(), spec.dimension());
  cover.rounds = 1;
  cover.eps = 0.0;
  for (auto leaf : tree.frontier) {
    const auto& node = tree.nodes[leaf];
    cover.elements.push_back({node.map, node.vertex, node.depth});
    cover.boxes.push_back(apply_map(node.map, delta));
    cover.eps = std::max(cover.eps, node.ratio);
  }
  return cover;
}

std::uint64_t grid_count(const BoxCover& cover, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::BadEpsilon, "grid size must be positive");
  const Point origin = cover.domain.lo;
  std::unordered_set<std::uint64_t> cells;
  std::uint64_t touched = 0;
  auto key = [](long long i, long long j) {
    return (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j & 0xffffffffLL);
  };
  for (const auto& b : cover.boxes) {
    if (cover.dimension == 1) {
      const auto [lo, hi] = cell_range((b.lo() - origin[0]) / delta, (b.hi() - origin[0]) / delta);
      touched += static_cast<std::uint64_t>(hi - lo + 1);
      if (touched > kCellBudget) throw Error(ErrorKind::BudgetExceeded, "grid count exceeds cell budget");
      for (long long i = lo; i <= hi; ++i) cells.insert(key(i, 0));
      continue;
    }
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Point& p : b.corners()) {
      xmin = std::min(xmin, p[0]);
      xmax = std::max(xmax, p[0]);
      ymin = std::min(ymin, p[1]);
      ymax = std::max(ymax, p[1]);
    }
    const auto [ilo, ihi] = cell_range((xmin - origin[0]) / delta, (xmax - origin[0]) / delta);
    const auto [jlo, jhi] = cell_range((ymin - origin[1]) / delta, (ymax - origin[1]) / delta);
    touched += static_cast<std::uint64_t>((ihi - ilo + 1) * (jhi - jlo + 1));
    if (touched > kCellBudget) throw Error(ErrorKind::BudgetExceeded, "grid count exceeds cell budget");
    const bool aligned = axis_aligned(b);
    for (long long i = ilo; i <= ihi; ++i)
      for (long long j = jlo; j <= jhi; ++j) {
        if (!aligned) {
          OrientedBox cell;
          cell.dimension = 2;
          cell.center = {origin[0] + (i + 0.5) * delta, origin[1] + (j + 0.5) * delta};
          cell.half = {0.5 * delta, 0.5 * delta};
          // Require overlap of positive width, matching half-open cells.
          if (!boxes_intersect(cell, b, -1e-12 * delta)) continue;
        }
        cells.insert(key(i, j));
      }
  }
  return cells.size();
}

BoxCountFit box_count(const BoxCover& cover, std::span<const double> deltas) {
  if (cover.boxes.empty()) throw Error(ErrorKind::MalformedSpec, "cannot box-count an empty cover");
  if (deltas.empty()) throw Error(ErrorKind::BadEpsilon, "empty grid schedule");
  BoxCountFit fit;
  fit.scales.assign(deltas.begin(), deltas.end());
  for (std::size_t i = 1; i < fit.scales.size(); ++i)
    if (!(fit.scales[i] < fit.scales[i - 1])) throw Error(ErrorKind::BadEpsilon, "grid sizes must decrease");
  const double size = domain_size(cover);
  fit.window_lo = std::pow(cover.eps, cover.rounds) * size;
  fit.window_hi = size / 10.0;
  std::size_t inside = 0;
  for (double d : fit.scales) {
    fit.counts.push_back(grid_count(cover, d));
    const bool in = d >= fit.window_lo * (1.0 - 1e-9) && d <= fit.window_hi * (1.0 + 1e-9);
    fit.fitted.push_back(in);
    inside += in;
  }
  if (inside < 2) std::fill(fit.fitted.begin(), fit.fitted.end(), true);

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, m = 0;
  for (std::size_t i = 0; i < fit.scales.size(); ++i) {
    if (!fit.fitted[i]) continue;
    const double x = -std::log(fit.scales[i]);
    const double y = std::log(static_cast<double>(fit.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    m += 1;
  }
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double cxy = sxy - sx * sy / m;
  fit.slope = vx > 0 ? cxy / vx : 0.0;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
  return fit;
}

std::vector<double> default_deltas(const BoxCover& cover, double base) {
  const double size = domain_size(cover);
  const double lo = std::pow(cover.eps, cover.rounds) * size;
  std::vector<double> out;
  for (int j = 1; j < 64; ++j) {
    const double d = size * std::pow(base, -j);
    if (d < lo * (1.0 - 1e-9)) break;
    if (d <= size / 10.0 * (1.0 + 1e-9)) out.push_back(d);
  }
  return out;
}

std::string svg_string(const BoxCover& cover, const SvgStyle& style) {
  const Box& dom = cover.domain;
  const double w = dom.hi[0] - dom.lo[0];
  const double scale = style.width / w;
  const double height = cover.dimension == 1 ? style.bar_height : (dom.hi[1] - dom.lo[1]) * scale;
  std::ostringstream os;
  char buf[256];
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.3f\" height=\"%.3f\" "
                "viewBox=\"0 0 %.3f %.3f\" style=\"background:%s\">\n",
                style.width, height, style.width, height, style.background.c_str());
  os << buf;
  os << "<g fill=\"" << style.fill << "\">\n";
  for (const auto& b : cover.boxes) {
    if (cover.dimension == 1) {
      std::snprintf(buf, sizeof buf, "<rect x=\"%.6f\" y=\"0\" width=\"%.6f\" height=\"%.3f\"/>\n",
                    (b.lo() - dom.lo[0]) * scale, 2.0 * b.half[0] * scale, style.bar_height);
    } else {
      // SVG y grows downwards.
      const double cx = (b.center[0] - dom.lo[0]) * scale;
      const double cy = height - (b.center[1] - dom.lo[1]) * scale;
      const double hw = b.half[0] * scale, hh = b.half[1] * scale;
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.6f\" y=\"%.6f\" width=\"%.6f\" height=\"%.6f\" transform=\"rotate(%.6f %.6f %.6f)\"/>\n",
                    cx - hw, cy - hh, 2 * hw, 2 * hh, -b.angle * 180.0 / M_PI, cx, cy);
    }
    os << buf;
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

void render_svg(const BoxCover& cover, const std::string& path, const SvgStyle& style) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
  f << svg_string(cover, style);
  if (!f) throw Error(ErrorKind::IoError, "write failed for " + path);
}

std::string box_count_csv(const BoxCountFit& fit) {
  std::ostringstream os;
  os << "delta;count\n";
  char buf[64];
  for (std::size_t i = 0; i < fit.scales.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g;%llu\n", fit.scales[i], static_cast<unsigned long long>(fit.counts[i]));
    os << buf;
  }
  return os.str();
}

}  // namespace rgds

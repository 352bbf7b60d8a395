#include "rgds/assouad_jsr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "rgds/errors.hpp"
#include "rgds/infinite_variable.hpp"
#include "rgds/pressure_engine.hpp"
#include "rgds/stopping_graph.hpp"

namespace rgds {

namespace {

void check_family(const MatrixFamily& f) {
  if (f.members.empty()) throw Error(ErrorKind::ShapeMismatch, "empty matrix family");
  const std::size_t n = f.members.front().rows();
  for (const auto& m : f.members) {
    if (m.rows() != n || m.cols() != n) throw Error(ErrorKind::ShapeMismatch, "family members differ in shape");
    if (!all_nonnegative(m)) throw Error(ErrorKind::ShapeMismatch, "family member has a negative entry");
  }
  if (!f.successors.empty()) {
    if (f.successors.size() != f.members.size())
      throw Error(ErrorKind::ShapeMismatch, "successor lists do not match members");
    for (const auto& s : f.successors)
      for (auto j : s)
        if (j >= f.members.size()) throw Error(ErrorKind::ShapeMismatch, "successor index out of range");
  }
}

class JsrSearch {
 public:
  JsrSearch(const MatrixFamily& f, std::uint32_t depth) : best_norm_(depth + 1, 0.0), f_(f), depth_(depth) {
    stack_.reserve(depth + 1);
  }

  void run() {
    for (std::uint32_t i = 0; i < f_.members.size(); ++i) {
      path_.assign(1, i);
      stack_.assign(1, f_.members[i]);
      visit();
    }
  }

  std::vector<double> best_norm_;  // index k: max row norm of length-k products
  double lower = 0.0;
  std::vector<std::uint32_t> witness;
  std::uint64_t products = 0;

 private:
  bool follows(std::uint32_t a, std::uint32_t b) const {
    if (f_.successors.empty()) return true;
    const auto& s = f_.successors[a];
    return std::find(s.begin(), s.end(), b) != s.end();
  }

  void visit() {
    ++products;
    const std::size_t k = path_.size();
    const Matrix& p = stack_.back();
    best_norm_[k] = std::max(best_norm_[k], row_norm(p));
    if (follows(path_.back(), path_.front())) {
      const double r = std::pow(spectral_radius(p).value, 1.0 / static_cast<double>(k));
      if (r > lower * (1.0 + 1e-12)) {
        lower = r;
        witness = path_;
      }
    }
    if (k == depth_) return;
    const std::uint32_t last = path_.back();
    auto extend = [&](std::uint32_t j) {
      path_.push_back(j);
      stack_.push_back(stack_.back() * f_.members[j]);
      visit();
      stack_.pop_back();
      path_.pop_back();
    };
    if (f_.successors.empty()) {
      for (std::uint32_t j = 0; j < f_.members.size(); ++j) extend(j);
    } else {
      for (std::uint32_t j : f_.successors[last]) extend(j);
    }
  }

  const MatrixFamily& f_;
  std::uint32_t depth_;
  std::vector<std::uint32_t> path_;
  std::vector<Matrix> stack_;
};

std::string join_labels(const MatrixFamily& f, const std::vector<std::uint32_t>& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += '|';
    s += idx[i] < f.labels.size() ? f.labels[idx[i]] : std::to_string(idx[i]);
  }
  return s;
}

double dim_of(double growth, double eps) {
  if (!(growth > 0.0)) return 0.0;
  return std::max(0.0, std::log(growth) / -std::log(eps));
}

void check_schedule(std::span<const double> schedule) {
  if (schedule.empty()) throw Error(ErrorKind::BadEpsilon, "empty eps schedule");
  for (double e : schedule)
    if (!(e > 0.0) || !(e < 1.0)) throw Error(ErrorKind::BadEpsilon, "schedule entries must lie in (0,1)");
}

using Row = std::vector<double>;
using Frontier = std::vector<Row>;

bool dominated(const Row& a, const Row& b) {  // a <= b entrywise
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Frontier pareto(Frontier rows, std::size_t cap, bool& truncated) {
  auto sum = [](const Row& r) { return std::accumulate(r.begin(), r.end(), 0.0); };
  std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    const double sa = sum(a), sb = sum(b);
    return sa != sb ? sa > sb : a > b;
  });
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  Frontier out;
  for (auto& r : rows) {
    // Sorted by descending sum, so only earlier rows can dominate r.
    if (std::none_of(out.begin(), out.end(), [&](const Row& o) { return dominated(r, o); }))
      out.push_back(std::move(r));
  }
  if (out.size() > cap) {
    out.resize(cap);
    truncated = true;
  }
  return out;
}

struct RowSearch {
  const SystemSpec& spec;
  double eps;
  std::size_t cap;
  bool truncated = false;
  std::map<std::pair<VertexIndex, long long>, Frontier> memo;

  const Frontier& rows(VertexIndex u, double ratio) {
    const auto key = std::make_pair(u, std::llround(std::log(ratio) * 1e9));
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const std::size_t n = spec.vertex_count();
    Frontier all;
    for (Letter g = 0; g < spec.graph_count(); ++g) {
      if (!(spec.graph(g).prob > 0.0)) continue;
      Frontier acc{Row(n, 0.0)};
      for (EdgeId id : spec.out_edges(g, u)) {
        const auto& e = spec.edge(id);
        const double r = ratio * e.map.ratio;
        Frontier child;
        if (r <= eps * (1.0 + 1e-12)) {
          Row unit(n, 0.0);
          unit[e.to] = 1.0;
          child.push_back(std::move(unit));
        } else {
          child = rows(e.to, r);
        }
        Frontier next;
        next.reserve(acc.size() * child.size());
        for (const auto& a : acc)
          for (const auto& c : child) {
            Row x = a;
            for (std::size_t i = 0; i < n; ++i) x[i] += c[i];
            next.push_back(std::move(x));
          }
        acc = pareto(std::move(next), cap, truncated);
      }
      all.insert(all.end(), acc.begin(), acc.end());
    }
    return memo[key] = pareto(std::move(all), cap, truncated);
  }
};

}  // namespace

JsrBounds jsr_bounds(const MatrixFamily& family, std::uint32_t depth, std::uint64_t budget) {
  if (depth == 0) throw Error(ErrorKind::MalformedSpec, "depth must be at least 1");
  check_family(family);
  JsrBounds out;
  const std::size_t count = family.members.size();
  const bool self_loop =
      family.successors.empty() ||
      std::find(family.successors[0].begin(), family.successors[0].end(), 0u) != family.successors[0].end();
  if (count == 1 && self_loop) {
    out.lower = out.upper = spectral_radius(family.members[0]).value;
    out.depth = 1;
    out.witness = {0};
    out.products = 1;
    return out;
  }

  // Deepest level whose cumulative number of admissible products fits.
  std::vector<double> walks(count, 1.0);
  double cumulative = static_cast<double>(count);
  std::uint32_t reach = 1;
  while (reach < depth) {
    std::vector<double> next(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      if (family.successors.empty()) {
        for (std::size_t j = 0; j < count; ++j) next[j] += walks[i];
      } else {
        for (auto j : family.successors[i]) next[j] += walks[i];
      }
    }
    const double level = std::accumulate(next.begin(), next.end(), 0.0);
    if (cumulative + level > static_cast<double>(budget)) break;
    cumulative += level;
    walks = std::move(next);
    ++reach;
  }
  out.loose = reach < depth;
  out.depth = reach;

  JsrSearch search(family, reach);
  search.run();
  out.lower = search.lower;
  out.witness = search.witness;
  out.products = search.products;
  out.upper = std::numeric_limits<double>::infinity();
  for (std::uint32_t k = 1; k <= reach; ++k)
    out.upper = std::min(out.upper, std::pow(search.best_norm_[k], 1.0 / static_cast<double>(k)));
  out.upper = std::max(out.upper, out.lower);  // rounding in rho vs norm
  return out;
}

MatrixFamily layered_family(const SystemSpec& spec, double eps, std::size_t max_members) {
  StoppingCache cache(spec, eps);
  const std::uint32_t l = cache.k_max();
  const std::size_t letters = spec.graph_count();
  double total = std::pow(static_cast<double>(letters), l);
  if (total > static_cast<double>(max_members))
    throw Error(ErrorKind::FamilyTooLarge, "layered family would have " + std::to_string(total) + " members");
  const std::size_t size = static_cast<std::size_t>(std::llround(total));
  const std::size_t tail = size / letters;  // |Lambda|^(l-1)
  MatrixFamily f;
  f.members.reserve(size);
  std::vector<Letter> prefix(l);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rest = idx;
    for (std::uint32_t t = l; t-- > 0;) {
      prefix[t] = static_cast<Letter>(rest % letters);
      rest /= letters;
    }
    const auto& sg = cache.graph(cache.index_for(prefix));
    f.members.push_back(layer_matrix(moran_blocks(sg, 0.0), l, spec.vertex_count()));
    std::string label;
    for (std::uint32_t t = 0; t < l; ++t) {
      if (t) label += '.';
      label += std::to_string(prefix[t]);
    }
    f.labels.push_back(std::move(label));
    std::vector<std::uint32_t> succ;
    for (std::size_t a = 0; a < letters; ++a) succ.push_back(static_cast<std::uint32_t>((idx % tail) * letters + a));
    f.successors.push_back(std::move(succ));
  }
  return f;
}

AssouadResult assouad_1var(const SystemSpec& spec, std::span<const double> eps_schedule, std::uint32_t depth) {
  check_schedule(eps_schedule);
  AssouadResult out;
  out.method = "constrained joint spectral radius of layered count matrices";
  double best_lower = 0.0, best_upper = 0.0;
  for (double eps : eps_schedule) {
    AssouadTraceRow row;
    row.eps = eps;
    row.k_max = k_max(spec, eps);
    try {
      const auto family = layered_family(spec, eps);
      const auto jsr = jsr_bounds(family, depth);
      row.family_size = family.members.size();
      row.lower = jsr.lower;
      row.upper = jsr.upper;
      row.witness = join_labels(family, jsr.witness);
      row.loose = jsr.loose;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FamilyTooLarge) throw;
      row.loose = true;
      row.family_size = 0;
    }
    row.dim_lower = dim_of(row.lower, eps);
    row.dim_upper = row.family_size ? dim_of(row.upper, eps) : static_cast<double>(spec.dimension());
    best_lower = std::max(best_lower, row.dim_lower);
    best_upper = std::max(best_upper, row.dim_upper);
    out.loose = out.loose || row.loose;
    out.trace.push_back(std::move(row));
  }
  const double d = spec.dimension();
  out.lower_bound = std::min(d, best_lower);
  out.upper_estimate = std::min(d, best_upper);
  if (validate_system(spec, Mode::OneVariable).ussc_sufficient) out.value_if_ussc = out.lower_bound;
  return out;
}

std::vector<std::vector<std::vector<double>>> achievable_rows(const SystemSpec& spec, double eps,
                                                              std::size_t frontier_cap, bool* truncated) {
  if (!(eps > 0.0) || eps > 1.0) throw Error(ErrorKind::BadEpsilon, "eps must lie in (0,1]");
  RowSearch search{spec, eps, frontier_cap, false, {}};
  std::vector<Frontier> out;
  for (VertexIndex v = 0; v < spec.vertex_count(); ++v) out.push_back(search.rows(v, 1.0));
  if (truncated) *truncated = search.truncated;
  return out;
}

namespace {

double best_combination(const std::vector<Frontier>& rows, bool& loose, std::string& witness) {
  const std::size_t n = rows.size();
  double combos = 1.0;
  for (const auto& f : rows) combos *= static_cast<double>(std::max<std::size_t>(f.size(), 1));
  for (const auto& f : rows)
    if (f.empty()) return 0.0;
  auto rho_of = [&](const std::vector<std::size_t>& pick) {
    Matrix m(n, n);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t w = 0; w < n; ++w) m(v, w) = rows[v][pick[v]][w];
    return spectral_radius(m).value;
  };
  std::vector<std::size_t> pick(n, 0), best_pick(n, 0);
  double best = rho_of(pick);
  if (combos <= 1e5) {
    for (;;) {
      std::size_t v = 0;
      while (v < n && ++pick[v] == rows[v].size()) pick[v++] = 0;
      if (v == n) break;
      const double r = rho_of(pick);
      if (r > best) {
        best = r;
        best_pick = pick;
      }
    }
  } else {
    loose = true;
    bool improved = true;
    pick = best_pick;
    while (improved) {
      improved = false;
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t c = 0; c < rows[v].size(); ++c) {
          auto trial = pick;
          trial[v] = c;
          const double r = rho_of(trial);
          if (r > best * (1.0 + 1e-12)) {
            best = r;
            pick = trial;
            improved = true;
          }
        }
    }
    best_pick = pick;
  }
  std::ostringstream os;
  for (std::size_t v = 0; v < n; ++v) {
    if (v) os << '|';
    for (std::size_t w = 0; w < n; ++w) os << (w ? "," : "") << rows[v][best_pick[v]][w];
  }
  witness = os.str();
  return best;
}

}  // namespace

AssouadResult assouad_inf(const SystemSpec& spec, std::span<const double> eps_schedule, std::uint64_t seed,
                          std::size_t samples) {
  check_schedule(eps_schedule);
  const auto report = validate_system(spec, Mode::InfiniteVariable);
  AssouadResult out;
  const std::size_t n = spec.vertex_count();
  const OrientedBox delta = to_oriented(spec.seed_box(), spec.dimension());
  out.method = report.ussc_sufficient ? "max spectral radius over choice trees, Pareto frontier of count rows"
                                      : "max spectral radius over sampled choice trees after disjoint pruning";
  double best = 0.0;
  for (double eps : eps_schedule) {
    AssouadTraceRow row;
    row.eps = eps;
    row.k_max = k_max(spec, eps);
    if (report.ussc_sufficient) {
      bool truncated = false;
      const auto rows = achievable_rows(spec, eps, 4096, &truncated);
      row.loose = truncated;
      row.family_size = 1;
      for (const auto& f : rows) row.family_size *= std::max<std::size_t>(f.size(), 1);
      row.lower = best_combination(rows, row.loose, row.witness);
      row.upper = row.loose ? std::numeric_limits<double>::quiet_NaN() : row.lower;
    } else {
      row.loose = true;
      row.family_size = samples;
      for (std::size_t t = 0; t < samples; ++t) {
        const auto stream = make_stream(spec, sample_seed(seed, t));
        Matrix counts(n, n);
        for (VertexIndex v = 0; v < n; ++v) {
          const auto tree = grow_tree(spec, stream, v, GrowLimits{std::nullopt, eps});
          std::vector<StoppingEdge> edges;
          for (auto leaf : tree.frontier) {
            StoppingEdge e;
            e.word = tree.word_of(leaf);
            e.from = v;
            e.to = tree.nodes[leaf].vertex;
            e.gamma_len = tree.nodes[leaf].depth;
            e.ratio = tree.nodes[leaf].ratio;
            e.map = tree.nodes[leaf].map;
            e.image = apply_map(e.map, delta);
            edges.push_back(std::move(e));
          }
          for (const auto& e : select_disjoint(std::move(edges)).kept) counts(v, e.to) += 1.0;
        }
        const double r = spectral_radius(counts).value;
        if (r > row.lower) {
          row.lower = r;
          row.witness = "sample " + std::to_string(t);
        }
      }
      row.upper = std::numeric_limits<double>::quiet_NaN();
    }
    row.dim_lower = dim_of(row.lower, eps);
    row.dim_upper = std::isnan(row.upper) ? spec.dimension() : dim_of(row.upper, eps);
    best = std::max(best, row.dim_lower);
    out.loose = out.loose || row.loose;
    out.trace.push_back(std::move(row));
  }
  out.lower_bound = std::min<double>(spec.dimension(), best);
  double up = 0.0;
  for (const auto& r : out.trace) up = std::max(up, r.dim_upper);
  out.upper_estimate = std::min<double>(spec.dimension(), up);
  if (report.ussc_sufficient && !out.loose) out.value_if_ussc = out.lower_bound;
  return out;
}

std::string jsr_trace_csv(const AssouadResult& result) {
  std::ostringstream os;
  os << "eps;k_max;family_size;lower;upper;witness\n";
  char buf[160];
  for (const auto& r : result.trace) {
    std::snprintf(buf, sizeof buf, "%.17g;%u;%zu;%.17g;%.17g;", r.eps, r.k_max, r.family_size, r.lower, r.upper);
    os << buf << r.witness << '\n';
  }
  return os.str();
}

}  // namespace rgds

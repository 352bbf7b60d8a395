#include "rgds/pressure_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <numeric>
#include <thread>

#include "parallel.hpp"
#include "rgds/errors.hpp"

namespace rgds {

namespace {

constexpr int kMaxDoublings = 12;

std::string prefix_key(std::span<const Letter> prefix) {
  std::string key(prefix.size() * sizeof(Letter), '\0');
  std::memcpy(key.data(), prefix.data(), key.size());
  return key;
}

// out += a * b for n x n row-major blocks.
inline void block_fma(double* out, const double* a, const double* b, std::size_t n) {
  if (n == 1) {
    out[0] += a[0] * b[0];
    return;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
    }
}

template <class Lookup>
void advance(BandVector& bv, Lookup&& blocks_at, const BandOptions& options, std::vector<double>& scratch,
             std::vector<const std::vector<MoranBlock>*>& seen) {
  const std::size_t n = bv.n;
  const std::size_t nn = n * n;
  const std::size_t w = bv.width();
  seen.assign(w, nullptr);
  std::uint32_t q_max = 0;
  for (std::size_t j = 0; j < w; ++j) {
    const double* b = bv.data.data() + j * nn;
    if (std::all_of(b, b + nn, [](double x) { return x == 0.0; })) continue;
    seen[j] = &blocks_at(bv.base + j);
    if (!seen[j]->empty()) q_max = std::max(q_max, seen[j]->back().q);
  }
  if (q_max == 0) throw Error(ErrorKind::DeadVector, "no stopping edges from any active offset");

  // New window starts at base + 1.
  const std::size_t out_width = w - 1 + q_max;
  scratch.assign(out_width * nn, 0.0);
  for (std::size_t j = 0; j < w; ++j) {
    if (!seen[j]) continue;
    const double* b = bv.data.data() + j * nn;
    for (const MoranBlock& p : *seen[j])
      block_fma(scratch.data() + (j + p.q - 1) * nn, b, p.matrix.data().data(), n);
  }

  std::vector<double> mass(out_width, 0.0);
  double biggest = 0.0;
  for (std::size_t j = 0; j < out_width; ++j) {
    const double* b = scratch.data() + j * nn;
    mass[j] = std::accumulate(b, b + nn, 0.0);
    biggest = std::max(biggest, mass[j]);
  }
  if (!(biggest > 0.0) || !std::isfinite(biggest)) throw Error(ErrorKind::DeadVector, "band vector vanished");
  const double floor = options.trim * biggest;
  std::size_t first = 0, last = out_width;
  while (first < out_width && !(mass[first] > floor)) ++first;
  while (last > first && !(mass[last - 1] > floor)) --last;

  bv.data.assign(scratch.begin() + static_cast<std::ptrdiff_t>(first * nn),
                 scratch.begin() + static_cast<std::ptrdiff_t>(last * nn));
  bv.base += 1 + first;

  const double norm = bv.seminorm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorKind::DeadVector, "seminorm is zero");
  const double inv = 1.0 / norm;
  for (double& x : bv.data) x *= inv;
  bv.log_scale += std::log(norm);
  bv.steps += 1;
}

double mean_of(std::span<const double> xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stderr_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

}  // namespace

std::vector<MoranBlock> moran_blocks(const StoppingGraph& sg, double s) {
  const std::size_t n = sg.vertex_count;
  std::vector<Matrix> by_q(sg.k_max, Matrix(n, n));
  std::vector<bool> used(sg.k_max, false);
  for (const auto& e : sg.edges) {
    by_q[e.gamma_len - 1](e.from, e.to) += std::pow(e.ratio, s);
    used[e.gamma_len - 1] = true;
  }
  std::vector<MoranBlock> out;
  for (std::uint32_t q = 1; q <= sg.k_max; ++q)
    if (used[q - 1]) out.push_back({q, std::move(by_q[q - 1])});
  return out;
}

BandVector BandVector::unit(std::size_t n) {
  BandVector bv;
  bv.n = n;
  bv.data.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) bv.data[i * n + i] = 1.0;
  return bv;
}

Matrix BandVector::block(std::uint64_t offset) const {
  Matrix m(n, n);
  if (offset < base || offset >= base + width()) return m;
  const double* b = data.data() + (offset - base) * n * n;
  std::copy(b, b + n * n, m.data().begin());
  return m;
}

Matrix BandVector::sum() const {
  Matrix m(n, n);
  auto out = m.data();
  for (std::size_t i = 0; i < data.size(); ++i) out[i % (n * n)] += data[i];
  return m;
}

double BandVector::seminorm() const { return row_norm(sum()); }

StoppingCache::StoppingCache(const SystemSpec& spec, double eps)
    : spec_(&spec), eps_(eps), k_max_(rgds::k_max(spec, eps)) {}

std::uint32_t StoppingCache::index_for(std::span<const Letter> prefix) {
  if (prefix.size() < k_max_) throw Error(ErrorKind::PrefixTooShort, "prefix shorter than k_max");
  prefix = prefix.first(k_max_);
  auto key = prefix_key(prefix);
  {
    std::lock_guard lock(mutex_);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
  }
  StoppingGraph sg = build_stopping_graph(*spec_, prefix, eps_);
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto idx = static_cast<std::uint32_t>(graphs_.size());
  graphs_.push_back(std::move(sg));
  index_.emplace(std::move(key), idx);
  return idx;
}

const StoppingGraph& StoppingCache::graph(std::uint32_t index) const {
  std::lock_guard lock(mutex_);
  return graphs_.at(index);
}

std::size_t StoppingCache::size() const {
  std::lock_guard lock(mutex_);
  return graphs_.size();
}

const std::vector<MoranBlock>& BlockTable::get(std::uint32_t index) {
  std::lock_guard lock(mutex_);
  if (index >= blocks_.size()) blocks_.resize(index + 1);
  auto& slot = blocks_[index];
  if (!slot) slot = moran_blocks(cache_->graph(index), s_);
  return *slot;
}

void band_step(BandVector& bv, const std::function<const std::vector<MoranBlock>&(std::uint64_t)>& blocks_at,
               const BandOptions& options) {
  std::vector<double> scratch;
  std::vector<const std::vector<MoranBlock>*> seen;
  advance(bv, blocks_at, options, scratch, seen);
}

void band_step(BandVector& bv, const SystemSpec& spec, const RealizationStream& stream, double s, double eps,
               const BandOptions& options) {
  const std::uint32_t kmax = k_max(spec, eps);
  std::unordered_map<std::uint64_t, std::vector<MoranBlock>> local;
  band_step(
      bv,
      [&](std::uint64_t j) -> const std::vector<MoranBlock>& {
        auto it = local.find(j);
        if (it == local.end()) {
          const auto letters = sample_letters(stream.shifted(j), kmax);
          it = local.emplace(j, moran_blocks(build_stopping_graph(spec, letters, eps), s)).first;
        }
        return it->second;
      },
      options);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RGDS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index ^ 0x5851f42d4c957f2dULL));
}

PressureModel::PressureModel(const SystemSpec& spec, double eps, EngineOptions options)
    : spec_(&spec), eps_(eps), options_(options), cache_(spec, eps) {}

void PressureModel::prepare(std::uint64_t k, std::uint64_t m, std::uint64_t seed) {
  if (k == 0 || m == 0) throw Error(ErrorKind::MalformedSpec, "k and m must be positive");
  k_ = k;
  const std::uint32_t kmax = cache_.k_max();
  const std::size_t positions = static_cast<std::size_t>((k - 1) * kmax + 1);
  realizations_.assign(m, {});
  detail::parallel_for(m, resolve_threads(options_.threads), [&](std::size_t i) {
    Realization& r = realizations_[i];
    r.seed = sample_seed(seed, i);
    const RealizationStream stream(r.seed, spec_->probabilities());
    const auto letters = sample_letters(stream, positions + kmax - 1);
    r.graph_at.resize(positions);
    for (std::size_t p = 0; p < positions; ++p)
      r.graph_at[p] = cache_.index_for(std::span<const Letter>(letters).subspan(p, kmax));
  });
}

PressureEstimate PressureModel::evaluate(double s) {
  if (realizations_.empty()) throw Error(ErrorKind::MalformedSpec, "PressureModel::prepare not called");
  BlockTable table(cache_, s);
  std::vector<const std::vector<MoranBlock>*> blocks(cache_.size());
  for (std::uint32_t i = 0; i < blocks.size(); ++i) blocks[i] = &table.get(i);

  const std::size_t n = spec_->vertex_count();
  const std::size_t m = realizations_.size();
  std::vector<double> rates(m);
  std::vector<std::vector<double>> rows(m, std::vector<double>(n));
  detail::parallel_for(m, resolve_threads(options_.threads), [&](std::size_t i) {
    const auto& graph_at = realizations_[i].graph_at;
    auto lookup = [&](std::uint64_t j) -> const std::vector<MoranBlock>& { return *blocks[graph_at[j]]; };
    BandVector bv = BandVector::unit(n);
    std::vector<double> scratch;
    std::vector<const std::vector<MoranBlock>*> seen;
    for (std::uint64_t step = 0; step < k_; ++step) advance(bv, lookup, options_.band, scratch, seen);
    const double kk = static_cast<double>(k_);
    rates[i] = bv.log_scale / kk;
    const Matrix total = bv.sum();
    for (std::size_t v = 0; v < n; ++v) {
      double row = 0.0;
      for (std::size_t w = 0; w < n; ++w) row += total(v, w);
      rows[i][v] = (bv.log_scale + std::log(row)) / kk;
    }
  });

  PressureEstimate est;
  est.s = s;
  est.eps = eps_;
  est.k = k_;
  est.m = m;
  est.log_psi_mean = mean_of(rates);
  est.log_psi_stderr = stderr_of(rates);
  est.per_vertex_log.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += rows[i][v];
    est.per_vertex_log[v] = acc / static_cast<double>(m);
  }
  est.samples = std::move(rates);
  return est;
}

double PressureModel::deterministic_log_psi(double s) {
  const std::vector<Letter> zeros(cache_.k_max(), 0);
  const auto blocks = moran_blocks(cache_.graph(cache_.index_for(zeros)), s);
  const std::size_t n = spec_->vertex_count();
  Matrix total(n, n);
  for (const auto& b : blocks) total += b.matrix;
  const double rho = spectral_radius(total).value;
  return rho > 0.0 ? std::log(rho) : -std::numeric_limits<double>::infinity();
}

PressureEstimate psi_estimate(const SystemSpec& spec, double s, double eps, std::uint64_t k, std::uint64_t m,
                              std::uint64_t seed, const EngineOptions& options) {
  if (k == 0 || m == 0) throw Error(ErrorKind::MalformedSpec, "k and m must be positive");
  PressureModel model(spec, eps, options);
  if (spec.deterministic()) {
    PressureEstimate est;
    est.s = s;
    est.eps = eps;
    est.k = k;
    est.m = 1;
    est.log_psi_mean = model.deterministic_log_psi(s);
    est.per_vertex_log.assign(spec.vertex_count(), est.log_psi_mean);
    est.samples = {est.log_psi_mean};
    est.exact = true;
    return est;
  }
  model.prepare(k, m, seed);
  return model.evaluate(s);
}

double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi, double tol, int* probes) {
  int count = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    ++count;
    if (f(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  if (probes) *probes += count;
  return 0.5 * (lo + hi);
}

namespace {

struct Bracket {
  double lo;
  double hi;
  int probes;
};

// f decreasing; finds [lo, hi] with f(lo) >= 0 > f(hi), hi doubling from 1.
Bracket bracket_root(const std::function<double(double)>& f) {
  const double f0 = f(0.0);
  if (f0 < 0.0) throw Error(ErrorKind::BracketFailure, "log pressure at s=0 is negative");
  Bracket b{0.0, 1.0, 1};
  if (f0 == 0.0) return {0.0, 0.0, 1};
  for (int i = 0;; ++i) {
    ++b.probes;
    if (f(b.hi) < 0.0) return b;
    if (i == kMaxDoublings) throw Error(ErrorKind::BracketFailure, "no sign change below s=4096");
    b.lo = b.hi;
    b.hi *= 2.0;
  }
}

}  // namespace

RootEstimate solve_s_H(const SystemSpec& spec, double eps, std::uint64_t k, std::uint64_t m, std::uint64_t seed,
                       double tol, const EngineOptions& options) {
  if (!(tol > 0.0)) throw Error(ErrorKind::MalformedSpec, "tol must be positive");
  PressureModel model(spec, eps, options);
  RootEstimate out;
  if (spec.deterministic()) {
    auto f = [&](double s) { return model.deterministic_log_psi(s); };
    const auto b = bracket_root(f);
    out.probes = b.probes;
    out.s = b.hi == b.lo ? b.lo : bisect_decreasing(f, b.lo, b.hi, std::min(tol, 1e-9), &out.probes);
    out.lo = out.s;
    out.hi = out.s;
    out.method = "exact spectral radius of summed Moran blocks";
    return out;
  }
  model.prepare(k, m, seed);
  double f_lo = 0.0, f_hi = 0.0;
  std::function<double(double)> f = [&](double s) { return model.evaluate(s).log_psi_mean; };
  auto b = bracket_root(f);
  out.probes = b.probes;
  if (b.hi == b.lo) {
    out.s = 0.0;
    out.method = "monte carlo band product, common random numbers";
    return out;
  }
  f_lo = f(b.lo);
  f_hi = f(b.hi);
  double lo = b.lo, hi = b.hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double v = f(mid);
    ++out.probes;
    if (v >= 0.0) {
      lo = mid;
      f_lo = v;
    } else {
      hi = mid;
      f_hi = v;
    }
  }
  out.s = 0.5 * (lo + hi);
  out.lo = lo;
  out.hi = hi;
  const auto at_root = model.evaluate(out.s);
  const double slope = (f_lo - f_hi) / (hi - lo);
  out.std_error = slope > 0.0 ? at_root.log_psi_stderr / slope : std::numeric_limits<double>::infinity();
  out.method = "monte carlo band product, common random numbers";
  return out;
}

BoxDimension box_dimension_1var(const SystemSpec& spec, std::span<const double> eps_schedule, std::uint64_t k,
                                std::uint64_t m, std::uint64_t seed, const EngineOptions& options) {
  if (eps_schedule.empty()) throw Error(ErrorKind::BadEpsilon, "empty eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    const double e = eps_schedule[i];
    if (!(e > 0.0) || !(e < 1.0)) throw Error(ErrorKind::BadEpsilon, "schedule entries must lie in (0,1)");
    if (i > 0 && !(e < eps_schedule[i - 1]))
      throw Error(ErrorKind::BadEpsilon, "schedule must be strictly decreasing");
  }
  BoxDimension out;
  out.sup_t = -std::numeric_limits<double>::infinity();
  for (double eps : eps_schedule) {
    const auto est = psi_estimate(spec, 0.0, eps, k, m, seed, options);
    BoxDimensionEntry e{eps, est.log_psi_mean, est.log_psi_stderr, est.log_psi_mean / -std::log(eps)};
    out.sup_t = std::max(out.sup_t, e.t);
    out.entries.push_back(e);
  }
  out.final_t = out.entries.back().t;
  if (out.entries.size() >= 2) {
    const auto& a = out.entries[out.entries.size() - 2];
    const auto& b = out.entries.back();
    const double span = std::log(a.eps) - std::log(b.eps);
    out.estimate = (b.log_psi - a.log_psi) / span;
    out.estimate_std_error = std::hypot(a.std_error, b.std_error) / span;
  } else {
    out.estimate = out.final_t;
    out.estimate_std_error = out.entries.back().std_error;
  }
  return out;
}

double one_vertex_root(const SystemSpec& spec, double tol) {
  if (spec.vertex_count() != 1) throw Error(ErrorKind::MalformedSpec, "closed form needs one vertex");
  auto f = [&](double s) {
    double acc = 0.0;
    for (const auto& g : spec.graphs()) {
      double sum = 0.0;
      for (const auto& e : g.edges) sum += std::pow(e.map.ratio, s);
      acc += g.prob * std::log(sum);
    }
    return acc;
  };
  const auto b = bracket_root(f);
  if (b.hi == b.lo) return b.lo;
  return bisect_decreasing(f, b.lo, b.hi, tol);
}

UsscDimension ussc_dimension_1var(const SystemSpec& spec, std::uint64_t k, std::uint64_t m, std::uint64_t seed,
                                  double tol, bool with_lyapunov, const EngineOptions& options) {
  const auto report = validate_system(spec, Mode::OneVariable);
  if (!report.ussc_sufficient)
    throw Error(ErrorKind::NotUSSC, "seed-box images of same-vertex edges intersect; result would be a lower bound");
  UsscDimension out;
  if (spec.vertex_count() == 1) {
    out.closed_form = one_vertex_root(spec, std::min(tol, 1e-12));
    out.value = *out.closed_form;
    out.method = "closed form, one vertex";
  }
  if (!out.closed_form || (with_lyapunov && !spec.deterministic())) {
    out.lyapunov = solve_s_H(spec, 1.0, k, m, seed, tol, options);
    if (!out.closed_form) {
      out.value = out.lyapunov->s;
      out.std_error = out.lyapunov->std_error;
      out.method = spec.deterministic() ? "exact spectral radius of p_1^s"
                                        : "lyapunov exponent of p_1^s products, monte carlo";
    }
  }
  return out;
}

Matrix layer_matrix(std::span<const MoranBlock> blocks, std::uint32_t l, std::size_t n) {
  Matrix w(l * n, l * n);
  for (const auto& b : blocks) {
    if (b.q == 0 || b.q > l) throw Error(ErrorKind::ShapeMismatch, "block length exceeds layer count");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w(i, (b.q - 1) * n + j) = b.matrix(i, j);
  }
  for (std::uint32_t q = 1; q < l; ++q)
    for (std::size_t i = 0; i < n; ++i) w(q * n + i, (q - 1) * n + i) = 1.0;
  return w;
}

double phi_finite(const SystemSpec& spec, double eps, double s, std::uint64_t k, std::uint64_t seed) {
  if (k == 0) throw Error(ErrorKind::MalformedSpec, "k must be positive");
  StoppingCache cache(spec, eps);
  const std::uint32_t l = cache.k_max();
  const std::size_t n = spec.vertex_count();
  const auto letters = sample_letters(make_stream(spec, seed), static_cast<std::size_t>(k + l - 1));
  std::vector<std::optional<Matrix>> layers;
  Matrix row(n, l * n);
  for (std::size_t i = 0; i < n; ++i) row(i, i) = 1.0;
  double log_total = 0.0;
  for (std::uint64_t t = 0; t < k; ++t) {
    const auto idx = cache.index_for(std::span<const Letter>(letters).subspan(t, l));
    if (idx >= layers.size()) layers.resize(idx + 1);
    if (!layers[idx]) layers[idx] = layer_matrix(moran_blocks(cache.graph(idx), s), l, n);
    row = row * *layers[idx];
    const double norm = entry_norm(row);
    if (!(norm > 0.0)) throw Error(ErrorKind::DeadVector, "layered product vanished");
    row *= 1.0 / norm;
    log_total += std::log(norm);
  }
  return std::exp(log_total / static_cast<double>(k));
}

}  // namespace rgds

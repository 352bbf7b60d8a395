#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rgds/matrix.hpp"
#include "rgds/stopping_graph.hpp"
#include "rgds/system_model.hpp"

namespace rgds {

struct MoranBlock {
  std::uint32_t q = 0;
  Matrix matrix;
};

/// Nonzero p_q^s blocks of a stopping graph, ascending in q.
std::vector<MoranBlock> moran_blocks(const StoppingGraph& sg, double s);

/// Row of blocks 1 P(w) P(sigma w) ... stored as a contiguous window of n x n
/// blocks starting at Gamma-offset `base`, plus the log of the factors
/// divided out so far.
struct BandVector {
  std::size_t n = 0;
  std::uint64_t base = 0;
  std::vector<double> data;  // width * n * n, row-major blocks
  double log_scale = 0.0;
  std::uint64_t steps = 0;

  static BandVector unit(std::size_t n);

  std::size_t width() const noexcept { return n == 0 ? 0 : data.size() / (n * n); }
  Matrix block(std::uint64_t offset) const;
  Matrix sum() const;
  /// Row norm of the block sum.
  double seminorm() const;
};

struct BandOptions {
  /// End blocks whose entry sum falls below trim * (largest entry sum) are
  /// dropped. Zero keeps everything.
  double trim = 1e-40;
};

/// Shared stopping graphs for one (spec, eps), keyed by the k_max-letter
/// prefix that determines them. Thread-safe; references stay valid.
class StoppingCache {
 public:
  StoppingCache(const SystemSpec& spec, double eps);

  const SystemSpec& spec() const noexcept { return *spec_; }
  double eps() const noexcept { return eps_; }
  std::uint32_t k_max() const noexcept { return k_max_; }

  std::uint32_t index_for(std::span<const Letter> prefix);
  const StoppingGraph& graph(std::uint32_t index) const;
  std::size_t size() const;

 private:
  const SystemSpec* spec_;
  double eps_;
  std::uint32_t k_max_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::deque<StoppingGraph> graphs_;
};

/// moran_blocks of every cached stopping graph at one s, built on demand.
class BlockTable {
 public:
  BlockTable(StoppingCache& cache, double s) : cache_(&cache), s_(s) {}

  double s() const noexcept { return s_; }
  const std::vector<MoranBlock>& get(std::uint32_t index);

 private:
  StoppingCache* cache_;
  double s_;
  std::mutex mutex_;
  std::deque<std::optional<std::vector<MoranBlock>>> blocks_;
};

/// One stopping-edge factor: the block at offset j is multiplied by the
/// blocks for sigma^j w and accumulated at offset j + q; the result is
/// divided by its seminorm. `blocks_at(j)` supplies p_q(sigma^j w).
void band_step(BandVector& bv, const std::function<const std::vector<MoranBlock>&(std::uint64_t)>& blocks_at,
               const BandOptions& options = {});
void band_step(BandVector& bv, const SystemSpec& spec, const RealizationStream& stream, double s, double eps,
               const BandOptions& options = {});

struct PressureEstimate {
  double s = 0.0;
  double eps = 0.0;
  std::uint64_t k = 0;
  std::uint64_t m = 0;
  double log_psi_mean = 0.0;
  double log_psi_stderr = 0.0;
  std::vector<double> per_vertex_log;
  std::vector<double> samples;  // per-realization log rates
  bool exact = false;           // closed-form deterministic path
};

struct EngineOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  BandOptions band;
};

unsigned resolve_threads(unsigned requested);

/// Letters of one realization mapped to stopping-graph indices per position.
struct Realization {
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> graph_at;
};

/// Monte Carlo pressure for fixed (spec, eps) with realizations fixed up
/// front, so successive s probes use common random numbers.
class PressureModel {
 public:
  PressureModel(const SystemSpec& spec, double eps, EngineOptions options = {});

  std::uint32_t k_max() const noexcept { return cache_.k_max(); }
  StoppingCache& cache() noexcept { return cache_; }

  /// Draws m realizations long enough for k band steps.
  void prepare(std::uint64_t k, std::uint64_t m, std::uint64_t seed);
  PressureEstimate evaluate(double s);

  /// log rho(sum_q p_q^s) for deterministic systems.
  double deterministic_log_psi(double s);

 private:
  const SystemSpec* spec_;
  double eps_;
  EngineOptions options_;
  StoppingCache cache_;
  std::uint64_t k_ = 0;
  std::vector<Realization> realizations_;
};

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) noexcept;

PressureEstimate psi_estimate(const SystemSpec& spec, double s, double eps, std::uint64_t k, std::uint64_t m,
                              std::uint64_t seed, const EngineOptions& options = {});

struct RootEstimate {
  double s = 0.0;
  double std_error = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int probes = 0;
  std::string method;
};

RootEstimate solve_s_H(const SystemSpec& spec, double eps, std::uint64_t k, std::uint64_t m, std::uint64_t seed,
                       double tol, const EngineOptions& options = {});

struct BoxDimensionEntry {
  double eps = 0.0;
  double log_psi = 0.0;
  double std_error = 0.0;
  double t = 0.0;
};

struct BoxDimension {
  std::vector<BoxDimensionEntry> entries;
  double sup_t = 0.0;
  double final_t = 0.0;
  /// Slope of log Psi(0,eps) against -log eps over the two finest scales;
  /// removes the additive constant that biases individual t_eps.
  double estimate = 0.0;
  double estimate_std_error = 0.0;
};

BoxDimension box_dimension_1var(const SystemSpec& spec, std::span<const double> eps_schedule, std::uint64_t k,
                                std::uint64_t m, std::uint64_t seed, const EngineOptions& options = {});

struct UsscDimension {
  double value = 0.0;
  double std_error = 0.0;
  std::string method;
  std::optional<double> closed_form;
  std::optional<RootEstimate> lyapunov;
};

/// Root of the Lyapunov exponent of plain p_1^s products. With one vertex
/// the closed form sum_i pi_i log sum_j c_j^s = 0 is solved directly; the
/// Monte Carlo path runs as well when `with_lyapunov` is set.
UsscDimension ussc_dimension_1var(const SystemSpec& spec, std::uint64_t k, std::uint64_t m, std::uint64_t seed,
                                  double tol, bool with_lyapunov = false, const EngineOptions& options = {});

/// Closed-form root for one-vertex systems.
double one_vertex_root(const SystemSpec& spec, double tol = 1e-13);

/// (l n) x (l n) layered matrix: first block row p_1..p_l, identities below
/// the diagonal.
Matrix layer_matrix(std::span<const MoranBlock> blocks, std::uint32_t l, std::size_t n);

/// Phi^k_eps(s)^{1/k} over k Gamma letters of one realization.
double phi_finite(const SystemSpec& spec, double eps, double s, std::uint64_t k, std::uint64_t seed);

/// Bisection for a decreasing function with f(lo) >= 0 > f(hi).
double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi, double tol, int* probes = nullptr);

}  // namespace rgds

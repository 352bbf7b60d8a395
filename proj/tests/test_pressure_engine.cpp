#include <gtest/gtest.h>

#include <cmath>

#include "rgds/errors.hpp"
#include "rgds/pressure_engine.hpp"
#include "rgds/stopping_graph.hpp"
#include "support.hpp"

namespace rgds {
namespace {

using testing::cantor_third;
using testing::interval_system;
using testing::load;

const double kLog2 = std::log(2.0);
const double kThird = std::log(2.0) / std::log(3.0);
const double kG2 = std::log2((1.0 + std::sqrt(5.0)) / 2.0);
const double kCantorPair = std::log(6.0) / std::log(12.0);

TEST(MoranBlocks, CountsAtZeroAndRatiosAtOne) {
  const auto spec = load("cantor_pair.json");
  const std::vector<Letter> letters{1, 0};
  const auto sg = build_stopping_graph(spec, letters, 0.25);
  auto blocks = moran_blocks(sg, 0.0);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].q, 1u);
  EXPECT_DOUBLE_EQ(blocks[0].matrix(0, 0), 3.0);
  blocks = moran_blocks(sg, 1.0);
  EXPECT_DOUBLE_EQ(blocks[0].matrix(0, 0), 0.75);
}

TEST(MoranBlocks, ZeroExponentGivesEdgeCounts) {
  const auto spec = load("g2.json");
  const auto sg = build_stopping_graph(spec, make_stream(spec, 0), 0.2);
  Matrix total(2, 2);
  for (const auto& b : moran_blocks(sg, 0.0)) total += b.matrix;
  Matrix counts(2, 2);
  for (const auto& e : sg.edges) counts(e.from, e.to) += 1.0;
  EXPECT_EQ(total, counts);
}

TEST(BandStep, OneStepOnThirdCantor) {
  const auto spec = cantor_third();
  BandVector bv = BandVector::unit(1);
  band_step(bv, spec, make_stream(spec, 0), 0.0, 1.0 / 3);
  EXPECT_EQ(bv.base, 1u);
  EXPECT_EQ(bv.width(), 1u);
  EXPECT_DOUBLE_EQ(bv.block(1)(0, 0), 1.0);
  EXPECT_NEAR(bv.log_scale, kLog2, 1e-15);
  EXPECT_EQ(bv.steps, 1u);
}

TEST(BandStep, SimilarityDimensionIsNeutral) {
  const auto spec = cantor_third();
  BandVector bv = BandVector::unit(1);
  band_step(bv, spec, make_stream(spec, 0), kThird, 1.0 / 3);
  EXPECT_NEAR(bv.log_scale, 0.0, 1e-12);
}

TEST(BandStep, ActiveOffsetsStayInWindow) {
  const auto spec = load("overlapping.json");
  const auto stream = make_stream(spec, 4);
  const double eps = 0.05;
  const auto kmax = k_max(spec, eps);
  BandVector bv = BandVector::unit(1);
  for (std::uint64_t k = 1; k <= 30; ++k) {
    band_step(bv, spec, stream, 0.5, eps, BandOptions{0.0});
    EXPECT_GE(bv.base, k);
    EXPECT_LE(bv.base + bv.width() - 1, k * kmax);
  }
}

TEST(Psi, ThirdCantorExact) {
  const auto spec = cantor_third();
  for (int j = 1; j <= 4; ++j) {
    const auto est = psi_estimate(spec, 0.0, std::pow(3.0, -j), 100, 10, 0);
    EXPECT_TRUE(est.exact);
    EXPECT_EQ(est.log_psi_stderr, 0.0);
    // Each stopping step at 3^-j contributes 2^j words.
    EXPECT_NEAR(est.log_psi_mean, j * kLog2, 1e-9) << j;
  }
}

TEST(Psi, CantorPairAtUnitScale) {
  const auto spec = load("cantor_pair.json");
  const auto est = psi_estimate(spec, 0.0, 1.0, 1000, 100, 0);
  EXPECT_NEAR(est.log_psi_mean, 0.5 * std::log(2.0) + 0.5 * std::log(3.0), 0.02);
  EXPECT_GT(est.log_psi_stderr, 0.0);
  EXPECT_FALSE(est.exact);
}

TEST(Psi, LargeExponentDecays) {
  for (const char* name : {"cantor_pair.json", "overlapping.json", "g2.json"}) {
    const auto spec = load(name);
    EXPECT_LT(psi_estimate(spec, 50.0, 0.1, 50, 5, 0).log_psi_mean, 0.0) << name;
  }
}

TEST(Psi, MonotonicitySandwichPerSample) {
  // Each stopping edge has ratio in (eps c_min, eps], so per step the log rate
  // moves by delta log of that range when s moves by delta.
  const auto spec = load("overlapping.json");
  for (double eps : {0.5, 0.1}) {
    PressureModel model(spec, eps);
    model.prepare(200, 20, 3);
    const double delta = 0.3;
    for (double s : {0.0, 0.4, 0.9}) {
      const auto a = model.evaluate(s), b = model.evaluate(s + delta);
      for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const double diff = b.samples[i] - a.samples[i];
        EXPECT_LE(diff, delta * std::log(eps) + 1e-9);
        EXPECT_GE(diff, delta * std::log(eps * spec.c_min()) - 1e-9);
      }
    }
  }
}

TEST(Psi, BitwiseDeterministicAcrossThreads) {
  const auto spec = load("cantor_pair.json");
  const auto a = psi_estimate(spec, 0.6, 0.05, 300, 16, 9, EngineOptions{1, {}});
  const auto b = psi_estimate(spec, 0.6, 0.05, 300, 16, 9, EngineOptions{4, {}});
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.log_psi_mean, b.log_psi_mean);
  EXPECT_EQ(a.log_psi_stderr, b.log_psi_stderr);
  EXPECT_EQ(a.per_vertex_log, b.per_vertex_log);
}

TEST(Psi, ZeroSizesRejected) {
  const auto spec = load("cantor_pair.json");
  EXPECT_THROW(psi_estimate(spec, 0.0, 0.5, 0, 10, 0), Error);
  EXPECT_THROW(psi_estimate(spec, 0.0, 0.5, 10, 0, 0), Error);
}

TEST(SolveSH, DeterministicRoots) {
  EXPECT_NEAR(solve_s_H(cantor_third(), 1.0 / 3, 100, 10, 0, 1e-6).s, kThird, 1e-4);
  const auto triple = interval_system({{{0.25, 0.0}, {0.25, 0.375}, {0.25, 0.75}}});
  EXPECT_NEAR(solve_s_H(triple, 0.25, 100, 10, 0, 1e-6).s, std::log(3.0) / std::log(4.0), 1e-4);
}

TEST(SolveSH, CantorPairIsALowerBound) {
  const auto spec = load("cantor_pair.json");
  const auto r = solve_s_H(spec, 0.25, 2000, 200, 0, 1e-5);
  EXPECT_GE(r.s, 0.70);
  // One-sided up to Monte Carlo error: s_H,eps <= s_B.
  EXPECT_LE(r.s, kCantorPair + 2 * r.std_error);
  EXPECT_GT(r.std_error, 0.0);
  EXPECT_LE(r.lo, r.s);
  EXPECT_GE(r.hi, r.s);
}

TEST(SolveSH, BracketFailureWhenNoGrowth) {
  // A single edge: the count never grows, so log Psi(0) = 0 only at the edge
  // of the bracket and any s > 0 is negative; f(0) >= 0 still holds.
  const auto spec = interval_system({{{0.5, 0.0}}});
  EXPECT_NEAR(solve_s_H(spec, 0.5, 50, 5, 0, 1e-6).s, 0.0, 1e-6);
}

TEST(BoxDimension, ThirdCantorEveryScale) {
  std::vector<double> schedule;
  for (int j = 1; j <= 6; ++j) schedule.push_back(std::pow(3.0, -j));
  const auto box = box_dimension_1var(cantor_third(), schedule, 100, 10, 0);
  ASSERT_EQ(box.entries.size(), 6u);
  for (const auto& e : box.entries) EXPECT_NEAR(e.t, kThird, 1e-6);
  EXPECT_NEAR(box.final_t, kThird, 1e-6);
  EXPECT_NEAR(box.sup_t, kThird, 1e-6);
  EXPECT_NEAR(box.estimate, kThird, 1e-6);
}

TEST(BoxDimension, G2SlopeEstimate) {
  std::vector<double> schedule;
  for (int j = 1; j <= 12; ++j) schedule.push_back(std::pow(2.0, -j));
  const auto box = box_dimension_1var(load("g2.json"), schedule, 100, 10, 0);
  EXPECT_NEAR(box.estimate, kG2, 1e-4);
  // Individual t_eps carry an additive constant and approach from above.
  for (std::size_t i = 1; i < box.entries.size(); ++i) EXPECT_LE(box.entries[i].t, box.entries[i - 1].t + 1e-12);
}

TEST(BoxDimension, CantorPairFinestScales) {
  std::vector<double> schedule;
  for (int j = 1; j <= 5; ++j) schedule.push_back(std::pow(4.0, -j));
  const auto box = box_dimension_1var(load("cantor_pair.json"), schedule, 2000, 100, 0);
  EXPECT_NEAR(box.estimate, kCantorPair, 0.005);
  EXPECT_GE(box.final_t, kCantorPair - 0.005);
  EXPECT_LE(box.final_t, box.entries.front().t);
}

TEST(BoxDimension, RejectsBadSchedule) {
  const auto spec = cantor_third();
  const std::vector<double> up{0.1, 0.2};
  const std::vector<double> out{1.5};
  EXPECT_THROW(box_dimension_1var(spec, up, 10, 2, 0), Error);
  EXPECT_THROW(box_dimension_1var(spec, out, 10, 2, 0), Error);
}

TEST(UsscDimension, ClosedForms) {
  const auto pair = ussc_dimension_1var(load("cantor_pair.json"), 2000, 100, 0, 1e-9);
  ASSERT_TRUE(pair.closed_form);
  EXPECT_NEAR(pair.value, 0.721057, 1e-6);
  EXPECT_NEAR(pair.value, kCantorPair, 1e-9);
  const auto g2 = ussc_dimension_1var(load("g2.json"), 100, 10, 0, 1e-9);
  EXPECT_NEAR(g2.value, 0.694242, 1e-6);
  EXPECT_NEAR(g2.value, kG2, 1e-8);
}

TEST(UsscDimension, TouchingMapsRejected) {
  const auto spec = interval_system({{{0.5, 0.0}, {0.5, 0.5}}});
  try {
    ussc_dimension_1var(spec, 10, 2, 0, 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotUSSC);
  }
}

TEST(Phi, SingleLayerEqualsPsi) {
  const auto spec = load("cantor_pair.json");
  const auto m = layer_matrix(moran_blocks(build_stopping_graph(spec, std::vector<Letter>{1}, 0.5), 0.7), 1, 1);
  ASSERT_EQ(m.rows(), 1u);
  EXPECT_DOUBLE_EQ(m(0, 0), 3 * std::pow(0.25, 0.7));
  const auto third = cantor_third();
  EXPECT_NEAR(phi_finite(third, 0.5, 0.3, 50, 0), std::exp(psi_estimate(third, 0.3, 0.5, 50, 1, 0).log_psi_mean),
              1e-12);
}

TEST(Phi, CountsDoublePerLetter) {
  const auto spec = cantor_third();
  EXPECT_NEAR(phi_finite(spec, 1.0 / 3, 0.0, 200, 0), 2.0, 1e-12);
  // With l layers the count only jumps every l letters; take k a multiple of l.
  EXPECT_NEAR(phi_finite(spec, 1.0 / 9, 0.0, 200, 0), 2.0, 1e-12);
  EXPECT_NEAR(phi_finite(spec, 1.0 / 27, 0.0, 201, 0), 2.0, 1e-12);
}

TEST(Phi, UnitAtRoot) {
  const auto spec = cantor_third();
  EXPECT_NEAR(phi_finite(spec, 1.0 / 3, kThird, 500, 0), 1.0, 2e-2);
}

TEST(Phi, LayerMatrixShape) {
  std::vector<MoranBlock> blocks{{1, Matrix{{1.0}}}, {3, Matrix{{2.0}}}};
  const auto w = layer_matrix(blocks, 3, 1);
  EXPECT_EQ(w, (Matrix{{1, 0, 2}, {1, 0, 0}, {0, 1, 0}}));
  EXPECT_THROW(layer_matrix(blocks, 2, 1), Error);
}

TEST(Bisection, FindsRoot) {
  int probes = 0;
  const double r = bisect_decreasing([](double x) { return 2.0 - x; }, 0.0, 8.0, 1e-10, &probes);
  EXPECT_NEAR(r, 2.0, 1e-10);
  EXPECT_GT(probes, 30);
}

}  // namespace
}  // namespace rgds

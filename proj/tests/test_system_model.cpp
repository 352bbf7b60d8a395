#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rgds/errors.hpp"
#include "support.hpp"

namespace rgds {
namespace {

using testing::interval_system;
using testing::load;

TEST(Validate, CantorPairIsValidAndSeparated) {
  const auto spec = load("cantor_pair.json");
  const auto r = validate_system(spec, Mode::OneVariable);
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.ussc_sufficient);
  EXPECT_TRUE(r.strongly_connected);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Validate, SingleHalvingMapFailsSurvivalOnlyInRecursiveMode) {
  const auto spec = interval_system({{{0.5, 0.0}}});
  const auto one = validate_system(spec, Mode::OneVariable);
  EXPECT_TRUE(one.ok);
  EXPECT_FALSE(one.surviving);
  const auto inf = validate_system(spec, Mode::InfiniteVariable);
  EXPECT_FALSE(inf.ok);
  ASSERT_FALSE(inf.violations.empty());
  EXPECT_EQ(inf.violations.front().condition, "surviving");
}

TEST(Validate, MissingOutgoingEdgeIsReported) {
  Box box;
  box.hi = {1.0, 0.0};
  std::vector<GraphSpec> graphs{
      {0.5, {testing::edge1(0, 1, 0.3, 0.0), testing::edge1(1, 0, 0.3, 0.5)}},
      {0.5, {testing::edge1(0, 0, 0.3, 0.0), testing::edge1(0, 1, 0.3, 0.5)}},
  };
  const SystemSpec spec(1, {"1", "2"}, box, graphs);
  const auto r = validate_system(spec, Mode::OneVariable);
  EXPECT_FALSE(r.ok);
  bool found = false;
  for (const auto& v : r.violations) found |= v.condition == "outgoing_edges";
  EXPECT_TRUE(found);
}

TEST(Validate, ProbabilitySumMustBeOne) {
  const auto spec = load("bad_prob.json");
  const auto r = validate_system(spec, Mode::OneVariable);
  ASSERT_FALSE(r.ok);
  EXPECT_EQ(r.violations.front().condition, "MalformedSpec");
}

TEST(Validate, NonContractingAndEscapingMaps) {
  const auto wide = interval_system({{{1.0, 0.0}, {0.5, 0.5}}});
  auto r = validate_system(wide, Mode::OneVariable);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.violations.front().condition, "NotContracting");

  const auto escaping = interval_system({{{0.5, 0.0}, {0.5, 0.75}}});
  r = validate_system(escaping, Mode::OneVariable);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.violations.front().condition, "SeedNotInvariant");
}

TEST(Validate, TouchingImagesAreNotSeparated) {
  const auto spec = interval_system({{{0.5, 0.0}, {0.5, 0.5}}});
  EXPECT_FALSE(validate_system(spec, Mode::OneVariable).ussc_sufficient);
}

TEST(Validate, IdenticalMapsGiveWarningNotViolation) {
  const auto spec = interval_system({{{0.5, 0.0}, {0.5, 0.0}}});
  const auto r = validate_system(spec, Mode::OneVariable);
  EXPECT_TRUE(r.ok);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings.front().condition, "distinct_maps");
}

TEST(Validate, DisconnectedVertices) {
  Box box;
  box.hi = {1.0, 0.0};
  std::vector<GraphSpec> graphs{{1.0,
                                 {testing::edge1(0, 0, 0.3, 0.0), testing::edge1(0, 0, 0.3, 0.6),
                                  testing::edge1(1, 1, 0.3, 0.0)}}};
  const SystemSpec spec(1, {"a", "b"}, box, graphs);
  const auto r = validate_system(spec, Mode::OneVariable);
  EXPECT_FALSE(r.strongly_connected);
  const auto reach = union_reachability(spec);
  EXPECT_TRUE(reach[0][0]);
  EXPECT_FALSE(reach[0][1]);
  EXPECT_FALSE(reach[1][0]);
}

TEST(Validate, IsPure) {
  const auto spec = load("overlapping.json");
  const auto a = validate_system(spec, Mode::OneVariable);
  const auto b = validate_system(spec, Mode::OneVariable);
  EXPECT_EQ(a.ok, b.ok);
  EXPECT_EQ(a.ussc_sufficient, b.ussc_sufficient);
  EXPECT_EQ(a.violations.size(), b.violations.size());
  EXPECT_FALSE(a.ussc_sufficient);
}

TEST(SystemSpec, EdgeIdsFollowDeclarationOrder) {
  const auto spec = load("cantor_pair.json");
  ASSERT_EQ(spec.edge_count(), 5u);
  EXPECT_EQ(spec.graph_of(1), 0u);
  EXPECT_EQ(spec.graph_of(2), 1u);
  EXPECT_DOUBLE_EQ(spec.ratios()[4], 0.25);
  EXPECT_DOUBLE_EQ(spec.edge(3).map.translation[0], 0.375);
  EXPECT_DOUBLE_EQ(spec.c_max(), 1.0 / 3);
  EXPECT_DOUBLE_EQ(spec.c_min(), 0.25);
  EXPECT_THROW(spec.edge(5), std::out_of_range);
}

TEST(SystemSpec, StructuralErrorsThrow) {
  Box box;
  box.hi = {1.0, 0.0};
  EXPECT_THROW(SystemSpec(1, {"v"}, box, {}), Error);
  EXPECT_THROW(SystemSpec(1, {"v"}, box, {{1.0, {testing::edge1(0, 3, 0.5, 0.0)}}}), Error);
  EXPECT_THROW(SystemSpec(1, {"v"}, box, {{1.0, {testing::edge1(0, 0, -0.5, 0.0)}}}), Error);
  EXPECT_THROW(SystemSpec(1, {"v"}, Box{}, {{1.0, {testing::edge1(0, 0, 0.5, 0.0)}}}), Error);
}

TEST(Geometry, IntervalImages) {
  Box unit;
  unit.hi = {1.0, 0.0};
  Similitude half;
  half.ratio = 0.5;
  auto img = apply_map(half, unit, 1);
  EXPECT_DOUBLE_EQ(img.lo(), 0.0);
  EXPECT_DOUBLE_EQ(img.hi(), 0.5);

  Similitude quarter;
  quarter.ratio = 0.25;
  quarter.translation = {0.75, 0.0};
  img = apply_map(quarter, unit, 1);
  EXPECT_DOUBLE_EQ(img.lo(), 0.75);
  EXPECT_DOUBLE_EQ(img.hi(), 1.0);
}

TEST(Geometry, RotatedSquare) {
  Box unit;
  unit.hi = {1.0, 1.0};
  Similitude r;
  r.ratio = 0.5;
  r.angle = std::numbers::pi / 2;
  const auto img = apply_map(r, unit, 2);
  EXPECT_NEAR(img.half[0], 0.25, 1e-15);
  EXPECT_NEAR(img.half[1], 0.25, 1e-15);
  EXPECT_NEAR(img.angle, std::numbers::pi / 2, 1e-15);
  // Oracle: push the four corners through the map.
  double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
  for (Point p : {Point{0, 0}, Point{1, 0}, Point{0, 1}, Point{1, 1}}) {
    const Point q = r.apply(p);
    xmin = std::min(xmin, q[0]), xmax = std::max(xmax, q[0]);
    ymin = std::min(ymin, q[1]), ymax = std::max(ymax, q[1]);
  }
  EXPECT_NEAR(img.center[0], 0.5 * (xmin + xmax), 1e-15);
  EXPECT_NEAR(img.center[1], 0.5 * (ymin + ymax), 1e-15);
  EXPECT_NEAR(xmin, -0.5, 1e-15);
}

TEST(Geometry, CompositionMatchesPointwise) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Similitude a, b;
    a.ratio = 0.5 + 0.4 * u(rng);
    b.ratio = 0.5 + 0.4 * u(rng);
    a.angle = 3 * u(rng);
    b.angle = 3 * u(rng);
    a.reflect = u(rng) > 0;
    b.reflect = u(rng) > 0;
    a.translation = {u(rng), u(rng)};
    b.translation = {u(rng), u(rng)};
    const Point p{u(rng), u(rng)};
    const Point direct = a.apply(b.apply(p));
    const Point composed = a.compose(b).apply(p);
    EXPECT_NEAR(direct[0], composed[0], 1e-12);
    EXPECT_NEAR(direct[1], composed[1], 1e-12);
  }
}

TEST(Geometry, TouchingCountsAsIntersecting) {
  OrientedBox a, b, c;
  a.center = {0.25, 0};
  a.half = {0.25, 0};
  b.center = {0.75, 0};
  b.half = {0.25, 0};
  c.center = {0.80, 0};
  c.half = {0.04, 0};
  EXPECT_TRUE(boxes_intersect(a, b));
  EXPECT_FALSE(boxes_intersect(a, c));
}

TEST(Geometry, SeparatingAxisForRotatedRectangles) {
  OrientedBox a, b;
  a.dimension = b.dimension = 2;
  a.center = {0, 0};
  a.half = {1, 1};
  b.center = {2.3, 0};
  b.half = {1, 1};
  b.angle = std::numbers::pi / 4;  // corner reaches 2.3 - sqrt(2) < 1
  EXPECT_TRUE(boxes_intersect(a, b));
  b.center = {2.5, 0};
  EXPECT_FALSE(boxes_intersect(a, b));
}

TEST(Stream, EmptyDraw) {
  const RealizationStream s(1, {0.5, 0.5});
  EXPECT_TRUE(sample_letters(s, 0).empty());
}

TEST(Stream, DegenerateDistribution) {
  const RealizationStream s(99, {1.0, 0.0, 0.0});
  for (Letter l : sample_letters(s, 1000)) EXPECT_EQ(l, 0u);
}

TEST(Stream, FrequencyMatchesProbability) {
  const RealizationStream s(12345, {0.5, 0.5});
  const auto letters = sample_letters(s, 100000);
  const double ones = static_cast<double>(std::count(letters.begin(), letters.end(), 0u)) / 1e5;
  EXPECT_GE(ones, 0.495);
  EXPECT_LE(ones, 0.505);
}

TEST(Stream, DeterministicAndShiftable) {
  const RealizationStream s(7, {0.3, 0.7});
  const auto a = sample_letters(s, 50);
  const auto b = sample_letters(RealizationStream(7, {0.3, 0.7}), 50);
  EXPECT_EQ(a, b);
  const auto shifted = s.shifted(10);
  for (std::uint64_t t = 0; t < 40; ++t) EXPECT_EQ(shifted.letter(t), a[t + 10]);
}

}  // namespace
}  // namespace rgds

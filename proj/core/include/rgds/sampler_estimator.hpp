#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rgds/infinite_variable.hpp"
#include "rgds/system_model.hpp"

namespace rgds {

struct CoverElement {
  Similitude map;
  VertexIndex vertex = 0;   // terminal vertex
  std::uint64_t offset = 0; // Gamma-letters consumed
};

/// Finite-stage approximation of the attractor at one vertex: images of the
/// seed box under composed stopping edges.
struct BoxCover {
  int dimension = 1;
  Box domain;
  double eps = 0.0;
  std::uint32_t rounds = 0;
  VertexIndex vertex = 0;
  std::uint64_t seed = 0;
  std::vector<CoverElement> elements;
  std::vector<OrientedBox> boxes;
};

/// `rounds` successive stopping-edge compositions; round r at element offset
/// j uses the stopping graph for sigma^j w.
BoxCover prefractal_cover(const SystemSpec& spec, const RealizationStream& stream, VertexIndex vertex, double eps,
                          std::uint32_t rounds, std::size_t budget = 10'000'000);

/// Leaves of a random recursive tree as a cover (empty when extinct).
BoxCover tree_cover(const SystemSpec& spec, const RecursiveTree& tree);

struct BoxCountFit {
  std::vector<double> scales;  // strictly decreasing
  std::vector<std::uint64_t> counts;
  std::vector<bool> fitted;    // inside the scaling window
  double window_lo = 0.0;
  double window_hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Number of half-open grid cells of side delta, anchored at the domain's
/// lower corner, met by the cover.
std::uint64_t grid_count(const BoxCover& cover, double delta);

/// Least-squares slope of log N against -log delta over the scales inside
/// [eps^rounds |domain|, |domain| / 10]; all scales are fitted if fewer than
/// two fall inside.
BoxCountFit box_count(const BoxCover& cover, std::span<const double> deltas);

/// Geometric schedule base^-j |domain| for the j that land in the window.
std::vector<double> default_deltas(const BoxCover& cover, double base = 2.0);

struct SvgStyle {
  double width = 800.0;
  double bar_height = 40.0;
  std::string fill = "#1f3b73";
  std::string background = "#ffffff";
};

std::string svg_string(const BoxCover& cover, const SvgStyle& style = {});
void render_svg(const BoxCover& cover, const std::string& path, const SvgStyle& style = {});

/// delta;count
std::string box_count_csv(const BoxCountFit& fit);

}  // namespace rgds

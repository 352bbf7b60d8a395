#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rgds/system_model.hpp"

namespace rgds {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::string method;
};

struct EpsEstimate {
  double eps = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

/// Dimension values gathered by one run; absent fields were not computed.
struct DimensionReport {
  std::optional<Estimate> s_B;            // Hausdorff = packing = box, one-variable
  std::vector<EpsEstimate> s_H_eps;       // lower-bound diagnostics per eps
  std::optional<Estimate> s_O;            // separated one-variable root
  std::optional<Estimate> s_O_lyapunov;   // Monte Carlo cross-check of s_O
  std::optional<Estimate> s_h;            // infinite-variable root
  std::optional<Estimate> assouad_lower;
  std::optional<double> assouad_value;    // equality under separation
};

nlohmann::json to_json(const DimensionReport& r);

/// Cross-field consistency; returns one message per violated relation.
std::vector<std::string> check_invariants(const DimensionReport& r);

nlohmann::json to_json(const ValidationReport& r);

inline constexpr int kReportFormat = 1;

/// Structural check of a report document; returns problems, empty if valid.
std::vector<std::string> validate_report(const nlohmann::json& report);

}  // namespace rgds

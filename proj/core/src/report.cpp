#include "rgds/report.hpp"

#include <algorithm>
#include <array>
#include <string_view>

namespace rgds {

namespace {

using nlohmann::json;

json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"method", e.method}};
}

constexpr std::array<std::string_view, 9> kCommands = {"validate", "dim1var", "diminf", "assouad", "pressure",
                                                       "stopping", "simulate", "boxcount", "render"};

void check_estimate(const json& e, const std::string& where, std::vector<std::string>& problems) {
  if (!e.is_object()) {
    problems.push_back(where + " must be an object");
    return;
  }
  if (!e.contains("value") || !e["value"].is_number()) problems.push_back(where + ".value must be a number");
  if (!e.contains("std_error") || !e["std_error"].is_number() || e["std_error"].get<double>() < 0.0)
    problems.push_back(where + ".std_error must be a non-negative number");
  if (!e.contains("method") || !e["method"].is_string()) problems.push_back(where + ".method must be a string");
}

}  // namespace

json to_json(const DimensionReport& r) {
  json j = json::object();
  if (r.s_B) j["s_B"] = estimate_json(*r.s_B);
  if (!r.s_H_eps.empty()) {
    j["s_H_eps"] = json::array();
    for (const auto& e : r.s_H_eps)
      j["s_H_eps"].push_back({{"eps", e.eps}, {"value", e.value}, {"std_error", e.std_error}});
  }
  if (r.s_O) j["s_O"] = estimate_json(*r.s_O);
  if (r.s_O_lyapunov) j["s_O_lyapunov"] = estimate_json(*r.s_O_lyapunov);
  if (r.s_h) j["s_h"] = estimate_json(*r.s_h);
  if (r.assouad_lower) j["assouad_lower"] = estimate_json(*r.assouad_lower);
  if (r.assouad_value) j["assouad_value"] = *r.assouad_value;
  j["consistency"] = check_invariants(r);
  return j;
}

std::vector<std::string> check_invariants(const DimensionReport& r) {
  std::vector<std::string> out;
  if (r.s_B) {
    for (const auto& e : r.s_H_eps)
      if (e.value > r.s_B->value + 2.0 * std::max(e.std_error, r.s_B->std_error) + 1e-9)
        out.push_back("s_H_eps at eps=" + std::to_string(e.eps) + " exceeds s_B");
    if (r.assouad_lower && r.s_B->value > r.assouad_lower->value + 2.0 * r.s_B->std_error + 0.01)
      out.push_back("s_B exceeds the Assouad lower bound");
  }
  if (r.s_O && r.s_h && r.s_O->value > r.s_h->value + 2.0 * r.s_O->std_error + 1e-9)
    out.push_back("one-variable s_O exceeds infinite-variable s_h");
  return out;
}

json to_json(const ValidationReport& r) {
  auto list = [](const std::vector<Violation>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back({{"condition", v.condition}, {"message", v.message}});
    return a;
  };
  return {{"ok", r.ok},
          {"violations", list(r.violations)},
          {"warnings", list(r.warnings)},
          {"ussc_sufficient", r.ussc_sufficient},
          {"surviving", r.surviving},
          {"strongly_connected", r.strongly_connected}};
}

std::vector<std::string> validate_report(const json& report) {
  std::vector<std::string> p;
  if (!report.is_object()) return {"report must be an object"};
  if (report.value("tool", "") != "rgds") p.push_back("tool must be \"rgds\"");
  if (!report.contains("format") || report["format"] != kReportFormat) p.push_back("format must be 1");
  if (!report.contains("command") || !report["command"].is_string() ||
      std::find(kCommands.begin(), kCommands.end(), report["command"].get<std::string>()) == kCommands.end())
    p.push_back("command must name a known command");
  if (!report.contains("ok") || !report["ok"].is_boolean()) {
    p.push_back("ok must be a boolean");
    return p;
  }
  if (report.contains("timestamp") && !report["timestamp"].is_string()) p.push_back("timestamp must be a string");
  if (report.contains("seed") && !report["seed"].is_number_unsigned()) p.push_back("seed must be unsigned");
  if (report.contains("parameters") && !report["parameters"].is_object()) p.push_back("parameters must be an object");
  if (report["ok"].get<bool>()) {
    if (!report.contains("result") || !report["result"].is_object()) {
      p.push_back("result must be an object");
      return p;
    }
    const json& res = report["result"];
    if (res.contains("dimension")) {
      const json& d = res["dimension"];
      for (const char* key : {"s_B", "s_O", "s_O_lyapunov", "s_h", "assouad_lower"})
        if (d.contains(key)) check_estimate(d[key], std::string("result.dimension.") + key, p);
      if (d.contains("s_H_eps")) {
        if (!d["s_H_eps"].is_array()) p.push_back("result.dimension.s_H_eps must be an array");
        else
          for (const auto& e : d["s_H_eps"])
            if (!e.contains("eps") || !e.contains("value") || !e["value"].is_number())
              p.push_back("result.dimension.s_H_eps entries need eps and value");
      }
      if (d.contains("assouad_value") && !d["assouad_value"].is_number())
        p.push_back("result.dimension.assouad_value must be a number");
      if (!d.contains("consistency") || !d["consistency"].is_array())
        p.push_back("result.dimension.consistency must be an array");
    }
  } else {
    if (!report.contains("error") || !report["error"].is_object()) {
      p.push_back("error must be an object");
      return p;
    }
    const json& e = report["error"];
    if (!e.contains("kind") || !e["kind"].is_string()) p.push_back("error.kind must be a string");
    if (!e.contains("message") || !e["message"].is_string()) p.push_back("error.message must be a string");
  }
  return p;
}

}  // namespace rgds

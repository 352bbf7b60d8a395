#include "rgds/spec_io.hpp"

#include <fstream>
#include <unordered_map>

#include "rgds/errors.hpp"

namespace rgds {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::MalformedSpec, where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) malformed(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) malformed(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) malformed(where, "expected a number");
  return v.get<double>();
}

std::string vertex_id(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  malformed(where, "vertex id must be a string or integer");
}

Point coordinates(const json& v, int dimension, const std::string& where) {
  Point p{0.0, 0.0};
  if (v.is_number()) {
    if (dimension != 1) malformed(where, "scalar given in dimension 2");
    p[0] = v.get<double>();
    return p;
  }
  if (!v.is_array() || v.size() != static_cast<std::size_t>(dimension))
    malformed(where, "expected " + std::to_string(dimension) + " coordinates");
  for (int k = 0; k < dimension; ++k) p[k] = number(v[k], where);
  return p;
}

}  // namespace

SystemSpec parse_spec(const json& j) {
  const json& dim = field(j, "dimension", "spec");
  if (!dim.is_number_integer()) malformed("dimension", "expected 1 or 2");
  const int d = dim.get<int>();
  if (d != 1 && d != 2) malformed("dimension", "expected 1 or 2");

  const json& verts = field(j, "vertices", "spec");
  if (!verts.is_array() || verts.empty()) malformed("vertices", "expected a non-empty array");
  std::vector<std::string> ids;
  std::unordered_map<std::string, VertexIndex> index;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    ids.push_back(vertex_id(verts[i], "vertices[" + std::to_string(i) + "]"));
    if (!index.emplace(ids.back(), static_cast<VertexIndex>(i)).second) malformed("vertices", "duplicate id " + ids.back());
  }

  const json& box = field(j, "seed_box", "spec");
  Box seed;
  seed.lo = coordinates(field(box, "lo", "seed_box"), d, "seed_box.lo");
  seed.hi = coordinates(field(box, "hi", "seed_box"), d, "seed_box.hi");

  const json& graphs = field(j, "graphs", "spec");
  if (!graphs.is_array() || graphs.empty()) malformed("graphs", "expected a non-empty array");
  std::vector<GraphSpec> gs;
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const std::string gw = "graphs[" + std::to_string(g) + "]";
    GraphSpec spec;
    spec.prob = number(field(graphs[g], "prob", gw), gw + ".prob");
    const json& edges = field(graphs[g], "edges", gw);
    if (!edges.is_array()) malformed(gw + ".edges", "expected an array");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::string ew = gw + ".edges[" + std::to_string(e) + "]";
      const json& ej = edges[e];
      EdgeSpec edge;
      auto lookup = [&](const char* key) {
        const auto id = vertex_id(field(ej, key, ew), ew + "." + key);
        auto it = index.find(id);
        if (it == index.end()) malformed(ew, std::string("unknown vertex '") + id + "' in " + key);
        return it->second;
      };
      edge.from = lookup("from");
      edge.to = lookup("to");
      edge.map.ratio = number(field(ej, "ratio", ew), ew + ".ratio");
      edge.map.translation = coordinates(field(ej, "translation", ew), d, ew + ".translation");
      if (auto it = ej.find("angle"); it != ej.end()) edge.map.angle = number(*it, ew + ".angle");
      if (auto it = ej.find("reflect"); it != ej.end()) {
        if (!it->is_boolean()) malformed(ew + ".reflect", "expected a boolean");
        edge.map.reflect = it->get<bool>();
      }
      spec.edges.push_back(edge);
    }
    gs.push_back(std::move(spec));
  }
  return SystemSpec(d, std::move(ids), seed, std::move(gs));
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedSpec, path + ": " + e.what());
  }
  return parse_spec(j);
}

nlohmann::json spec_to_json(const SystemSpec& spec) {
  const int d = spec.dimension();
  auto coords = [d](const Point& p) { return d == 1 ? json(p[0]) : json::array({p[0], p[1]}); };
  json j;
  j["dimension"] = d;
  j["vertices"] = spec.vertices();
  j["seed_box"] = {{"lo", coords(spec.seed_box().lo)}, {"hi", coords(spec.seed_box().hi)}};
  j["graphs"] = json::array();
  for (const auto& g : spec.graphs()) {
    json gj;
    gj["prob"] = g.prob;
    gj["edges"] = json::array();
    for (const auto& e : g.edges) {
      json ej{{"from", spec.vertices()[e.from]},
              {"to", spec.vertices()[e.to]},
              {"ratio", e.map.ratio},
              {"translation", coords(e.map.translation)}};
      if (e.map.angle != 0.0) ej["angle"] = e.map.angle;
      if (e.map.reflect) ej["reflect"] = true;
      gj["edges"].push_back(std::move(ej));
    }
    j["graphs"].push_back(std::move(gj));
  }
  return j;
}

}  // namespace rgds

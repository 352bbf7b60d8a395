#include "rgds/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rgds/assouad_jsr.hpp"
#include "rgds/errors.hpp"
#include "rgds/infinite_variable.hpp"
#include "rgds/pressure_engine.hpp"
#include "rgds/report.hpp"
#include "rgds/sampler_estimator.hpp"
#include "rgds/spec_io.hpp"
#include "rgds/stopping_graph.hpp"

namespace rgds {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultK = 2000;
constexpr std::uint64_t kDefaultM = 100;
constexpr double kDefaultTol = 1e-3;
constexpr std::uint32_t kDefaultDepth = 8;
constexpr std::uint32_t kDefaultRounds = 5;
constexpr std::uint32_t kDefaultTreeDepth = 8;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
  f << text;
  if (!f) throw Error(ErrorKind::IoError, "write failed for " + path);
}

Mode parse_mode(const std::string& mode) {
  if (mode == "one") return Mode::OneVariable;
  if (mode == "inf") return Mode::InfiniteVariable;
  throw Error(ErrorKind::MalformedSpec, "mode must be 'one' or 'inf'");
}

// Thrown when the system fails structural validation.
struct InvalidSystem {
  ValidationReport report;
};

struct Context {
  const RunConfig& cfg;
  const SystemSpec& spec;
  json params = json::object();
  std::ostringstream summary;
  EngineOptions engine;

  Context(const RunConfig& config, const SystemSpec& system) : cfg(config), spec(system) {
    engine.threads = config.threads;
  }

  std::uint64_t k() {
    params["k"] = cfg.k.value_or(kDefaultK);
    return cfg.k.value_or(kDefaultK);
  }
  std::uint64_t m() {
    params["m"] = cfg.m.value_or(kDefaultM);
    return cfg.m.value_or(kDefaultM);
  }
  double tol() {
    params["tol"] = cfg.tol.value_or(kDefaultTol);
    return cfg.tol.value_or(kDefaultTol);
  }
  std::uint32_t depth(std::uint32_t fallback) {
    params["depth"] = cfg.depth.value_or(fallback);
    return cfg.depth.value_or(fallback);
  }
  double eps_required() {
    if (!cfg.eps) throw Error(ErrorKind::MalformedSpec, "--eps is required for " + cfg.command);
    params["eps"] = *cfg.eps;
    return *cfg.eps;
  }
  double eps_or(double fallback) {
    params["eps"] = cfg.eps.value_or(fallback);
    return cfg.eps.value_or(fallback);
  }
  /// Explicit schedule, else c_min^1 .. c_min^5.
  std::vector<double> schedule() {
    std::vector<double> s = cfg.eps_schedule;
    if (s.empty())
      for (int j = 1; j <= 5; ++j) s.push_back(std::pow(spec.c_min(), j));
    params["eps_schedule"] = s;
    return s;
  }
  VertexIndex vertex() {
    if (cfg.vertex.empty()) {
      params["vertex"] = spec.vertices().front();
      return 0;
    }
    const auto& vs = spec.vertices();
    for (VertexIndex v = 0; v < vs.size(); ++v)
      if (vs[v] == cfg.vertex) {
        params["vertex"] = cfg.vertex;
        return v;
      }
    throw Error(ErrorKind::MalformedSpec, "unknown vertex '" + cfg.vertex + "'");
  }
  void require_valid(Mode mode) {
    auto r = validate_system(spec, mode);
    if (!r.ok) throw InvalidSystem{std::move(r)};
  }
};

json box_json(const BoxDimension& b) {
  json entries = json::array();
  for (const auto& e : b.entries)
    entries.push_back({{"eps", e.eps}, {"log_psi", e.log_psi}, {"std_error", e.std_error}, {"t", e.t}});
  return {{"entries", entries},
          {"sup_t", b.sup_t},
          {"final_t", b.final_t},
          {"estimate", b.estimate},
          {"estimate_std_error", b.estimate_std_error}};
}

json assouad_json(const AssouadResult& a) {
  json trace = json::array();
  for (const auto& r : a.trace) {
    json row{{"eps", r.eps},
             {"k_max", r.k_max},
             {"family_size", r.family_size},
             {"lower", r.lower},
             {"witness", r.witness},
             {"loose", r.loose},
             {"dim_lower", r.dim_lower},
             {"dim_upper", r.dim_upper}};
    row["upper"] = std::isnan(r.upper) ? json(nullptr) : json(r.upper);
    trace.push_back(std::move(row));
  }
  json j{{"lower_bound", a.lower_bound},
         {"upper_estimate", a.upper_estimate},
         {"loose", a.loose},
         {"method", a.method},
         {"trace", trace}};
  j["value_if_ussc"] = a.value_if_ussc ? json(*a.value_if_ussc) : json(nullptr);
  return j;
}

json fit_json(const BoxCountFit& f) {
  json pts = json::array();
  for (std::size_t i = 0; i < f.scales.size(); ++i)
    pts.push_back({{"delta", f.scales[i]}, {"count", f.counts[i]}, {"fitted", static_cast<bool>(f.fitted[i])}});
  return {{"points", pts},
          {"window", {f.window_lo, f.window_hi}},
          {"slope", f.slope},
          {"intercept", f.intercept},
          {"r2", f.r2}};
}

json cmd_validate(Context& c) {
  const auto r = validate_system(c.spec, parse_mode(c.cfg.mode));
  c.params["mode"] = c.cfg.mode;
  c.summary << "validation " << (r.ok ? "passed" : "failed") << " (" << r.violations.size() << " violations, "
            << r.warnings.size() << " warnings)\n";
  if (!r.ok) throw InvalidSystem{r};
  return {{"validation", to_json(r)}};
}

json cmd_dim1var(Context& c) {
  c.require_valid(Mode::OneVariable);
  const auto schedule = c.schedule();
  const auto k = c.k();
  const auto m = c.m();
  const double tol = c.tol();
  const auto depth = c.depth(kDefaultDepth);
  const bool ussc = validate_system(c.spec, Mode::OneVariable).ussc_sufficient;
  DimensionReport dr;
  json extra = json::object();

  if (ussc) {
    const auto u = ussc_dimension_1var(c.spec, k, m, c.cfg.seed, tol, true, c.engine);
    dr.s_O = Estimate{u.value, u.std_error, u.method};
    if (u.closed_form && u.lyapunov)
      dr.s_O_lyapunov = Estimate{u.lyapunov->s, u.lyapunov->std_error, u.lyapunov->method};
  }
  const auto box = box_dimension_1var(c.spec, schedule, k, m, c.cfg.seed, c.engine);
  extra["box_dimension"] = box_json(box);
  if (dr.s_O)
    dr.s_B = Estimate{dr.s_O->value, dr.s_O->std_error, "equal to s_O for separated systems"};
  else
    dr.s_B = Estimate{box.estimate, box.estimate_std_error, "slope of log pressure at s=0 over the finest scales"};
  if (c.cfg.with_s_H) {
    for (double eps : schedule) {
      const auto root = solve_s_H(c.spec, eps, k, m, c.cfg.seed, tol, c.engine);
      dr.s_H_eps.push_back({eps, root.s, root.std_error});
    }
  }
  const auto assouad = assouad_1var(c.spec, schedule, depth);
  dr.assouad_lower = Estimate{assouad.lower_bound, 0.0, assouad.method};
  dr.assouad_value = assouad.value_if_ussc;
  extra["assouad"] = assouad_json(assouad);

  c.summary.precision(7);
  if (dr.s_O) c.summary << "s_O = " << dr.s_O->value << " (" << dr.s_O->method << ")\n";
  c.summary << "s_B = " << dr.s_B->value << "\n";
  for (const auto& e : dr.s_H_eps) c.summary << "s_H(eps=" << e.eps << ") = " << e.value << "\n";
  c.summary << "Assouad lower bound = " << assouad.lower_bound << "\n";
  json result{{"dimension", to_json(dr)}};
  result.update(extra);
  return result;
}

json cmd_diminf(Context& c) {
  c.require_valid(Mode::InfiniteVariable);
  const auto schedule = c.schedule();
  const double tol = c.cfg.tol.value_or(1e-9);
  c.params["tol"] = tol;
  const auto inf = inf_dimension_report(c.spec, tol);
  DimensionReport dr;
  dr.s_h = Estimate{inf.s_h, 0.0, inf.method};
  if (c.spec.vertex_count() == 1) {
    const auto one = validate_system(c.spec, Mode::OneVariable);
    if (one.ok && one.ussc_sufficient) dr.s_O = Estimate{one_vertex_root(c.spec), 0.0, "closed form, one vertex"};
  }
  const auto assouad = assouad_inf(c.spec, schedule, c.cfg.seed);
  dr.assouad_lower = Estimate{assouad.lower_bound, 0.0, assouad.method};
  dr.assouad_value = assouad.value_if_ussc;
  c.summary.precision(7);
  c.summary << "s_h = " << inf.s_h << " (Hausdorff = packing = box on survival)\n";
  c.summary << "Assouad lower bound = " << assouad.lower_bound << "\n";
  return {{"dimension", to_json(dr)},
          {"rho_at_zero", inf.rho_at_zero},
          {"hausdorff", inf.hausdorff},
          {"packing", inf.packing},
          {"box", inf.box},
          {"assouad", assouad_json(assouad)}};
}

json cmd_assouad(Context& c) {
  const Mode mode = parse_mode(c.cfg.mode);
  c.params["mode"] = c.cfg.mode;
  c.require_valid(mode);
  const auto schedule = c.schedule();
  const auto a = mode == Mode::OneVariable ? assouad_1var(c.spec, schedule, c.depth(kDefaultDepth))
                                           : assouad_inf(c.spec, schedule, c.cfg.seed);
  if (!c.cfg.csv_path.empty()) write_text(c.cfg.csv_path, jsr_trace_csv(a));
  c.summary << "Assouad lower bound = " << a.lower_bound << (a.loose ? " (loose)" : "") << "\n";
  return {{"assouad", assouad_json(a)}};
}

json cmd_pressure(Context& c) {
  c.require_valid(Mode::OneVariable);
  const double eps = c.eps_required();
  const auto k = c.k();
  const auto m = c.m();
  std::vector<double> svals = c.cfg.s_values.empty() ? std::vector<double>{0.0} : c.cfg.s_values;
  c.params["s"] = svals;
  PressureModel model(c.spec, eps, c.engine);
  if (!c.spec.deterministic()) model.prepare(k, m, c.cfg.seed);
  json curve = json::array();
  std::ostringstream csv;
  csv << "s;eps;k;m;log_psi;stderr\n";
  char buf[160];
  for (double s : svals) {
    PressureEstimate est;
    if (c.spec.deterministic()) {
      est = psi_estimate(c.spec, s, eps, k, m, c.cfg.seed, c.engine);
    } else {
      est = model.evaluate(s);
    }
    curve.push_back({{"s", s},
                     {"log_psi", est.log_psi_mean},
                     {"std_error", est.log_psi_stderr},
                     {"per_vertex_log", est.per_vertex_log},
                     {"exact", est.exact},
                     {"m", est.m}});
    std::snprintf(buf, sizeof buf, "%.17g;%.17g;%llu;%llu;%.17g;%.17g\n", s, eps,
                  static_cast<unsigned long long>(est.k), static_cast<unsigned long long>(est.m), est.log_psi_mean,
                  est.log_psi_stderr);
    csv << buf;
    c.summary << "log Psi(" << s << ", " << eps << ") = " << est.log_psi_mean << " +- " << est.log_psi_stderr << "\n";
  }
  if (!c.cfg.csv_path.empty()) write_text(c.cfg.csv_path, csv.str());
  return {{"k_max", k_max(c.spec, eps)}, {"curve", curve}};
}

json cmd_stopping(Context& c) {
  c.require_valid(Mode::OneVariable);
  const double eps = c.eps_required();
  const auto sg = build_stopping_graph(c.spec, make_stream(c.spec, c.cfg.seed), eps);
  if (!c.cfg.csv_path.empty()) write_text(c.cfg.csv_path, stopping_csv(c.spec, sg));
  json degrees = json::object();
  for (VertexIndex v = 0; v < c.spec.vertex_count(); ++v) degrees[c.spec.vertices()[v]] = sg.out_degree(v);
  c.summary << "k_max = " << sg.k_max << ", kept " << sg.kept_count() << ", pruned " << sg.pruned_count() << "\n";
  return {{"k_max", sg.k_max},
          {"prefix", sg.prefix},
          {"kept_count", sg.kept_count()},
          {"pruned_count", sg.pruned_count()},
          {"out_degree", degrees}};
}

RecursiveTree tree_for(Context& c, VertexIndex v) {
  GrowLimits limits;
  if (c.cfg.eps) {
    limits.eps = *c.cfg.eps;
    c.params["eps"] = *c.cfg.eps;
  }
  if (c.cfg.depth || !c.cfg.eps) limits.depth = c.depth(kDefaultTreeDepth);
  return grow_tree(c.spec, make_stream(c.spec, c.cfg.seed), v, limits);
}

json cmd_simulate(Context& c) {
  c.require_valid(Mode::InfiniteVariable);
  const VertexIndex v = c.vertex();
  const auto tree = tree_for(c, v);
  if (!c.cfg.csv_path.empty()) write_text(c.cfg.csv_path, tree_dump(c.spec, tree));
  if (!c.cfg.svg_path.empty()) render_svg(tree_cover(c.spec, tree), c.cfg.svg_path);
  std::uint32_t deepest = 0;
  for (const auto& n : tree.nodes) deepest = std::max(deepest, n.depth);
  c.summary << "nodes " << tree.nodes.size() << ", frontier " << tree.frontier.size()
            << (tree.extinct ? ", extinct" : "") << "\n";
  return {{"nodes", tree.nodes.size()},
          {"frontier", tree.frontier.size()},
          {"extinct", tree.extinct},
          {"max_depth", deepest}};
}

BoxCover cover_for(Context& c) {
  const Mode mode = parse_mode(c.cfg.mode);
  c.params["mode"] = c.cfg.mode;
  c.require_valid(mode);
  const VertexIndex v = c.vertex();
  if (mode == Mode::InfiniteVariable) return tree_cover(c.spec, tree_for(c, v));
  const double eps = c.eps_or(c.spec.c_min());
  const std::uint32_t rounds = c.cfg.rounds.value_or(kDefaultRounds);
  c.params["rounds"] = rounds;
  return prefractal_cover(c.spec, make_stream(c.spec, c.cfg.seed), v, eps, rounds);
}

json cmd_boxcount(Context& c) {
  const auto cover = cover_for(c);
  if (cover.boxes.empty()) throw Error(ErrorKind::BudgetExceeded, "cover is empty (extinct realization)");
  std::vector<double> deltas = c.cfg.eps_schedule.empty() ? default_deltas(cover) : c.cfg.eps_schedule;
  if (deltas.empty()) deltas = {cover.domain.diameter(cover.dimension) / 10.0};
  c.params["deltas"] = deltas;
  const auto fit = box_count(cover, deltas);
  if (!c.cfg.csv_path.empty()) write_text(c.cfg.csv_path, box_count_csv(fit));
  c.summary << "boxes " << cover.boxes.size() << ", slope " << fit.slope << " (r2 " << fit.r2 << ")\n";
  return {{"boxes", cover.boxes.size()}, {"fit", fit_json(fit)}};
}

json cmd_render(Context& c) {
  if (c.cfg.svg_path.empty()) throw Error(ErrorKind::MalformedSpec, "--svg is required for render");
  const auto cover = cover_for(c);
  render_svg(cover, c.cfg.svg_path);
  c.summary << "wrote " << cover.boxes.size() << " boxes to " << c.cfg.svg_path << "\n";
  return {{"boxes", cover.boxes.size()}, {"svg", c.cfg.svg_path}};
}

json base_report(const RunConfig& cfg) {
  return {{"tool", "rgds"}, {"format", kReportFormat}, {"command", cfg.command}, {"spec", cfg.spec_path},
          {"seed", cfg.seed}};
}

int finish(const RunConfig& cfg, json report, const std::string& summary, std::ostream& out, int code) {
  if (!cfg.no_timestamp) report["timestamp"] = utc_timestamp();
  const std::string text = report.dump(2) + "\n";
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    write_text(cfg.out_path, text);
    out << summary;
  }
  return code;
}

int fail(const RunConfig& cfg, json report, const std::string& kind, const std::string& message,
         std::ostream& out, std::ostream& err, int code) {
  report["ok"] = false;
  report["error"] = {{"kind", kind}, {"message", message}};
  err << "rgds: " << kind << ": " << message << "\n";
  try {
    return finish(cfg, std::move(report), "", out, code);
  } catch (const Error& e) {
    err << "rgds: " << e.what() << "\n";
    return code;
  }
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  json report = base_report(cfg);
  try {
    const SystemSpec spec = load_spec(cfg.spec_path);
    Context c(cfg, spec);
    json result;
    if (cfg.command == "validate") result = cmd_validate(c);
    else if (cfg.command == "dim1var") result = cmd_dim1var(c);
    else if (cfg.command == "diminf") result = cmd_diminf(c);
    else if (cfg.command == "assouad") result = cmd_assouad(c);
    else if (cfg.command == "pressure") result = cmd_pressure(c);
    else if (cfg.command == "stopping") result = cmd_stopping(c);
    else if (cfg.command == "simulate") result = cmd_simulate(c);
    else if (cfg.command == "boxcount") result = cmd_boxcount(c);
    else if (cfg.command == "render") result = cmd_render(c);
    else throw Error(ErrorKind::MalformedSpec, "unknown command '" + cfg.command + "'");
    report["parameters"] = c.params;
    report["ok"] = true;
    report["result"] = std::move(result);
    return finish(cfg, std::move(report), c.summary.str(), out, kExitOk);
  } catch (const InvalidSystem& bad) {
    const auto& first = bad.report.violations.front();
    std::string kind = first.condition;
    if (kind == "surviving") kind = "NotSurviving";
    else if (kind != "MalformedSpec" && kind != "NotContracting" && kind != "SeedNotInvariant")
      kind = "MalformedSpec";
    report["validation"] = to_json(bad.report);
    return fail(cfg, std::move(report), kind, first.condition + ": " + first.message, out, err, kExitInvalid);
  } catch (const Error& e) {
    const int code = is_numeric_failure(e.kind()) ? kExitNumeric : kExitInvalid;
    return fail(cfg, std::move(report), std::string(to_string(e.kind())), e.what(), out, err, code);
  } catch (const std::exception& e) {
    return fail(cfg, std::move(report), "Internal", e.what(), out, err, kExitNumeric);
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Dimensions of random graph-directed self-similar systems", "rgds"};
  app.add_option("command", cfg.command, "validate | dim1var | diminf | assouad | pressure | stopping | "
                                         "simulate | boxcount | render")
      ->required()
      ->check(CLI::IsMember({"validate", "dim1var", "diminf", "assouad", "pressure", "stopping", "simulate",
                             "boxcount", "render"}));
  app.add_option("--spec", cfg.spec_path, "System spec (JSON)")->required();
  app.add_option("--seed", cfg.seed, "Realization seed (default 0)");
  app.add_option("--eps", cfg.eps, "Scale eps in (0,1]");
  app.add_option("--eps-schedule", cfg.eps_schedule, "Comma-separated scales (grid sizes for boxcount)")
      ->delimiter(',');
  app.add_option("--k", cfg.k, "Band-product steps (default 2000)");
  app.add_option("--m", cfg.m, "Realizations (default 100)");
  app.add_option("--depth", cfg.depth, "JSR product depth or tree depth");
  app.add_option("--tol", cfg.tol, "Root tolerance");
  app.add_option("--out", cfg.out_path, "JSON report path");
  app.add_option("--csv", cfg.csv_path, "CSV output path");
  app.add_option("--svg", cfg.svg_path, "SVG output path");
  app.add_option("--threads", cfg.threads, "Worker threads (default RGDS_THREADS or all cores)");
  app.add_flag("--no-timestamp", cfg.no_timestamp, "Omit the timestamp field");
  app.add_option("--mode", cfg.mode, "one | inf")->check(CLI::IsMember({"one", "inf"}));
  app.add_option("--vertex", cfg.vertex, "Vertex id for covers and trees");
  app.add_option("--rounds", cfg.rounds, "Stopping-edge compositions for covers (default 5)");
  app.add_option("--s", cfg.s_values, "Comma-separated s values for pressure")->delimiter(',');
  app.add_flag("--with-s-H", cfg.with_s_H, "dim1var: also solve s_H at every scale of the schedule");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "rgds: " << e.what() << "\n" << app.help();
    return kExitInvalid;
  }
  return run(cfg, out, err);
}

}  // namespace rgds

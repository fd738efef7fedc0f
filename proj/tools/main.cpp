// dae-singular: locate, classify, and track the structurally stable objects
// and codimension-one bifurcations of low-dimensional quasilinear systems
//   1D:  g(x, alpha) dx/dt = f(x, alpha)
//   2D:  g(x, y, alpha) dx/dt = f1,  dy/dt = f2.
//
// Subcommands: classify (point inventory at one alpha), scan (bifurcation
// sweep over an alpha range), portrait (SVG phase portrait), simulate
// (orbit integration with singular-set bookkeeping).  Reports are canonical
// JSON on stdout unless --out is given.
//
// Exit codes: 0 ok; 2 input error; 3 numerical failure; 4 scan found events
// but every one failed its genericity test.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dae/bif_scan.hpp"
#include "dae/classify1d.hpp"
#include "dae/classify2d.hpp"
#include "dae/desing.hpp"
#include "dae/io.hpp"

namespace {

using dae::io::Json;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

dae::Tol resolve_tol(const dae::io::FileConfig& cfg) {
  dae::Tol tol;
  if (cfg.tol_residual) tol = dae::Tol::from_residual(*cfg.tol_residual);
  if (const char* env = std::getenv("DAE_SINGULAR_TOL")) {
    char* end = nullptr;
    const double r = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(r > 0.0))
      throw InputError("invalid DAE_SINGULAR_TOL value '" + std::string(env) + "'");
    tol = dae::Tol::from_residual(r);
  }
  return tol;
}

double resolve_alpha(const dae::io::FileConfig& cfg, const std::optional<double>& flag) {
  if (flag) return *flag;
  if (cfg.alpha) return *cfg.alpha;
  throw InputError("no alpha value: pass --alpha or set 'alpha = <value>' in the system file");
}

dae::Interval resolve_range(const dae::io::FileConfig& cfg, const std::string& flag) {
  if (!flag.empty()) {
    const std::size_t colon = flag.find(':');
    if (colon == std::string::npos)
      throw InputError("--alpha-range takes 'lo:hi'");
    char* end = nullptr;
    const std::string lo_s = flag.substr(0, colon), hi_s = flag.substr(colon + 1);
    const double lo = std::strtod(lo_s.c_str(), &end);
    if (end != lo_s.c_str() + lo_s.size()) throw InputError("bad number in --alpha-range");
    const double hi = std::strtod(hi_s.c_str(), &end);
    if (end != hi_s.c_str() + hi_s.size()) throw InputError("bad number in --alpha-range");
    if (!(lo < hi)) throw InputError("--alpha-range must satisfy lo < hi");
    return {lo, hi};
  }
  if (cfg.alpha_range) return *cfg.alpha_range;
  throw InputError(
      "no alpha range: pass --alpha-range lo:hi or set 'alpha = lo : hi' in the system file");
}

void emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InputError("cannot write output file '" + out_path + "'");
  out << payload;
}

Json report_header(const char* command, const dae::io::FileConfig& cfg, const dae::Tol& tol) {
  return Json{{"command", command},
              {"dim", cfg.def.dim},
              {"system", dae::io::system_to_json(cfg.def)},
              {"tol", dae::io::tol_to_json(tol)},
              {"version", dae::io::kVersion}};
}

int cmd_classify(const dae::io::FileConfig& cfg, const std::optional<double>& alpha_flag,
                 const std::string& out_path) {
  const dae::Tol tol = resolve_tol(cfg);
  const double alpha = resolve_alpha(cfg, alpha_flag);
  Json rep = report_header("classify", cfg, tol);
  rep["alpha"] = alpha;

  if (cfg.def.dim == 1) {
    const dae::System1D sys(cfg.def);
    const dae::Interval range{cfg.bbox.x0, cfg.bbox.x1};
    const int grid = cfg.grid.value_or(512);
    const auto found = dae::d1::find_special_points_1d(sys, alpha, range, grid, tol);
    Json pts = Json::array();
    for (const auto& sp : found.points) pts.push_back(dae::io::point_to_json(sp));
    rep["range"] = Json{{"lo", range.lo}, {"hi", range.hi}};
    rep["points"] = std::move(pts);
    const auto stab = dae::d1::structural_stability_1d(sys, alpha, range, grid, tol);
    Json viol = Json::array();
    for (const auto& v : stab.violations) viol.push_back(dae::io::point_to_json(v));
    rep["structural_stability"] =
        Json{{"stable", stab.stable}, {"violations", std::move(viol)}, {"notes", stab.notes}};
    rep["warnings"] = found.warnings;
  } else {
    const dae::System2D sys(cfg.def);
    const int grid = cfg.grid.value_or(32);
    const auto found = dae::d2::find_points_2d(sys, alpha, cfg.bbox, grid, tol);
    Json pts = Json::array();
    Json sectors = Json::array();
    for (const auto& sp : found.points) {
      pts.push_back(dae::io::point_to_json(sp));
      const auto* se = std::get_if<dae::d2::SingularEquilibrium2D>(&sp.cls);
      if (se && se->simple)
        sectors.push_back(dae::io::sectors_to_json(dae::d2::sector_decomposition(sys, sp.p, alpha, tol)));
    }
    rep["bbox"] = Json{{"x0", cfg.bbox.x0}, {"y0", cfg.bbox.y0}, {"x1", cfg.bbox.x1},
                       {"y1", cfg.bbox.y1}};
    rep["points"] = std::move(pts);
    rep["sectors"] = std::move(sectors);
    rep["sigma"] = dae::io::sigma_to_json(dae::d2::trace_sigma(sys, alpha, cfg.bbox, 0.0, tol));
    rep["warnings"] = found.warnings;
  }
  emit(dae::io::dump_canonical(rep), out_path);
  return 0;
}

int cmd_scan(const dae::io::FileConfig& cfg, const std::string& range_flag,
             std::optional<int> samples_flag, std::optional<int> grid_flag, bool no_cycles,
             bool no_connections, const std::string& out_path) {
  const dae::Tol tol = resolve_tol(cfg);
  const dae::Interval range = resolve_range(cfg, range_flag);
  Json rep = report_header("scan", cfg, tol);
  rep["alpha_range"] = Json{{"lo", range.lo}, {"hi", range.hi}};
  rep["schema"] = dae::io::all_code_schemas();

  dae::scan::ScanResult result;
  if (cfg.def.dim == 1) {
    const dae::System1D sys(cfg.def);
    dae::scan::Scan1DOptions opt;
    opt.grid_n = grid_flag.value_or(cfg.grid.value_or(opt.grid_n));
    opt.tol = tol;
    result = dae::scan::scan_parameter_1d(sys, range, {cfg.bbox.x0, cfg.bbox.x1}, opt);
    rep["range"] = Json{{"lo", cfg.bbox.x0}, {"hi", cfg.bbox.x1}};
  } else {
    const dae::System2D sys(cfg.def);
    dae::scan::ScanOptions opt;
    opt.grid_n = grid_flag.value_or(cfg.grid.value_or(opt.grid_n));
    opt.alpha_samples = samples_flag.value_or(cfg.samples.value_or(opt.alpha_samples));
    opt.cycles = !no_cycles;
    opt.connections = !no_connections;
    opt.tol = tol;
    result = dae::scan::scan_parameter(sys, range, cfg.bbox, opt);
    rep["bbox"] = Json{{"x0", cfg.bbox.x0}, {"y0", cfg.bbox.y0}, {"x1", cfg.bbox.x1},
                       {"y1", cfg.bbox.y1}};
  }
  Json events = Json::array();
  for (const auto& ev : result.events) events.push_back(dae::io::event_to_json(ev));
  rep["events"] = std::move(events);
  rep["warnings"] = result.warnings;
  emit(dae::io::dump_canonical(rep), out_path);

  if (!result.events.empty()) {
    bool all_degenerate = true;
    for (const auto& ev : result.events) all_degenerate &= ev.genericity_warning;
    if (all_degenerate) return 4;
  }
  return 0;
}

int cmd_portrait(const dae::io::FileConfig& cfg, const std::optional<double>& alpha_flag,
                 const std::string& out_path) {
  const dae::Tol tol = resolve_tol(cfg);
  const double alpha = resolve_alpha(cfg, alpha_flag);
  std::string svg;
  if (cfg.def.dim == 1) {
    const dae::System1D sys(cfg.def);
    svg = dae::io::render_portrait_1d(sys, alpha, {cfg.bbox.x0, cfg.bbox.x1}, {}, tol);
  } else {
    const dae::System2D sys(cfg.def);
    svg = dae::io::render_portrait_2d(sys, alpha, cfg.bbox, cfg.seeds, {}, tol);
  }
  emit(svg, out_path);
  return 0;
}

int cmd_simulate(const dae::io::FileConfig& cfg, const std::optional<double>& alpha_flag,
                 const std::string& from_flag, double t_max, const std::string& out_path) {
  const dae::Tol tol = resolve_tol(cfg);
  const double alpha = resolve_alpha(cfg, alpha_flag);
  Json rep = report_header("simulate", cfg, tol);
  rep["alpha"] = alpha;
  rep["t_max"] = t_max;

  auto parse_from = [&](int want) -> dae::Vec2 {
    if (from_flag.empty()) {
      if (!cfg.seeds.empty()) return cfg.seeds.front();
      throw InputError("no start point: pass --from or set 'seeds = ...' in the system file");
    }
    char* end = nullptr;
    const double x = std::strtod(from_flag.c_str(), &end);
    if (end == from_flag.c_str()) throw InputError("bad --from value");
    if (want == 1) {
      if (*end != '\0') throw InputError("1D --from takes a single number");
      return {x, 0.0};
    }
    if (*end != ',') throw InputError("2D --from takes 'x,y'");
    const char* rest = end + 1;
    const double y = std::strtod(rest, &end);
    if (end == rest || *end != '\0') throw InputError("2D --from takes 'x,y'");
    return {x, y};
  };

  if (cfg.def.dim == 1) {
    const dae::System1D sys(cfg.def);
    const dae::Vec2 p0 = parse_from(1);
    dae::d1::SimOptions1D sopt;
    sopt.domain = {cfg.bbox.x0, cfg.bbox.x1};
    const auto orbit = dae::d1::simulate_1d(sys, p0.x, alpha, t_max, sopt);
    const char* ev = "timeout";
    switch (orbit.event) {
      case dae::d1::SimEvent1D::ReachedSingularity: ev = "reached-singularity"; break;
      case dae::d1::SimEvent1D::ReachedEquilibrium: ev = "reached-equilibrium"; break;
      case dae::d1::SimEvent1D::LeftDomain: ev = "left-domain"; break;
      default: break;
    }
    rep["from"] = p0.x;
    rep["event"] = ev;
    rep["t_end"] = orbit.t_end;
    rep["x_end"] = orbit.x_end;
    if (orbit.event == dae::d1::SimEvent1D::ReachedSingularity) {
      rep["t_star"] = orbit.t_star;
      rep["x_star"] = orbit.x_star;
    }
    Json samples = Json::array();
    const std::size_t stride = std::max<std::size_t>(1, orbit.samples.size() / 2000);
    for (std::size_t i = 0; i < orbit.samples.size(); i += stride)
      samples.push_back(Json::array({orbit.samples[i].first, orbit.samples[i].second}));
    if (!orbit.samples.empty() && (orbit.samples.size() - 1) % stride != 0)
      samples.push_back(
          Json::array({orbit.samples.back().first, orbit.samples.back().second}));
    rep["samples"] = std::move(samples);
  } else {
    const dae::System2D sys(cfg.def);
    const dae::Vec2 p0 = parse_from(2);
    if (std::abs(sys.g.value(p0.x, p0.y, alpha)) <= tol.residual)
      throw std::domain_error("initial condition on singular set");
    const dae::d2::DesingField field = dae::d2::build_desingularized(sys);
    rep["from"] = Json{{"x", p0.x}, {"y", p0.y}};
    for (const auto& [key, tdir] :
         {std::pair<const char*, double>{"forward", t_max}, {"backward", -t_max}}) {
      const auto orbit = dae::d2::integrate_desing(field, alpha, p0, tdir, cfg.bbox);
      Json crossings = Json::array();
      for (const auto& c : orbit.crossings)
        crossings.push_back(Json{{"t", c.t},
                                 {"x", c.p.x},
                                 {"y", c.p.y},
                                 {"direction", c.direction},
                                 {"tangential", c.tangential}});
      rep[key] = Json{{"left_box", orbit.left_box},
                      {"crossings", std::move(crossings)},
                      {"pieces", dae::io::orbit_pieces_to_json(
                                     dae::d2::split_to_dae_orbits(field, alpha, orbit))}};
    }
  }
  emit(dae::io::dump_canonical(rep), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Structurally stable objects and codimension-one bifurcations of "
      "low-dimensional quasilinear differential-algebraic systems"};
  app.set_version_flag("--version", dae::io::kVersion);
  app.require_subcommand(1);

  std::string file, out_path, range_flag, from_flag;
  std::optional<double> alpha_flag;
  std::optional<int> samples_flag, grid_flag;
  bool no_cycles = false, no_connections = false;
  double t_max = 10.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", file, "system file")->required();
    sub->add_option("--out", out_path, "write output here instead of stdout");
  };
  CLI::App* classify = app.add_subcommand("classify", "inventory of special points at one alpha");
  add_common(classify);
  classify->add_option("--alpha", alpha_flag, "parameter value (overrides the file)");

  CLI::App* scan = app.add_subcommand("scan", "bifurcation sweep over an alpha range");
  add_common(scan);
  scan->add_option("--alpha-range", range_flag, "parameter range lo:hi (overrides the file)");
  scan->add_option("--samples", samples_flag, "sweep resolution for cycle/connection tracking");
  scan->add_option("--grid", grid_flag, "Newton seed density");
  scan->add_flag("--no-cycles", no_cycles, "skip limit-cycle tracking");
  scan->add_flag("--no-connections", no_connections, "skip fold-connection tracking");

  CLI::App* portrait = app.add_subcommand("portrait", "SVG phase portrait");
  add_common(portrait);
  portrait->add_option("--alpha", alpha_flag, "parameter value (overrides the file)");

  CLI::App* simulate = app.add_subcommand("simulate", "integrate one orbit");
  add_common(simulate);
  simulate->add_option("--alpha", alpha_flag, "parameter value (overrides the file)");
  simulate->add_option("--from", from_flag, "start point: x (1D) or x,y (2D)");
  simulate->add_option("--tmax", t_max, "time span per direction (companion time in 2D)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const dae::io::FileConfig cfg = dae::io::load_system_file(file);
    if (app.got_subcommand(classify)) return cmd_classify(cfg, alpha_flag, out_path);
    if (app.got_subcommand(scan))
      return cmd_scan(cfg, range_flag, samples_flag, grid_flag, no_cycles, no_connections,
                      out_path);
    if (app.got_subcommand(portrait)) return cmd_portrait(cfg, alpha_flag, out_path);
    if (app.got_subcommand(simulate))
      return cmd_simulate(cfg, alpha_flag, from_flag, t_max, out_path);
    return 2;
  } catch (const dae::io::FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

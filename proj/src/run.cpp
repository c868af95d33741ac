#include "cmc/run.hpp"

#include <cstdio>
#include <ostream>

#include "cmc/dpw.hpp"
#include "cmc/factorization.hpp"
#include "cmc/verify.hpp"

namespace cmc {

namespace fs = std::filesystem;
using io::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad("'" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* key : keys) ok = ok || k == key;
    if (!ok) bad("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array() || j.empty()) bad("'" + where + "' must be a number or a non-empty array");
  std::vector<double> out;
  for (const json& v : j) out.push_back(v.get<double>());
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// The surface source of a run, whatever block it came from.
GalleryItem resolve(const RunConfig& c) {
  GalleryItem item;
  if (c.example) {
    GalleryParams p = c.params;
    if (c.H && !p.numbers.count("H")) p.numbers["H"] = *c.H;
    if (c.t && !p.numbers.count("t")) p.numbers["t"] = *c.t;
    item = example_gallery(*c.example, p);
  } else if (c.data) {
    BjoerlingData d = *c.data;
    if (c.H) d.H = *c.H;
    validate(d);
    item.name = d.name;
    item.H = d.H;
    item.data = d;
    item.potential = boundary_potential(d);
    item.grid.x0 = d.x0;
  } else if (c.potential) {
    item.name = "potential";
    item.H = c.H.value_or(1.0);
    item.potential = *c.potential;
    item.chart = c.chart;
    item.prefer_potential = true;
  } else {
    bad("the run needs one of 'example', 'bjoerling' or 'potential'");
  }
  if (item.H == 0.0) bad("H must be nonzero");
  return item;
}

json surface_report(const SurfaceGrid& s, const RunConfig& c, const BjoerlingData* data) {
  const GeometryReport r = fundamental_forms(s, c.verify);
  const double H = s.meta.H;
  const double residual = cmc_residual(r, H);
  const CompatibilityResidual cc = gauss_codazzi_residual(r, H);
  json out = {{"source", s.meta.source},
              {"H", H},
              {"lambda0", io::complex_to_json(s.meta.lambda0)},
              {"grid", io::grid_to_json(s.domain)},
              {"cmc_residual", residual},
              {"H_form", io::stats_to_json(r.H_stats)},
              {"H_laplacian", io::stats_to_json(r.H_lap_stats)},
              {"K", io::stats_to_json(r.K_stats)},
              {"Q_abs", io::stats_to_json(r.Q_abs_stats)},
              {"conformality", io::stats_to_json(r.conformality_stats)},
              {"cross_check", r.cross_check},
              {"coarse_check", r.coarse_check},
              {"gauss", cc.gauss},
              {"codazzi", cc.codazzi}};
  if (s.normals.size() == s.domain.size()) out["normal_defect"] = io::stats_to_json(r.normal_stats);
  if (data) {
    const CurveCheck cv = bjoerling_check(s, *data);
    out["curve"] = {{"position", cv.position}, {"tangency", cv.tangency}};
  }
  out["gate"] = {{"cmc", c.cmc_gate}, {"passed", residual <= c.cmc_gate}};
  return out;
}

class Runner {
 public:
  Runner(const RunConfig& c, std::ostream& log, RunResult& result) : c_(c), log_(log), result_(result) {}

  void execute() {
    fs::create_directories(c_.out_dir);
    write("config.json", c_.source);
    switch (c_.mode) {
      case Mode::Solve: solve(); break;
      case Mode::Potential: potential(); break;
      case Mode::Verify: verify(); break;
      case Mode::Example: example(); break;
      case Mode::Family: family(); break;
      case Mode::DumpFrame: dump_frame(); break;
    }
  }

 private:
  DomainGrid grid_for(const GalleryItem& item) const {
    // A partial grid block fills in from the item's own default extents.
    if (c_.source.is_object() && c_.source.contains("grid")) return io::grid_from_json(c_.source["grid"], item.grid);
    DomainGrid g = c_.grid.value_or(item.grid);
    g.validate();
    return g;
  }

  void write(const std::string& name, const json& j) {
    const fs::path p = c_.out_dir / name;
    io::write_json(p, j);
    result_.written.push_back(p);
  }

  // OBJ, metadata sidecar and report; returns whether the gate passed.
  bool write_surface(const std::string& stem, const std::string& report_name, const SurfaceGrid& s,
                     const BjoerlingData* data, json* summary) {
    const fs::path obj = c_.out_dir / (stem + ".obj");
    io::write_obj(obj, s);
    result_.written.push_back(obj);
    json meta = io::meta_to_json(s);
    meta["obj"] = obj.filename().string();
    if (data) meta["bjoerling"] = io::data_to_json(*data);
    write(stem + ".json", meta);
    const json report = surface_report(s, c_, data);
    write(report_name, report);
    const bool passed = report["gate"]["passed"].get<bool>();
    log_ << stem << ": " << s.domain.nx << "x" << s.domain.ny << " nodes, cmc residual "
         << report["cmc_residual"].get<double>() << (passed ? "" : " (above gate)") << '\n';
    if (summary) *summary = report;
    return passed;
  }

  void fail_gate(const std::string& what) {
    throw Error(ErrorKind::VerificationFailure, what + " exceeds the cmc gate " + fmt(c_.cmc_gate));
  }

  void solve() {
    const GalleryItem item = resolve(c_);
    const DomainGrid g = grid_for(item);
    SurfaceOptions opts = c_.surface;
    const SurfaceGrid s = solve_item(item, g, opts);
    // The surface contains the curve only for lambda0 = 1 and unscaled data.
    const bool curve = item.data && !item.family_t && opts.lambda0 == cplx(1.0);
    if (!write_surface("surface", "report.json", s, curve ? &*item.data : nullptr, nullptr)) fail_gate("surface residual");
  }

  void potential() {
    const GalleryItem item = resolve(c_);
    if (!item.potential) bad("no potential for this source");
    const double x0 = item.data ? item.data->x0 : grid_for(item).x0;
    const std::vector<cplx> w = {cplx(x0, 0.0), cplx(x0 + 0.25, 0.0), cplx(x0 + 0.25, 0.1)};
    std::vector<cplx> z = w;
    if (item.chart) {
      for (cplx& p : z) p = item.chart->eval_complex(p);
    }
    json out = io::potential_to_json(*item.potential, z);
    out["source"] = item.name;
    out["H"] = item.H;
    if (!item.description.empty()) out["description"] = item.description;
    if (item.chart) out["chart"] = item.chart->to_string();
    if (item.data) out["bjoerling"] = io::data_to_json(*item.data);
    write("potential.json", out);
    log_ << "potential of " << item.name << ": modes " << item.potential->lowest_mode() << ".."
         << item.potential->highest_mode() << '\n';
  }

  void verify() {
    if (c_.verify_obj.empty()) bad("verify needs 'verify.obj'");
    fs::path meta_path = c_.verify_meta;
    if (meta_path.empty()) meta_path = fs::path(c_.verify_obj).replace_extension(".json");
    const json meta = io::read_json(meta_path);
    SurfaceGrid probe;
    io::meta_from_json(meta, probe);
    SurfaceGrid s = io::read_obj(c_.verify_obj, probe.domain);
    s.meta = probe.meta;
    if (c_.H) s.meta.H = *c_.H;
    std::optional<BjoerlingData> data;
    if (meta.contains("bjoerling")) data = io::data_from_json(meta["bjoerling"]);
    const json report = surface_report(s, c_, data ? &*data : nullptr);
    write("report.json", report);
    log_ << "verified " << c_.verify_obj.string() << ": cmc residual " << report["cmc_residual"].get<double>() << '\n';
    if (!report["gate"]["passed"].get<bool>()) fail_gate("cmc residual");
  }

  void example() {
    if (!c_.example && !c_.data && !c_.potential) {
      json list = json::array();
      for (const std::string& name : gallery_names()) {
        const GalleryItem item = example_gallery(name);
        list.push_back({{"name", name}, {"description", item.description}});
        log_ << name << ": " << item.description << '\n';
      }
      write("gallery.json", list);
      return;
    }
    const GalleryItem item = resolve(c_);
    json out = {{"name", item.name}, {"description", item.description}, {"H", item.H}};
    if (item.data) out["bjoerling"] = io::data_to_json(*item.data);
    if (item.potential) out["potential"] = io::potential_to_json(*item.potential);
    if (item.chart) out["chart"] = item.chart->to_string();
    if (item.family_t) out["family_t"] = *item.family_t;
    out["grid"] = io::grid_to_json(grid_for(item));
    write("example.json", out);
    log_ << item.name << ": " << item.description << '\n';
  }

  void family() {
    const GalleryItem item = resolve(c_);
    if (!item.data) bad("family runs need Bjoerling data");
    std::vector<double> ts = c_.family_t;
    if (ts.empty() && c_.family_H.empty() && item.family_t) ts = {*item.family_t};
    if (ts.empty() == c_.family_H.empty()) bad("family needs exactly one of 'family.t' and 'family.H'");
    const DomainGrid g = grid_for(item);
    json members = json::array();
    bool all = true;
    const bool sweep_t = !ts.empty();
    const std::vector<double>& values = sweep_t ? ts : c_.family_H;
    for (std::size_t k = 0; k < values.size(); ++k) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "member_%02zu", k);
      SurfaceGrid s;
      BjoerlingData d = *item.data;
      if (sweep_t) {
        s = family_member(d, values[k], g, c_.surface);
      } else {
        if (values[k] == 0.0) bad("H must be nonzero");
        d.H = values[k];
        s = build_surface(d, g, c_.surface);
      }
      json report;
      const bool curve = !sweep_t && c_.surface.lambda0 == cplx(1.0);
      all = write_surface(stem, std::string(stem) + "_report.json", s, curve ? &d : nullptr, &report) && all;
      members.push_back({{sweep_t ? "t" : "H", values[k]},
                         {"obj", std::string(stem) + ".obj"},
                         {"cmc_residual", report["cmc_residual"]},
                         {"passed", report["gate"]["passed"]}});
    }
    write("family.json", {{"source", item.name}, {"parameter", sweep_t ? "t" : "H"}, {"members", members}});
    if (!all) fail_gate("a family member's cmc residual");
  }

  void dump_frame() {
    const GalleryItem item = resolve(c_);
    const DomainGrid g = grid_for(item);
    HolomorphicPotential xi;
    double H = item.H;
    if (item.family_t && item.data) {
      BjoerlingData base = *item.data;
      base.H = 1.0;
      const FrameCurve frame = curve_frame(base);
      xi = two_parameter_potential(metric_u(base), 2.0 * frame.a, hopf_Q(base, frame), *item.family_t);
      H = *item.family_t;
    } else {
      xi = working_potential(item);
    }
    IntegrationOptions io_opts = c_.surface.integration;
    const TwistedLoop phi = integrate_path(xi, {cplx(g.x0, 0.0), cplx(c_.at.real(), 0.0), c_.at}, io_opts);
    const IwasawaResult iw = iwasawa(phi.resized(effective_degree(phi)), c_.surface.iwasawa);
    const Vec3 p = sym_bobenko(iw.F, c_.surface.lambda0, H);
    write("frame.json", {{"source", item.name},
                         {"z", io::complex_to_json(c_.at)},
                         {"base", io::complex_to_json(cplx(g.x0, 0.0))},
                         {"H", H},
                         {"phi", io::loop_to_json(phi)},
                         {"F", io::loop_to_json(iw.F)},
                         {"B", io::loop_to_json(iw.B.to_loop())},
                         {"rho", iw.rho},
                         {"residual", iw.residual},
                         {"unitarity", iw.unitarity},
                         {"sym_point", {p.x(), p.y(), p.z()}}});
    log_ << "frame at " << c_.at << ": rho " << iw.rho << ", Iwasawa residual " << iw.residual << '\n';
  }

  const RunConfig& c_;
  std::ostream& log_;
  RunResult& result_;
};

json error_record(ErrorKind kind, const std::string& message, const std::string& where) {
  json e = {{"kind", std::string(to_string(kind))}, {"message", message}, {"exit_code", exit_code(kind)}};
  if (!where.empty()) e["where"] = where;
  return e;
}

}  // namespace

Mode mode_from_string(const std::string& name) {
  if (name == "solve") return Mode::Solve;
  if (name == "potential") return Mode::Potential;
  if (name == "verify") return Mode::Verify;
  if (name == "example") return Mode::Example;
  if (name == "family") return Mode::Family;
  if (name == "dump-frame") return Mode::DumpFrame;
  bad("unknown mode '" + name + "'");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Solve: return "solve";
    case Mode::Potential: return "potential";
    case Mode::Verify: return "verify";
    case Mode::Example: return "example";
    case Mode::Family: return "family";
    case Mode::DumpFrame: return "dump-frame";
  }
  return "?";
}

RunConfig parse_config(const json& j) {
  allow_keys(j, "", {"mode", "example", "params", "bjoerling", "potential", "grid", "numerics", "family", "verify", "at",
                     "output"});
  RunConfig c;
  c.source = j;
  if (!j.contains("mode")) bad("'mode' is required");
  c.mode = mode_from_string(j["mode"].get<std::string>());

  int sources = 0;
  if (j.contains("example")) {
    c.example = j["example"].get<std::string>();
    ++sources;
  }
  if (j.contains("params")) {
    if (!c.example) bad("'params' only applies to 'example'");
    if (!j["params"].is_object()) bad("'params' must be an object");
    for (const auto& [k, v] : j["params"].items()) {
      if (k == "shape") {
        c.params.shape = v.get<std::string>();
      } else {
        c.params.numbers[k] = v.get<double>();
      }
    }
  }
  if (j.contains("bjoerling")) {
    c.data = io::data_from_json(j["bjoerling"]);
    ++sources;
  }
  if (j.contains("potential")) {
    const json& p = j["potential"];
    allow_keys(p, "potential", {"modes", "chart", "H"});
    c.potential = io::potential_from_json(p);
    if (p.contains("chart")) c.chart = AnalyticFn::parse(p["chart"].get<std::string>());
    if (p.contains("H")) c.H = p["H"].get<double>();
    ++sources;
  }
  if (sources > 1) bad("give only one of 'example', 'bjoerling' and 'potential'");
  if (j.contains("grid")) c.grid = io::grid_from_json(j["grid"], c.data ? DomainGrid{.x0 = c.data->x0} : DomainGrid{});

  if (j.contains("numerics")) {
    const json& n = j["numerics"];
    allow_keys(n, "numerics", {"degree", "tol", "max_step", "min_step", "fact_tol", "unit_tol", "max_degree",
                               "lambda0", "H", "t", "cmc_gate", "coarse_check", "coarse_tol"});
    IntegrationOptions& in = c.surface.integration;
    in.degree = n.value("degree", in.degree);
    in.tol = n.value("tol", in.tol);
    in.max_step = n.value("max_step", in.max_step);
    in.min_step = n.value("min_step", in.min_step);
    IwasawaOptions& iw = c.surface.iwasawa;
    iw.fact_tol = n.value("fact_tol", iw.fact_tol);
    iw.unit_tol = n.value("unit_tol", iw.unit_tol);
    iw.max_degree = n.value("max_degree", iw.max_degree);
    if (in.degree < 2) bad("numerics.degree must be at least 2");
    if (!(in.tol > 0.0) || !(in.max_step > 0.0) || !(in.min_step > 0.0) || !(iw.fact_tol > 0.0) ||
        !(iw.unit_tol > 0.0)) {
      bad("numerical tolerances and steps must be positive");
    }
    if (n.contains("lambda0")) c.surface.lambda0 = std::polar(1.0, n["lambda0"].get<double>());
    if (n.contains("H")) c.H = n["H"].get<double>();
    if (n.contains("t")) c.t = n["t"].get<double>();
    c.cmc_gate = n.value("cmc_gate", c.cmc_gate);
    c.verify.coarse_check = n.value("coarse_check", c.verify.coarse_check);
    c.verify.coarse_tol = n.value("coarse_tol", c.verify.coarse_tol);
  }
  if (c.H && *c.H == 0.0) bad("H must be nonzero");
  if (c.t && !(*c.t > 0.0)) bad("t must be positive");

  if (j.contains("family")) {
    allow_keys(j["family"], "family", {"t", "H"});
    if (j["family"].contains("t")) c.family_t = number_list(j["family"]["t"], "family.t");
    if (j["family"].contains("H")) c.family_H = number_list(j["family"]["H"], "family.H");
    for (double t : c.family_t) {
      if (!(t > 0.0)) bad("family values of t must be positive");
    }
  }
  if (c.mode == Mode::Family && c.t && c.family_t.empty() && c.family_H.empty()) c.family_t = {*c.t};
  if (j.contains("verify")) {
    allow_keys(j["verify"], "verify", {"obj", "meta"});
    c.verify_obj = j["verify"].value("obj", std::string());
    c.verify_meta = j["verify"].value("meta", std::string());
  }
  if (j.contains("at")) c.at = io::complex_from_json(j["at"]);
  if (j.contains("output")) {
    allow_keys(j["output"], "output", {"dir"});
    c.out_dir = j["output"].value("dir", std::string("out"));
  }

  const bool needs_source = c.mode != Mode::Verify && c.mode != Mode::Example;
  if (needs_source && sources == 0) bad("the run needs one of 'example', 'bjoerling' or 'potential'");
  if (c.mode == Mode::Verify && sources > 0) bad("verify reads a surface, not a source");
  return c;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::UnknownExample:
    case ErrorKind::ParseError:
    case ErrorKind::InvalidData:
    case ErrorKind::NonRegularCurve:
    case ErrorKind::StructureViolation:
      return 2;
    case ErrorKind::VerificationFailure:
    case ErrorKind::GridTooCoarse:
      return 4;
    default:
      return 3;
  }
}

RunResult run(const RunConfig& config, std::ostream& log) {
  RunResult result;
  try {
    Runner(config, log, result).execute();
  } catch (const Error& e) {
    result.error = error_record(e.kind(), e.what(), e.where());
  } catch (const json::exception& e) {
    result.error = error_record(ErrorKind::ConfigError, e.what(), "");
  } catch (const fs::filesystem_error& e) {
    result.error = error_record(ErrorKind::ConfigError, e.what(), "");
  } catch (const std::exception& e) {
    result.error = {{"kind", "InternalError"}, {"message", e.what()}, {"exit_code", 3}};
  }
  if (!result.error.is_null()) {
    result.exit_code = result.error["exit_code"].get<int>();
    try {
      fs::create_directories(config.out_dir);
      io::write_json(config.out_dir / "error.json", {{"error", result.error}});
      result.written.push_back(config.out_dir / "error.json");
    } catch (const std::exception&) {
      // The record still reaches the caller.
    }
  }
  return result;
}

RunResult run(const json& config, std::ostream& log) {
  RunConfig parsed;
  try {
    parsed = parse_config(config);
  } catch (const Error& e) {
    RunResult r;
    r.error = error_record(e.kind(), e.what(), e.where());
    r.exit_code = exit_code(e.kind());
    return r;
  } catch (const json::exception& e) {
    RunResult r;
    r.error = error_record(ErrorKind::ConfigError, e.what(), "");
    r.exit_code = 2;
    return r;
  }
  return run(parsed, log);
}

}  // namespace cmc

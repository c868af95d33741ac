#include "cmc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cmc/error.hpp"

namespace cmc::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

AnalyticFn fn_from_json(const json& j) {
  if (j.is_number()) return AnalyticFn(j.get<double>());
  if (j.is_string()) return AnalyticFn::parse(j.get<std::string>());
  bad("potential entries must be strings or numbers");
}

std::array<std::string, 3> vec_strings(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
    bad(std::string("'") + key + "' must be an array of three expressions");
  }
  std::array<std::string, 3> out;
  for (int k = 0; k < 3; ++k) {
    const json& e = j[key][k];
    if (e.is_string()) {
      out[k] = e.get<std::string>();
    } else if (e.is_number()) {
      std::ostringstream s;
      s.precision(17);
      s << e.get<double>();
      out[k] = s.str();
    } else {
      bad(std::string("'") + key + "' entries must be strings or numbers");
    }
  }
  return out;
}

void put3(std::FILE* f, const char* tag, const Vec3& p) {
  std::fprintf(f, "%s %.17g %.17g %.17g\n", tag, p.x(), p.y(), p.z());
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad("complex numbers are written [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json loop_to_json(const TwistedLoop& loop) {
  json modes = json::array();
  for (int k = -loop.degree(); k <= loop.degree(); ++k) {
    const Mat2 m = loop[k];
    json rows = json::array();
    for (int r = 0; r < 2; ++r) rows.push_back(json::array({complex_to_json(m(r, 0)), complex_to_json(m(r, 1))}));
    modes.push_back({{"k", k}, {"m", rows}});
  }
  return {{"degree", loop.degree()}, {"modes", modes}};
}

TwistedLoop loop_from_json(const json& j) {
  if (!j.contains("degree") || !j.contains("modes")) bad("loop needs 'degree' and 'modes'");
  const int n = j["degree"].get<int>();
  if (n < 0) bad("loop degree must be non-negative");
  TwistedLoop loop(n);
  for (const json& mode : j["modes"]) {
    const int k = mode.at("k").get<int>();
    if (std::abs(k) > n) bad("loop mode outside the degree");
    Mat2& m = loop.at(k);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) m(r, c) = complex_from_json(mode.at("m").at(r).at(c));
    }
  }
  if (loop.twisting_defect() > 0.0) throw Error(ErrorKind::StructureViolation, "loop entries break the twisting");
  return loop;
}

json potential_to_json(const HolomorphicPotential& xi, std::span<const cplx> samples) {
  json out;
  out["lowest_mode"] = xi.lowest_mode();
  out["highest_mode"] = xi.highest_mode();
  const auto text = xi.to_strings();
  json modes = json::array();
  for (int m = xi.lowest_mode(); m <= xi.highest_mode(); ++m) {
    const auto& b = text[m - xi.lowest_mode()];
    const json rows = json::array({json::array({b[0][0], b[0][1]}), json::array({b[1][0], b[1][1]})});
    modes.push_back({{"k", m}, {"m", rows}});
  }
  out["modes"] = modes;
  json sampled = json::array();
  for (cplx z : samples) {
    const std::vector<Mat2> v = xi.evaluate(z);
    json ms = json::array();
    for (int m = xi.lowest_mode(); m <= xi.highest_mode(); ++m) {
      const Mat2& a = v[m - xi.lowest_mode()];
      const json rows = json::array({json::array({complex_to_json(a(0, 0)), complex_to_json(a(0, 1))}),
                                     json::array({complex_to_json(a(1, 0)), complex_to_json(a(1, 1))})});
      ms.push_back({{"k", m}, {"m", rows}});
    }
    sampled.push_back({{"z", complex_to_json(z)}, {"modes", ms}});
  }
  out["samples"] = sampled;
  return out;
}

HolomorphicPotential potential_from_json(const json& j) {
  if (!j.contains("modes") || !j["modes"].is_array() || j["modes"].empty()) bad("potential needs a 'modes' array");
  int lo = 0, hi = 0;
  bool first = true;
  for (const json& mode : j["modes"]) {
    const int k = mode.at("k").get<int>();
    lo = first ? k : std::min(lo, k);
    hi = first ? k : std::max(hi, k);
    first = false;
  }
  HolomorphicPotential xi(lo, hi);
  for (const json& mode : j["modes"]) {
    const int k = mode.at("k").get<int>();
    const json& m = mode.at("m");
    if (!m.is_array() || m.size() != 2 || m[0].size() != 2 || m[1].size() != 2) bad("mode matrices are 2x2");
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        AnalyticFn f = fn_from_json(m[r][c]);
        if (!f.is_zero()) xi.set(k, r, c, std::move(f));
      }
    }
  }
  xi.check_invariants({cplx(0.1, 0.05), cplx(-0.2, 0.1)});
  return xi;
}

json data_to_json(const BjoerlingData& d) {
  return {{"name", d.name}, {"f0", d.f0.to_strings()}, {"v", d.v.to_strings()},
          {"H", d.H},       {"x0", d.x0},              {"J", {d.J.a, d.J.b}}};
}

BjoerlingData data_from_json(const json& j) {
  if (!j.is_object()) bad("'bjoerling' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "f0" && k != "v" && k != "H" && k != "x0" && k != "J" && k != "name") bad("unknown key 'bjoerling." + k + "'");
  }
  BjoerlingData d;
  d.f0 = AnalyticVec3::parse(vec_strings(j, "f0"));
  d.v = AnalyticVec3::parse(vec_strings(j, "v"));
  d.H = j.value("H", 1.0);
  d.x0 = j.value("x0", 0.0);
  if (j.contains("J")) {
    const json& J = j["J"];
    if (!J.is_array() || J.size() != 2) bad("'J' is [a, b]");
    d.J = {J[0].get<double>(), J[1].get<double>()};
  }
  d.name = j.value("name", std::string("bjoerling"));
  validate(d);
  return d;
}

json grid_to_json(const DomainGrid& g) {
  return {{"x", {g.x_min, g.x_max}}, {"y_max", g.y_max}, {"nx", g.nx}, {"ny", g.ny}, {"x0", g.x0}};
}

DomainGrid grid_from_json(const json& j, const DomainGrid& base) {
  if (!j.is_object()) bad("'grid' must be an object");
  DomainGrid g = base;
  for (const auto& [k, v] : j.items()) {
    if (k == "x") {
      if (!v.is_array() || v.size() != 2) bad("'grid.x' is [min, max]");
      g.x_min = v[0].get<double>();
      g.x_max = v[1].get<double>();
    } else if (k == "y_max") {
      g.y_max = v.get<double>();
    } else if (k == "nx") {
      g.nx = v.get<int>();
    } else if (k == "ny") {
      g.ny = v.get<int>();
    } else if (k == "x0") {
      g.x0 = v.get<double>();
    } else {
      bad("unknown key 'grid." + k + "'");
    }
  }
  g.validate();
  return g;
}

json stats_to_json(const Stats& s) {
  return {{"max", s.max}, {"mean", s.mean}, {"p50", s.p50}, {"p95", s.p95}, {"count", s.count}};
}

json meta_to_json(const SurfaceGrid& s) {
  return {{"grid", grid_to_json(s.domain)},
          {"H", s.meta.H},
          {"lambda0", complex_to_json(s.meta.lambda0)},
          {"degree", s.meta.degree},
          {"fact_tol", s.meta.fact_tol},
          {"unit_tol", s.meta.unit_tol},
          {"source", s.meta.source}};
}

void meta_from_json(const json& j, SurfaceGrid& s) {
  if (!j.contains("grid") || !j.contains("H")) bad("surface metadata needs 'grid' and 'H'");
  s.domain = grid_from_json(j["grid"]);
  s.meta.H = j["H"].get<double>();
  if (j.contains("lambda0")) s.meta.lambda0 = complex_from_json(j["lambda0"]);
  s.meta.degree = j.value("degree", 0);
  s.meta.fact_tol = j.value("fact_tol", 0.0);
  s.meta.unit_tol = j.value("unit_tol", 0.0);
  s.meta.source = j.value("source", std::string());
}

void write_obj(const std::filesystem::path& path, const SurfaceGrid& s) {
  const DomainGrid& d = s.domain;
  if (s.points.size() != d.size()) throw Error(ErrorKind::InvalidData, "point grid does not match its domain");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) bad("cannot write " + path.string());
  std::fprintf(f, "# %d x %d grid, vertex (i, j) is number j*%d + i + 1\n", d.nx, d.ny, d.nx);
  for (const Vec3& p : s.points) put3(f, "v", p);
  const bool normals = s.normals.size() == d.size();
  for (const Vec3& n : s.normals) put3(f, "vn", n);
  for (int j = 0; j + 1 < d.ny; ++j) {
    for (int i = 0; i + 1 < d.nx; ++i) {
      const std::size_t a = d.index(i, j) + 1, b = d.index(i + 1, j) + 1;
      const std::size_t c = d.index(i + 1, j + 1) + 1, e = d.index(i, j + 1) + 1;
      if (normals) {
        std::fprintf(f, "f %zu//%zu %zu//%zu %zu//%zu\n", a, a, b, b, c, c);
        std::fprintf(f, "f %zu//%zu %zu//%zu %zu//%zu\n", a, a, c, c, e, e);
      } else {
        std::fprintf(f, "f %zu %zu %zu\nf %zu %zu %zu\n", a, b, c, a, c, e);
      }
    }
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) bad("failed writing " + path.string());
}

SurfaceGrid read_obj(const std::filesystem::path& path, const DomainGrid& domain) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path.string());
  SurfaceGrid s;
  s.domain = domain;
  std::string line, tag;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    if (!(ls >> tag)) continue;
    if (tag != "v" && tag != "vn") continue;
    double x, y, z;
    if (!(ls >> x >> y >> z)) throw Error(ErrorKind::InvalidData, "malformed OBJ line: " + line);
    (tag == "v" ? s.points : s.normals).emplace_back(x, y, z);
  }
  if (s.points.size() != domain.size()) {
    throw Error(ErrorKind::InvalidData, path.string() + " has " + std::to_string(s.points.size()) +
                                            " vertices, the grid needs " + std::to_string(domain.size()));
  }
  if (!s.normals.empty() && s.normals.size() != domain.size()) {
    throw Error(ErrorKind::InvalidData, "OBJ normal count does not match its vertices");
  }
  return s;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) bad("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) bad("failed writing " + path.string());
}

}  // namespace cmc::io

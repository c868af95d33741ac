#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cmc/run.hpp"
#include "oracles.hpp"

using namespace cmc;
using io::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cmc_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json small_grid() { return {{"x", {-0.5, 0.5}}, {"y_max", 0.4}, {"nx", 61}, {"ny", 41}}; }

}  // namespace

TEST_CASE("solve writes a cylinder mesh") {
  const fs::path out = scratch("solve");
  std::ostringstream log;
  const json cfg = {{"mode", "solve"}, {"example", "cylinder"}, {"grid", small_grid()}, {"output", {{"dir", out}}}};
  const RunResult r = run(cfg, log);
  REQUIRE(r.exit_code == 0);
  DomainGrid g = io::grid_from_json(small_grid());
  const SurfaceGrid s = io::read_obj(out / "surface.obj", g);
  REQUIRE(s.normals.size() == g.size());
  for (const Vec3& p : s.points) CHECK(std::abs(p.y() * p.y() + p.z() * p.z() - 0.25) <= 1e-4);
  const json report = io::read_json(out / "report.json");
  CHECK(report["gate"]["passed"].get<bool>());
  CHECK(report["curve"]["position"].get<double>() <= 1e-5);

  // Same configuration, same bytes.
  const std::string first = slurp(out / "report.json");
  REQUIRE(run(cfg, log).exit_code == 0);
  CHECK(slurp(out / "report.json") == first);

  // The mesh written by solve passes verify.
  const fs::path out2 = scratch("reverify");
  const RunResult v =
      run(json{{"mode", "verify"}, {"verify", {{"obj", out / "surface.obj"}}}, {"output", {{"dir", out2}}}}, log);
  CHECK(v.exit_code == 0);
  CHECK(io::read_json(out2 / "report.json")["cmc_residual"].get<double>() <= 1e-3);
}

TEST_CASE("potential of the Delaunay data") {
  const fs::path out = scratch("potential");
  std::ostringstream log;
  const RunResult r = run(json{{"mode", "potential"},
                               {"example", "delaunay_circle"},
                               {"numerics", {{"H", 0.75}}},
                               {"output", {{"dir", out}}}},
                          log);
  REQUIRE(r.exit_code == 0);
  const json p = io::read_json(out / "potential.json");
  CHECK(p["modes"][0]["k"] == -1);
  CHECK(p["modes"][0]["m"][0][1] == "-0.75");
  CHECK(p["modes"][2]["m"][0][1] == "-0.25");
  const json& at0 = p["samples"][0]["modes"];
  CHECK(io::complex_from_json(at0[0]["m"][0][1]) == cplx(-0.75, 0.0));
  CHECK(io::complex_from_json(at0[2]["m"][0][1]) == cplx(-0.25, 0.0));
  // Written potentials read back.
  const HolomorphicPotential xi = io::potential_from_json(p);
  CHECK(xi.evaluate(cplx(0.0, 0.0))[0](0, 1) == cplx(-0.75, 0.0));
}

TEST_CASE("verify a sphere mesh") {
  const fs::path out = scratch("verify");
  fs::create_directories(out);
  SurfaceGrid s;
  s.domain = io::grid_from_json(json{{"x", {-0.6, 0.6}}, {"y_max", 0.4}, {"nx", 61}, {"ny", 41}});
  for (int j = 0; j < s.domain.ny; ++j) {
    for (int i = 0; i < s.domain.nx; ++i) {
      const double x = s.domain.x(i), y = s.domain.y(j);
      const Vec3 p(std::cos(y) / std::cosh(x), std::sin(y) / std::cosh(x), std::tanh(x));
      s.points.push_back(p);
      s.normals.push_back(p);
    }
  }
  s.meta.H = 1.0;
  io::write_obj(out / "sphere.obj", s);
  io::write_json(out / "sphere.json", io::meta_to_json(s));
  std::ostringstream log;
  const json cfg = {{"mode", "verify"}, {"verify", {{"obj", out / "sphere.obj"}}}, {"output", {{"dir", out}}}};
  REQUIRE(run(cfg, log).exit_code == 0);
  CHECK(io::read_json(out / "report.json")["cmc_residual"].get<double>() <= 1e-3);

  // Claiming the wrong curvature is a verification failure.
  json wrong = cfg;
  wrong["numerics"] = {{"H", 2.0}};
  const RunResult r = run(wrong, log);
  CHECK(r.exit_code == 4);
  CHECK(r.error["kind"] == "VerificationFailure");
  CHECK(fs::exists(out / "error.json"));
}

TEST_CASE("configuration errors") {
  std::ostringstream log;
  const fs::path out = scratch("errors");
  auto code = [&](json cfg) {
    cfg["output"] = {{"dir", out}};
    return run(cfg, log);
  };
  CHECK(code({{"mode", "solve"}, {"example", "nope"}}).exit_code == 2);
  CHECK(code({{"mode", "solve"}, {"example", "nope"}}).error["kind"] == "UnknownExample");
  CHECK(code({{"mode", "solve"}}).exit_code == 2);
  CHECK(code({{"mode", "draw"}, {"example", "cylinder"}}).exit_code == 2);
  CHECK(code({{"mode", "solve"}, {"example", "cylinder"}, {"numerics", {{"H", 0.0}}}}).exit_code == 2);
  CHECK(code({{"mode", "solve"}, {"example", "cylinder"}, {"grid", {{"nx", "many"}}}}).exit_code == 2);
  CHECK(code({{"mode", "solve"}, {"example", "cylinder"}, {"colour", "red"}}).exit_code == 2);
  CHECK(code({{"mode", "solve"}, {"bjoerling", {{"f0", {"x", "0", "0"}}, {"v", {"1", "0", "0"}}}}}).exit_code == 2);
  CHECK(code({{"mode", "verify"}, {"verify", {{"obj", out / "missing.obj"}}}}).exit_code == 2);
  const RunResult coarse = code({{"mode", "solve"}, {"example", "cylinder"}, {"grid", {{"nx", 9}, {"ny", 5}}}});
  CHECK(coarse.exit_code == 4);
  CHECK(coarse.error["kind"] == "GridTooCoarse");
}

TEST_CASE("Bjoerling block, family and frame dumps") {
  std::ostringstream log;
  const json grid = {{"x", {-0.4, 0.4}}, {"y_max", 0.2}, {"nx", 41}, {"ny", 21}};
  const json circle = {{"f0", {"sin(2*x)", "0", "-cos(2*x)"}}, {"v", {"0", "1", "0"}}, {"H", 1.0}};

  const fs::path out = scratch("family");
  const RunResult f = run(json{{"mode", "family"},
                               {"bjoerling", circle},
                               {"grid", grid},
                               {"family", {{"t", {0.5, 1.0}}}},
                               {"output", {{"dir", out}}}},
                          log);
  REQUIRE(f.exit_code == 0);
  const json fam = io::read_json(out / "family.json");
  REQUIRE(fam["members"].size() == 2);
  const DomainGrid g = io::grid_from_json(grid);
  const SurfaceGrid half = io::read_obj(out / "member_00.obj", g);
  const SurfaceGrid one = io::read_obj(out / "member_01.obj", g);
  const int j0 = g.axis_row();
  for (int i = 0; i < g.nx; ++i) CHECK((half.point(i, j0) - 0.5 * one.point(i, j0)).norm() <= 1e-10);

  const fs::path out2 = scratch("frame");
  const RunResult d = run(json{{"mode", "dump-frame"},
                               {"example", "cylinder"},
                               {"at", {0.3, 0.2}},
                               {"numerics", {{"degree", 24}}},
                               {"output", {{"dir", out2}}}},
                          log);
  REQUIRE(d.exit_code == 0);
  const json fr = io::read_json(out2 / "frame.json");
  const TwistedLoop F = io::loop_from_json(fr["F"]);
  const TwistedLoop F2 = io::loop_from_json(io::loop_to_json(F));
  CHECK((F2[1] - F[1]).norm() == 0.0);
  const cplx z(0.3, 0.2);
  for (int k = 0; k < 8; ++k) {
    const cplx lam = std::polar(1.0, 2.0 * std::numbers::pi * k / 8.0);
    CHECK((F.evaluate(lam) - oracle::cyl_F(z, lam)).norm() <= 1e-8);
  }
  const json& p = fr["sym_point"];
  CHECK(std::abs(p[0].get<double>() + 2.0 * z.real()) <= 1e-8);
}

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmc/run.hpp"

using cmc::io::json;

namespace {

struct Common {
  std::string config;
  std::string example;
  std::vector<std::string> params;
  std::optional<double> H, t, lambda0;
  std::string grid;
  std::optional<int> degree;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--example", c.example, "gallery example name");
  cmd->add_option("--param", c.params, "example parameter key=value (repeatable)");
  cmd->add_option("--H", c.H, "mean curvature");
  cmd->add_option("--t", c.t, "family parameter");
  cmd->add_option("--lambda0", c.lambda0, "phase of lambda0 on the unit circle");
  cmd->add_option("--grid", c.grid, "node counts nx,ny");
  cmd->add_option("--degree", c.degree, "loop truncation degree N");
  cmd->add_option("--out", c.out, "output directory");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw cmc::Error(cmc::ErrorKind::ConfigError, what + ": '" + s + "' is not a number");
  return v;
}

// Command-line values override the file configuration.
json build_config(const std::string& mode, const Common& c) {
  json j = c.config.empty() ? json::object() : cmc::io::read_json(c.config);
  j["mode"] = mode;
  if (!c.example.empty()) {
    j.erase("bjoerling");
    j.erase("potential");
    if (j.value("example", std::string()) != c.example) j.erase("params");
    j["example"] = c.example;
  }
  for (const std::string& p : c.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw cmc::Error(cmc::ErrorKind::ConfigError, "--param expects key=value");
    const std::string key = p.substr(0, eq), value = p.substr(eq + 1);
    if (key == "shape") {
      j["params"][key] = value;
    } else {
      j["params"][key] = number(value, "--param " + key);
    }
  }
  if (c.H) j["numerics"]["H"] = *c.H;
  if (c.t) j["numerics"]["t"] = *c.t;
  if (c.lambda0) j["numerics"]["lambda0"] = *c.lambda0;
  if (c.degree) j["numerics"]["degree"] = *c.degree;
  if (!c.grid.empty()) {
    const auto parts = split(c.grid, ',');
    if (parts.size() != 2) throw cmc::Error(cmc::ErrorKind::ConfigError, "--grid expects nx,ny");
    j["grid"]["nx"] = static_cast<int>(number(parts[0], "--grid"));
    j["grid"]["ny"] = static_cast<int>(number(parts[1], "--grid"));
  }
  if (!c.out.empty()) j["output"]["dir"] = c.out;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMC surfaces from Bjoerling data and holomorphic potentials"};
  app.require_subcommand(1);

  Common common;
  std::string obj, meta, values, over = "t", at;

  auto* solve = app.add_subcommand("solve", "build a surface; writes surface.obj, surface.json, report.json");
  auto* potential = app.add_subcommand("potential", "write the holomorphic potential to potential.json");
  auto* verify = app.add_subcommand("verify", "check an OBJ and its metadata; writes report.json");
  auto* example = app.add_subcommand("example", "list the gallery or describe one example");
  auto* family = app.add_subcommand("family", "sweep t or H; one mesh per value");
  auto* dump = app.add_subcommand("dump-frame", "holomorphic frame and its Iwasawa factors at one point");
  for (CLI::App* cmd : {solve, potential, verify, example, family, dump}) add_common(cmd, common);
  verify->add_option("obj,--obj", obj, "surface OBJ");
  verify->add_option("--meta", meta, "metadata JSON (default: the OBJ path with .json)");
  family->add_option("--values", values, "comma-separated parameter values");
  family->add_option("--over", over, "swept parameter")->check(CLI::IsMember({"t", "H"}));
  dump->add_option("--at", at, "point re,im")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  json config;
  try {
    config = build_config(chosen->get_name(), common);
    if (chosen == verify) {
      if (!obj.empty()) config["verify"]["obj"] = obj;
      if (!meta.empty()) config["verify"]["meta"] = meta;
    }
    if (chosen == family && !values.empty()) {
      json list = json::array();
      for (const std::string& v : split(values, ',')) list.push_back(number(v, "--values"));
      config["family"] = {{over, list}};
    }
    if (chosen == dump) {
      const auto parts = split(at, ',');
      if (parts.size() != 2) throw cmc::Error(cmc::ErrorKind::ConfigError, "--at expects re,im");
      config["at"] = {number(parts[0], "--at"), number(parts[1], "--at")};
    }
  } catch (const cmc::Error& e) {
    std::cerr << json{{"error", {{"kind", std::string(cmc::to_string(e.kind())) }, {"message", e.what()}, {"exit_code", 2}}}}.dump(2)
              << '\n';
    return 2;
  }

  const cmc::RunResult result = cmc::run(config, std::cout);
  for (const auto& p : result.written) std::cout << "wrote " << p.string() << '\n';
  if (result.exit_code != 0) std::cerr << json{{"error", result.error}}.dump(2) << '\n';
  return result.exit_code;
}

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cmc/error.hpp"
#include "cmc/gallery.hpp"
#include "cmc/io.hpp"

namespace cmc {

enum class Mode { Solve, Potential, Verify, Example, Family, DumpFrame };

/// Everything a run needs, parsed from JSON:
///
///   {"mode": "solve",
///    "example": "planar_circle", "params": {"amplitude": 0.3, "shape": "sin"},
///    "bjoerling": {"f0": [...], "v": [...], "H": 1, "x0": 0, "J": [-1, 1]},
///    "potential": {"modes": [{"k": -1, "m": [["0", "1"], ["1", "0"]]}], "chart": "exp(2*i*z)"},
///    "grid": {"x": [-1, 1], "y_max": 0.4, "nx": 201, "ny": 81, "x0": 0},
///    "numerics": {"degree": 32, "tol": 1e-12, "fact_tol": 1e-9, "unit_tol": 1e-8,
///                 "lambda0": 0.0, "H": 1.0, "t": 0.5, "cmc_gate": 1e-3, "coarse_check": true},
///    "family": {"t": [0.5, 0.75, 1]} or {"H": [...]},
///    "verify": {"obj": "surface.obj", "meta": "surface.json"},
///    "at": [0.2, 0.1],
///    "output": {"dir": "out"}}
///
/// Exactly one source (example, bjoerling or potential) is required except
/// for verify, and for example, which lists the gallery when none is given.
/// numerics.lambda0 is the phase of lambda0 on the unit circle.
struct RunConfig {
  Mode mode = Mode::Solve;
  std::optional<std::string> example;
  GalleryParams params;
  std::optional<BjoerlingData> data;
  std::optional<HolomorphicPotential> potential;
  std::optional<AnalyticFn> chart;
  std::optional<DomainGrid> grid;
  SurfaceOptions surface;
  std::optional<double> H;
  std::optional<double> t;
  double cmc_gate = 1e-3;
  VerifyOptions verify;
  std::vector<double> family_t;
  std::vector<double> family_H;
  std::filesystem::path verify_obj;
  std::filesystem::path verify_meta;
  cplx at = {0.0, 0.0};
  std::filesystem::path out_dir = "out";
  io::json source;  // the configuration as given, echoed to config.json
};

Mode mode_from_string(const std::string& name);
std::string_view to_string(Mode mode);

/// Throws ConfigError (or the parse errors of embedded expressions).
RunConfig parse_config(const io::json& j);

/// 0 ok, 2 configuration error, 3 numerical failure, 4 verification failure.
int exit_code(ErrorKind kind);

struct RunResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> written;
  io::json error;  // {"kind", "message", "where", "exit_code"} when exit_code != 0
};

/// Parses and executes a configuration. Module errors become the exit code
/// and an error record (also written to <out>/error.json when possible);
/// progress lines go to `log`.
RunResult run(const io::json& config, std::ostream& log);
RunResult run(const RunConfig& config, std::ostream& log);

}  // namespace cmc

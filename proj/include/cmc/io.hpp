#pragma once

#include <filesystem>
#include <span>

#include <json.hpp>

#include "cmc/bjoerling.hpp"
#include "cmc/grid.hpp"
#include "cmc/potential.hpp"
#include "cmc/verify.hpp"

namespace cmc::io {

using json = nlohmann::json;

/// {"degree": N, "modes": [{"k": k, "m": [[[re, im], [re, im]], [[re, im], [re, im]]]}]},
/// modes -N..N in order.
json loop_to_json(const TwistedLoop& loop);
TwistedLoop loop_from_json(const json& j);

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

/// Entries as infix strings per mode, plus the numeric mode matrices at each
/// sample point.
json potential_to_json(const HolomorphicPotential& xi, std::span<const cplx> samples = {});
/// Reads {"modes": [{"k": k, "m": [[s, s], [s, s]]}]}, entries as strings or numbers.
HolomorphicPotential potential_from_json(const json& j);

json data_to_json(const BjoerlingData& data);
/// {"f0": [3 strings], "v": [3 strings], "H": h, "x0": x, "J": [a, b], "name": s};
/// validated before returning.
BjoerlingData data_from_json(const json& j);

json grid_to_json(const DomainGrid& grid);
/// Keys x ([min, max]), y_max, nx, ny, x0; missing keys keep `base`.
DomainGrid grid_from_json(const json& j, const DomainGrid& base = {});

json stats_to_json(const Stats& s);

/// Sidecar written next to an OBJ: the domain grid and SurfaceMeta.
json meta_to_json(const SurfaceGrid& surface);
void meta_from_json(const json& j, SurfaceGrid& surface);

/// ASCII OBJ: `v`, then `vn` when normals are present, then two triangles per
/// grid cell; vertex k is node k in DomainGrid::index order.
void write_obj(const std::filesystem::path& path, const SurfaceGrid& surface);
/// Reads the vertices and normals of an OBJ written for `domain`.
SurfaceGrid read_obj(const std::filesystem::path& path, const DomainGrid& domain);

json read_json(const std::filesystem::path& path);
/// Two-space indented; the same value always produces the same bytes.
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace cmc::io

#pragma once

#include <vector>

#include "cmc/bjoerling.hpp"
#include "cmc/factorization.hpp"
#include "cmc/grid.hpp"
#include "cmc/potential.hpp"

namespace cmc {

struct IntegrationOptions {
  int degree = 32;            // frame truncation N (modes -N..N)
  double tol = 1e-12;         // local error per step, relative to max(1, |Phi|)
  double max_step = 0.05;
  double min_step = 1e-8;
  double regular_tol = 1e-12; // |upper-right lambda^{-1} entry| below this is a RegularityLoss
};

struct FrameGrid {
  std::vector<TwistedLoop> values;  // DomainGrid::index order
  double spill = 0.0;               // largest coefficient mass dropped by truncation in one step
  long steps = 0;                   // accepted steps
};

/// Solves dPhi = Phi xi with Phi(z0) = I on every node: along y = 0 from z0,
/// then up and down each column. Classical RK4 on the Laurent coefficients,
/// with step doubling for error control and the Richardson-corrected value
/// kept. Throws OutOfDomain, RegularityLoss or StepFailure (annotated).
FrameGrid integrate_frame(const HolomorphicPotential& xi, const DomainGrid& grid,
                          const IntegrationOptions& options = {});

/// Phi at the last vertex of the polygon through `vertices`, starting from
/// Phi = I at the first one.
TwistedLoop integrate_path(const HolomorphicPotential& xi, const std::vector<cplx>& vertices,
                           const IntegrationOptions& options = {});

/// -(1/2H) (F e3 F^{-1} + 2 i lambda0 F_lambda F^{-1}) at lambda0, as a
/// 3-vector. Throws NonUnitaryFrame when F(lambda0) is not unitary to 1e-6
/// or the bracket is not in su(2) to 1e-8 (relative).
Vec3 sym_bobenko(const TwistedLoop& F, cplx lambda0, double H);

/// F e3 F^{-1} at lambda0.
Vec3 frame_normal(const TwistedLoop& F, cplx lambda0);
std::vector<Vec3> normal_field(const std::vector<TwistedLoop>& frames, cplx lambda0);

struct SurfaceOptions {
  cplx lambda0 = 1.0;
  IntegrationOptions integration{};
  IwasawaOptions iwasawa{};
  bool keep_frames = false;
};

/// Final placement p -> scale * (rotation (p - base) + anchor), where base is
/// the Sym point at z0 when subtract_base is set and zero otherwise.
struct Placement {
  bool subtract_base = false;
  Mat3 rotation = Mat3::Identity();
  Vec3 anchor = Vec3::Zero();
  double scale = 1.0;
};

/// DPW from a potential: integrate, split pointwise, apply Sym at lambda0.
SurfaceGrid build_surface(const HolomorphicPotential& xi, double H, const DomainGrid& grid,
                          const SurfaceOptions& options = {}, const Placement& placement = {});

/// Surface solving the Bjoerling problem: boundary potential, then the DPW
/// steps, normalized so that f(z0) = f0(x0) and the frame rotation is undone.
SurfaceGrid build_surface(const BjoerlingData& data, const DomainGrid& grid, const SurfaceOptions& options = {});

/// Member t > 0 of the family through the CMC-1 surface with data
/// (f0, v): the CMC-t surface along f0, scaled by t when `scaled` is set.
/// The mean curvature recorded in the metadata is that of the returned grid.
SurfaceGrid family_member(const BjoerlingData& data, double t, const DomainGrid& grid,
                          const SurfaceOptions& options = {}, bool scaled = true);

}  // namespace cmc

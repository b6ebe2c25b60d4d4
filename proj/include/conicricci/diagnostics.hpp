#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "conicricci/conformal_flow.hpp"
#include "conicricci/rotational.hpp"
#include "conicricci/trajectory.hpp"

namespace conicricci {

// -- Areas and Gauss-Bonnet ----------------------------------------------------

double total_area(const RotationalState& state);
double total_area(const MeshFlowState& state);

/// |int K dA + sum 2 pi (1 - beta_j) - 2 pi chi(M)|. On meshes the identity is
/// combinatorial (roundoff only); on 1-D states it is quadrature + one-sided
/// tip derivatives.
double gauss_bonnet_residual(const RotationalState& state);
double gauss_bonnet_residual(const MeshFlowState& state);

// -- Energy ---------------------------------------------------------------------

/// F(phi) = int (|grad_0 phi|^2 + 2 R_0 phi) dA_0 with phi = 2(w - w_bg);
/// both states must share the cylinder grid.
double energy_F(const CylinderState& state, const CylinderState& background);
/// Mesh version against the mesh's own background lengths (phi = state.phi).
double energy_F(const MeshFlowState& state);

/// int (R - rho)^2 dA over the current metric.
double dissipation_integral(const CylinderState& state, double rho);
double dissipation_integral(const MeshFlowState& state, double rho);

/// Max deviation of (F(t+dt)-F(t))/dt from -2 int (R-rho)^2 dA at midpoints,
/// over consecutive record pairs.
double energy_dissipation_check(const RotationalRunResult& run);
double energy_dissipation_check(const MeshRunResult& run);

// -- Entropy ---------------------------------------------------------------------

/// N = int (R - s) log(R - s) dA. Throws std::domain_error naming the first
/// violating node if R - s <= 0 anywhere.
double entropy(const RotationalState& state, double s);
double entropy(const CylinderState& state, double s);
double entropy(const MeshFlowState& state, double s);

/// int (2 |mu|^2 + |X|^2 / R) dA on a 1-D state (entropy dissipation).
/// Requires R - s > 0 and |R| above a small floor at every node.
double entropy_dissipation_integral(const CylinderState& state, double rho, double s);
double entropy_dissipation_integral(const RotationalState& state, double rho, double s);

/// Max deviation of finite-difference dN/dt from the dissipation integral.
double entropy_derivative_check(const RotationalRunResult& run);

// -- Ricci potential ---------------------------------------------------------------

struct PotentialResult {
    std::vector<double> f;       // node samples (mean zero w.r.t. dA)
    double grad_f_max = 0.0;
    double residual = 0.0;       // linear-system or quadrature residual
};

/// Solves Delta_g f = R - rho with mean-zero normalization. Throws
/// std::invalid_argument if int (R - rho) dA exceeds compatibility_tol.
PotentialResult potential_solve(const RotationalState& state, double rho,
                                double compatibility_tol = 1e-6);
PotentialResult potential_solve(const CylinderState& state, double rho,
                                double compatibility_tol = 1e-6);
PotentialResult potential_solve(const MeshFlowState& state, double rho,
                                double compatibility_tol = 1e-6);

// -- Soliton residuals ----------------------------------------------------------

struct SolitonResidual {
    double mu_norm = 0.0;
    double x_norm = 0.0;
};

/// Sup norms of mu = Hess f - (1/2)(Delta f) g and X = grad R + R grad f over
/// interior nodes, with f from potential_solve (independent of any soliton
/// construction). 1-D states only.
SolitonResidual soliton_residual(const RotationalState& state, double rho);
SolitonResidual soliton_residual(const CylinderState& state, double rho);

// -- Harnack ---------------------------------------------------------------------

struct HarnackReport {
    bool applicable = false;  // false when R <= 0 somewhere
    int samples = 0;
    int pairs_checked = 0;
    int violations = 0;
    double worst_ratio = 1.0;  // min over pairs of R(y)/R(x)
};

/// Checks R(y) >= R(x)/2 for grid points y within distance 1/(8 sqrt(R(x))).
HarnackReport harnack_check(const RotationalState& state, int n_samples, std::uint64_t seed);
HarnackReport harnack_check(const MeshFlowState& state, int n_samples, std::uint64_t seed);

// -- R_min monotonicity ------------------------------------------------------------

struct RminReport {
    int violations = 0;
    double max_violation = 0.0;
    std::vector<double> comparison;  // r(t) at record times (rho > 0 branch)
};

/// rho <= 0: flags decreases of R_min beyond tolerance. rho > 0: integrates
/// r' = r (r - rho), r(0) = R_min(0) between record times and flags
/// R_min(t) < r(t) - tolerance.
RminReport rmin_track(const std::vector<DiagnosticsRecord>& records, double rho, double tolerance);

// -- Noncollapsing -----------------------------------------------------------------

/// min over sampled centers of Area(B(p, R_max^{-1/2})) * R_max.
double noncollapsing_check(const MeshFlowState& state, int n_centers = 16,
                           std::uint64_t seed = 7);
double noncollapsing_check(const RotationalState& state, int n_centers = 16,
                           std::uint64_t seed = 7, int sectors = 48);

/// Triangulated surface of revolution built from a 1-D state (used for
/// ball-area and distance queries on rotational states).
MeshFlowState revolution_mesh_state(const RotationalState& state, int sectors);

// -- Record assembly ----------------------------------------------------------------

struct RecordContext {
    double rho = 0.0;
    double s_shift = 0.0;
    const CylinderState* background = nullptr;  // 1-D energy reference
};

DiagnosticsRecord make_record(const CylinderState& state, const RecordContext& ctx);
DiagnosticsRecord make_record(const MeshFlowState& state, const RecordContext& ctx);

/// Advances the entropy shift ODE s' = s(s - rho) by RK4 substeps.
double advance_shift(double s, double rho, double dt, int substeps = 8);

}  // namespace conicricci

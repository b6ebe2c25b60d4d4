#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "conicricci/mesh.hpp"
#include "conicricci/trajectory.hpp"

namespace conicricci {

/// Mesh plus per-vertex discrete conformal factor phi = log u: current edge
/// lengths are l_ij = exp((phi_i + phi_j)/2) * l0_ij. beta_current carries the
/// (possibly schedule-driven) cone targets at marked vertices.
struct MeshFlowState {
    std::shared_ptr<const ConicMesh> mesh;
    std::vector<double> phi;
    double t = 0.0;
    std::map<int, double> beta_current;

    void validate() const;
    static MeshFlowState initial(std::shared_ptr<const ConicMesh> mesh);
};

std::vector<double> current_edge_lengths(const MeshFlowState& state);

/// Per-face current areas and per-vertex barycentric dual areas.
std::vector<double> current_face_areas(const MeshFlowState& state);
std::vector<double> dual_areas(const MeshFlowState& state);

/// Discrete scalar curvature: R_i = 2 * defect_i / A_i^dual where the defect
/// at a marked vertex is measured against 2*pi*beta_current (R = 2K).
std::vector<double> discrete_curvature(const MeshFlowState& state);

double total_mesh_area(const MeshFlowState& state);

struct MeshStepResult {
    MeshFlowState state;
    bool accepted = false;
    int offending_face = -1;  // first face violating the triangle inequality
};

/// Explicit update phi_i += dt (rho - R_i); rejected (state unchanged) if any
/// triangle inequality fails afterwards.
MeshStepResult flow_step_mesh(const MeshFlowState& state, double dt, double rho);

/// Piecewise-linear cone-angle schedules per marked vertex id.
using BetaSchedule = std::map<int, std::vector<std::pair<double, double>>>;
double eval_schedule(const BetaSchedule& schedule, int vertex, double t, double fallback);

/// Same update as flow_step_mesh, but marked targets move to beta_j(t + dt).
MeshStepResult angle_schedule_step(const MeshFlowState& state, double dt, double rho,
                                   const BetaSchedule& schedule);

struct ConcentrationReport {
    int argmax_vertex = -1;
    double phi_max = 0.0;
    double phi_secondmax = 0.0;
    double area_fraction_in_ball = 0.0;
    bool separated = false;
};

/// Metric distances from a source vertex: Dijkstra on edges followed by one
/// round of triangle-unfolding correction (documented approximation).
std::vector<double> mesh_distances(const MeshFlowState& state, int source);

/// Locates the global max of phi and reports the concentration structure
/// within the metric ball of the given radius around it.
ConcentrationReport blowup_monitor(const MeshFlowState& state, double ball_radius,
                                   double separation_gap = 1.0);

/// Geodesic diameter estimate (max over a few Dijkstra sweeps).
double mesh_diameter(const MeshFlowState& state);

struct MeshRunParams {
    double rho = 0.0;
    double dt_init = 2e-3;
    double dt_min = 1e-8;
    double t_end = 10.0;
    int record_every = 25;
    double tol_curvature = 5e-3;   // converged when max|R-rho|/max(1,|rho|) < tol
    double blowup_cap = 12.0;      // phi_max cap
    double separation_gap = 1.0;
    double ball_radius_fraction = 0.1;  // of diameter, for concentration reports
    bool track_concentration = false;
    BetaSchedule schedule;         // empty = angle-preserving
    long max_steps = 2'000'000;

    // damping of the linearly unstable uniform scale mode when rho > 0
    // (vanishes on the conserved-area leaf); 0 disables it
    double scale_feedback = 4.0;

    // restart support: stepper bookkeeping restored from a snapshot
    bool resume = false;
    long resume_step_index = 0;
    double resume_dt = 0.0;
    double resume_s_shift = 0.0;
    bool resume_s_anchored = false;
};

struct MeshRunResult {
    Trajectory trajectory;
    MeshFlowState final_state;
    RunContinuation continuation;
    std::vector<double> dissipation_integral;          // per record
    std::vector<ConcentrationReport> concentration;    // per record if tracked
};

MeshRunResult run_mesh_flow(const MeshFlowState& initial, const MeshRunParams& params);

}  // namespace conicricci

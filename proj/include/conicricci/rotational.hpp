#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "conicricci/trajectory.hpp"

namespace conicricci {

/// Rotationally symmetric conic metric g = ds^2 + h(s)^2 dy^2 on [0, L],
/// sampled on arc-length nodes. h vanishes exactly at the two endpoint nodes
/// (the tips); beta_tips are the cone parameters there, with beta = 1 marking
/// a smooth pole.
struct RotationalState {
    double t = 0.0;
    std::vector<double> s;
    std::vector<double> h;
    std::pair<double, double> beta_tips{1.0, 1.0};

    double length() const { return s.empty() ? 0.0 : s.back(); }
    void validate() const;
};

/// Internal flow substrate: fixed cylindrical conformal coordinate
/// g = e^{2w(x)} (dx^2 + dy^2) on a uniform grid over [x0, x0 + (n-1) dx],
/// truncated near the tips where w is asymptotically linear with slopes
/// +beta_minus and -beta_plus.
struct CylinderState {
    double t = 0.0;
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> w;
    double beta_minus = 1.0;
    double beta_plus = 1.0;

    std::size_t n() const { return w.size(); }
    double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
    void validate() const;
};

enum class FlowScheme { semi_implicit, rk4, explicit_euler };

struct StepFailure : std::runtime_error {
    double suggested_dt;
    StepFailure(const std::string& msg, double dt_hint)
        : std::runtime_error(msg), suggested_dt(dt_hint) {}
};

// -- Cylinder engine ---------------------------------------------------------

/// Scalar curvature R = -2 e^{-2w} w_xx on the cylinder grid (Neumann tips).
std::vector<double> cylinder_curvature(const CylinderState& state);

double cylinder_area(const CylinderState& state);

/// One time step of d/dt (2w) = rho - R. The semi-implicit scheme treats the
/// e^{-2w} Laplacian linearly implicitly (tridiagonal solve); rk4 and
/// explicit_euler are fully explicit cross-check schemes.
CylinderState cylinder_step(const CylinderState& state, double dt, double rho,
                            FlowScheme scheme = FlowScheme::semi_implicit);

RotationalState to_rotational(const CylinderState& state);

/// Resamples an arc-length state onto a uniform conformal grid with n nodes,
/// truncating at metric radius r_trunc from each tip.
CylinderState from_rotational(const RotationalState& state, std::size_t n, double r_trunc);

/// Constant curvature suspension h = beta * sqrt(2/rho) * sin(s / sqrt(2/rho))
/// directly in cylinder form, truncated at metric radius r_trunc.
CylinderState make_suspension_cylinder(double beta, double rho, std::size_t n, double r_trunc);

/// Generic spindle initial data with prescribed tip parameters and total
/// area: w = a x - b log cosh x + c.
CylinderState make_spindle_cylinder(double beta_minus, double beta_plus, double area,
                                    std::size_t n, double r_trunc);

/// Adds a compactly supported conformal bump amplitude * exp(-(x-center)^2/2).
void perturb_cylinder(CylinderState& state, double amplitude, double center = 0.0);

// -- Spec-level operations on arc-length states ------------------------------

/// R(s_m) = -2 h''/h by centered differences; tip values by one-sided
/// extrapolation consistent with h(0) = 0, |h'(0)| = beta.
std::vector<double> curvature_profile(const RotationalState& state);

/// One flow step on an arc-length state (round-trips through the cylinder
/// gauge). dt = 0 returns the state unchanged.
RotationalState flow_step_rotational(const RotationalState& state, double dt, double rho,
                                     FlowScheme scheme = FlowScheme::semi_implicit);

/// Closed-form constant-curvature suspension state with R = rho.
RotationalState suspension_metric(double beta, double rho, std::size_t n_nodes);

/// Resamples h(s) onto n uniform arc-length nodes (spline interpolation).
/// Curvature diagnostics are computed in this gauge: second differences of
/// h on the exponentially graded conformal grid would amplify roundoff by
/// 1/r^2 near the tips, while the uniform gauge is well conditioned.
RotationalState resample_uniform_arclength(const RotationalState& state, std::size_t n);

struct RotationalRunParams {
    double rho = 2.0;
    double dt_init = 2e-3;
    double dt_min = 1e-8;
    double t_end = 10.0;
    int record_every = 25;
    double tol_curvature = 1e-6;   // converged when max|R-rho|/max(1,|rho|) < tol
    double tol_soliton = 0.0;      // converged when mu+X residual < tol (0 = off)
    FlowScheme scheme = FlowScheme::semi_implicit;
    long max_steps = 2'000'000;

    // For rho > 0 the fixed-rho normalization leaves the uniform scale mode
    // linearly unstable (rate rho): discretization error in the conserved
    // area grows like e^{rho t}. The run loop damps that one mode with a
    // feedback proportional to log(A/A_ref) which vanishes on the conserved
    // leaf; 0 disables it.
    double scale_feedback = 4.0;

    // restart support: stepper bookkeeping restored from a snapshot
    bool resume = false;
    long resume_step_index = 0;
    double resume_dt = 0.0;
    double resume_s_shift = 0.0;
    bool resume_s_anchored = false;
};

struct RotationalRunResult {
    Trajectory trajectory;
    CylinderState final_state;
    RotationalState final_rotational;
    RunContinuation continuation;
    // side channels aligned with trajectory.records, used by identity checks
    std::vector<double> dissipation_integral;  // int (R - rho)^2 dA
    std::vector<double> entropy_dissipation;   // int (2|mu|^2 + |X|^2/R) dA
};

RotationalRunResult run_rotational(const CylinderState& initial, const RotationalRunParams& params);
RotationalRunResult run_rotational(const RotationalState& initial, const RotationalRunParams& params,
                                   std::size_t n_nodes = 4001, double r_trunc = 1e-4);

// -- Solitons ----------------------------------------------------------------

/// Rotationally symmetric gradient soliton profile: h'' = -(rho/2) h - C h h',
/// h(0) = 0, h'(0) = beta_tip, closing with |h'(L)| = beta_far, and potential
/// f with f' = C h (mean-zero). C = 0 if and only if constant curvature.
struct SolitonProfile {
    std::vector<double> s, h, f;
    double C = 0.0;
    double L = 0.0;
    double rho = 2.0;
    double beta_tip = 1.0;
    double beta_far = 1.0;
    double mu_norm = 0.0;
    double x_norm = 0.0;

    RotationalState as_state() const;
};

struct ShootingFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shooting solver for the soliton ODE; the returned profile has been
/// validated against the independent mu/X residual oracle (< tol).
SolitonProfile soliton_shoot(double beta_tip, double beta_far, double rho, double tol = 1e-8);

}  // namespace conicricci

#pragma once

#include <limits>
#include <string>
#include <vector>

namespace conicricci {

/// One row of trajectory diagnostics. mu_norm and x_norm are only available
/// on 1-D (rotationally symmetric) states and are NaN on mesh states.
struct DiagnosticsRecord {
    double t = 0.0;
    double area = 0.0;
    double rho = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double energy_f = 0.0;
    double entropy_n = 0.0;
    double s_shift = 0.0;
    double gauss_bonnet_residual = 0.0;
    double phi_min = 0.0;
    double phi_max = 0.0;
    double mu_norm = std::numeric_limits<double>::quiet_NaN();
    double x_norm = std::numeric_limits<double>::quiet_NaN();
    double grad_f_max = 0.0;

    bool has_soliton_residuals() const { return mu_norm == mu_norm; }
};

enum class TerminationReason {
    converged,     // curvature (or soliton residual) tolerance reached
    reached_t_end,
    blowup_cap,    // conformal factor exceeded the configured cap
    step_failure,  // dt halving hit the floor
};

std::string to_string(TerminationReason reason);

/// Process exit code convention: 0 converged, 2 t_end, 3 blowup_cap, 4 step_failure.
int exit_code(TerminationReason reason);

struct Trajectory {
    std::vector<DiagnosticsRecord> records;
    TerminationReason termination = TerminationReason::reached_t_end;
    std::string termination_detail;
    double t_final = 0.0;
};

/// Stepper bookkeeping carried across snapshot restarts so that a restarted
/// run reproduces the uninterrupted one exactly. rho is recorded because the
/// convention fixes it from the *initial* area of the original run.
struct RunContinuation {
    long step_index = 0;
    double dt = 0.0;
    double s_shift = 0.0;
    bool s_anchored = false;
    double rho = 0.0;
};

}  // namespace conicricci

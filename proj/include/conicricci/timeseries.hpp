#pragma once

#include <string>
#include <vector>

#include "conicricci/trajectory.hpp"

namespace conicricci {

/// Fixed column order: t, area, rho, R_min, R_max, energy_F, entropy_N,
/// gb_residual, phi_min, phi_max, mu_norm, X_norm, grad_f_max.
/// Optional (1-D only) columns are left empty on mesh trajectories.
std::string timeseries_text(const Trajectory& trajectory);
void emit_timeseries(const Trajectory& trajectory, const std::string& path);

/// Quantities: any column name, plus "residual" (max |R - rho|) and
/// "log_residual" (its log10; the fitted tail slope is drawn on the plot
/// and returned).
struct PlotResult {
    double tail_slope = 0.0;      // per unit t, natural log for log_residual
    double tail_r_squared = 0.0;  // of the tail line fit (log_residual only)
};
PlotResult emit_plot(const Trajectory& trajectory, const std::string& quantity,
                     const std::string& path);

/// Least-squares slope of log ||R - rho||_inf over the trailing fraction of
/// the records (used by the exponential-convergence criteria).
struct TailFit {
    double slope = 0.0;
    double r_squared = 0.0;
    int points = 0;
};
TailFit residual_tail_fit(const Trajectory& trajectory, double tail_fraction = 0.5);

}  // namespace conicricci

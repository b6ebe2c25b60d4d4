#include <algorithm>
#include <cmath>
#include <limits>

#include "conicricci/diagnostics.hpp"
#include "conicricci/rotational.hpp"

namespace conicricci {

RotationalRunResult run_rotational(const CylinderState& initial,
                                   const RotationalRunParams& params) {
    initial.validate();
    RotationalRunResult result;
    CylinderState state = initial;
    const CylinderState background = initial;
    double dt = params.resume ? params.resume_dt : params.dt_init;
    double s_shift = params.resume ? params.resume_s_shift : 0.0;
    bool s_anchored = params.resume && params.resume_s_anchored;

    auto record = [&](const CylinderState& st) {
        RecordContext ctx;
        ctx.rho = params.rho;
        ctx.background = &background;
        const std::vector<double> R = cylinder_curvature(st);
        const double rmin = *std::min_element(R.begin(), R.end());
        if (!s_anchored) {
            s_shift = (rmin > 0.0) ? 0.0 : rmin - 1.0;
            s_anchored = true;
        }
        if (!(rmin - s_shift > 0.0)) s_shift = rmin - 1.0;
        ctx.s_shift = s_shift;
        result.trajectory.records.push_back(make_record(st, ctx));
        result.dissipation_integral.push_back(dissipation_integral(st, params.rho));
        double ed = std::numeric_limits<double>::quiet_NaN();
        try {
            ed = entropy_dissipation_integral(st, params.rho, s_shift);
        } catch (const std::exception&) {
        }
        result.entropy_dissipation.push_back(ed);
    };

    record(state);
    long accepted = params.resume ? params.resume_step_index : 0;
    const long step_budget = accepted + params.max_steps;
    TerminationReason reason = TerminationReason::reached_t_end;
    std::string detail;

    // reference leaf of the area constraint (rho = 4 pi chi / A_ref)
    const bool stabilize = params.rho > 0.0 && params.scale_feedback > 0.0;
    double chi = 2.0;
    if (state.beta_minus < 1.0) chi += state.beta_minus - 1.0;
    if (state.beta_plus < 1.0) chi += state.beta_plus - 1.0;
    const double area_ref = stabilize ? 4.0 * M_PI * chi / params.rho : 0.0;

    while (state.t < params.t_end - 1e-15 && accepted < step_budget) {
        const double step_dt = std::min(dt, params.t_end - state.t);
        CylinderState next = state;
        bool ok = true;
        try {
            next = cylinder_step(state, step_dt, params.rho, params.scheme);
            if (stabilize) {
                const double shift =
                    -0.5 * params.scale_feedback * step_dt * std::log(cylinder_area(next) / area_ref);
                for (double& w : next.w) w += shift;
            }
        } catch (const StepFailure&) {
            ok = false;
        }
        if (ok) {
            // reject wild explicit updates as well
            for (std::size_t i = 0; i < next.n() && ok; ++i)
                if (std::abs(next.w[i] - state.w[i]) > 1.0) ok = false;
        }
        if (!ok) {
            dt *= 0.5;
            if (dt < params.dt_min) {
                reason = TerminationReason::step_failure;
                detail = "time step floor reached";
                break;
            }
            continue;
        }
        s_shift = advance_shift(s_shift, params.rho, step_dt);
        state = std::move(next);
        ++accepted;

        const bool at_end = state.t >= params.t_end - 1e-15;
        if (accepted % params.record_every == 0 || at_end) {
            record(state);
            const auto& rec = result.trajectory.records.back();
            const double res =
                std::max(std::abs(rec.r_min - params.rho), std::abs(rec.r_max - params.rho)) /
                std::max(1.0, std::abs(params.rho));
            if (res < params.tol_curvature) {
                reason = TerminationReason::converged;
                detail = "curvature residual " + std::to_string(res);
                break;
            }
            if (params.tol_soliton > 0.0 && rec.mu_norm + rec.x_norm < params.tol_soliton) {
                reason = TerminationReason::converged;
                detail = "soliton residual " + std::to_string(rec.mu_norm + rec.x_norm);
                break;
            }
        }
    }
    if (accepted >= step_budget && reason == TerminationReason::reached_t_end) {
        reason = TerminationReason::step_failure;
        detail = "max step count reached";
    }
    if (result.trajectory.records.empty() ||
        result.trajectory.records.back().t < state.t - 1e-15)
        record(state);

    result.trajectory.termination = reason;
    result.trajectory.termination_detail = detail;
    result.trajectory.t_final = state.t;
    result.continuation = {accepted, dt, s_shift, s_anchored, params.rho};
    result.final_rotational = to_rotational(state);
    result.final_state = std::move(state);
    return result;
}

RotationalRunResult run_rotational(const RotationalState& initial,
                                   const RotationalRunParams& params, std::size_t n_nodes,
                                   double r_trunc) {
    return run_rotational(from_rotational(initial, n_nodes, r_trunc), params);
}

}  // namespace conicricci

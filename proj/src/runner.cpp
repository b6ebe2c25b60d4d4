#include "conicricci/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "conicricci/diagnostics.hpp"
#include "conicricci/numerics.hpp"
#include "conicricci/snapshot.hpp"
#include "conicricci/timeseries.hpp"

namespace conicricci {

namespace {

constexpr int kPresetSectors = 8;  // sectors of the genus-0 preset family

std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text,
                std::vector<std::string>& written) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << text;
    written.push_back(path.string());
}

std::string summary_text(const RunConfig& cfg, const Trajectory& traj) {
    std::ostringstream out;
    out << "run " << cfg.name << "\n";
    out << "kind " << to_string(cfg.kind) << "\n";
    out << "termination " << to_string(traj.termination);
    if (!traj.termination_detail.empty()) out << " (" << traj.termination_detail << ")";
    out << "\n";
    out << "t_final " << format_double(traj.t_final) << "\n";
    if (!traj.records.empty()) {
        const auto& r = traj.records.back();
        out << "area " << format_double(r.area) << "\n";
        out << "R_min " << format_double(r.r_min) << " R_max " << format_double(r.r_max) << "\n";
        out << "residual "
            << format_double(std::max(std::abs(r.r_min - r.rho), std::abs(r.r_max - r.rho)))
            << "\n";
        if (r.has_soliton_residuals())
            out << "mu_norm " << format_double(r.mu_norm) << " X_norm "
                << format_double(r.x_norm) << "\n";
    }
    return out.str();
}

RunOutcome run_classify(const RunConfig& cfg) {
    RunOutcome out;
    const auto dir = ensure_out_dir(cfg);
    const TroyanovReport rep = troyanov_check(cfg.spec, cfg.chi_epsilon);
    const LimitClass limit = classify_limit(cfg.spec, cfg.chi_epsilon);
    std::ostringstream text;
    text << "chi_conic " << format_double(rep.chi_conic) << "\n";
    text << "troyanov_holds " << (rep.holds ? "true" : "false") << "\n";
    text << "failing_indices";
    for (int j : rep.failing_indices) text << " " << j;
    text << "\n";
    text << "limit " << to_string(limit.kind) << "\n";
    text << "notes " << limit.notes << "\n";
    const double area = initial_area_for(cfg);
    text << "target_rho " << format_double(target_rho(cfg.spec, area)) << " at area "
         << format_double(area) << "\n";
    write_text(dir / (cfg.name + ".classify.txt"), text.str(), out.files_written);
    out.summary = text.str();
    out.exit_status = 0;
    return out;
}

RunOutcome run_heatkernel(const RunConfig& cfg) {
    RunOutcome out;
    const auto dir = ensure_out_dir(cfg);
    const ModelCone cone{cfg.hk_beta, cfg.hk_r_max};
    HeatKernelConfig hk;
    hk.max_angular_mode = cfg.hk_max_mode;
    hk.series_tolerance = cfg.hk_tolerance;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ur(0.15, 1.0), uy(0.0, 2.0 * std::numbers::pi),
        ut(0.5, 1.5);
    std::ostringstream csv;
    csv << "t,r,y,r2,y2,value\n";
    for (int k = 0; k < cfg.hk_samples; ++k) {
        const double t = cfg.hk_t * ut(rng);
        const double r = ur(rng) * cone.r_max;
        const double r2 = ur(rng) * cone.r_max;
        const double y = uy(rng), y2 = uy(rng);
        const double v = heat_kernel_eval(cone, hk, t, r, y, r2, y2);
        csv << format_double(t) << "," << format_double(r) << "," << format_double(y) << ","
            << format_double(r2) << "," << format_double(y2) << "," << format_double(v) << "\n";
    }
    write_text(dir / (cfg.name + ".heatkernel.csv"), csv.str(), out.files_written);
    out.summary = "heatkernel table with " + std::to_string(cfg.hk_samples) + " samples";
    out.exit_status = 0;
    return out;
}

void common_outputs(const RunConfig& cfg, const Trajectory& traj, const Snapshot& snap,
                    RunOutcome& out) {
    const auto dir = ensure_out_dir(cfg);
    write_text(dir / cfg.timeseries_name, timeseries_text(traj), out.files_written);
    snapshot_write(snap, (dir / cfg.snapshot_name).string());
    out.files_written.push_back((dir / cfg.snapshot_name).string());
    for (const auto& q : cfg.plots) {
        const auto path = dir / (cfg.name + "." + q + ".svg");
        emit_plot(traj, q, path.string());
        out.files_written.push_back(path.string());
    }
    write_text(dir / (cfg.name + ".summary.txt"), summary_text(cfg, traj), out.files_written);
}

RunOutcome run_rotational_experiment(const RunConfig& cfg) {
    cfg.spec.validate();
    if (cfg.spec.genus != 0 || cfg.spec.betas.size() > 2)
        throw std::invalid_argument(
            "rotational runs support genus 0 with at most two cone points");
    const double area = initial_area_for(cfg);

    const std::size_t n_nodes = 1500u << std::max(0, cfg.resolution);
    const double r_trunc = 1e-5;
    RotationalRunParams params;
    params.dt_init = cfg.dt_init;
    params.dt_min = cfg.dt_min;
    params.t_end = cfg.t_end;
    params.record_every = cfg.record_every;
    params.tol_curvature = cfg.tol_curvature;
    params.tol_soliton = cfg.tol_soliton;
    params.scheme = cfg.scheme;

    CylinderState initial;
    if (cfg.restart_from) {
        const Snapshot snap = snapshot_read(*cfg.restart_from);
        if (!std::holds_alternative<CylinderState>(snap.state))
            throw std::runtime_error("restart snapshot is not a rotational state");
        initial = std::get<CylinderState>(snap.state);
        if (snap.continuation) {
            params.resume = true;
            params.resume_step_index = snap.continuation->step_index;
            params.resume_dt = snap.continuation->dt;
            params.resume_s_shift = snap.continuation->s_shift;
            params.resume_s_anchored = snap.continuation->s_anchored;
            params.rho = snap.continuation->rho;
        }
    } else {
        const double bm = cfg.spec.betas.size() > 0 ? cfg.spec.betas[0] : 1.0;
        const double bp = cfg.spec.betas.size() > 1 ? cfg.spec.betas[1] : 1.0;
        initial = make_spindle_cylinder(bm, bp, area, n_nodes, r_trunc);
        if (cfg.perturb_amplitude != 0.0)
            perturb_cylinder(initial, cfg.perturb_amplitude, 0.4);
        // rho is pinned to the actual initial area (perturbation included)
        params.rho = target_rho(cfg.spec, cylinder_area(initial));
    }

    const RotationalRunResult run = run_rotational(initial, params);
    RunOutcome out;
    out.trajectory = run.trajectory;
    out.exit_status = exit_code(run.trajectory.termination);
    Snapshot snap;
    snap.state = run.final_state;
    snap.continuation = run.continuation;
    common_outputs(cfg, run.trajectory, snap, out);
    out.summary = summary_text(cfg, run.trajectory);
    return out;
}

RunOutcome run_mesh_experiment(const RunConfig& cfg) {
    cfg.spec.validate();
    const LimitClass limit = classify_limit(cfg.spec, cfg.chi_epsilon);

    MeshFlowState initial;
    MeshRunParams params;
    params.dt_init = cfg.dt_init;
    params.dt_min = cfg.dt_min;
    params.t_end = cfg.t_end;
    params.record_every = cfg.record_every;
    params.tol_curvature = cfg.tol_curvature;
    params.blowup_cap = cfg.blowup_cap;
    params.separation_gap = cfg.separation_gap;
    params.ball_radius_fraction = cfg.ball_radius_fraction;
    params.track_concentration = (limit.kind == LimitKind::blowup_expected);

    bool rho_from_snapshot = false;
    if (cfg.restart_from) {
        const Snapshot snap = snapshot_read(*cfg.restart_from);
        if (!std::holds_alternative<MeshFlowState>(snap.state))
            throw std::runtime_error("restart snapshot is not a mesh state");
        initial = std::get<MeshFlowState>(snap.state);
        if (snap.continuation) {
            params.resume = true;
            params.resume_step_index = snap.continuation->step_index;
            params.resume_dt = snap.continuation->dt;
            params.resume_s_shift = snap.continuation->s_shift;
            params.resume_s_anchored = snap.continuation->s_anchored;
            params.rho = snap.continuation->rho;
            rho_from_snapshot = true;
        }
    } else {
        auto mesh = std::make_shared<ConicMesh>(build_preset_mesh(cfg.spec, cfg.resolution));
        initial = MeshFlowState::initial(mesh);
        if (cfg.perturb_amplitude != 0.0) {
            for (int v = 0; v < mesh->num_vertices(); ++v) {
                if (mesh->positions()[v]) {
                    const auto& p = *mesh->positions()[v];
                    initial.phi[v] = cfg.perturb_amplitude *
                                     std::sin(2.0 * std::numbers::pi * p[0]) *
                                     std::cos(2.0 * std::numbers::pi * p[1]);
                } else {
                    initial.phi[v] = cfg.perturb_amplitude * std::sin(2.399963229728653 * v);
                }
            }
        }
    }
    if (!rho_from_snapshot) params.rho = target_rho(cfg.spec, total_mesh_area(initial));

    // map schedule from spec cone indices to mesh vertex ids
    if (!cfg.schedule_by_index.empty()) {
        const std::vector<int> ids = preset_cone_vertex_ids(cfg.spec);
        for (const auto& [idx, table] : cfg.schedule_by_index) {
            if (idx < 0 || idx >= static_cast<int>(ids.size()))
                throw std::invalid_argument("schedule index out of range");
            params.schedule[ids[idx]] = table;
        }
    }

    const MeshRunResult run = run_mesh_flow(initial, params);
    RunOutcome out;
    out.trajectory = run.trajectory;
    out.exit_status = exit_code(run.trajectory.termination);
    Snapshot snap;
    snap.state = run.final_state;
    snap.continuation = run.continuation;
    common_outputs(cfg, run.trajectory, snap, out);

    if (params.track_concentration && !run.concentration.empty()) {
        std::ostringstream csv;
        csv << "t,argmax_vertex,phi_max,phi_secondmax,area_fraction_in_ball,separated\n";
        for (std::size_t k = 0; k < run.concentration.size(); ++k) {
            const auto& c = run.concentration[k];
            csv << format_double(run.trajectory.records[k].t) << "," << c.argmax_vertex << ","
                << format_double(c.phi_max) << "," << format_double(c.phi_secondmax) << ","
                << format_double(c.area_fraction_in_ball) << ","
                << (c.separated ? "true" : "false") << "\n";
        }
        const auto dir = ensure_out_dir(cfg);
        write_text(dir / (cfg.name + ".concentration.csv"), csv.str(), out.files_written);
    }
    out.summary = summary_text(cfg, run.trajectory);
    return out;
}

}  // namespace

double initial_area_for(const RunConfig& cfg) {
    if (cfg.area > 0.0) return cfg.area;
    const double chi = conic_euler_characteristic(cfg.spec);
    return (chi > cfg.chi_epsilon) ? 2.0 * std::numbers::pi * chi : 1.0;
}

std::vector<int> preset_cone_vertex_ids(const ConicSurfaceSpec& spec) {
    // genus-0 preset family: north pole 0, equator ring 1..sectors, south
    // pole sectors+1; cone points in spec order -> north, south, equator[0]
    if (spec.genus != 0)
        throw std::invalid_argument("preset_cone_vertex_ids: genus-0 presets only");
    std::vector<int> ids;
    if (spec.betas.size() > 0) ids.push_back(0);
    if (spec.betas.size() > 1) ids.push_back(kPresetSectors + 1);
    if (spec.betas.size() > 2) ids.push_back(1);
    return ids;
}

RunOutcome run_experiment(const RunConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::classify: return run_classify(cfg);
        case ExperimentKind::heatkernel: return run_heatkernel(cfg);
        case ExperimentKind::rotational: return run_rotational_experiment(cfg);
        case ExperimentKind::mesh: return run_mesh_experiment(cfg);
    }
    throw std::logic_error("run_experiment: unknown kind");
}

}  // namespace conicricci

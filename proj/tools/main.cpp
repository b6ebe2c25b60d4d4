#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "conicricci/diagnostics.hpp"
#include "conicricci/numerics.hpp"
#include "conicricci/presets.hpp"
#include "conicricci/runner.hpp"
#include "conicricci/snapshot.hpp"

using namespace conicricci;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string preset_dir;
    long seed = -1;
    int resolution = -1;
    double dt = 0.0;
    double t_end = 0.0;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
    auto* c = cmd->add_option("--config", flags.config_path, "run configuration file");
    if (config_required) c->required();
    cmd->add_option("--out-dir", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "rng seed for sampling diagnostics");
    cmd->add_option("--resolution", flags.resolution, "grid/mesh resolution level");
    cmd->add_option("--dt", flags.dt, "initial time step");
    cmd->add_option("--t-end", flags.t_end, "flow horizon");
}

void apply_overrides(RunConfig& cfg, const CommonFlags& flags) {
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.resolution >= 0) cfg.resolution = flags.resolution;
    if (flags.dt > 0.0) cfg.dt_init = flags.dt;
    if (flags.t_end > 0.0) cfg.t_end = flags.t_end;
}

int execute(RunConfig cfg, const CommonFlags& flags, ExperimentKind expected) {
    apply_overrides(cfg, flags);
    if (cfg.kind != expected)
        throw std::runtime_error("config kind is " + to_string(cfg.kind) + ", expected " +
                                 to_string(expected));
    const RunOutcome out = run_experiment(cfg);
    std::cout << out.summary;
    for (const auto& f : out.files_written) std::cout << "wrote " << f << "\n";
    return out.exit_status;
}

int diagnose(const std::string& snapshot_path) {
    const Snapshot snap = snapshot_read(snapshot_path);
    DiagnosticsRecord rec;
    if (std::holds_alternative<CylinderState>(snap.state)) {
        const auto& st = std::get<CylinderState>(snap.state);
        const std::vector<double> R = cylinder_curvature(st);
        RecordContext ctx;
        const double rmin = *std::min_element(R.begin(), R.end());
        // area-normalized mean curvature plays the role of rho for a lone state
        ctx.rho = 0.0;
        double chi = 2.0;
        if (st.beta_minus < 1.0) chi += st.beta_minus - 1.0;
        if (st.beta_plus < 1.0) chi += st.beta_plus - 1.0;
        ctx.rho = 4.0 * M_PI * chi / cylinder_area(st);
        ctx.s_shift = rmin > 0.0 ? 0.0 : rmin - 1.0;
        rec = make_record(st, ctx);
    } else if (std::holds_alternative<MeshFlowState>(snap.state)) {
        const auto& st = std::get<MeshFlowState>(snap.state);
        const std::vector<double> R = discrete_curvature(st);
        RecordContext ctx;
        double mass = 0.0;
        for (const auto& [v, b] : st.beta_current) mass += 1.0 - b;
        const double chi = st.mesh->euler_characteristic() - mass;
        ctx.rho = 4.0 * M_PI * chi / total_mesh_area(st);
        const double rmin = *std::min_element(R.begin(), R.end());
        ctx.s_shift = rmin > 0.0 ? 0.0 : rmin - 1.0;
        rec = make_record(st, ctx);
    } else {
        const auto& f = std::get<PolarField>(snap.state);
        const ModelCone cone{snap.field_beta, snap.field_r_max};
        std::cout << "polar field: " << f.nr() << " x " << f.ny() << " nodes, mass "
                  << format_double(polar_mass(cone, f)) << "\n";
        const ExpansionFit fit = expansion_fit(f, cone);
        std::cout << "tip expansion: a0 " << format_double(fit.a0) << " a11 "
                  << format_double(fit.a11) << " a12 " << format_double(fit.a12)
                  << " mode1 exponent " << format_double(fit.mode1_exponent) << "\n";
        return 0;
    }
    std::cout << "t " << format_double(rec.t) << "\n";
    std::cout << "area " << format_double(rec.area) << "\n";
    std::cout << "rho " << format_double(rec.rho) << "\n";
    std::cout << "R_min " << format_double(rec.r_min) << "\nR_max " << format_double(rec.r_max)
              << "\n";
    std::cout << "gb_residual " << format_double(rec.gauss_bonnet_residual) << "\n";
    std::cout << "entropy_N " << format_double(rec.entropy_n) << " (s = "
              << format_double(rec.s_shift) << ")\n";
    std::cout << "grad_f_max " << format_double(rec.grad_f_max) << "\n";
    if (rec.has_soliton_residuals())
        std::cout << "mu_norm " << format_double(rec.mu_norm) << "\nX_norm "
                  << format_double(rec.x_norm) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"normalized Ricci flow laboratory for surfaces with conic singularities"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* classify_cmd = app.add_subcommand("classify", "Troyanov check and limit classification");
    CommonFlags classify_flags;
    add_common(classify_cmd, classify_flags, false);
    int genus = 0;
    std::vector<double> betas;
    classify_cmd->add_option("--genus", genus, "surface genus");
    classify_cmd->add_option("--betas", betas, "cone angle parameters in (0,1)");

    auto* rot_cmd = app.add_subcommand("flow-rotational", "1-D rotationally symmetric flow");
    CommonFlags rot_flags;
    add_common(rot_cmd, rot_flags, true);

    auto* mesh_cmd = app.add_subcommand("flow-mesh", "discrete conformal flow on a mesh");
    CommonFlags mesh_flags;
    add_common(mesh_cmd, mesh_flags, true);

    auto* sol_cmd = app.add_subcommand("soliton", "shooting solver for rotational solitons");
    double beta_tip = 0.7, beta_far = 1.0, rho = 2.0, sol_tol = 1e-8;
    std::string sol_out;
    sol_cmd->add_option("--beta-tip", beta_tip, "cone parameter at s = 0")->required();
    sol_cmd->add_option("--beta-far", beta_far, "cone parameter at s = L (1 = smooth)");
    sol_cmd->add_option("--rho", rho, "target mean curvature");
    sol_cmd->add_option("--tol", sol_tol, "residual oracle tolerance");
    sol_cmd->add_option("--out", sol_out, "write the profile as CSV (s,h,f)");

    auto* hk_cmd = app.add_subcommand("heatkernel", "model-cone heat kernel table");
    CommonFlags hk_flags;
    add_common(hk_cmd, hk_flags, false);
    double hk_beta = 0.5, hk_t = 0.1;
    int hk_samples = 100;
    hk_cmd->add_option("--beta", hk_beta, "cone parameter in (0,1]");
    hk_cmd->add_option("--t", hk_t, "kernel time scale");
    hk_cmd->add_option("--samples", hk_samples, "number of table rows");

    auto* diag_cmd = app.add_subcommand("diagnose", "diagnostics of a snapshot file");
    std::string snapshot_path;
    diag_cmd->add_option("snapshot", snapshot_path, "snapshot file")->required();

    auto* preset_cmd = app.add_subcommand("preset", "preset catalog");
    auto* preset_list = preset_cmd->add_subcommand("list", "list shipped presets");
    std::string preset_list_dir;
    preset_list->add_option("--preset-dir", preset_list_dir, "preset directory");
    auto* preset_run = preset_cmd->add_subcommand("run", "run a preset by name");
    std::string preset_name;
    CommonFlags preset_flags;
    preset_run->add_option("name", preset_name, "preset name")->required();
    preset_run->add_option("--preset-dir", preset_flags.preset_dir, "preset directory");
    add_common(preset_run, preset_flags, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*classify_cmd) {
            RunConfig cfg;
            if (!classify_flags.config_path.empty()) {
                cfg = load_config_file(classify_flags.config_path);
            } else {
                cfg.kind = ExperimentKind::classify;
                cfg.spec = make_spec(genus, betas);
                cfg.name = "classify";
            }
            return execute(cfg, classify_flags, ExperimentKind::classify);
        }
        if (*rot_cmd)
            return execute(load_config_file(rot_flags.config_path), rot_flags,
                           ExperimentKind::rotational);
        if (*mesh_cmd)
            return execute(load_config_file(mesh_flags.config_path), mesh_flags,
                           ExperimentKind::mesh);
        if (*sol_cmd) {
            const SolitonProfile prof = soliton_shoot(beta_tip, beta_far, rho, sol_tol);
            std::cout << "C " << format_double(prof.C) << "\n";
            std::cout << "L " << format_double(prof.L) << "\n";
            std::cout << "mu_norm " << format_double(prof.mu_norm) << "\n";
            std::cout << "X_norm " << format_double(prof.x_norm) << "\n";
            if (!sol_out.empty()) {
                std::ofstream out(sol_out);
                out << "s,h,f\n";
                for (std::size_t i = 0; i < prof.s.size(); ++i)
                    out << format_double(prof.s[i]) << "," << format_double(prof.h[i]) << ","
                        << format_double(prof.f[i]) << "\n";
                std::cout << "wrote " << sol_out << "\n";
            }
            return 0;
        }
        if (*hk_cmd) {
            RunConfig cfg;
            if (!hk_flags.config_path.empty()) {
                cfg = load_config_file(hk_flags.config_path);
            } else {
                cfg.kind = ExperimentKind::heatkernel;
                cfg.name = "heatkernel";
                cfg.hk_beta = hk_beta;
                cfg.hk_t = hk_t;
                cfg.hk_samples = hk_samples;
            }
            return execute(cfg, hk_flags, ExperimentKind::heatkernel);
        }
        if (*diag_cmd) return diagnose(snapshot_path);
        if (*preset_list) {
            for (const auto& name : list_presets(preset_list_dir)) std::cout << name << "\n";
            return 0;
        }
        if (*preset_run) {
            RunConfig cfg = load_preset(preset_name, preset_flags.preset_dir);
            apply_overrides(cfg, preset_flags);
            const RunOutcome out = run_experiment(cfg);
            std::cout << out.summary;
            for (const auto& f : out.files_written) std::cout << "wrote " << f << "\n";
            return out.exit_status;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

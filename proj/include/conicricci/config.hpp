#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conicricci/cone_geometry.hpp"
#include "conicricci/conformal_flow.hpp"
#include "conicricci/rotational.hpp"

namespace conicricci {

enum class ExperimentKind { rotational, mesh, heatkernel, classify };

std::string to_string(ExperimentKind kind);

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_number, const std::string& msg)
        : std::runtime_error("config line " + std::to_string(line_number) + ": " + msg),
          line(line_number) {}
};

/// Validated run configuration parsed from the key = value format
/// (sections in brackets, # comments). See README for the key catalog.
struct RunConfig {
    std::string name = "run";
    ExperimentKind kind = ExperimentKind::classify;
    ConicSurfaceSpec spec;

    // numerics
    double dt_init = 2e-3;
    double dt_min = 1e-8;
    double t_end = 10.0;
    int record_every = 25;
    double tol_curvature = 1e-3;
    double tol_soliton = 0.0;
    int resolution = 2;          // mesh subdivisions or 1-D node count scale
    FlowScheme scheme = FlowScheme::semi_implicit;
    double blowup_cap = 12.0;
    double separation_gap = 1.0;
    double ball_radius_fraction = 0.1;
    double chi_epsilon = kChiZeroEpsilon;
    double perturb_amplitude = 0.0;
    double area = 0.0;           // 0 = normalize so that rho = 2 (chi > 0) or area = 1
    std::uint64_t seed = 1;

    // angle-changing schedule, by cone index in spec order
    std::map<int, std::vector<std::pair<double, double>>> schedule_by_index;

    // heatkernel experiment parameters
    double hk_beta = 0.5;
    double hk_r_max = 1.0;
    double hk_t = 0.1;
    int hk_samples = 100;
    int hk_max_mode = 64;
    double hk_tolerance = 1e-12;

    // output
    std::string out_dir = ".";
    std::string timeseries_name = "timeseries.csv";
    std::string snapshot_name = "final.snapshot";
    std::vector<std::string> plots;

    std::optional<std::string> restart_from;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace conicricci

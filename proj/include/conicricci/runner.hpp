#pragma once

#include <string>
#include <vector>

#include "conicricci/config.hpp"
#include "conicricci/trajectory.hpp"

namespace conicricci {

struct RunOutcome {
    Trajectory trajectory;
    int exit_status = 0;
    std::string summary;
    std::vector<std::string> files_written;
};

/// Dispatches a validated config to the right backend, writes the
/// time-series file, final snapshot, optional plots, and a summary.
RunOutcome run_experiment(const RunConfig& config);

/// Vertex ids carrying the spec's cone points on preset meshes, in spec order.
std::vector<int> preset_cone_vertex_ids(const ConicSurfaceSpec& spec);

/// Initial-area convention for flow runs: explicit config value, otherwise
/// normalized so that rho = 2 when chi > 0 (and area 1 when chi <= 0).
double initial_area_for(const RunConfig& config);

}  // namespace conicricci

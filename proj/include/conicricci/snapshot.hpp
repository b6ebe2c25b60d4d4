#pragma once

#include <optional>
#include <string>
#include <variant>

#include "conicricci/conformal_flow.hpp"
#include "conicricci/model_cone.hpp"
#include "conicricci/rotational.hpp"

namespace conicricci {

struct SnapshotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Snapshot {
    std::variant<CylinderState, MeshFlowState, PolarField> state;
    std::optional<RunContinuation> continuation;
    double field_beta = 1.0;  // ModelCone context for PolarField payloads
    double field_r_max = 1.0;
};

/// Versioned text format, header CONICRICCI-SNAPSHOT v1, floats as
/// 17-significant-digit decimals, trailing FNV-64 checksum line.
std::string write_snapshot_text(const Snapshot& snap);
Snapshot read_snapshot_text(const std::string& text);

void snapshot_write(const Snapshot& snap, const std::string& path);
Snapshot snapshot_read(const std::string& path);

}  // namespace conicricci

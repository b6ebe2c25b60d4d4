#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace conicricci {

/// Default tolerance used to decide whether the conic Euler characteristic
/// vanishes when classifying limits (beta inputs are floats).
inline constexpr double kChiZeroEpsilon = 1e-12;

struct ConePoint {
    std::string label;
    std::optional<std::array<double, 3>> position;  // metadata only
};

/// Combinatorial conic problem data: genus, marked points, and cone angle
/// parameters beta_j in (0,1) (cone angle 2*pi*beta_j).
struct ConicSurfaceSpec {
    int genus = 0;
    std::vector<ConePoint> cone_points;
    std::vector<double> betas;

    /// Throws std::invalid_argument if an invariant is violated:
    /// genus >= 0, betas in (0,1), matching list lengths, distinct labels.
    void validate() const;

    std::size_t num_cone_points() const { return betas.size(); }
};

/// Convenience constructor with auto-generated labels p0, p1, ...
ConicSurfaceSpec make_spec(int genus, std::vector<double> betas);

enum class SignClass { negative, zero, positive };

struct TroyanovReport {
    double chi_conic = 0.0;
    bool holds = false;
    std::vector<int> failing_indices;
    SignClass sign_class = SignClass::zero;
};

enum class LimitKind {
    constant_curvature,
    soliton_teardrop,
    soliton_football,
    constant_curvature_modulo_scale,
    constant_curvature_modulo_mobius,
    blowup_expected,
};

std::string to_string(LimitKind kind);

struct LimitClass {
    LimitKind kind = LimitKind::constant_curvature;
    std::string notes;
};

/// chi(M, beta) = 2 - 2*genus + sum_j (beta_j - 1).
double conic_euler_characteristic(const ConicSurfaceSpec& spec);

/// rho = 4*pi*chi(M, beta) / initial_area; the normalization that makes the
/// flow area-preserving. Throws std::domain_error for nonpositive area.
double target_rho(const ConicSurfaceSpec& spec, double initial_area);

/// Checks the Troyanov inequalities 2*alpha_j > sum_i alpha_i (alpha = beta-1)
/// when chi(M, beta) > 0; always holds when chi(M, beta) <= 0.
TroyanovReport troyanov_check(const ConicSurfaceSpec& spec,
                              double chi_epsilon = kChiZeroEpsilon);

/// Predicts the long-time limit of the angle-preserving normalized flow.
LimitClass classify_limit(const ConicSurfaceSpec& spec,
                          double chi_epsilon = kChiZeroEpsilon);

}  // namespace conicricci

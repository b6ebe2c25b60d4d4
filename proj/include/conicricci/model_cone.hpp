#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace conicricci {

/// The exact flat cone g_beta = dr^2 + beta^2 r^2 dy^2 truncated at r_max.
/// beta = 1 is allowed here as the Euclidean calibration case.
struct ModelCone {
    double beta = 1.0;
    double r_max = 1.0;

    void validate() const {
        if (!(beta > 0.0 && beta <= 1.0))
            throw std::invalid_argument("ModelCone: beta must lie in (0,1]");
        if (!(r_max > 0.0)) throw std::invalid_argument("ModelCone: r_max must be positive");
    }
};

/// Truncation and quadrature control for the Bessel-series heat kernel.
struct HeatKernelConfig {
    int max_angular_mode = 64;      // hard cap L on the number of modes
    double series_tolerance = 1e-12;
    int quadrature_nodes = 10;      // Gauss-Legendre nodes per radial panel
};

/// Raised when the angular series does not converge within the mode cap.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scalar field sampled on a polar grid: radial nodes graded toward r = 0
/// (strictly increasing, r[0] > 0) and uniform angular nodes on [0, 2pi).
/// values is row-major: values[i * ny + j] = f(r[i], y[j]).
struct PolarField {
    std::vector<double> r;
    std::vector<double> y;
    std::vector<double> values;

    std::size_t nr() const { return r.size(); }
    std::size_t ny() const { return y.size(); }
    double& at(std::size_t i, std::size_t j) { return values[i * y.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * y.size() + j]; }
    void validate() const;

    /// Geometric radial grid from r_min_fraction * r_max up to r_max.
    static PolarField log_grid(const ModelCone& cone, std::size_t nr, std::size_t ny,
                               double r_min_fraction = 1e-4);
};

/// Exponentially scaled modified Bessel function e^{-x} I_nu(x), nu >= 0.
double bessel_i_scaled(double nu, double x);

/// Indicial exponents of the Friedrichs model Laplacian: all (j/beta, j) with
/// exponent <= max_value, sorted by exponent.
std::vector<std::pair<double, int>> indicial_roots(const ModelCone& cone, double max_value);

/// Solves (d_rr + r^{-1} d_r - (mode/beta)^2 r^{-2}) u = rhs on (0, r_max]
/// with u bounded at 0 (Friedrichs selection) and u(r_max) = outer_bc.
/// rhs is sampled on the strictly increasing grid r (typically a log grid).
std::vector<double> mode_poisson_solve(const ModelCone& cone, int mode,
                                       std::span<const double> r, std::span<const double> rhs,
                                       double outer_bc);

/// Friedrichs heat kernel of the complete model cone, by the angular
/// Bessel series. Symmetric in (r,y) <-> (r2,y2); homogeneous of degree -2
/// under (t,r,r2) -> (l^2 t, l r, l r2).
double heat_kernel_eval(const ModelCone& cone, const HeatKernelConfig& cfg, double t, double r,
                        double y, double r2, double y2);

/// Applies the heat semigroup e^{t Laplacian} to a sampled field by angular
/// mode decomposition and panel-refined radial quadrature.
PolarField heat_apply(const ModelCone& cone, const HeatKernelConfig& cfg, double t,
                      const PolarField& field);

/// Integral of the field against the cone area element beta * r dr dy.
double polar_mass(const ModelCone& cone, const PolarField& field);

struct ExpansionFit {
    double a0 = 0.0;                 // constant term
    double a11 = 0.0;                // r^{1/beta} cos y amplitude
    double a12 = 0.0;                // r^{1/beta} sin y amplitude
    double mode1_exponent = 0.0;     // fitted exponent of the mode-1 radial profile
    bool mode1_above_noise = false;
    std::optional<double> remainder_exponent;  // fitted exponent after subtraction
};

/// Fits the tip expansion a0 + r^s (a11 cos y + a12 sin y) + remainder on the
/// innermost `window_decades` decades of the radial grid.
ExpansionFit expansion_fit(const PolarField& field, const ModelCone& cone,
                           double window_decades = 2.0);

struct KernelSample {
    double t, r, y, r2, y2;
};

/// max over samples of |l^2 H(l^2 t, l r, y, l r2, y2) - H(t, r, y, r2, y2)|.
double scaling_residual(const ModelCone& cone, const HeatKernelConfig& cfg, double lambda,
                        std::span<const KernelSample> samples);

}  // namespace conicricci

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace conicricci {

/// Finite-difference weights on arbitrary nodes (Fornberg's algorithm).
/// Returns weights w such that sum_i w[i] * f(x[i]) approximates the
/// `order`-th derivative of f at x0.
std::vector<double> fd_weights(double x0, std::span<const double> x, int order);

/// Ordinary least-squares line fit y = slope*x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least-squares fit y = c0 + c1 * r^2 (used for mode-0 tip profiles).
struct QuadraticInR2Fit {
    double c0 = 0.0;
    double c1 = 0.0;
};
QuadraticInR2Fit fit_const_plus_r2(std::span<const double> r, std::span<const double> y);

/// Integral of sampled data on an arbitrary strictly increasing grid.
/// Composite rule built from local parabolas through node triples.
double integrate_samples(std::span<const double> x, std::span<const double> f);

/// Cumulative version: out[i] = integral from x[0] to x[i].
std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> f);

/// Natural cubic spline through (x, y); evaluation clamps to the data range.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::span<const double> x, std::span<const double> y);
    double operator()(double xq) const;
    double derivative(double xq) const;

private:
    std::vector<double> x_, y_, m_;  // m_: second derivatives at nodes
};

/// Solves a tridiagonal system in place (Thomas algorithm).
/// diag, upper, lower are the matrix bands; rhs is overwritten with the solution.
void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// Nodes and weights for n-point Gauss-Legendre quadrature on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// FNV-1a 64-bit hash, used for snapshot checksums.
std::uint64_t fnv1a64(std::string_view data);

/// Shortest-round-trip decimal formatting for doubles (17 significant digits).
std::string format_double(double v);

}  // namespace conicricci

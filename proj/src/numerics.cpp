#include "conicricci/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace conicricci {

std::vector<double> fd_weights(double x0, std::span<const double> x, int order) {
    const int n = static_cast<int>(x.size());
    if (n == 0 || order < 0 || order >= n)
        throw std::invalid_argument("fd_weights: need more nodes than derivative order");
    // Fornberg, Math. Comp. 51 (1988). c[k][j]: weight of node j for k-th derivative.
    std::vector<std::vector<double>> c(order + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c[order];
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit f;
    if (sxx == 0) throw std::invalid_argument("fit_line: degenerate abscissae");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = (syy == 0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

QuadraticInR2Fit fit_const_plus_r2(std::span<const double> r, std::span<const double> y) {
    const std::size_t n = r.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("fit_const_plus_r2: need >= 2 points");
    // Normal equations for basis {1, r^2}.
    double s1 = static_cast<double>(n), sr2 = 0, sr4 = 0, sy = 0, sr2y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r2 = r[i] * r[i];
        sr2 += r2;
        sr4 += r2 * r2;
        sy += y[i];
        sr2y += r2 * y[i];
    }
    const double det = s1 * sr4 - sr2 * sr2;
    QuadraticInR2Fit f;
    if (det == 0) { f.c0 = sy / s1; return f; }
    f.c0 = (sr4 * sy - sr2 * sr2y) / det;
    f.c1 = (s1 * sr2y - sr2 * sy) / det;
    return f;
}

double integrate_samples(std::span<const double> x, std::span<const double> f) {
    const std::size_t n = x.size();
    if (n != f.size() || n < 2) throw std::invalid_argument("integrate_samples: need >= 2 samples");
    if (n == 2) return 0.5 * (f[0] + f[1]) * (x[1] - x[0]);
    // Per interval, integrate the parabola through the three nearest nodes.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t a = (i == 0) ? 0 : i - 1;
        if (a + 2 >= n) a = n - 3;
        const double x0 = x[a], x1 = x[a + 1], x2 = x[a + 2];
        const double f0 = f[a], f1 = f[a + 1], f2 = f[a + 2];
        const double d01 = x1 - x0, d02 = x2 - x0, d12 = x2 - x1;
        // Newton form coefficients.
        const double c1 = (f1 - f0) / d01;
        const double c2 = ((f2 - f1) / d12 - c1) / d02;
        auto prim = [&](double t) {
            // antiderivative of f0 + c1*(t-x0) + c2*(t-x0)(t-x1)
            const double u = t - x0;
            return f0 * t + c1 * u * u / 2.0 + c2 * u * u * (2.0 * u - 3.0 * (x1 - x0)) / 6.0;
        };
        total += prim(x[i + 1]) - prim(x[i]);
    }
    return total;
}

std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> f) {
    const std::size_t n = x.size();
    if (n != f.size() || n < 2) throw std::invalid_argument("cumulative_integral: need >= 2 samples");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t a = (i == 0) ? 0 : i - 1;
        if (n >= 3 && a + 2 >= n) a = n - 3;
        double piece;
        if (n == 2) {
            piece = 0.5 * (f[0] + f[1]) * (x[1] - x[0]);
        } else {
            const double x0 = x[a], x1 = x[a + 1], x2 = x[a + 2];
            const double f0 = f[a], f1 = f[a + 1], f2 = f[a + 2];
            const double c1 = (f1 - f0) / (x1 - x0);
            const double c2 = ((f2 - f1) / (x2 - x1) - c1) / (x2 - x0);
            auto prim = [&](double t) {
                const double u = t - x0;
                return f0 * t + c1 * u * u / 2.0 + c2 * u * u * (2.0 * u - 3.0 * (x1 - x0)) / 6.0;
            };
            piece = prim(x[i + 1]) - prim(x[i]);
        }
        out[i + 1] = out[i] + piece;
    }
    return out;
}

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    if (n != y_.size() || n < 2) throw std::invalid_argument("CubicSpline: need >= 2 nodes");
    m_.assign(n, 0.0);
    if (n == 2) return;
    // Natural spline: tridiagonal system for interior second derivatives.
    std::vector<double> diag(n - 2), rhs(n - 2), lower(n - 2, 0.0), upper(n - 2, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i - 1] = 2.0 * (h0 + h1);
        if (i > 1) lower[i - 1] = h0;
        if (i + 2 < n) upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    solve_tridiagonal(lower, diag, upper, rhs);
    for (std::size_t i = 1; i + 1 < n; ++i) m_[i] = rhs[i - 1];
}

double CubicSpline::operator()(double xq) const {
    const std::size_t n = x_.size();
    xq = std::clamp(xq, x_.front(), x_.back());
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= n) i = n - 2;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - xq) / h;
    const double b = (xq - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double xq) const {
    const std::size_t n = x_.size();
    xq = std::clamp(xq, x_.front(), x_.back());
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= n) i = n - 2;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - xq) / h;
    const double b = (xq - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration on Legendre polynomials, nodes on [-1, 1].
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // cos(...) enumerates roots in descending order; store ascending.
        nodes[n - 1 - i] = 0.5 * (b - a) * x + 0.5 * (a + b);
        weights[n - 1 - i] = (b - a) / ((1.0 - x * x) * pp * pp);
    }
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace conicricci

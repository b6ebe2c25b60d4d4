#include "conicricci/model_cone.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conicricci/numerics.hpp"

namespace conicricci {

namespace {

constexpr double kPi = std::numbers::pi;

const bool gsl_handler_disabled = [] {
    gsl_set_error_handler_off();
    return true;
}();

/// Integral of s^a over [s1, s2], with the a = -1 case handled by log.
double power_integral(double s1, double s2, double a) {
    if (std::abs(a + 1.0) < 1e-12) return std::log(s2 / s1);
    return (std::pow(s2, a + 1.0) - std::pow(s1, a + 1.0)) / (a + 1.0);
}

/// Integral of s^a * (s - s1) over [s1, s2] (the linear-interpolation moment).
double power_moment(double s1, double s2, double a) {
    return power_integral(s1, s2, a + 1.0) - s1 * power_integral(s1, s2, a);
}

}  // namespace

double bessel_i_scaled(double nu, double x) {
    (void)gsl_handler_disabled;
    gsl_sf_result res;
    const int status = (nu == 0.0) ? gsl_sf_bessel_I0_scaled_e(x, &res)
                                   : gsl_sf_bessel_Inu_scaled_e(nu, x, &res);
    if (status == GSL_EUNDRFLW) return 0.0;
    if (status != 0)
        throw std::runtime_error("bessel_i_scaled: GSL failure nu=" + std::to_string(nu) +
                                 " x=" + std::to_string(x));
    return res.val;
}

void PolarField::validate() const {
    if (r.size() < 2 || y.empty()) throw std::invalid_argument("PolarField: empty grid");
    if (values.size() != r.size() * y.size())
        throw std::invalid_argument("PolarField: values size mismatch");
    if (!(r.front() > 0.0)) throw std::invalid_argument("PolarField: r[0] must be positive");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw std::invalid_argument("PolarField: r must be increasing");
}

PolarField PolarField::log_grid(const ModelCone& cone, std::size_t nr, std::size_t ny,
                                double r_min_fraction) {
    cone.validate();
    if (nr < 2 || ny < 1) throw std::invalid_argument("PolarField: grid too small");
    PolarField f;
    f.r.resize(nr);
    const double lr0 = std::log(r_min_fraction * cone.r_max);
    const double lr1 = std::log(cone.r_max);
    for (std::size_t i = 0; i < nr; ++i)
        f.r[i] = std::exp(lr0 + (lr1 - lr0) * static_cast<double>(i) / (nr - 1));
    f.r.back() = cone.r_max;
    f.y.resize(ny);
    for (std::size_t j = 0; j < ny; ++j) f.y[j] = 2.0 * kPi * static_cast<double>(j) / ny;
    f.values.assign(nr * ny, 0.0);
    return f;
}

std::vector<std::pair<double, int>> indicial_roots(const ModelCone& cone, double max_value) {
    cone.validate();
    if (!(max_value > 0.0)) throw std::domain_error("indicial_roots: max_value must be positive");
    std::vector<std::pair<double, int>> roots;
    for (int j = 0;; ++j) {
        const double e = j / cone.beta;
        if (e > max_value) break;
        roots.emplace_back(e, j);
    }
    return roots;
}

std::vector<double> mode_poisson_solve(const ModelCone& cone, int mode,
                                       std::span<const double> r, std::span<const double> rhs,
                                       double outer_bc) {
    cone.validate();
    if (mode < 0) throw std::domain_error("mode_poisson_solve: mode must be nonnegative");
    const std::size_t n = r.size();
    if (n < 2 || rhs.size() != n) throw std::invalid_argument("mode_poisson_solve: bad samples");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(rhs[i]))
            throw std::invalid_argument("mode_poisson_solve: rhs must be bounded");
        if (!(r[i] > 0.0) || (i > 0 && !(r[i] > r[i - 1])))
            throw std::invalid_argument("mode_poisson_solve: grid must be positive increasing");
    }
    const double r_max = r[n - 1];
    const double nu = mode / cone.beta;

    // Variation of parameters against the homogeneous pair {r^nu, r^-nu}
    // (mode 0: {1, log r}); the bounded branch is selected analytically, so
    // no spurious dual solution can contaminate the tip behaviour.
    std::vector<double> u(n, 0.0);
    if (mode == 0) {
        // P(r) = int_0^r s f ds,  Q(r) = int_r^rmax log(s/rmax) s f ds
        std::vector<double> P(n, 0.0), Q(n, 0.0);
        P[0] = rhs[0] * r[0] * r[0] / 2.0;  // f ~ const below the first node
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double df = (rhs[i + 1] - rhs[i]) / (r[i + 1] - r[i]);
            P[i + 1] = P[i] + rhs[i] * power_integral(r[i], r[i + 1], 1.0) +
                       df * power_moment(r[i], r[i + 1], 1.0);
        }
        for (std::size_t i = n - 1; i-- > 0;) {
            // int s log(s/rmax) (f_i + df (s - s_i)) ds on [r_i, r_i+1]
            const double df = (rhs[i + 1] - rhs[i]) / (r[i + 1] - r[i]);
            auto log_int = [&](double p) {
                // int_{r_i}^{r_{i+1}} s^p log(s/rmax) ds by parts
                const double a = p + 1.0;
                const double t1 = (std::pow(r[i + 1], a) * std::log(r[i + 1] / r_max) -
                                   std::pow(r[i], a) * std::log(r[i] / r_max)) /
                                  a;
                return t1 - power_integral(r[i], r[i + 1], p) / a;
            };
            const double piece = rhs[i] * log_int(1.0) + df * (log_int(2.0) - r[i] * log_int(1.0));
            Q[i] = Q[i + 1] + piece;
        }
        for (std::size_t i = 0; i < n; ++i)
            u[i] = std::log(r[i] / r_max) * P[i] + Q[i] + outer_bc;
        return u;
    }

    // P(r) = int_0^r s^{nu+1} f ds,  Q(r) = int_r^rmax (s^{1-nu} - s^{1+nu} rmax^{-2nu}) f ds
    const double rm2nu = std::pow(r_max, -2.0 * nu);
    std::vector<double> P(n, 0.0), Q(n, 0.0);
    P[0] = rhs[0] * std::pow(r[0], nu + 2.0) / (nu + 2.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double df = (rhs[i + 1] - rhs[i]) / (r[i + 1] - r[i]);
        P[i + 1] = P[i] + rhs[i] * power_integral(r[i], r[i + 1], nu + 1.0) +
                   df * power_moment(r[i], r[i + 1], nu + 1.0);
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        const double df = (rhs[i + 1] - rhs[i]) / (r[i + 1] - r[i]);
        const double piece = rhs[i] * (power_integral(r[i], r[i + 1], 1.0 - nu) -
                                       rm2nu * power_integral(r[i], r[i + 1], 1.0 + nu)) +
                             df * (power_moment(r[i], r[i + 1], 1.0 - nu) -
                                   rm2nu * power_moment(r[i], r[i + 1], 1.0 + nu));
        Q[i] = Q[i + 1] + piece;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double rp = std::pow(r[i], nu);
        const double v = std::pow(r[i], -nu) - rp * rm2nu;
        u[i] = -(v * P[i] + rp * Q[i]) / (2.0 * nu) + outer_bc * rp / std::pow(r_max, nu);
    }
    return u;
}

double heat_kernel_eval(const ModelCone& cone, const HeatKernelConfig& cfg, double t, double r,
                        double y, double r2, double y2) {
    cone.validate();
    if (!(t > 0.0)) throw std::domain_error("heat_kernel_eval: t must be positive");
    if (!(r > 0.0) || !(r2 > 0.0))
        throw std::domain_error("heat_kernel_eval: radii must be positive");
    const double x = r * r2 / (2.0 * t);
    const double dy = y - y2;
    // All Bessel factors are exponentially scaled, so the Gaussian prefactor
    // collapses to exp(-(r - r2)^2 / 4t).
    double sum = bessel_i_scaled(0.0, x);
    bool converged = false;
    for (int ell = 1; ell <= cfg.max_angular_mode; ++ell) {
        const double term = bessel_i_scaled(ell / cone.beta, x);
        sum += 2.0 * term * std::cos(ell * dy);
        if (2.0 * term < cfg.series_tolerance) {  // I_nu decreases in nu
            converged = true;
            break;
        }
    }
    if (!converged)
        throw TruncationError("heat_kernel_eval: series not converged within mode cap L=" +
                              std::to_string(cfg.max_angular_mode));
    const double gauss = std::exp(-(r - r2) * (r - r2) / (4.0 * t));
    return gauss * sum / (4.0 * kPi * cone.beta * t);
}

namespace {

/// Radial mode kernel k_nu(t, r, r') = (2t)^{-1} exp(-(r-r')^2/4t) e^{-x} I_nu(x),
/// x = r r' / 2t; the heat semigroup acts modewise as f |-> int k_nu f r' dr'.
double radial_mode_kernel(double nu, double t, double ra, double rb) {
    const double x = ra * rb / (2.0 * t);
    const double g = std::exp(-(ra - rb) * (ra - rb) / (4.0 * t));
    return g * bessel_i_scaled(nu, x) / (2.0 * t);
}

}  // namespace

PolarField heat_apply(const ModelCone& cone, const HeatKernelConfig& cfg, double t,
                      const PolarField& field) {
    cone.validate();
    field.validate();
    if (!(t > 0.0)) throw std::domain_error("heat_apply: t must be positive");
    const std::size_t nr = field.nr(), ny = field.ny();
    const int max_mode = std::max(0, static_cast<int>(ny) / 2 - 1);

    // Angular decomposition (direct sums; grids stay small and this keeps the
    // evaluation order fixed for determinism).
    double scale = 0.0;
    for (double v : field.values) scale = std::max(scale, std::abs(v));
    std::vector<std::vector<double>> ac(max_mode + 1, std::vector<double>(nr, 0.0));
    std::vector<std::vector<double>> as(max_mode + 1, std::vector<double>(nr, 0.0));
    for (int ell = 0; ell <= max_mode; ++ell) {
        for (std::size_t i = 0; i < nr; ++i) {
            double sc = 0.0, ss = 0.0;
            for (std::size_t j = 0; j < ny; ++j) {
                sc += field.at(i, j) * std::cos(ell * field.y[j]);
                ss += field.at(i, j) * std::sin(ell * field.y[j]);
            }
            const double norm = (ell == 0) ? 1.0 / ny : 2.0 / ny;
            ac[ell][i] = norm * sc;
            as[ell][i] = norm * ss;
        }
    }

    PolarField out = field;
    std::fill(out.values.begin(), out.values.end(), 0.0);

    const double sigma = std::sqrt(2.0 * t);
    const double panel_width = std::min(2.0 * sigma, cone.r_max / 24.0);
    std::vector<double> nodes, weights;

    for (int ell = 0; ell <= max_mode; ++ell) {
        double amp = 0.0;
        for (std::size_t i = 0; i < nr; ++i)
            amp = std::max(amp, std::max(std::abs(ac[ell][i]), std::abs(as[ell][i])));
        if (amp <= 1e-14 * std::max(1.0, scale)) continue;

        const double nu = ell / cone.beta;
        const CubicSpline sc(field.r, ac[ell]);
        const CubicSpline ss(field.r, as[ell]);

        for (std::size_t i = 0; i < nr; ++i) {
            const double ri = field.r[i];
            const double lo = std::max(field.r.front() * 0.25, ri - 16.0 * sigma);
            const double hi = std::min(cone.r_max, ri + 16.0 * sigma);
            if (!(hi > lo)) continue;
            const int panels =
                std::min(400, std::max(1, static_cast<int>(std::ceil((hi - lo) / panel_width))));
            double vc = 0.0, vs = 0.0;
            for (int p = 0; p < panels; ++p) {
                const double a = lo + (hi - lo) * p / panels;
                const double b = lo + (hi - lo) * (p + 1) / panels;
                gauss_legendre(cfg.quadrature_nodes, a, b, nodes, weights);
                for (int q = 0; q < cfg.quadrature_nodes; ++q) {
                    const double rp = nodes[q];
                    const double k = radial_mode_kernel(nu, t, ri, rp) * rp * weights[q];
                    vc += k * sc(rp);
                    vs += k * ss(rp);
                }
            }
            for (std::size_t j = 0; j < ny; ++j)
                out.at(i, j) += vc * std::cos(ell * field.y[j]) + vs * std::sin(ell * field.y[j]);
        }
    }
    return out;
}

double polar_mass(const ModelCone& cone, const PolarField& field) {
    cone.validate();
    field.validate();
    const std::size_t nr = field.nr(), ny = field.ny();
    std::vector<double> radial(nr);
    double total = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nr; ++i) radial[i] = field.at(i, j) * field.r[i];
        double m = integrate_samples(field.r, radial);
        m += field.at(0, j) * field.r.front() * field.r.front() / 2.0;  // tip closure
        total += m;
    }
    return cone.beta * (2.0 * kPi / ny) * total;
}

ExpansionFit expansion_fit(const PolarField& field, const ModelCone& cone, double window_decades) {
    cone.validate();
    field.validate();
    const std::size_t nr = field.nr(), ny = field.ny();
    if (!(field.r.front() <= 1e-2 * field.r.back()))
        throw std::invalid_argument("expansion_fit: need at least two inner decades of r");

    const double r_window = field.r.front() * std::pow(10.0, window_decades);
    std::size_t nwin = 0;
    while (nwin < nr && field.r[nwin] <= r_window) ++nwin;
    if (nwin < 8) throw std::invalid_argument("expansion_fit: insufficient inner resolution");

    double scale = 0.0;
    for (double v : field.values) scale = std::max(scale, std::abs(v));
    const double noise_floor = 1e-12 * std::max(1.0, scale);

    std::vector<double> a0(nwin), a1c(nwin), a1s(nwin), amp1(nwin);
    for (std::size_t i = 0; i < nwin; ++i) {
        double s0 = 0.0, sc = 0.0, ssn = 0.0;
        for (std::size_t j = 0; j < ny; ++j) {
            s0 += field.at(i, j);
            sc += field.at(i, j) * std::cos(field.y[j]);
            ssn += field.at(i, j) * std::sin(field.y[j]);
        }
        a0[i] = s0 / ny;
        a1c[i] = 2.0 * sc / ny;
        a1s[i] = 2.0 * ssn / ny;
        amp1[i] = std::hypot(a1c[i], a1s[i]);
    }

    ExpansionFit fit;
    const auto quad = fit_const_plus_r2(std::span(field.r).first(nwin), a0);
    fit.a0 = quad.c0;

    double amax = 0.0;
    for (double a : amp1) amax = std::max(amax, std::abs(a));
    fit.mode1_above_noise = amax > noise_floor;
    if (fit.mode1_above_noise) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < nwin; ++i) {
            if (amp1[i] > noise_floor * 1e-2) {
                lx.push_back(std::log(field.r[i]));
                ly.push_back(std::log(amp1[i]));
            }
        }
        if (lx.size() >= 4) {
            const LineFit lf = fit_line(lx, ly);
            fit.mode1_exponent = lf.slope;
            double c = 0.0, s = 0.0;
            for (std::size_t i = 0; i < nwin; ++i) {
                const double rs = std::pow(field.r[i], fit.mode1_exponent);
                c += a1c[i] / rs;
                s += a1s[i] / rs;
            }
            fit.a11 = c / nwin;
            fit.a12 = s / nwin;
        } else {
            fit.mode1_above_noise = false;
        }
    }

    // Remainder after subtracting the constant and the fitted mode-1 term.
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < nwin; ++i) {
        double m = 0.0;
        const double rs = fit.mode1_above_noise ? std::pow(field.r[i], fit.mode1_exponent) : 0.0;
        for (std::size_t j = 0; j < ny; ++j) {
            double rem = field.at(i, j) - fit.a0;
            if (fit.mode1_above_noise)
                rem -= rs * (fit.a11 * std::cos(field.y[j]) + fit.a12 * std::sin(field.y[j]));
            m = std::max(m, std::abs(rem));
        }
        if (m > 10.0 * noise_floor) {
            lx.push_back(std::log(field.r[i]));
            ly.push_back(std::log(m));
        }
    }
    if (lx.size() >= 4) fit.remainder_exponent = fit_line(lx, ly).slope;
    return fit;
}

double scaling_residual(const ModelCone& cone, const HeatKernelConfig& cfg, double lambda,
                        std::span<const KernelSample> samples) {
    if (!(lambda > 0.0)) throw std::domain_error("scaling_residual: lambda must be positive");
    double worst = 0.0;
    for (const auto& s : samples) {
        const double base = heat_kernel_eval(cone, cfg, s.t, s.r, s.y, s.r2, s.y2);
        const double scaled = heat_kernel_eval(cone, cfg, lambda * lambda * s.t, lambda * s.r, s.y,
                                               lambda * s.r2, s.y2);
        worst = std::max(worst, std::abs(lambda * lambda * scaled - base));
    }
    return worst;
}

}  // namespace conicricci

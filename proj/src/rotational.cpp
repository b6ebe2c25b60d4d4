#include "conicricci/rotational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conicricci/diagnostics.hpp"
#include "conicricci/numerics.hpp"

namespace conicricci {

namespace {
constexpr double kPi = std::numbers::pi;
}

void RotationalState::validate() const {
    const std::size_t n = s.size();
    if (n < 5 || h.size() != n) throw std::invalid_argument("RotationalState: need >= 5 nodes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(s[i] > s[i - 1])) throw std::invalid_argument("RotationalState: s must be increasing");
    if (s.front() != 0.0) throw std::invalid_argument("RotationalState: s must start at 0");
    if (h.front() != 0.0 || h.back() != 0.0)
        throw std::invalid_argument("RotationalState: h must vanish exactly at the tips");
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (!(h[i] > 0.0)) throw std::invalid_argument("RotationalState: h must be positive between the tips");
    if (!(beta_tips.first > 0.0 && beta_tips.first <= 1.0 && beta_tips.second > 0.0 &&
          beta_tips.second <= 1.0))
        throw std::invalid_argument("RotationalState: tip parameters must lie in (0,1]");
}

void CylinderState::validate() const {
    if (w.size() < 5) throw std::invalid_argument("CylinderState: need >= 5 nodes");
    if (!(dx > 0.0)) throw std::invalid_argument("CylinderState: dx must be positive");
    if (!(beta_minus > 0.0 && beta_minus <= 1.0 && beta_plus > 0.0 && beta_plus <= 1.0))
        throw std::invalid_argument("CylinderState: tip parameters must lie in (0,1]");
}

// w_xx with Neumann ghosts w_x = +beta_minus at the left end, -beta_plus at
// the right end (the cone tips truncated off the grid).
static std::vector<double> second_derivative(const CylinderState& st) {
    const std::size_t n = st.n();
    const double h2 = st.dx * st.dx;
    std::vector<double> wxx(n);
    for (std::size_t i = 1; i + 1 < n; ++i)
        wxx[i] = (st.w[i - 1] - 2.0 * st.w[i] + st.w[i + 1]) / h2;
    wxx[0] = (2.0 * st.w[1] - 2.0 * st.w[0]) / h2 - 2.0 * st.beta_minus / st.dx;
    wxx[n - 1] = (2.0 * st.w[n - 2] - 2.0 * st.w[n - 1]) / h2 - 2.0 * st.beta_plus / st.dx;
    return wxx;
}

std::vector<double> cylinder_curvature(const CylinderState& st) {
    st.validate();
    std::vector<double> R = second_derivative(st);
    for (std::size_t i = 0; i < st.n(); ++i) R[i] = -2.0 * std::exp(-2.0 * st.w[i]) * R[i];
    return R;
}

double cylinder_area(const CylinderState& st) {
    st.validate();
    const std::size_t n = st.n();
    std::vector<double> x(n), e2w(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = st.x(i);
        e2w[i] = std::exp(2.0 * st.w[i]);
    }
    const double rm = std::exp(st.w.front()) / st.beta_minus;
    const double rp = std::exp(st.w.back()) / st.beta_plus;
    return 2.0 * kPi * integrate_samples(x, e2w) + kPi * st.beta_minus * rm * rm +
           kPi * st.beta_plus * rp * rp;
}

static std::vector<double> flow_rhs(const CylinderState& st, double rho) {
    std::vector<double> wxx = second_derivative(st);
    for (std::size_t i = 0; i < st.n(); ++i)
        wxx[i] = 0.5 * rho + std::exp(-2.0 * st.w[i]) * wxx[i];
    return wxx;
}

CylinderState cylinder_step(const CylinderState& st, double dt, double rho, FlowScheme scheme) {
    st.validate();
    if (dt == 0.0) return st;
    if (!(dt > 0.0)) throw std::invalid_argument("cylinder_step: dt must be nonnegative");
    const std::size_t n = st.n();
    CylinderState out = st;
    out.t = st.t + dt;

    switch (scheme) {
        case FlowScheme::semi_implicit: {
            // (I - dt e^{-2w^n} d_xx) w^{n+1} = w^n + dt rho/2 + boundary terms
            std::vector<double> diag(n), lower(n, 0.0), upper(n, 0.0), rhs(n);
            const double h2 = st.dx * st.dx;
            for (std::size_t i = 0; i < n; ++i) {
                const double g = dt * std::exp(-2.0 * st.w[i]) / h2;
                diag[i] = 1.0 + 2.0 * g;
                if (i > 0) lower[i] = -g;
                if (i + 1 < n) upper[i] = -g;
                rhs[i] = st.w[i] + 0.5 * dt * rho;
            }
            // Neumann folding: the ghost updates double the inner coupling and
            // contribute a constant flux term.
            upper[0] = -2.0 * dt * std::exp(-2.0 * st.w[0]) / h2;
            rhs[0] -= dt * std::exp(-2.0 * st.w[0]) * 2.0 * st.beta_minus / st.dx;
            lower[n - 1] = -2.0 * dt * std::exp(-2.0 * st.w[n - 1]) / h2;
            rhs[n - 1] -= dt * std::exp(-2.0 * st.w[n - 1]) * 2.0 * st.beta_plus / st.dx;
            solve_tridiagonal(lower, diag, upper, rhs);
            out.w = std::move(rhs);
            break;
        }
        case FlowScheme::explicit_euler: {
            const std::vector<double> k = flow_rhs(st, rho);
            for (std::size_t i = 0; i < n; ++i) out.w[i] = st.w[i] + dt * k[i];
            break;
        }
        case FlowScheme::rk4: {
            CylinderState tmp = st;
            const std::vector<double> k1 = flow_rhs(st, rho);
            for (std::size_t i = 0; i < n; ++i) tmp.w[i] = st.w[i] + 0.5 * dt * k1[i];
            const std::vector<double> k2 = flow_rhs(tmp, rho);
            for (std::size_t i = 0; i < n; ++i) tmp.w[i] = st.w[i] + 0.5 * dt * k2[i];
            const std::vector<double> k3 = flow_rhs(tmp, rho);
            for (std::size_t i = 0; i < n; ++i) tmp.w[i] = st.w[i] + dt * k3[i];
            const std::vector<double> k4 = flow_rhs(tmp, rho);
            for (std::size_t i = 0; i < n; ++i)
                out.w[i] = st.w[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            break;
        }
    }
    for (double v : out.w)
        if (!std::isfinite(v)) throw StepFailure("cylinder_step: nonfinite update", dt * 0.5);
    return out;
}

RotationalState to_rotational(const CylinderState& st) {
    st.validate();
    const std::size_t n = st.n();
    std::vector<double> ew(n), wx(n);
    for (std::size_t i = 0; i < n; ++i) ew[i] = std::exp(st.w[i]);
    for (std::size_t i = 1; i + 1 < n; ++i) wx[i] = (st.w[i + 1] - st.w[i - 1]) / (2.0 * st.dx);
    wx[0] = st.beta_minus;
    wx[n - 1] = -st.beta_plus;

    RotationalState rs;
    rs.t = st.t;
    rs.beta_tips = {st.beta_minus, st.beta_plus};
    rs.s.resize(n + 2);
    rs.h.resize(n + 2);
    rs.s[0] = 0.0;
    rs.h[0] = 0.0;
    rs.s[1] = ew[0] / st.beta_minus;  // exact-cone cap radius
    rs.h[1] = ew[0];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Hermite-Simpson arc increment of e^w over [x_i, x_{i+1}]
        const double wm = 0.5 * (st.w[i] + st.w[i + 1]) + st.dx * (wx[i] - wx[i + 1]) / 8.0;
        const double inc = st.dx / 6.0 * (ew[i] + 4.0 * std::exp(wm) + ew[i + 1]);
        rs.s[i + 2] = rs.s[i + 1] + inc;
        rs.h[i + 2] = ew[i + 1];
    }
    const double rp = ew[n - 1] / st.beta_plus;
    rs.s.back() = rs.s[n] + rp;
    rs.h.back() = 0.0;
    // interior positions: s[1..n] map to grid nodes 0..n-1
    return rs;
}

CylinderState from_rotational(const RotationalState& rs, std::size_t n, double r_trunc) {
    rs.validate();
    if (n < 9) throw std::invalid_argument("from_rotational: need >= 9 nodes");
    const double L = rs.length();
    if (!(r_trunc > 0.0 && 2.0 * r_trunc < L))
        throw std::invalid_argument("from_rotational: bad truncation radius");

    std::vector<double> sk, hk;
    for (std::size_t i = 1; i + 1 < rs.s.size(); ++i) {
        if (rs.s[i] >= r_trunc * (1.0 - 1e-12) && (L - rs.s[i]) >= r_trunc * (1.0 - 1e-12)) {
            sk.push_back(rs.s[i]);
            hk.push_back(rs.h[i]);
        }
    }
    if (sk.size() < 5) throw std::invalid_argument("from_rotational: too few nodes after truncation");

    std::vector<double> inv(sk.size());
    for (std::size_t i = 0; i < sk.size(); ++i) inv[i] = 1.0 / hk[i];
    std::vector<double> x = cumulative_integral(sk, inv);
    const double xc = x[x.size() / 2];
    std::vector<double> lnh(sk.size());
    for (std::size_t i = 0; i < sk.size(); ++i) {
        x[i] -= xc;
        lnh[i] = std::log(hk[i]);
    }
    const CubicSpline spline(x, lnh);

    CylinderState cs;
    cs.t = rs.t;
    cs.beta_minus = rs.beta_tips.first;
    cs.beta_plus = rs.beta_tips.second;
    cs.x0 = x.front();
    cs.dx = (x.back() - x.front()) / static_cast<double>(n - 1);
    cs.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) cs.w[i] = spline(cs.x0 + cs.dx * static_cast<double>(i));
    cs.w.front() = lnh.front();
    cs.w.back() = lnh.back();
    return cs;
}

CylinderState make_suspension_cylinder(double beta, double rho, std::size_t n, double r_trunc) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("suspension: beta in (0,1]");
    if (!(rho > 0.0)) throw std::invalid_argument("suspension: rho must be positive");
    const double a = std::sqrt(2.0 / rho);
    const double X = std::log(2.0 * a / r_trunc) / beta;
    CylinderState cs;
    cs.beta_minus = cs.beta_plus = beta;
    cs.x0 = -X;
    cs.dx = 2.0 * X / static_cast<double>(n - 1);
    cs.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = cs.x(i);
        cs.w[i] = std::log(a * beta) - std::log(std::cosh(beta * x));
    }
    return cs;
}

CylinderState make_spindle_cylinder(double beta_minus, double beta_plus, double area,
                                    std::size_t n, double r_trunc) {
    if (!(beta_minus > 0.0 && beta_minus <= 1.0 && beta_plus > 0.0 && beta_plus <= 1.0))
        throw std::invalid_argument("spindle: tip parameters in (0,1]");
    if (!(area > 0.0)) throw std::invalid_argument("spindle: area must be positive");
    const double a = 0.5 * (beta_minus - beta_plus);
    const double b = 0.5 * (beta_minus + beta_plus);
    double c = 0.0;
    CylinderState cs;
    cs.beta_minus = beta_minus;
    cs.beta_plus = beta_plus;
    for (int pass = 0; pass < 3; ++pass) {
        const double xm = (std::log(beta_minus * r_trunc) - b * std::log(2.0) - c) / beta_minus;
        const double xp = (b * std::log(2.0) + c - std::log(beta_plus * r_trunc)) / beta_plus;
        cs.x0 = xm;
        cs.dx = (xp - xm) / static_cast<double>(n - 1);
        cs.w.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = cs.x(i);
            cs.w[i] = a * x - b * std::log(std::cosh(x)) + c;
        }
        c += 0.5 * std::log(area / cylinder_area(cs));
    }
    return cs;
}

void perturb_cylinder(CylinderState& st, double amplitude, double center) {
    for (std::size_t i = 0; i < st.n(); ++i) {
        const double x = st.x(i) - center;
        st.w[i] += amplitude * std::exp(-0.5 * x * x);
    }
}

std::vector<double> curvature_profile(const RotationalState& rs) {
    rs.validate();
    const std::size_t n = rs.s.size();
    std::vector<double> R(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double xs[3] = {rs.s[i - 1], rs.s[i], rs.s[i + 1]};
        const auto w = fd_weights(rs.s[i], std::span(xs, 3), 2);
        const double hpp = w[0] * rs.h[i - 1] + w[1] * rs.h[i] + w[2] * rs.h[i + 1];
        R[i] = -2.0 * hpp / rs.h[i];
    }
    // Tip limits from the odd model h = beta s + c3 s^3 fitted on the first
    // interior nodes; R(0) = -12 c3 / beta.
    auto tip = [](double beta, std::span<const double> s, std::span<const double> h) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            num += (h[i] - beta * s[i]) * s[i] * s[i] * s[i];
            den += s[i] * s[i] * s[i] * s[i] * s[i] * s[i];
        }
        const double c3 = (den > 0.0) ? num / den : 0.0;
        return -12.0 * c3 / beta;
    };
    {
        const std::size_t m = std::min<std::size_t>(3, n - 2);
        std::vector<double> ss(rs.s.begin() + 1, rs.s.begin() + 1 + m);
        std::vector<double> hh(rs.h.begin() + 1, rs.h.begin() + 1 + m);
        R[0] = tip(rs.beta_tips.first, ss, hh);
    }
    {
        const std::size_t m = std::min<std::size_t>(3, n - 2);
        std::vector<double> ss(m), hh(m);
        const double L = rs.length();
        for (std::size_t i = 0; i < m; ++i) {
            ss[i] = L - rs.s[n - 2 - i];
            hh[i] = rs.h[n - 2 - i];
        }
        R[n - 1] = tip(rs.beta_tips.second, ss, hh);
    }
    return R;
}

RotationalState flow_step_rotational(const RotationalState& rs, double dt, double rho,
                                     FlowScheme scheme) {
    rs.validate();
    if (dt == 0.0) return rs;
    const double L = rs.length();
    const double r_trunc = std::max(rs.s[1], L - rs.s[rs.s.size() - 2]);
    const std::size_t n = std::max<std::size_t>(1601, 2 * rs.s.size());
    CylinderState cs = from_rotational(rs, n, r_trunc * 1.0000001);
    cs = cylinder_step(cs, dt, rho, scheme);
    return to_rotational(cs);
}

RotationalState resample_uniform_arclength(const RotationalState& rs, std::size_t n) {
    rs.validate();
    if (n < 9) throw std::invalid_argument("resample_uniform_arclength: need >= 9 nodes");
    const CubicSpline spline(rs.s, rs.h);
    RotationalState out;
    out.t = rs.t;
    out.beta_tips = rs.beta_tips;
    out.s.resize(n);
    out.h.resize(n);
    const double L = rs.length();
    const std::size_t m = rs.s.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = L * static_cast<double>(i) / static_cast<double>(n - 1);
        out.s[i] = s;
        if (s < rs.s[1]) {
            out.h[i] = s * rs.h[1] / rs.s[1];  // exact-cone cap
        } else if (s > rs.s[m - 2]) {
            out.h[i] = (L - s) * rs.h[m - 2] / (L - rs.s[m - 2]);
        } else {
            out.h[i] = spline(s);
        }
    }
    out.s.back() = L;
    out.h.front() = 0.0;
    out.h.back() = 0.0;
    return out;
}

RotationalState suspension_metric(double beta, double rho, std::size_t n_nodes) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("suspension: beta in (0,1]");
    if (!(rho > 0.0)) throw std::invalid_argument("suspension: rho must be positive");
    if (n_nodes < 5) throw std::invalid_argument("suspension: need >= 5 nodes");
    const double a = std::sqrt(2.0 / rho);
    RotationalState rs;
    rs.beta_tips = {beta, beta};
    rs.s.resize(n_nodes);
    rs.h.resize(n_nodes);
    const double L = kPi * a;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        rs.s[i] = L * static_cast<double>(i) / static_cast<double>(n_nodes - 1);
        rs.h[i] = beta * a * std::sin(rs.s[i] / a);
    }
    rs.h.front() = rs.h.back() = 0.0;
    return rs;
}

// -- Soliton shooting ---------------------------------------------------------

namespace {

struct ShotResult {
    double L = 0.0;
    double slope_end = 0.0;  // h'(L) (negative at a closing tip)
    bool closed = false;
};

// RK4 on h'' = -(rho/2) h - C h h' from h(0)=0, h'(0)=beta_tip until h
// returns to zero; the crossing is refined on the cubic Hermite interpolant.
ShotResult shoot(double beta_tip, double rho, double C, double ds, long max_steps,
                 std::vector<double>* s_out = nullptr, std::vector<double>* h_out = nullptr,
                 std::vector<double>* p_out = nullptr) {
    auto acc = [&](double h, double p) { return -0.5 * rho * h - C * h * p; };
    double s = 0.0, h = 0.0, p = beta_tip;
    auto push = [&](double sv, double hv, double pv) {
        if (s_out) {
            s_out->push_back(sv);
            h_out->push_back(hv);
            p_out->push_back(pv);
        }
    };
    push(s, h, p);
    ShotResult res;
    for (long k = 0; k < max_steps; ++k) {
        const double h0 = h, p0 = p;
        const double k1h = p0, k1p = acc(h0, p0);
        const double k2h = p0 + 0.5 * ds * k1p, k2p = acc(h0 + 0.5 * ds * k1h, p0 + 0.5 * ds * k1p);
        const double k3h = p0 + 0.5 * ds * k2p, k3p = acc(h0 + 0.5 * ds * k2h, p0 + 0.5 * ds * k2p);
        const double k4h = p0 + ds * k3p, k4p = acc(h0 + ds * k3h, p0 + ds * k3p);
        const double h1 = h0 + ds / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
        const double p1 = p0 + ds / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        const double s1 = s + ds;
        if (h1 <= 0.0 && s1 > 2.0 * ds) {
            // Hermite root of h on [s, s1]
            double lo = 0.0, hi = 1.0;
            auto hermite = [&](double u) {
                const double u2 = u * u, u3 = u2 * u;
                return (2.0 * u3 - 3.0 * u2 + 1.0) * h0 + (u3 - 2.0 * u2 + u) * ds * p0 +
                       (-2.0 * u3 + 3.0 * u2) * h1 + (u3 - u2) * ds * p1;
            };
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (hermite(mid) > 0.0 ? lo : hi) = mid;
            }
            const double u = 0.5 * (lo + hi);
            auto hermite_d = [&](double uu) {
                const double u2 = uu * uu;
                return ((6.0 * u2 - 6.0 * uu) * h0 + (3.0 * u2 - 4.0 * uu + 1.0) * ds * p0 +
                        (-6.0 * u2 + 6.0 * uu) * h1 + (3.0 * u2 - 2.0 * uu) * ds * p1) /
                       ds;
            };
            res.L = s + u * ds;
            res.slope_end = hermite_d(u);
            res.closed = true;
            push(res.L, 0.0, res.slope_end);
            return res;
        }
        h = h1;
        p = p1;
        s = s1;
        push(s, h, p);
    }
    return res;
}

}  // namespace

RotationalState SolitonProfile::as_state() const {
    RotationalState rs;
    rs.t = 0.0;
    rs.s = s;
    rs.h = h;
    rs.beta_tips = {beta_tip, beta_far};
    rs.h.front() = 0.0;
    rs.h.back() = 0.0;
    return rs;
}

SolitonProfile soliton_shoot(double beta_tip, double beta_far, double rho, double tol) {
    if (!(beta_tip > 0.0 && beta_tip <= 1.0 && beta_far > 0.0 && beta_far <= 1.0))
        throw std::invalid_argument("soliton_shoot: tip parameters in (0,1]");
    if (!(rho > 0.0)) throw std::invalid_argument("soliton_shoot: rho must be positive");

    const double a = std::sqrt(2.0 / rho);
    const double ds = kPi * a / 6000.0;
    const long max_steps = 80000;

    auto closure = [&](double C) {
        const ShotResult r = shoot(beta_tip, rho, C, ds, max_steps);
        if (!r.closed) throw ShootingFailure("soliton_shoot: profile failed to close at C=" +
                                             std::to_string(C));
        return std::abs(r.slope_end) - beta_far;
    };

    double C = 0.0;
    if (std::abs(beta_tip - beta_far) > 1e-14) {
        // |h'(L)| grows as C decreases through negative values (energy
        // E = h'^2/2 + rho h^2 / 4 satisfies E' = -C h h'^2), so bracket
        // accordingly and bisect.
        const double g0 = closure(0.0);
        double lo = 0.0, hi = 0.0;
        const double dir = (g0 < 0.0) ? -1.0 : 1.0;
        double step = 0.25;
        double gdir = g0;
        for (int k = 0; k < 60; ++k) {
            hi = dir * step;
            gdir = closure(hi);
            if (gdir * g0 < 0.0) break;
            step *= 2.0;
        }
        if (gdir * g0 >= 0.0)
            throw ShootingFailure("soliton_shoot: no closing C found; scan reached C=" +
                                  std::to_string(hi));
        double ga = g0;
        for (int it = 0; it < 200; ++it) {
            C = 0.5 * (lo + hi);
            const double gm = closure(C);
            if (gm == 0.0 || std::abs(hi - lo) < 1e-15 * (1.0 + std::abs(C))) break;
            if (ga * gm < 0.0) {
                hi = C;
            } else {
                lo = C;
                ga = gm;
            }
        }
    }

    std::vector<double> sv, hv, pv;
    const ShotResult fin = shoot(beta_tip, rho, C, ds, max_steps, &sv, &hv, &pv);
    if (!fin.closed) throw ShootingFailure("soliton_shoot: final profile failed to close");

    SolitonProfile prof;
    prof.C = C;
    prof.L = fin.L;
    prof.rho = rho;
    prof.beta_tip = beta_tip;
    prof.beta_far = std::abs(fin.slope_end);
    prof.s = std::move(sv);
    prof.h = std::move(hv);
    prof.h.front() = 0.0;
    prof.h.back() = 0.0;

    // f' = C h, mean-zero against dA = 2 pi h ds
    prof.f = cumulative_integral(prof.s, prof.h);
    for (double& v : prof.f) v *= C;
    std::vector<double> fh(prof.s.size());
    for (std::size_t i = 0; i < prof.s.size(); ++i) fh[i] = prof.f[i] * prof.h[i];
    const double mean = integrate_samples(prof.s, fh) / integrate_samples(prof.s, prof.h);
    for (double& v : prof.f) v -= mean;

    // independent residual oracle: mu and X computed from (h, f-from-potential)
    const SolitonResidual sr = soliton_residual(prof.as_state(), rho);
    prof.mu_norm = sr.mu_norm;
    prof.x_norm = sr.x_norm;
    if (sr.mu_norm > tol || sr.x_norm > tol)
        throw ShootingFailure("soliton_shoot: residual oracle failed: |mu|=" +
                              std::to_string(sr.mu_norm) + " |X|=" + std::to_string(sr.x_norm));
    return prof;
}

}  // namespace conicricci

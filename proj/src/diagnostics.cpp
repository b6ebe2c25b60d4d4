#include "conicricci/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>

#include "conicricci/cone_geometry.hpp"
#include "conicricci/numerics.hpp"

namespace conicricci {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One-sided derivative at the first node of (x, f) using a 5-point stencil.
double one_sided_derivative(std::span<const double> x, std::span<const double> f) {
    const std::size_t m = std::min<std::size_t>(5, x.size());
    const auto w = fd_weights(x[0], x.first(m), 1);
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i) d += w[i] * f[i];
    return d;
}

}  // namespace

// ---------------------------------------------------------------- areas / GB

double total_area(const RotationalState& state) {
    state.validate();
    return kTwoPi * integrate_samples(state.s, state.h);
}

double total_area(const MeshFlowState& state) { return total_mesh_area(state); }

double gauss_bonnet_residual(const RotationalState& state) {
    state.validate();
    // int K dA = -2 pi (h'(L) - h'(0)) with one-sided 5-point derivatives;
    // the conic masses close the identity against 2 pi chi(S^2).
    const std::size_t n = state.s.size();
    const double hp0 = one_sided_derivative(state.s, state.h);
    std::vector<double> sr(n), hr(n);
    for (std::size_t i = 0; i < n; ++i) {
        sr[i] = state.length() - state.s[n - 1 - i];
        hr[i] = state.h[n - 1 - i];
    }
    const double hpL = -one_sided_derivative(sr, hr);
    const double total_curvature = -kTwoPi * (hpL - hp0);
    double mass = 0.0;
    if (state.beta_tips.first < 1.0) mass += kTwoPi * (1.0 - state.beta_tips.first);
    if (state.beta_tips.second < 1.0) mass += kTwoPi * (1.0 - state.beta_tips.second);
    return std::abs(total_curvature + mass - kTwoPi * 2.0);
}

double gauss_bonnet_residual(const MeshFlowState& state) {
    state.validate();
    const ConicMesh& mesh = *state.mesh;
    const std::vector<double> lengths = current_edge_lengths(state);
    std::vector<double> angle_sum(mesh.num_vertices(), 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fc = mesh.faces()[f];
        const auto& fe = mesh.face_edges(f);
        // side a opposite fc[0] etc.
        const auto ang = triangle_angles(lengths[fe[0]], lengths[fe[1]], lengths[fe[2]]);
        for (int c = 0; c < 3; ++c) angle_sum[fc[c]] += ang[c];
    }
    double defect_mass = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        auto it = state.beta_current.find(v);
        const double target = (it != state.beta_current.end()) ? kTwoPi * it->second : kTwoPi;
        defect_mass += target - angle_sum[v];
        if (it != state.beta_current.end()) defect_mass += kTwoPi * (1.0 - it->second);
    }
    const double chi = mesh.euler_characteristic();
    return std::abs(defect_mass - kTwoPi * chi);
}

// ---------------------------------------------------------------- energy

double energy_F(const CylinderState& state, const CylinderState& background) {
    state.validate();
    background.validate();
    if (state.n() != background.n() || state.x0 != background.x0 || state.dx != background.dx)
        throw std::invalid_argument("energy_F: state and background must share the grid");
    const std::size_t n = state.n();
    std::vector<double> x(n), phi(n), phix(n), dir(n), pot(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = state.x(i);
        phi[i] = 2.0 * (state.w[i] - background.w[i]);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) phix[i] = (phi[i + 1] - phi[i - 1]) / (2.0 * state.dx);
    phix[0] = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * state.dx);
    phix[n - 1] = (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * state.dx);
    const std::vector<double> R0 = cylinder_curvature(background);
    for (std::size_t i = 0; i < n; ++i) {
        dir[i] = phix[i] * phix[i];
        pot[i] = 2.0 * R0[i] * phi[i] * std::exp(2.0 * background.w[i]);
    }
    return kTwoPi * (integrate_samples(x, dir) + integrate_samples(x, pot));
}

double energy_F(const MeshFlowState& state) {
    state.validate();
    const ConicMesh& mesh = *state.mesh;
    const std::vector<double>& l0 = mesh.background_lengths();

    double dirichlet = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fc = mesh.faces()[f];
        const auto& fe = mesh.face_edges(f);
        const double la = l0[fe[0]], lb = l0[fe[1]], lc = l0[fe[2]];
        // local embedding: A=(0,0), B=(lc,0), C from lb, la
        const double area = triangle_area(la, lb, lc);
        const double cx = (lb * lb + lc * lc - la * la) / (2.0 * lc);
        const double cy = 2.0 * area / lc;
        const double fa = state.phi[fc[0]], fb = state.phi[fc[1]], fcv = state.phi[fc[2]];
        // grad of the linear interpolant
        const double gx = (fb - fa) / lc;
        const double gy = (fcv - fa - gx * cx) / cy;
        dirichlet += (gx * gx + gy * gy) * area;
    }

    // int 2 R0 phi dA0 = 4 * sum defect0_i phi_i (curvature measure of the background)
    std::vector<double> angle_sum(mesh.num_vertices(), 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fc = mesh.faces()[f];
        const auto& fe = mesh.face_edges(f);
        const auto ang = triangle_angles(l0[fe[0]], l0[fe[1]], l0[fe[2]]);
        for (int c = 0; c < 3; ++c) angle_sum[fc[c]] += ang[c];
    }
    double pot = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        auto it = mesh.cone_beta().find(v);
        const double target = (it != mesh.cone_beta().end()) ? kTwoPi * it->second : kTwoPi;
        pot += (target - angle_sum[v]) * state.phi[v];
    }
    return dirichlet + 4.0 * pot;
}

double dissipation_integral(const CylinderState& state, double rho) {
    const std::vector<double> R = cylinder_curvature(state);
    const std::size_t n = state.n();
    std::vector<double> x(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = state.x(i);
        g[i] = (R[i] - rho) * (R[i] - rho) * std::exp(2.0 * state.w[i]);
    }
    double out = kTwoPi * integrate_samples(x, g);
    const double rm = std::exp(state.w.front()) / state.beta_minus;
    const double rp = std::exp(state.w.back()) / state.beta_plus;
    out += (R.front() - rho) * (R.front() - rho) * kPi * state.beta_minus * rm * rm;
    out += (R.back() - rho) * (R.back() - rho) * kPi * state.beta_plus * rp * rp;
    return out;
}

double dissipation_integral(const MeshFlowState& state, double rho) {
    const std::vector<double> R = discrete_curvature(state);
    const std::vector<double> A = dual_areas(state);
    double out = 0.0;
    for (std::size_t i = 0; i < R.size(); ++i) out += (R[i] - rho) * (R[i] - rho) * A[i];
    return out;
}

namespace {

double dissipation_check_impl(const std::vector<DiagnosticsRecord>& records,
                              const std::vector<double>& dissipation) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < records.size(); ++k) {
        const double dt = records[k + 1].t - records[k].t;
        if (!(dt > 0.0)) continue;
        const double lhs = (records[k + 1].energy_f - records[k].energy_f) / dt;
        const double rhs = -2.0 * 0.5 * (dissipation[k] + dissipation[k + 1]);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace

double energy_dissipation_check(const RotationalRunResult& run) {
    return dissipation_check_impl(run.trajectory.records, run.dissipation_integral);
}

double energy_dissipation_check(const MeshRunResult& run) {
    return dissipation_check_impl(run.trajectory.records, run.dissipation_integral);
}

// ---------------------------------------------------------------- entropy

namespace {

double entropy_from_samples(std::span<const double> R, std::span<const double> weight_dA,
                            double s) {
    double out = 0.0;
    for (std::size_t i = 0; i < R.size(); ++i) {
        const double arg = R[i] - s;
        if (!(arg > 0.0))
            throw std::domain_error("entropy: R - s <= 0 at node " + std::to_string(i));
        out += arg * std::log(arg) * weight_dA[i];
    }
    return out;
}

}  // namespace

double entropy(const CylinderState& state, double s) {
    const std::vector<double> R = cylinder_curvature(state);
    const std::size_t n = state.n();
    std::vector<double> x(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double arg = R[i] - s;
        if (!(arg > 0.0))
            throw std::domain_error("entropy: R - s <= 0 at node " + std::to_string(i));
        x[i] = state.x(i);
        g[i] = arg * std::log(arg) * std::exp(2.0 * state.w[i]);
    }
    double out = kTwoPi * integrate_samples(x, g);
    const double rm = std::exp(state.w.front()) / state.beta_minus;
    const double rp = std::exp(state.w.back()) / state.beta_plus;
    auto cap = [&](double Rv, double area) {
        const double arg = Rv - s;
        return arg * std::log(arg) * area;
    };
    out += cap(R.front(), kPi * state.beta_minus * rm * rm);
    out += cap(R.back(), kPi * state.beta_plus * rp * rp);
    return out;
}

double entropy(const RotationalState& state, double s) {
    state.validate();
    const std::vector<double> R = curvature_profile(state);
    const std::size_t n = state.s.size();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double arg = R[i] - s;
        if (!(arg > 0.0))
            throw std::domain_error("entropy: R - s <= 0 at node " + std::to_string(i));
        g[i] = arg * std::log(arg) * kTwoPi * state.h[i];
    }
    return integrate_samples(state.s, g);
}

double entropy(const MeshFlowState& state, double s) {
    const std::vector<double> R = discrete_curvature(state);
    const std::vector<double> A = dual_areas(state);
    return entropy_from_samples(R, A, s);
}

double entropy_dissipation_integral(const CylinderState& state, double rho, double s) {
    return entropy_dissipation_integral(resample_uniform_arclength(to_rotational(state), 3001),
                                        rho, s);
}

double entropy_dissipation_integral(const RotationalState& state, double rho, double s) {
    state.validate();
    const std::size_t n = state.s.size();
    // R and h' by 5-point interior stencils, as in soliton_residual
    std::vector<double> R(n, 0.0), hp(n, 0.0);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const auto xs = std::span(state.s).subspan(i - 2, 5);
        const auto w2 = fd_weights(state.s[i], xs, 2);
        const auto w1 = fd_weights(state.s[i], xs, 1);
        double hpp = 0.0, hp1 = 0.0;
        for (int k = 0; k < 5; ++k) {
            hpp += w2[k] * state.h[i - 2 + k];
            hp1 += w1[k] * state.h[i - 2 + k];
        }
        R[i] = -2.0 * hpp / state.h[i];
        hp[i] = hp1;
    }
    const std::vector<double> R3 = curvature_profile(state);
    R[0] = R3[0];
    R[1] = R3[1];
    R[n - 2] = R3[n - 2];
    R[n - 1] = R3[n - 1];

    std::vector<double> grhs(n);
    for (std::size_t i = 0; i < n; ++i) grhs[i] = (R[i] - rho) * state.h[i];
    const std::vector<double> hfx = cumulative_integral(state.s, grhs);

    std::vector<double> integrand(n, 0.0);
    for (std::size_t i = 3; i + 3 < n; ++i) {
        if (!(R[i] - s > 0.0))
            throw std::domain_error("entropy dissipation: R - s <= 0 at node " +
                                    std::to_string(i));
        if (std::abs(R[i]) < 1e-10)
            throw std::domain_error("entropy dissipation: |R| below floor at node " +
                                    std::to_string(i));
        const double fp = hfx[i] / state.h[i];
        const double ratio = hp[i] / state.h[i];
        const double mu = std::sqrt(2.0) * 0.5 * std::abs((R[i] - rho) - 2.0 * ratio * fp);
        const auto xs = std::span(state.s).subspan(i - 2, 5);
        const auto w1 = fd_weights(state.s[i], xs, 1);
        double Rp = 0.0;
        for (int k = 0; k < 5; ++k) Rp += w1[k] * R[i - 2 + k];
        const double X = std::abs(Rp + R[i] * fp);
        integrand[i] = (2.0 * mu * mu + X * X / R[i]) * kTwoPi * state.h[i];
    }
    return integrate_samples(state.s, integrand);
}

double entropy_derivative_check(const RotationalRunResult& run) {
    const auto& rec = run.trajectory.records;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
        const double dt = rec[k + 1].t - rec[k].t;
        if (!(dt > 0.0)) continue;
        const double d0 = run.entropy_dissipation[k], d1 = run.entropy_dissipation[k + 1];
        if (!(d0 == d0) || !(d1 == d1)) continue;  // skip records where the integrand was invalid
        const double lhs = (rec[k + 1].entropy_n - rec[k].entropy_n) / dt;
        const double rhs = -0.5 * (d0 + d1);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// ---------------------------------------------------------------- potential

PotentialResult potential_solve(const CylinderState& state, double rho,
                                double compatibility_tol) {
    state.validate();
    const std::vector<double> R = cylinder_curvature(state);
    const std::size_t n = state.n();
    std::vector<double> x(n), integrand(n), e2w(n);
    double abs_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = state.x(i);
        e2w[i] = std::exp(2.0 * state.w[i]);
        integrand[i] = e2w[i] * (R[i] - rho);
        abs_scale += std::abs(integrand[i]) * state.dx;
    }
    const std::vector<double> cum = cumulative_integral(x, integrand);
    const double rm = std::exp(state.w.front()) / state.beta_minus;
    const double rp = std::exp(state.w.back()) / state.beta_plus;
    const double flux0 = state.beta_minus * rm * rm * (R.front() - rho) / 2.0;
    const double fluxL = state.beta_plus * rp * rp * (R.back() - rho) / 2.0;
    const double compat = kTwoPi * (flux0 + cum.back() + fluxL);
    if (std::abs(compat) > compatibility_tol * std::max(1.0, kTwoPi * abs_scale))
        throw std::invalid_argument("potential_solve: int (R - rho) dA = " +
                                    std::to_string(compat) + " violates compatibility");
    std::vector<double> fx(n);
    for (std::size_t i = 0; i < n; ++i) fx[i] = flux0 + cum[i];

    PotentialResult res;
    res.f = cumulative_integral(x, fx);
    // mean-zero against dA
    std::vector<double> fw(n);
    for (std::size_t i = 0; i < n; ++i) fw[i] = res.f[i] * e2w[i];
    const double mean = integrate_samples(x, fw) / integrate_samples(x, e2w);
    for (double& v : res.f) v -= mean;
    for (std::size_t i = 0; i < n; ++i)
        res.grad_f_max = std::max(res.grad_f_max, std::abs(fx[i]) / std::exp(state.w[i]));
    res.residual = std::abs(compat);
    return res;
}

PotentialResult potential_solve(const RotationalState& state, double rho,
                                double compatibility_tol) {
    state.validate();
    const std::vector<double> R = curvature_profile(state);
    const std::size_t n = state.s.size();
    std::vector<double> g(n);
    double abs_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = (R[i] - rho) * state.h[i];
        abs_scale += std::abs(g[i]);
    }
    const std::vector<double> hfx = cumulative_integral(state.s, g);  // h f'
    const double compat = kTwoPi * hfx.back();
    if (std::abs(compat) > compatibility_tol * std::max(1.0, kTwoPi * abs_scale))
        throw std::invalid_argument("potential_solve: compatibility violated: " +
                                    std::to_string(compat));
    std::vector<double> fp(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) fp[i] = hfx[i] / state.h[i];
    // tip limits: h f' ~ (R0 - rho) h^2 s / (2 h) -> 0
    fp[0] = 0.0;
    fp[n - 1] = 0.0;

    PotentialResult res;
    res.f = cumulative_integral(state.s, fp);
    std::vector<double> fw(n);
    for (std::size_t i = 0; i < n; ++i) fw[i] = res.f[i] * state.h[i];
    const double mean = integrate_samples(state.s, fw) / integrate_samples(state.s, state.h);
    for (double& v : res.f) v -= mean;
    for (double v : fp) res.grad_f_max = std::max(res.grad_f_max, std::abs(v));
    res.residual = std::abs(compat);
    return res;
}

// ---------------------------------------------------------------- soliton residuals

SolitonResidual soliton_residual(const CylinderState& state, double rho) {
    // second differences of w on the graded conformal grid lose all accuracy
    // near the tips; measure in the uniform arc-length gauge instead
    return soliton_residual(resample_uniform_arclength(to_rotational(state), 3001), rho);
}

SolitonResidual soliton_residual(const RotationalState& state, double rho) {
    state.validate();
    const std::size_t n = state.s.size();
    // High-order interior stencils keep the oracle noise well below the
    // shooting solver's tolerance.
    std::vector<double> R(n, 0.0), hp(n, 0.0);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const auto xs = std::span(state.s).subspan(i - 2, 5);
        const auto w2 = fd_weights(state.s[i], xs, 2);
        const auto w1 = fd_weights(state.s[i], xs, 1);
        double hpp = 0.0, hp1 = 0.0;
        for (int k = 0; k < 5; ++k) {
            hpp += w2[k] * state.h[i - 2 + k];
            hp1 += w1[k] * state.h[i - 2 + k];
        }
        R[i] = -2.0 * hpp / state.h[i];
        hp[i] = hp1;
    }
    // fill edges with the 3-point profile so the quadrature has full data
    const std::vector<double> R3 = curvature_profile(state);
    R[0] = R3[0];
    R[1] = R3[1];
    R[n - 2] = R3[n - 2];
    R[n - 1] = R3[n - 1];

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = (R[i] - rho) * state.h[i];
    const std::vector<double> hfx = cumulative_integral(state.s, g);

    SolitonResidual res;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const double fp = hfx[i] / state.h[i];
        const double ratio = hp[i] / state.h[i];
        const double mu = std::sqrt(2.0) * 0.5 * std::abs((R[i] - rho) - 2.0 * ratio * fp);
        const auto xs = std::span(state.s).subspan(i - 2, 5);
        const auto w1 = fd_weights(state.s[i], xs, 1);
        double Rp = 0.0;
        for (int k = 0; k < 5; ++k) Rp += w1[k] * R[i - 2 + k];
        const double X = std::abs(Rp + R[i] * fp);
        res.mu_norm = std::max(res.mu_norm, mu);
        res.x_norm = std::max(res.x_norm, X);
    }
    return res;
}

// ---------------------------------------------------------------- harnack

HarnackReport harnack_check(const RotationalState& state, int n_samples, std::uint64_t seed) {
    state.validate();
    const std::vector<double> R = curvature_profile(state);
    HarnackReport rep;
    for (double v : R)
        if (!(v > 0.0)) return rep;  // not applicable
    rep.applicable = true;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(1, state.s.size() - 2);
    rep.samples = n_samples;
    for (int k = 0; k < n_samples; ++k) {
        const std::size_t ix = pick(rng);
        const double radius = 1.0 / (8.0 * std::sqrt(R[ix]));
        for (std::size_t iy = 0; iy < state.s.size(); ++iy) {
            if (std::abs(state.s[iy] - state.s[ix]) > radius) continue;
            ++rep.pairs_checked;
            const double ratio = R[iy] / R[ix];
            rep.worst_ratio = std::min(rep.worst_ratio, ratio);
            if (ratio < 0.5 - 1e-12) ++rep.violations;
        }
    }
    return rep;
}

HarnackReport harnack_check(const MeshFlowState& state, int n_samples, std::uint64_t seed) {
    state.validate();
    const std::vector<double> R = discrete_curvature(state);
    HarnackReport rep;
    for (double v : R)
        if (!(v > 0.0)) return rep;
    rep.applicable = true;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, state.mesh->num_vertices() - 1);
    rep.samples = n_samples;
    for (int k = 0; k < n_samples; ++k) {
        const int v = pick(rng);
        const double radius = 1.0 / (8.0 * std::sqrt(R[v]));
        const std::vector<double> dist = mesh_distances(state, v);
        for (int u = 0; u < state.mesh->num_vertices(); ++u) {
            if (dist[u] > radius) continue;
            ++rep.pairs_checked;
            const double ratio = R[u] / R[v];
            rep.worst_ratio = std::min(rep.worst_ratio, ratio);
            if (ratio < 0.5 - 1e-12) ++rep.violations;
        }
    }
    return rep;
}

// ---------------------------------------------------------------- R_min comparison

RminReport rmin_track(const std::vector<DiagnosticsRecord>& records, double rho,
                      double tolerance) {
    RminReport rep;
    if (records.empty()) return rep;
    if (rho <= 0.0) {
        for (std::size_t k = 0; k + 1 < records.size(); ++k) {
            const double drop = records[k].r_min - records[k + 1].r_min;
            if (drop > tolerance) {
                ++rep.violations;
                rep.max_violation = std::max(rep.max_violation, drop);
            }
        }
        return rep;
    }
    double r = records.front().r_min;
    rep.comparison.push_back(r);
    for (std::size_t k = 0; k + 1 < records.size(); ++k) {
        const double dt = records[k + 1].t - records[k].t;
        const int sub = 32;
        const double h = dt / sub;
        for (int m = 0; m < sub; ++m) {
            auto f = [&](double v) { return v * (v - rho); };
            const double k1 = f(r);
            const double k2 = f(r + 0.5 * h * k1);
            const double k3 = f(r + 0.5 * h * k2);
            const double k4 = f(r + h * k3);
            r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        rep.comparison.push_back(r);
        const double gap = r - records[k + 1].r_min;
        if (gap > tolerance) {
            ++rep.violations;
            rep.max_violation = std::max(rep.max_violation, gap);
        }
    }
    return rep;
}

// ---------------------------------------------------------------- noncollapsing

double noncollapsing_check(const MeshFlowState& state, int n_centers, std::uint64_t seed) {
    state.validate();
    const std::vector<double> R = discrete_curvature(state);
    const double r_max = *std::max_element(R.begin(), R.end());
    if (!(r_max > 0.0)) throw std::domain_error("noncollapsing_check: R_max must be positive");
    const double radius = 1.0 / std::sqrt(r_max);
    const std::vector<double> A = dual_areas(state);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, state.mesh->num_vertices() - 1);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_centers; ++k) {
        const int c = pick(rng);
        const std::vector<double> dist = mesh_distances(state, c);
        double ball = 0.0;
        for (int v = 0; v < state.mesh->num_vertices(); ++v)
            if (dist[v] <= radius) ball += A[v];
        worst = std::min(worst, ball * r_max);
    }
    return worst;
}

double noncollapsing_check(const RotationalState& state, int n_centers, std::uint64_t seed,
                           int sectors) {
    const MeshFlowState mesh_state = revolution_mesh_state(state, sectors);
    return noncollapsing_check(mesh_state, n_centers, seed);
}

MeshFlowState revolution_mesh_state(const RotationalState& state, int sectors) {
    state.validate();
    if (sectors < 8) throw std::invalid_argument("revolution_mesh_state: need >= 8 sectors");
    const std::size_t n = state.s.size();
    // decimate interior rings to keep the complex small
    std::vector<std::size_t> keep;
    const std::size_t target = 140;
    const std::size_t stride = std::max<std::size_t>(1, (n - 2) / target);
    for (std::size_t i = 1; i + 1 < n; i += stride) keep.push_back(i);
    if (keep.back() != n - 2) keep.push_back(n - 2);

    ConicMesh::Builder b;
    const int apex0 = b.add_vertex();
    std::vector<std::vector<int>> ring(keep.size());
    for (auto& row : ring) {
        row.resize(sectors);
        for (int j = 0; j < sectors; ++j) row[j] = b.add_vertex();
    }
    const int apex1 = b.add_vertex();

    auto chord = [&](double h) { return 2.0 * h * std::sin(kPi / sectors); };
    // apex fans
    for (int j = 0; j < sectors; ++j) {
        const int jn = (j + 1) % sectors;
        b.add_face(apex0, ring[0][j], ring[0][jn]);
        b.set_length(apex0, ring[0][j], state.s[keep[0]]);
        b.set_length(ring[0][j], ring[0][jn], chord(state.h[keep[0]]));
    }
    for (std::size_t k = 0; k + 1 < keep.size(); ++k) {
        const double ds = state.s[keep[k + 1]] - state.s[keep[k]];
        const double c0 = chord(state.h[keep[k]]);
        const double c1 = chord(state.h[keep[k + 1]]);
        const double diag = std::hypot(ds, 0.5 * (c0 + c1));
        for (int j = 0; j < sectors; ++j) {
            const int jn = (j + 1) % sectors;
            b.add_face(ring[k][j], ring[k + 1][j], ring[k + 1][jn]);
            b.add_face(ring[k][j], ring[k + 1][jn], ring[k][jn]);
            b.set_length(ring[k][j], ring[k + 1][j], ds);
            b.set_length(ring[k][j], ring[k + 1][jn], diag);
            b.set_length(ring[k + 1][j], ring[k + 1][jn], c1);
        }
    }
    const std::size_t last = keep.size() - 1;
    for (int j = 0; j < sectors; ++j) {
        const int jn = (j + 1) % sectors;
        b.add_face(apex1, ring[last][jn], ring[last][j]);
        b.set_length(apex1, ring[last][j], state.length() - state.s[keep[last]]);
    }
    if (state.beta_tips.first < 1.0) b.set_cone(apex0, state.beta_tips.first);
    if (state.beta_tips.second < 1.0) b.set_cone(apex1, state.beta_tips.second);

    MeshFlowState out;
    out.mesh = std::make_shared<ConicMesh>(b.build(0.2));  // coarse polygonal tolerance
    out.phi.assign(out.mesh->num_vertices(), 0.0);
    out.t = state.t;
    out.beta_current = out.mesh->cone_beta();
    return out;
}

// ---------------------------------------------------------------- records

double advance_shift(double s, double rho, double dt, int substeps) {
    if (s == 0.0) return 0.0;
    const double h = dt / substeps;
    for (int m = 0; m < substeps; ++m) {
        auto f = [&](double v) { return v * (v - rho); };
        const double k1 = f(s);
        const double k2 = f(s + 0.5 * h * k1);
        const double k3 = f(s + 0.5 * h * k2);
        const double k4 = f(s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return s;
}

DiagnosticsRecord make_record(const CylinderState& state, const RecordContext& ctx) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.rho = ctx.rho;
    rec.area = cylinder_area(state);
    // curvature diagnostics live in the uniform arc-length gauge
    const RotationalState rs = resample_uniform_arclength(to_rotational(state), 3001);
    const std::vector<double> R = curvature_profile(rs);
    rec.r_min = *std::min_element(R.begin(), R.end());
    rec.r_max = *std::max_element(R.begin(), R.end());
    rec.s_shift = ctx.s_shift;
    rec.gauss_bonnet_residual = gauss_bonnet_residual(rs);
    if (ctx.background != nullptr) {
        rec.energy_f = energy_F(state, *ctx.background);
        rec.phi_min = std::numeric_limits<double>::infinity();
        rec.phi_max = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < state.n(); ++i) {
            const double phi = 2.0 * (state.w[i] - ctx.background->w[i]);
            rec.phi_min = std::min(rec.phi_min, phi);
            rec.phi_max = std::max(rec.phi_max, phi);
        }
    }
    try {
        rec.entropy_n = entropy(rs, ctx.s_shift);
    } catch (const std::domain_error&) {
        rec.entropy_n = std::numeric_limits<double>::quiet_NaN();
    }
    try {
        const PotentialResult pot = potential_solve(rs, ctx.rho, 1e-3);
        rec.grad_f_max = pot.grad_f_max;
    } catch (const std::exception&) {
        rec.grad_f_max = std::numeric_limits<double>::quiet_NaN();
    }
    const SolitonResidual sr = soliton_residual(rs, ctx.rho);
    rec.mu_norm = sr.mu_norm;
    rec.x_norm = sr.x_norm;
    return rec;
}

DiagnosticsRecord make_record(const MeshFlowState& state, const RecordContext& ctx) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.rho = ctx.rho;
    rec.area = total_mesh_area(state);
    const std::vector<double> R = discrete_curvature(state);
    rec.r_min = *std::min_element(R.begin(), R.end());
    rec.r_max = *std::max_element(R.begin(), R.end());
    rec.s_shift = ctx.s_shift;
    rec.gauss_bonnet_residual = gauss_bonnet_residual(state);
    rec.energy_f = energy_F(state);
    rec.phi_min = *std::min_element(state.phi.begin(), state.phi.end());
    rec.phi_max = *std::max_element(state.phi.begin(), state.phi.end());
    try {
        rec.entropy_n = entropy(state, ctx.s_shift);
    } catch (const std::domain_error&) {
        rec.entropy_n = std::numeric_limits<double>::quiet_NaN();
    }
    try {
        const PotentialResult pot = potential_solve(state, ctx.rho, 1e-3);
        rec.grad_f_max = pot.grad_f_max;
    } catch (const std::invalid_argument&) {
        rec.grad_f_max = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

}  // namespace conicricci

#include "conicricci/conformal_flow.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "conicricci/diagnostics.hpp"
#include "conicricci/numerics.hpp"

namespace conicricci {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void MeshFlowState::validate() const {
    if (!mesh) throw std::invalid_argument("MeshFlowState: null mesh");
    if (phi.size() != static_cast<std::size_t>(mesh->num_vertices()))
        throw std::invalid_argument("MeshFlowState: phi size mismatch");
    for (double v : phi)
        if (!std::isfinite(v)) throw std::invalid_argument("MeshFlowState: nonfinite phi");
    for (const auto& [v, beta] : beta_current)
        if (!(beta > 0.0 && beta < 1.0))
            throw std::invalid_argument("MeshFlowState: beta_current out of (0,1)");
}

MeshFlowState MeshFlowState::initial(std::shared_ptr<const ConicMesh> mesh) {
    MeshFlowState st;
    st.mesh = std::move(mesh);
    st.phi.assign(st.mesh->num_vertices(), 0.0);
    st.beta_current = st.mesh->cone_beta();
    return st;
}

std::vector<double> current_edge_lengths(const MeshFlowState& state) {
    const ConicMesh& mesh = *state.mesh;
    std::vector<double> l(mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& [a, b] = mesh.edges()[e];
        l[e] = std::exp(0.5 * (state.phi[a] + state.phi[b])) * mesh.background_lengths()[e];
    }
    return l;
}

std::vector<double> current_face_areas(const MeshFlowState& state) {
    const ConicMesh& mesh = *state.mesh;
    const std::vector<double> l = current_edge_lengths(state);
    std::vector<double> areas(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fe = mesh.face_edges(f);
        areas[f] = triangle_area(l[fe[0]], l[fe[1]], l[fe[2]]);
    }
    return areas;
}

std::vector<double> dual_areas(const MeshFlowState& state) {
    const ConicMesh& mesh = *state.mesh;
    const std::vector<double> areas = current_face_areas(state);
    std::vector<double> dual(mesh.num_vertices(), 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f)
        for (int c = 0; c < 3; ++c) dual[mesh.faces()[f][c]] += areas[f] / 3.0;
    return dual;
}

std::vector<double> discrete_curvature(const MeshFlowState& state) {
    state.validate();
    const ConicMesh& mesh = *state.mesh;
    const std::vector<double> l = current_edge_lengths(state);
    std::vector<double> angle_sum(mesh.num_vertices(), 0.0);
    std::vector<double> dual(mesh.num_vertices(), 0.0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fc = mesh.faces()[f];
        const auto& fe = mesh.face_edges(f);
        const double la = l[fe[0]], lb = l[fe[1]], lc = l[fe[2]];
        if (!(la + lb > lc && lb + lc > la && lc + la > lb))
            throw std::domain_error("discrete_curvature: degenerate face " + std::to_string(f));
        const auto ang = triangle_angles(la, lb, lc);
        const double area = triangle_area(la, lb, lc);
        for (int c = 0; c < 3; ++c) {
            angle_sum[fc[c]] += ang[c];
            dual[fc[c]] += area / 3.0;
        }
    }
    std::vector<double> R(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        auto it = state.beta_current.find(v);
        const double target = (it != state.beta_current.end()) ? kTwoPi * it->second : kTwoPi;
        R[v] = 2.0 * (target - angle_sum[v]) / dual[v];
    }
    return R;
}

double total_mesh_area(const MeshFlowState& state) {
    state.validate();
    const std::vector<double> areas = current_face_areas(state);
    double total = 0.0;
    for (double a : areas) total += a;
    if (!(total > 0.0)) throw std::domain_error("total_mesh_area: nonpositive area");
    return total;
}

namespace {

int first_violating_face(const MeshFlowState& state) {
    const ConicMesh& mesh = *state.mesh;
    const std::vector<double> l = current_edge_lengths(state);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fe = mesh.face_edges(f);
        const double a = l[fe[0]], b = l[fe[1]], c = l[fe[2]];
        if (!(a + b > c && b + c > a && c + a > b)) return f;
    }
    return -1;
}

}  // namespace

MeshStepResult flow_step_mesh(const MeshFlowState& state, double dt, double rho) {
    state.validate();
    if (!(dt >= 0.0)) throw std::invalid_argument("flow_step_mesh: dt must be nonnegative");
    MeshStepResult res;
    if (dt == 0.0) {
        res.state = state;
        res.accepted = true;
        return res;
    }
    const std::vector<double> R = discrete_curvature(state);
    MeshFlowState next = state;
    next.t = state.t + dt;
    for (int v = 0; v < state.mesh->num_vertices(); ++v) next.phi[v] += dt * (rho - R[v]);
    const int bad = first_violating_face(next);
    if (bad >= 0) {
        res.state = state;
        res.accepted = false;
        res.offending_face = bad;
        return res;
    }
    res.state = std::move(next);
    res.accepted = true;
    return res;
}

double eval_schedule(const BetaSchedule& schedule, int vertex, double t, double fallback) {
    auto it = schedule.find(vertex);
    if (it == schedule.end() || it->second.empty()) return fallback;
    const auto& table = it->second;
    if (t <= table.front().first) return table.front().second;
    if (t >= table.back().first) return table.back().second;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        if (t <= table[i + 1].first) {
            const double u = (t - table[i].first) / (table[i + 1].first - table[i].first);
            return table[i].second + u * (table[i + 1].second - table[i].second);
        }
    }
    return table.back().second;
}

MeshStepResult angle_schedule_step(const MeshFlowState& state, double dt, double rho,
                                   const BetaSchedule& schedule) {
    MeshStepResult res = flow_step_mesh(state, dt, rho);
    if (!res.accepted) return res;
    for (auto& [v, beta] : res.state.beta_current) {
        const double nb = eval_schedule(schedule, v, state.t + dt, beta);
        if (!(nb > 0.0 && nb < 1.0))
            throw std::domain_error("angle_schedule_step: schedule leaves (0,1) at vertex " +
                                    std::to_string(v));
        beta = nb;
    }
    return res;
}

std::vector<double> mesh_distances(const MeshFlowState& state, int source) {
    state.validate();
    const ConicMesh& mesh = *state.mesh;
    const std::vector<double> l = current_edge_lengths(state);
    const int nv = mesh.num_vertices();
    std::vector<double> dist(nv, std::numeric_limits<double>::infinity());
    std::vector<int> order;
    order.reserve(nv);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.push({0.0, source});
    std::vector<char> settled(nv, 0);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (settled[v]) continue;
        settled[v] = 1;
        order.push_back(v);
        for (int e : mesh.vertex_edges(v)) {
            const auto& [a, b] = mesh.edges()[e];
            const int u = (a == v) ? b : a;
            if (dist[v] + l[e] < dist[u]) {
                dist[u] = dist[v] + l[e];
                heap.push({dist[u], u});
            }
        }
    }
    // One unfolding pass: for each face corner, re-estimate through the flat
    // double triangle spanned by the other two corners.
    for (int v : order) {
        for (const auto& [f, c] : mesh.vertex_star(v)) {
            const auto& fc = mesh.faces()[f];
            const int a = fc[(c + 1) % 3], b = fc[(c + 2) % 3];
            if (!settled[a] || !settled[b]) continue;
            const double lab = l[mesh.edge_index(a, b)];
            const double lva = l[mesh.edge_index(v, a)];
            const double lvb = l[mesh.edge_index(v, b)];
            // plane: a = (0,0), b = (lab, 0), v above the axis
            const double xv = (lva * lva - lvb * lvb + lab * lab) / (2.0 * lab);
            const double yv = std::sqrt(std::max(0.0, lva * lva - xv * xv));
            const double xs = (dist[a] * dist[a] - dist[b] * dist[b] + lab * lab) / (2.0 * lab);
            const double ys2 = dist[a] * dist[a] - xs * xs;
            if (ys2 < 0.0) continue;  // circles do not intersect; keep edge distance
            const double ys = -std::sqrt(ys2);  // unfolded source below the axis
            dist[v] = std::min(dist[v], std::hypot(xv - xs, yv - ys));
        }
    }
    return dist;
}

double mesh_diameter(const MeshFlowState& state) {
    // two-sweep estimate
    std::vector<double> d0 = mesh_distances(state, 0);
    int far = 0;
    for (int v = 0; v < state.mesh->num_vertices(); ++v)
        if (d0[v] > d0[far]) far = v;
    const std::vector<double> d1 = mesh_distances(state, far);
    double diam = 0.0;
    for (double d : d1) diam = std::max(diam, d);
    return diam;
}

ConcentrationReport blowup_monitor(const MeshFlowState& state, double ball_radius,
                                   double separation_gap) {
    state.validate();
    ConcentrationReport rep;
    const int nv = state.mesh->num_vertices();
    rep.argmax_vertex = 0;
    for (int v = 1; v < nv; ++v)
        if (state.phi[v] > state.phi[rep.argmax_vertex]) rep.argmax_vertex = v;
    rep.phi_max = state.phi[rep.argmax_vertex];
    const std::vector<double> dist = mesh_distances(state, rep.argmax_vertex);
    const std::vector<double> A = dual_areas(state);
    double inside = 0.0, total = 0.0;
    rep.phi_secondmax = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < nv; ++v) {
        total += A[v];
        if (dist[v] <= ball_radius)
            inside += A[v];
        else
            rep.phi_secondmax = std::max(rep.phi_secondmax, state.phi[v]);
    }
    rep.area_fraction_in_ball = inside / total;
    if (!std::isfinite(rep.phi_secondmax)) rep.phi_secondmax = rep.phi_max;  // ball covers all
    rep.separated = (rep.phi_max - rep.phi_secondmax) > separation_gap;
    return rep;
}

MeshRunResult run_mesh_flow(const MeshFlowState& initial, const MeshRunParams& params) {
    initial.validate();
    MeshRunResult result;
    MeshFlowState state = initial;
    double dt = params.resume ? params.resume_dt : params.dt_init;
    double s_shift = params.resume ? params.resume_s_shift : 0.0;
    bool s_anchored = params.resume && params.resume_s_anchored;
    const double ball_radius =
        params.track_concentration ? params.ball_radius_fraction * mesh_diameter(initial) : 0.0;

    auto record = [&](const MeshFlowState& st) {
        RecordContext ctx;
        ctx.rho = params.rho;
        const std::vector<double> R = discrete_curvature(st);
        const double rmin = *std::min_element(R.begin(), R.end());
        if (!s_anchored) {
            s_shift = (rmin > 0.0) ? 0.0 : rmin - 1.0;
            s_anchored = true;
        }
        if (!(rmin - s_shift > 0.0)) s_shift = rmin - 1.0;  // re-anchor
        ctx.s_shift = s_shift;
        result.trajectory.records.push_back(make_record(st, ctx));
        result.dissipation_integral.push_back(dissipation_integral(st, params.rho));
        if (params.track_concentration)
            result.concentration.push_back(blowup_monitor(st, ball_radius, params.separation_gap));
    };

    record(state);
    long accepted = params.resume ? params.resume_step_index : 0;
    const long step_budget = accepted + params.max_steps;
    TerminationReason reason = TerminationReason::reached_t_end;
    std::string detail;

    // reference leaf of the area constraint (rho = 4 pi chi_c / A_ref)
    const bool stabilize = params.rho > 0.0 && params.scale_feedback > 0.0 &&
                           params.schedule.empty();
    double chi_c = initial.mesh->euler_characteristic();
    for (const auto& [v, b] : initial.beta_current) chi_c += b - 1.0;
    const double area_ref = stabilize ? 2.0 * kTwoPi * chi_c / params.rho : 0.0;

    while (state.t < params.t_end - 1e-15 && accepted < step_budget) {
        const double step_dt = std::min(dt, params.t_end - state.t);
        MeshStepResult step = params.schedule.empty()
                                  ? flow_step_mesh(state, step_dt, params.rho)
                                  : angle_schedule_step(state, step_dt, params.rho, params.schedule);
        if (step.accepted && stabilize) {
            const double shift = -params.scale_feedback * step_dt *
                                 std::log(total_mesh_area(step.state) / area_ref);
            for (double& p : step.state.phi) p += shift;
        }
        if (!step.accepted) {
            dt *= 0.5;
            if (dt < params.dt_min) {
                reason = TerminationReason::step_failure;
                detail = "triangle inequality failed at face " +
                         std::to_string(step.offending_face) + " with dt at floor";
                break;
            }
            continue;
        }
        s_shift = advance_shift(s_shift, params.rho, step_dt);
        state = std::move(step.state);
        ++accepted;

        const bool at_end = state.t >= params.t_end - 1e-15;
        if (accepted % params.record_every == 0 || at_end) {
            record(state);
            const auto& rec = result.trajectory.records.back();
            const double res =
                std::max(std::abs(rec.r_min - params.rho), std::abs(rec.r_max - params.rho)) /
                std::max(1.0, std::abs(params.rho));
            if (params.schedule.empty() && res < params.tol_curvature) {
                reason = TerminationReason::converged;
                detail = "curvature residual " + std::to_string(res);
                break;
            }
            if (rec.phi_max > params.blowup_cap) {
                reason = TerminationReason::blowup_cap;
                detail = "phi_max " + std::to_string(rec.phi_max);
                break;
            }
        }
    }
    if (accepted >= step_budget && reason == TerminationReason::reached_t_end) {
        reason = TerminationReason::step_failure;
        detail = "max step count reached";
    }
    if (result.trajectory.records.empty() ||
        result.trajectory.records.back().t < state.t - 1e-15)
        record(state);
    result.trajectory.termination = reason;
    result.trajectory.termination_detail = detail;
    result.trajectory.t_final = state.t;
    result.continuation = {accepted, dt, s_shift, s_anchored, params.rho};
    result.final_state = std::move(state);
    return result;
}

// ---------------------------------------------------------------- potential

PotentialResult potential_solve(const MeshFlowState& state, double rho, double compatibility_tol) {
    state.validate();
    const ConicMesh& mesh = *state.mesh;
    const int nv = mesh.num_vertices();
    const std::vector<double> R = discrete_curvature(state);
    const std::vector<double> A = dual_areas(state);
    const std::vector<double> l = current_edge_lengths(state);

    double compat = 0.0, scale = 0.0;
    for (int v = 0; v < nv; ++v) {
        compat += (R[v] - rho) * A[v];
        scale += std::abs((R[v] - rho) * A[v]);
    }
    if (std::abs(compat) > compatibility_tol * std::max(1.0, scale))
        throw std::invalid_argument("potential_solve: int (R - rho) dA = " +
                                    std::to_string(compat) + " violates compatibility");

    // cotan stiffness matrix of the current metric; Delta f ~ -(1/A_i) (L f)_i
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(12 * mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fc = mesh.faces()[f];
        const auto& fe = mesh.face_edges(f);
        const auto ang = triangle_angles(l[fe[0]], l[fe[1]], l[fe[2]]);
        for (int c = 0; c < 3; ++c) {
            const int i = fc[(c + 1) % 3], j = fc[(c + 2) % 3];
            const double w = 0.5 / std::tan(ang[c]);
            trips.emplace_back(i, i, w);
            trips.emplace_back(j, j, w);
            trips.emplace_back(i, j, -w);
            trips.emplace_back(j, i, -w);
        }
    }
    // Lagrange multiplier row/column pins the mean
    const int n = nv + 1;
    for (int v = 0; v < nv; ++v) {
        trips.emplace_back(v, nv, 1.0);
        trips.emplace_back(nv, v, 1.0);
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd b(n);
    for (int v = 0; v < nv; ++v) b[v] = -(R[v] - rho) * A[v];
    b[nv] = 0.0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(L);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("potential_solve: factorization failed");
    Eigen::VectorXd sol = solver.solve(b);

    PotentialResult res;
    res.f.assign(nv, 0.0);
    for (int v = 0; v < nv; ++v) res.f[v] = sol[v];
    // shift to mean zero against dA
    double mean = 0.0, total = 0.0;
    for (int v = 0; v < nv; ++v) {
        mean += res.f[v] * A[v];
        total += A[v];
    }
    mean /= total;
    for (double& v : res.f) v -= mean;

    // residual and per-face gradient
    Eigen::VectorXd r = L * sol - b;
    for (int v = 0; v < nv; ++v) res.residual = std::max(res.residual, std::abs(r[v]));
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& fc = mesh.faces()[f];
        const auto& fe = mesh.face_edges(f);
        const double la = l[fe[0]], lb = l[fe[1]], lc = l[fe[2]];
        const double area = triangle_area(la, lb, lc);
        const double cx = (lb * lb + lc * lc - la * la) / (2.0 * lc);
        const double cy = 2.0 * area / lc;
        const double fa = res.f[fc[0]], fb = res.f[fc[1]], fcv = res.f[fc[2]];
        const double gx = (fb - fa) / lc;
        const double gy = (fcv - fa - gx * cx) / cy;
        res.grad_f_max = std::max(res.grad_f_max, std::hypot(gx, gy));
    }
    return res;
}

}  // namespace conicricci

#include "conicricci/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "conicricci/cone_geometry.hpp"
#include "conicricci/numerics.hpp"

namespace conicricci {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

std::array<double, 3> triangle_angles(double la, double lb, double lc) {
    // angle at the corner opposite side a, etc.; atan2 form is robust for
    // thin triangles and the three angles sum to pi up to roundoff.
    const double area4 = 4.0 * triangle_area(la, lb, lc);
    return {std::atan2(area4, lb * lb + lc * lc - la * la),
            std::atan2(area4, lc * lc + la * la - lb * lb),
            std::atan2(area4, la * la + lb * lb - lc * lc)};
}

double triangle_area(double la, double lb, double lc) {
    // Kahan's stable Heron formula: sort a >= b >= c first.
    double a = la, b = lb, c = lc;
    if (a < b) std::swap(a, b);
    if (b < c) std::swap(b, c);
    if (a < b) std::swap(a, b);
    const double t = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if (!(t > 0.0)) return 0.0;
    return 0.25 * std::sqrt(t);
}

int ConicMesh::Builder::add_vertex() {
    positions.push_back(std::nullopt);
    return n_vertices++;
}

int ConicMesh::Builder::add_vertex(std::array<double, 3> pos) {
    positions.push_back(pos);
    return n_vertices++;
}

void ConicMesh::Builder::set_length(int a, int b, double l) {
    if (a == b) throw MeshConstructionError("set_length: degenerate edge");
    lengths[{std::min(a, b), std::max(a, b)}] = l;
}

ConicMesh ConicMesh::Builder::build(double angle_tolerance) const {
    ConicMesh mesh;
    mesh.n_vertices_ = n_vertices;
    mesh.faces_ = faces;
    mesh.cone_beta_ = cone_beta;
    mesh.positions_ = positions;
    mesh.positions_.resize(n_vertices);

    std::map<std::pair<int, int>, int> edge_ids;
    for (const auto& f : faces) {
        for (int c = 0; c < 3; ++c) {
            const int a = f[c], b = f[(c + 1) % 3];
            if (a < 0 || b < 0 || a >= n_vertices || b >= n_vertices || a == b)
                throw MeshConstructionError("build: bad face vertex ids");
            const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
            if (!edge_ids.count(key)) {
                const int id = static_cast<int>(mesh.edges_.size());
                edge_ids[key] = id;
                mesh.edges_.push_back(key);
            }
        }
    }
    mesh.l0_.assign(mesh.edges_.size(), 0.0);
    for (std::size_t e = 0; e < mesh.edges_.size(); ++e) {
        auto it = lengths.find(mesh.edges_[e]);
        if (it == lengths.end())
            throw MeshConstructionError("build: missing length for edge (" +
                                        std::to_string(mesh.edges_[e].first) + "," +
                                        std::to_string(mesh.edges_[e].second) + ")");
        if (!(it->second > 0.0)) throw MeshConstructionError("build: nonpositive edge length");
        mesh.l0_[e] = it->second;
    }
    mesh.finalize(angle_tolerance);
    return mesh;
}

void ConicMesh::finalize(double angle_tolerance) {
    edge_lookup_.clear();
    for (std::size_t e = 0; e < edges_.size(); ++e) edge_lookup_[edges_[e]] = static_cast<int>(e);
    const auto& edge_ids = edge_lookup_;

    face_edges_.assign(faces_.size(), {0, 0, 0});
    std::vector<int> edge_face_count(edges_.size(), 0);
    std::map<std::pair<int, int>, int> directed_count;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto& fc = faces_[f];
        for (int c = 0; c < 3; ++c) {
            // side opposite corner c
            const int a = fc[(c + 1) % 3], b = fc[(c + 2) % 3];
            face_edges_[f][c] = edge_ids.at({std::min(a, b), std::max(a, b)});
        }
        for (int c = 0; c < 3; ++c) {
            const int a = fc[c], b = fc[(c + 1) % 3];
            ++edge_face_count[edge_ids.at({std::min(a, b), std::max(a, b)})];
            ++directed_count[{a, b}];
        }
    }
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (edge_face_count[e] != 2)
            throw MeshConstructionError("finalize: edge (" + std::to_string(edges_[e].first) +
                                        "," + std::to_string(edges_[e].second) + ") lies in " +
                                        std::to_string(edge_face_count[e]) + " faces");
    for (const auto& [key, count] : directed_count)
        if (count != 1)
            throw MeshConstructionError("finalize: orientation inconsistency at edge (" +
                                        std::to_string(key.first) + "," +
                                        std::to_string(key.second) + ")");

    const int chi = euler_characteristic();
    if (chi > 2 || (chi % 2) != 0)
        throw MeshConstructionError("finalize: Euler characteristic " + std::to_string(chi) +
                                    " is not that of a closed orientable surface");

    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto& fe = face_edges_[f];
        const double a = l0_[fe[0]], b = l0_[fe[1]], c = l0_[fe[2]];
        if (!(a + b > c && b + c > a && c + a > b))
            throw MeshConstructionError("finalize: triangle inequality fails at face " +
                                        std::to_string(f));
    }

    star_.assign(n_vertices_, {});
    vertex_edges_.assign(n_vertices_, {});
    for (std::size_t f = 0; f < faces_.size(); ++f)
        for (int c = 0; c < 3; ++c) star_[faces_[f][c]].push_back({static_cast<int>(f), c});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        vertex_edges_[edges_[e].first].push_back(static_cast<int>(e));
        vertex_edges_[edges_[e].second].push_back(static_cast<int>(e));
    }

    for (const auto& [v, beta] : cone_beta_) {
        if (v < 0 || v >= n_vertices_) throw MeshConstructionError("finalize: bad cone vertex id");
        if (!(beta > 0.0 && beta < 1.0))
            throw MeshConstructionError("finalize: cone parameter must lie in (0,1)");
    }
    const std::vector<double> sums = background_angle_sums();
    for (const auto& [v, beta] : cone_beta_) {
        if (std::abs(sums[v] - kTwoPi * beta) > angle_tolerance)
            throw MeshConstructionError(
                "finalize: background angle sum at marked vertex " + std::to_string(v) + " is " +
                std::to_string(sums[v]) + ", expected " + std::to_string(kTwoPi * beta));
    }
}

int ConicMesh::genus() const { return (2 - euler_characteristic()) / 2; }

int ConicMesh::edge_index(int a, int b) const {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    auto it = edge_lookup_.find(key);
    return it == edge_lookup_.end() ? -1 : it->second;
}

std::vector<double> ConicMesh::background_angle_sums() const {
    std::vector<double> sums(n_vertices_, 0.0);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto& fe = face_edges_[f];
        const auto ang = triangle_angles(l0_[fe[0]], l0_[fe[1]], l0_[fe[2]]);
        for (int c = 0; c < 3; ++c) sums[faces_[f][c]] += ang[c];
    }
    return sums;
}

ConicMesh ConicMesh::subdivide() const {
    Builder b;
    b.n_vertices = n_vertices_ + static_cast<int>(edges_.size());
    b.positions.resize(b.n_vertices);
    for (int v = 0; v < n_vertices_; ++v) b.positions[v] = positions_[v];
    auto mid = [&](int e) { return n_vertices_ + e; };
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& [p, q] = edges_[e];
        if (positions_[p] && positions_[q]) {
            std::array<double, 3> m{};
            for (int d = 0; d < 3; ++d) m[d] = 0.5 * ((*positions_[p])[d] + (*positions_[q])[d]);
            b.positions[mid(static_cast<int>(e))] = m;
        }
    }
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto& fc = faces_[f];
        const auto& fe = face_edges_[f];
        const int m0 = mid(fe[0]);  // midpoint of side opposite fc[0] = (fc[1], fc[2])
        const int m1 = mid(fe[1]);
        const int m2 = mid(fe[2]);
        b.add_face(fc[0], m2, m1);
        b.add_face(fc[1], m0, m2);
        b.add_face(fc[2], m1, m0);
        b.add_face(m0, m1, m2);
        const double la = l0_[fe[0]], lb = l0_[fe[1]], lc = l0_[fe[2]];
        b.set_length(fc[0], m2, lc / 2.0);
        b.set_length(fc[0], m1, lb / 2.0);
        b.set_length(fc[1], m0, la / 2.0);
        b.set_length(fc[1], m2, lc / 2.0);
        b.set_length(fc[2], m1, lb / 2.0);
        b.set_length(fc[2], m0, la / 2.0);
        b.set_length(m0, m1, lc / 2.0);
        b.set_length(m1, m2, la / 2.0);
        b.set_length(m2, m0, lb / 2.0);
    }
    b.cone_beta = cone_beta_;
    return b.build(1e-6);
}

ConicMesh ConicMesh::grade_toward_cones(int rings, double ratio) const {
    if (rings <= 0) return *this;
    if (!(ratio > 0.0 && ratio < 1.0))
        throw MeshConstructionError("grade_toward_cones: ratio must lie in (0,1)");
    ConicMesh current = *this;
    for (int pass = 0; pass < rings; ++pass) {
        for (const auto& [v, beta] : cone_beta_) {
            (void)beta;
            Builder b;
            b.n_vertices = current.n_vertices_;
            b.positions = current.positions_;
            b.cone_beta = current.cone_beta_;
            for (std::size_t e = 0; e < current.edges_.size(); ++e) {
                // keep all existing lengths; faces incident to v are replaced
                b.lengths[current.edges_[e]] = current.l0_[e];
            }
            // new ring vertex per spoke edge
            std::map<int, int> spoke_vertex;
            for (int e : current.vertex_edges_[v]) {
                const int id = b.n_vertices++;
                b.positions.push_back(std::nullopt);
                spoke_vertex[e] = id;
                b.lengths[{std::min(v, id), std::max(v, id)}] = ratio * current.l0_[e];
            }
            for (std::size_t f = 0; f < current.faces_.size(); ++f) {
                const auto& fc = current.faces_[f];
                const int c = (fc[0] == v) ? 0 : (fc[1] == v) ? 1 : (fc[2] == v) ? 2 : -1;
                if (c < 0) {
                    b.add_face(fc[0], fc[1], fc[2]);
                    continue;
                }
                const int a = fc[(c + 1) % 3], bb = fc[(c + 2) % 3];
                const int ea = current.edge_index(v, a);
                const int eb = current.edge_index(v, bb);
                const int ap = spoke_vertex.at(ea);
                const int bp = spoke_vertex.at(eb);
                const double lva = current.l0_[ea], lvb = current.l0_[eb];
                const double lab = current.l0_[current.edge_index(a, bb)];
                const double cosv = (lva * lva + lvb * lvb - lab * lab) / (2.0 * lva * lvb);
                // flat in-face geometry of the split
                const double lapbp = ratio * lab;
                const double lapb = std::sqrt(std::max(
                    1e-300, ratio * ratio * lva * lva + lvb * lvb - 2.0 * ratio * lva * lvb * cosv));
                b.add_face(v, ap, bp);
                b.add_face(ap, a, bb);
                b.add_face(ap, bb, bp);
                b.lengths[{std::min(ap, bp), std::max(ap, bp)}] = lapbp;
                b.lengths[{std::min(ap, bb), std::max(ap, bb)}] = lapb;
                // spoke remainders
                b.lengths[{std::min(ap, a), std::max(ap, a)}] = (1.0 - ratio) * lva;
                b.lengths[{std::min(bp, bb), std::max(bp, bb)}] = (1.0 - ratio) * lvb;
            }
            // drop stale lengths of removed spokes (v, a)
            for (int e : current.vertex_edges_[v]) {
                const auto key = current.edges_[e];
                const int id = spoke_vertex.at(e);
                (void)id;
                b.lengths.erase(key);
                b.lengths[{std::min(v, spoke_vertex.at(e)), std::max(v, spoke_vertex.at(e))}] =
                    ratio * current.l0_[e];
            }
            current = b.build(1e-6);
        }
    }
    return current;
}

ConicMesh ConicMesh::relabeled(const std::vector<int>& perm) const {
    if (perm.size() != static_cast<std::size_t>(n_vertices_))
        throw MeshConstructionError("relabeled: permutation size mismatch");
    Builder b;
    b.n_vertices = n_vertices_;
    b.positions.resize(n_vertices_);
    for (int v = 0; v < n_vertices_; ++v) b.positions[perm[v]] = positions_[v];
    for (const auto& fc : faces_) b.add_face(perm[fc[0]], perm[fc[1]], perm[fc[2]]);
    for (std::size_t e = 0; e < edges_.size(); ++e)
        b.set_length(perm[edges_[e].first], perm[edges_[e].second], l0_[e]);
    for (const auto& [v, beta] : cone_beta_) b.set_cone(perm[v], beta);
    return b.build(1e-6);
}

// ------------------------------------------------------------------ file io

std::string write_mesh_text(const ConicMesh& mesh) {
    std::ostringstream out;
    out << "CONICMESH v1\n";
    out << "V " << mesh.num_vertices() << " F " << mesh.num_faces() << " K "
        << mesh.cone_beta().size() << "\n";
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        out << "v " << v;
        if (mesh.positions()[v]) {
            const auto& p = *mesh.positions()[v];
            out << " " << format_double(p[0]) << " " << format_double(p[1]) << " "
                << format_double(p[2]);
        }
        out << "\n";
    }
    for (const auto& [v, beta] : mesh.cone_beta())
        out << "c " << v << " " << format_double(beta) << "\n";
    for (const auto& fc : mesh.faces()) out << "f " << fc[0] << " " << fc[1] << " " << fc[2] << "\n";
    for (std::size_t e = 0; e < mesh.edges().size(); ++e)
        out << "l " << mesh.edges()[e].first << " " << mesh.edges()[e].second << " "
            << format_double(mesh.background_lengths()[e]) << "\n";
    return out.str();
}

ConicMesh read_mesh_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "CONICMESH v1")
        throw MeshConstructionError("mesh file: bad or unsupported header '" + line + "'");
    if (!std::getline(in, line)) throw MeshConstructionError("mesh file: missing count line");
    int nv = 0, nf = 0, nk = 0;
    {
        std::istringstream ls(line);
        std::string tv, tf, tk;
        if (!(ls >> tv >> nv >> tf >> nf >> tk >> nk) || tv != "V" || tf != "F" || tk != "K")
            throw MeshConstructionError("mesh file: bad count line '" + line + "'");
    }
    ConicMesh::Builder b;
    b.n_vertices = nv;
    b.positions.resize(nv);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            int id;
            ls >> id;
            double x, y, z;
            if (ls >> x >> y >> z) b.positions.at(id) = std::array<double, 3>{x, y, z};
        } else if (tag == "c") {
            int id;
            double beta;
            if (!(ls >> id >> beta)) throw MeshConstructionError("mesh file: bad cone line");
            b.set_cone(id, beta);
        } else if (tag == "f") {
            int i, j, k;
            if (!(ls >> i >> j >> k)) throw MeshConstructionError("mesh file: bad face line");
            b.add_face(i, j, k);
        } else if (tag == "l") {
            int i, j;
            double l;
            if (!(ls >> i >> j >> l)) throw MeshConstructionError("mesh file: bad length line");
            b.set_length(i, j, l);
        } else {
            throw MeshConstructionError("mesh file: unknown tag '" + tag + "'");
        }
    }
    if (static_cast<int>(b.faces.size()) != nf)
        throw MeshConstructionError("mesh file: face count mismatch");
    if (static_cast<int>(b.cone_beta.size()) != nk)
        throw MeshConstructionError("mesh file: cone count mismatch");
    return b.build(1e-6);
}

void write_mesh_file(const ConicMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_mesh_file: cannot open " + path);
    out << write_mesh_text(mesh);
}

ConicMesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_mesh_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_mesh_text(ss.str());
}

// ------------------------------------------------------------ constructions

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ConicMesh make_cone_sphere_mesh(const std::vector<double>& betas, int sectors, int subdivisions,
                                int grade_rings, double grade_ratio) {
    if (betas.size() > 3)
        throw MeshConstructionError("make_cone_sphere_mesh: at most 3 cone points supported");
    if (sectors < 6) throw MeshConstructionError("make_cone_sphere_mesh: need >= 6 sectors");
    for (double beta : betas)
        if (!(beta > 0.0 && beta < 1.0))
            throw MeshConstructionError("make_cone_sphere_mesh: beta must lie in (0,1)");

    const double bn = betas.size() > 0 ? betas[0] : 1.0;  // north pole
    const double bs = betas.size() > 1 ? betas[1] : 1.0;  // south pole
    const bool equator_cone = betas.size() > 2;
    const double be = equator_cone ? betas[2] : 1.0;

    const double q = 1.0;  // regular equator chord (sets the scale)

    // Pole spokes p from the fan angle sums; when an equator cone is present
    // its two adjacent chords shrink to q' and the three constraints are
    // solved by nested bisection.
    double qp = q, pn = 0.0, ps = 0.0;
    auto pole_spoke = [&](double beta, double qprime) {
        // 2 (m-2) asin(q/2p) + 4 asin(q'/2p) = 2 pi beta, monotone in p
        auto f = [&](double p) {
            return 2.0 * (sectors - 2) * std::asin(q / (2.0 * p)) +
                   4.0 * std::asin(qprime / (2.0 * p)) - kTwoPi * beta;
        };
        double lo = 0.5 * std::max(q, qprime) * 1.0000001, hi = lo;
        while (f(hi) > 0.0) hi *= 2.0;
        return bisect(f, lo, hi);
    };
    if (!equator_cone) {
        pn = pole_spoke(bn, q);
        ps = pole_spoke(bs, q);
    } else {
        // angle sum at the equator cone: 2 [acos(q'/2pn) + acos(q'/2ps)] = 2 pi be
        auto excess = [&](double qprime) {
            const double pn_ = pole_spoke(bn, qprime);
            const double ps_ = pole_spoke(bs, qprime);
            return 2.0 * (std::acos(qprime / (2.0 * pn_)) + std::acos(qprime / (2.0 * ps_))) -
                   kTwoPi * be;
        };
        // q' -> 0 gives angle sum 2 pi (max); q' -> min(2pn, 2ps) gives 0.
        double lo = 1e-9, hi = lo;
        if (excess(lo) < 0.0)
            throw MeshConstructionError("make_cone_sphere_mesh: infeasible equator angle");
        hi = q;
        while (excess(hi) > 0.0) {
            hi *= 1.5;
            if (hi > 1e4) throw MeshConstructionError(
                "make_cone_sphere_mesh: infeasible angle prescription at this resolution");
        }
        qp = bisect([&](double v) { return excess(v); }, lo, hi);
        pn = pole_spoke(bn, qp);
        ps = pole_spoke(bs, qp);
    }

    ConicMesh::Builder b;
    const int north = b.add_vertex({0.0, 0.0, 1.0});
    std::vector<int> eq(sectors);
    for (int j = 0; j < sectors; ++j) {
        const double ang = kTwoPi * j / sectors;
        eq[j] = b.add_vertex({std::cos(ang), std::sin(ang), 0.0});
    }
    const int south = b.add_vertex({0.0, 0.0, -1.0});
    for (int j = 0; j < sectors; ++j) {
        const int jn = (j + 1) % sectors;
        b.add_face(north, eq[j], eq[jn]);
        b.add_face(south, eq[jn], eq[j]);
        const bool special = equator_cone && (j == 0 || jn == 0);
        b.set_length(eq[j], eq[jn], special ? qp : q);
        b.set_length(north, eq[j], pn);
        b.set_length(south, eq[j], ps);
    }
    if (betas.size() > 0) b.set_cone(north, bn);
    if (betas.size() > 1) b.set_cone(south, bs);
    if (equator_cone) b.set_cone(eq[0], be);

    ConicMesh mesh = b.build(1e-8);
    for (int k = 0; k < subdivisions; ++k) mesh = mesh.subdivide();
    return mesh.grade_toward_cones(grade_rings, grade_ratio);
}

ConicMesh make_flat_torus_mesh(int n) {
    if (n < 3) throw MeshConstructionError("make_flat_torus_mesh: need n >= 3");
    ConicMesh::Builder b;
    const double a = 1.0 / n;
    std::vector<int> id(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            id[j * n + i] = b.add_vertex({i * a, j * a, 0.0});
    auto at = [&](int i, int j) { return id[((j + n) % n) * n + ((i + n) % n)]; };
    const double d = a * std::sqrt(2.0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            b.add_face(at(i, j), at(i + 1, j), at(i + 1, j + 1));
            b.add_face(at(i, j), at(i + 1, j + 1), at(i, j + 1));
            b.set_length(at(i, j), at(i + 1, j), a);
            b.set_length(at(i, j), at(i, j + 1), a);
            b.set_length(at(i, j), at(i + 1, j + 1), d);
        }
    }
    return b.build(1e-8);
}

namespace {

/// Equilateral flat torus grid used as a building block for the genus-2 glue.
struct TorusBlock {
    std::vector<std::array<int, 3>> faces;
    std::map<std::pair<int, int>, double> lengths;
    int nv = 0;
    std::array<int, 3> seam_face{};  // removed face's vertices
};

TorusBlock equilateral_torus(int n, int vertex_offset, double edge) {
    TorusBlock blk;
    blk.nv = n * n;
    auto at = [&](int i, int j) {
        return vertex_offset + ((j + n) % n) * n + ((i + n) % n);
    };
    auto set_len = [&](int a, int bb, double l) {
        blk.lengths[{std::min(a, bb), std::max(a, bb)}] = l;
    };
    const std::array<int, 3> removed{at(1, 1), at(2, 1), at(2, 2)};
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::array<int, 3> f1{at(i, j), at(i + 1, j), at(i + 1, j + 1)};
            const std::array<int, 3> f2{at(i, j), at(i + 1, j + 1), at(i, j + 1)};
            if (!(f1 == removed)) blk.faces.push_back(f1);
            blk.faces.push_back(f2);
            set_len(at(i, j), at(i + 1, j), edge);
            set_len(at(i, j), at(i, j + 1), edge);
            set_len(at(i, j), at(i + 1, j + 1), edge);
        }
    }
    blk.seam_face = removed;
    return blk;
}

}  // namespace

ConicMesh make_genus2_mesh(int n) {
    if (n < 4) throw MeshConstructionError("make_genus2_mesh: need n >= 4");
    const double edge = 1.0 / n;
    const TorusBlock ta = equilateral_torus(n, 0, edge);
    const TorusBlock tb = equilateral_torus(n, n * n, edge);

    // glue tb's seam triangle onto ta's with reversed orientation
    std::map<int, int> remap;
    remap[tb.seam_face[0]] = ta.seam_face[0];
    remap[tb.seam_face[1]] = ta.seam_face[2];
    remap[tb.seam_face[2]] = ta.seam_face[1];

    ConicMesh::Builder b;
    b.n_vertices = 2 * n * n;  // three ids become aliases; compact below
    std::vector<int> compact(2 * n * n, -1);
    int next = 0;
    auto mapped = [&](int v) {
        auto it = remap.find(v);
        return it == remap.end() ? v : it->second;
    };
    for (int v = 0; v < 2 * n * n; ++v) {
        const int m = mapped(v);
        if (compact[m] < 0) compact[m] = next++;
    }
    b.n_vertices = next;
    b.positions.resize(next);
    auto cm = [&](int v) { return compact[mapped(v)]; };

    for (const auto& f : ta.faces) b.add_face(cm(f[0]), cm(f[1]), cm(f[2]));
    for (const auto& f : tb.faces) b.add_face(cm(f[0]), cm(f[1]), cm(f[2]));
    for (const auto& [key, l] : ta.lengths) b.set_length(cm(key.first), cm(key.second), l);
    for (const auto& [key, l] : tb.lengths) b.set_length(cm(key.first), cm(key.second), l);
    return b.build(1e-8);
}

ConicMesh build_preset_mesh(const ConicSurfaceSpec& spec, int resolution) {
    spec.validate();
    if (resolution < 0) throw MeshConstructionError("build_preset_mesh: resolution must be >= 0");
    const std::size_t k = spec.betas.size();
    if (spec.genus == 0) {
        return make_cone_sphere_mesh(spec.betas, 8, resolution, k > 0 ? 2 : 0, 0.5);
    }
    if (spec.genus == 1 && k == 0) {
        return make_flat_torus_mesh(4 << resolution);
    }
    if (spec.genus == 2 && k == 0) {
        ConicMesh mesh = make_genus2_mesh(4);
        for (int i = 0; i < resolution; ++i) mesh = mesh.subdivide();
        return mesh;
    }
    throw MeshConstructionError(
        "build_preset_mesh: presets cover genus 0 (k <= 3) and genus 1/2 smooth surfaces");
}

}  // namespace conicricci

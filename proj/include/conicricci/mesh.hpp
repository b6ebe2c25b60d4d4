#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conicricci {

struct ConicSurfaceSpec;

/// Closed orientable triangulated surface with background edge lengths and
/// marked cone vertices. The background realizes the conic data: the angle
/// sum at a marked vertex equals 2*pi*beta within construction tolerance.
class ConicMesh {
public:
    struct Builder {
        int n_vertices = 0;
        std::vector<std::array<int, 3>> faces;               // CCW triples
        std::map<std::pair<int, int>, double> lengths;       // undirected, key (min,max)
        std::map<int, double> cone_beta;
        std::vector<std::optional<std::array<double, 3>>> positions;

        int add_vertex();
        int add_vertex(std::array<double, 3> pos);
        void add_face(int a, int b, int c) { faces.push_back({a, b, c}); }
        void set_length(int a, int b, double l);
        void set_cone(int v, double beta) { cone_beta[v] = beta; }

        /// Validates and freezes the mesh. angle_tolerance bounds the allowed
        /// deviation of marked angle sums from 2*pi*beta.
        ConicMesh build(double angle_tolerance = 1e-8) const;
    };

    int num_vertices() const { return n_vertices_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int genus() const;
    int euler_characteristic() const { return n_vertices_ - num_edges() + num_faces(); }

    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<double>& background_lengths() const { return l0_; }
    const std::map<int, double>& cone_beta() const { return cone_beta_; }
    const std::vector<std::optional<std::array<double, 3>>>& positions() const { return positions_; }

    int edge_index(int a, int b) const;  // -1 if absent
    const std::array<int, 3>& face_edges(int f) const { return face_edges_[f]; }
    /// (face, corner) pairs incident to a vertex, in face-id order.
    const std::vector<std::pair<int, int>>& vertex_star(int v) const { return star_[v]; }
    const std::vector<int>& vertex_edges(int v) const { return vertex_edges_[v]; }

    /// Angle sum at each vertex for the background lengths.
    std::vector<double> background_angle_sums() const;

    /// 1-to-4 midpoint refinement. Original vertex ids are preserved; the
    /// midpoint of edge e gets id num_vertices() + e. Marked angle sums are
    /// preserved exactly (corner triangles are similar to their parents).
    ConicMesh subdivide() const;

    /// Geometric grading toward every marked vertex: each pass inserts a ring
    /// of vertices at `ratio` of the current spoke lengths.
    ConicMesh grade_toward_cones(int rings, double ratio = 0.5) const;

    /// Renames vertex ids by the permutation new_id = perm[old_id], keeping
    /// the face list order (relabeling equivariance is tested against this).
    ConicMesh relabeled(const std::vector<int>& perm) const;

private:
    friend struct Builder;
    int n_vertices_ = 0;
    std::vector<std::array<int, 3>> faces_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<double> l0_;
    std::map<int, double> cone_beta_;
    std::vector<std::optional<std::array<double, 3>>> positions_;
    std::vector<std::array<int, 3>> face_edges_;
    std::vector<std::vector<std::pair<int, int>>> star_;
    std::vector<std::vector<int>> vertex_edges_;
    std::map<std::pair<int, int>, int> edge_lookup_;
    void finalize(double angle_tolerance);
};

struct MeshConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Triangle angles from edge lengths (law of cosines via atan2; the three
/// angles of a valid triangle sum to pi up to roundoff).
std::array<double, 3> triangle_angles(double la, double lb, double lc);

/// Heron area from edge lengths (numerically stable ordering).
double triangle_area(double la, double lb, double lc);

// -- File format (CONICMESH v1) ----------------------------------------------

std::string write_mesh_text(const ConicMesh& mesh);
ConicMesh read_mesh_text(const std::string& text);
void write_mesh_file(const ConicMesh& mesh, const std::string& path);
ConicMesh read_mesh_file(const std::string& path);

// -- Preset constructions ------------------------------------------------------

/// Sphere with up to three exact cone vertices (poles and one equator site),
/// graded rings toward the marked vertices.
ConicMesh make_cone_sphere_mesh(const std::vector<double>& betas, int sectors, int subdivisions,
                                int grade_rings = 2, double grade_ratio = 0.5);

/// Flat square torus on an n x n grid (unit total circumference).
ConicMesh make_flat_torus_mesh(int n);

/// Genus-2 surface: two equilateral flat tori glued along a removed face.
ConicMesh make_genus2_mesh(int n);

/// Resolution-indexed preset used by the runner: dispatches on genus and k.
ConicMesh build_preset_mesh(const ConicSurfaceSpec& spec, int resolution);

}  // namespace conicricci

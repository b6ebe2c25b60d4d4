#include "conicricci/snapshot.hpp"

#include <fstream>
#include <sstream>

#include "conicricci/mesh.hpp"
#include "conicricci/numerics.hpp"

namespace conicricci {

namespace {

void write_values(std::ostringstream& out, const std::string& tag,
                  const std::vector<double>& values) {
    out << tag << " " << values.size();
    for (double v : values) out << " " << format_double(v);
    out << "\n";
}

std::vector<double> read_values(std::istringstream& ls, const std::string& tag) {
    std::size_t n = 0;
    if (!(ls >> n)) throw SnapshotError("snapshot: bad " + tag + " count");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!(ls >> out[i])) throw SnapshotError("snapshot: truncated " + tag + " values");
    return out;
}

}  // namespace

std::string write_snapshot_text(const Snapshot& snap) {
    std::ostringstream out;
    out.precision(17);
    out << "CONICRICCI-SNAPSHOT v1\n";
    if (std::holds_alternative<CylinderState>(snap.state)) {
        const auto& st = std::get<CylinderState>(snap.state);
        out << "kind cylinder\n";
        out << "t " << format_double(st.t) << "\n";
        out << "x0 " << format_double(st.x0) << "\n";
        out << "dx " << format_double(st.dx) << "\n";
        out << "beta_minus " << format_double(st.beta_minus) << "\n";
        out << "beta_plus " << format_double(st.beta_plus) << "\n";
        write_values(out, "w", st.w);
    } else if (std::holds_alternative<MeshFlowState>(snap.state)) {
        const auto& st = std::get<MeshFlowState>(snap.state);
        out << "kind mesh\n";
        out << "t " << format_double(st.t) << "\n";
        write_values(out, "phi", st.phi);
        out << "beta_current " << st.beta_current.size();
        for (const auto& [v, b] : st.beta_current) out << " " << v << " " << format_double(b);
        out << "\n";
        out << "MESH-BEGIN\n" << write_mesh_text(*st.mesh) << "MESH-END\n";
    } else {
        const auto& f = std::get<PolarField>(snap.state);
        out << "kind polarfield\n";
        out << "beta " << format_double(snap.field_beta) << "\n";
        out << "r_max " << format_double(snap.field_r_max) << "\n";
        write_values(out, "r", f.r);
        write_values(out, "y", f.y);
        write_values(out, "values", f.values);
    }
    if (snap.continuation) {
        out << "runstate " << snap.continuation->step_index << " "
            << format_double(snap.continuation->dt) << " "
            << format_double(snap.continuation->s_shift) << " "
            << (snap.continuation->s_anchored ? 1 : 0) << " "
            << format_double(snap.continuation->rho) << "\n";
    }
    std::string payload = out.str();
    std::ostringstream full;
    full << payload << "CHECKSUM " << std::hex << fnv1a64(payload) << "\n";
    return full.str();
}

Snapshot read_snapshot_text(const std::string& text) {
    // split off and verify the checksum line
    const auto mark = text.rfind("CHECKSUM ");
    if (mark == std::string::npos) throw SnapshotError("snapshot: missing checksum line");
    const std::string payload = text.substr(0, mark);
    std::istringstream ck(text.substr(mark + 9));
    std::uint64_t stated = 0;
    ck >> std::hex >> stated;
    if (stated != fnv1a64(payload))
        throw SnapshotError("snapshot: checksum mismatch (file truncated or edited)");

    std::istringstream in(payload);
    std::string line;
    if (!std::getline(in, line)) throw SnapshotError("snapshot: empty file");
    if (line != "CONICRICCI-SNAPSHOT v1") {
        if (line.rfind("CONICRICCI-SNAPSHOT", 0) == 0)
            throw SnapshotError("snapshot: unsupported version '" + line + "'");
        throw SnapshotError("snapshot: bad header");
    }
    if (!std::getline(in, line)) throw SnapshotError("snapshot: missing kind");
    std::string kind;
    {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag >> kind;
        if (tag != "kind") throw SnapshotError("snapshot: missing kind line");
    }

    Snapshot snap;
    auto parse_continuation = [&](std::istringstream& ls) {
        RunContinuation rc;
        int anchored = 0;
        if (!(ls >> rc.step_index >> rc.dt >> rc.s_shift >> anchored >> rc.rho))
            throw SnapshotError("snapshot: bad runstate line");
        rc.s_anchored = anchored != 0;
        snap.continuation = rc;
    };

    if (kind == "cylinder") {
        CylinderState st;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string tag;
            ls >> tag;
            if (tag == "t") ls >> st.t;
            else if (tag == "x0") ls >> st.x0;
            else if (tag == "dx") ls >> st.dx;
            else if (tag == "beta_minus") ls >> st.beta_minus;
            else if (tag == "beta_plus") ls >> st.beta_plus;
            else if (tag == "w") st.w = read_values(ls, "w");
            else if (tag == "runstate") parse_continuation(ls);
            else if (!tag.empty()) throw SnapshotError("snapshot: unknown tag '" + tag + "'");
        }
        st.validate();
        snap.state = std::move(st);
    } else if (kind == "mesh") {
        MeshFlowState st;
        while (std::getline(in, line)) {
            if (line == "MESH-BEGIN") {
                std::ostringstream mesh_text;
                while (std::getline(in, line) && line != "MESH-END") mesh_text << line << "\n";
                st.mesh = std::make_shared<ConicMesh>(read_mesh_text(mesh_text.str()));
                continue;
            }
            std::istringstream ls(line);
            std::string tag;
            ls >> tag;
            if (tag == "t") ls >> st.t;
            else if (tag == "phi") st.phi = read_values(ls, "phi");
            else if (tag == "beta_current") {
                std::size_t n;
                ls >> n;
                for (std::size_t i = 0; i < n; ++i) {
                    int v;
                    double b;
                    if (!(ls >> v >> b)) throw SnapshotError("snapshot: bad beta_current");
                    st.beta_current[v] = b;
                }
            } else if (tag == "runstate") parse_continuation(ls);
            else if (!tag.empty()) throw SnapshotError("snapshot: unknown tag '" + tag + "'");
        }
        st.validate();
        snap.state = std::move(st);
    } else if (kind == "polarfield") {
        PolarField f;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string tag;
            ls >> tag;
            if (tag == "beta") ls >> snap.field_beta;
            else if (tag == "r_max") ls >> snap.field_r_max;
            else if (tag == "r") f.r = read_values(ls, "r");
            else if (tag == "y") f.y = read_values(ls, "y");
            else if (tag == "values") f.values = read_values(ls, "values");
            else if (tag == "runstate") parse_continuation(ls);
            else if (!tag.empty()) throw SnapshotError("snapshot: unknown tag '" + tag + "'");
        }
        f.validate();
        snap.state = std::move(f);
    } else {
        throw SnapshotError("snapshot: unknown kind '" + kind + "'");
    }
    return snap;
}

void snapshot_write(const Snapshot& snap, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("snapshot_write: cannot open " + path);
    out << write_snapshot_text(snap);
}

Snapshot snapshot_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("snapshot_read: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_snapshot_text(ss.str());
}

}  // namespace conicricci

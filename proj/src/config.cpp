#include "conicricci/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace conicricci {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::rotational: return "rotational";
        case ExperimentKind::mesh: return "mesh";
        case ExperimentKind::heatkernel: return "heatkernel";
        case ExperimentKind::classify: return "classify";
    }
    return "unknown";
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_real(int line, const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(line, "key '" + key + "' expects a real number, got '" + value + "'");
    }
}

long parse_int(int line, const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(line, "key '" + key + "' expects an integer, got '" + value + "'");
    }
}

std::vector<double> parse_real_list(int line, const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_real(line, key, item));
    }
    return out;
}

// "0:0.5, 1:0.6" -> piecewise-linear (t, beta) table
std::vector<std::pair<double, double>> parse_schedule_table(int line, const std::string& key,
                                                            const std::string& value) {
    std::vector<std::pair<double, double>> table;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError(line, "key '" + key + "' expects t:beta pairs, got '" + item + "'");
        table.emplace_back(parse_real(line, key, trim(item.substr(0, colon))),
                           parse_real(line, key, trim(item.substr(colon + 1))));
    }
    if (table.empty()) throw ConfigError(line, "key '" + key + "' has an empty schedule");
    for (std::size_t i = 1; i < table.size(); ++i)
        if (!(table[i].first > table[i - 1].first))
            throw ConfigError(line, "key '" + key + "' schedule times must increase");
    return table;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    bool have_kind = false;
    bool have_genus = false;
    std::vector<std::string> labels;

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"run", "spec", "numerics", "schedule", "heatkernel",
                                          "output"};
            if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                    return section == k;
                }) == std::end(known))
                throw ConfigError(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "empty key");
        if (value.empty()) throw ConfigError(line_no, "empty value for key '" + key + "'");

        if (section == "run") {
            if (key == "kind") {
                if (value == "rotational") cfg.kind = ExperimentKind::rotational;
                else if (value == "mesh") cfg.kind = ExperimentKind::mesh;
                else if (value == "heatkernel") cfg.kind = ExperimentKind::heatkernel;
                else if (value == "classify") cfg.kind = ExperimentKind::classify;
                else
                    throw ConfigError(line_no,
                                      "kind must be rotational|mesh|heatkernel|classify, got '" +
                                          value + "'");
                have_kind = true;
            } else if (key == "name") {
                cfg.name = value;
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(parse_int(line_no, key, value));
            } else if (key == "restart_from") {
                cfg.restart_from = value;
            } else {
                throw ConfigError(line_no, "unknown key '" + key + "' in [run]");
            }
        } else if (section == "spec") {
            if (key == "genus") {
                const long g = parse_int(line_no, key, value);
                if (g < 0) throw ConfigError(line_no, "genus must be nonnegative");
                cfg.spec.genus = static_cast<int>(g);
                have_genus = true;
            } else if (key == "betas") {
                cfg.spec.betas = parse_real_list(line_no, key, value);
                for (double b : cfg.spec.betas)
                    if (!(b > 0.0 && b < 1.0))
                        throw ConfigError(line_no, "beta = " + std::to_string(b) +
                                                       " violates the (0,1) constraint");
            } else if (key == "labels") {
                std::stringstream ss(value);
                std::string item;
                labels.clear();
                while (std::getline(ss, item, ',')) labels.push_back(trim(item));
            } else {
                throw ConfigError(line_no, "unknown key '" + key + "' in [spec]");
            }
        } else if (section == "numerics") {
            if (key == "dt_init") cfg.dt_init = parse_real(line_no, key, value);
            else if (key == "dt_min") cfg.dt_min = parse_real(line_no, key, value);
            else if (key == "t_end") cfg.t_end = parse_real(line_no, key, value);
            else if (key == "record_every")
                cfg.record_every = static_cast<int>(parse_int(line_no, key, value));
            else if (key == "tol_curvature") cfg.tol_curvature = parse_real(line_no, key, value);
            else if (key == "tol_soliton") cfg.tol_soliton = parse_real(line_no, key, value);
            else if (key == "resolution")
                cfg.resolution = static_cast<int>(parse_int(line_no, key, value));
            else if (key == "blowup_cap") cfg.blowup_cap = parse_real(line_no, key, value);
            else if (key == "separation_gap") cfg.separation_gap = parse_real(line_no, key, value);
            else if (key == "ball_radius_fraction")
                cfg.ball_radius_fraction = parse_real(line_no, key, value);
            else if (key == "chi_epsilon") cfg.chi_epsilon = parse_real(line_no, key, value);
            else if (key == "perturb_amplitude")
                cfg.perturb_amplitude = parse_real(line_no, key, value);
            else if (key == "area") cfg.area = parse_real(line_no, key, value);
            else if (key == "scheme") {
                if (value == "semi_implicit") cfg.scheme = FlowScheme::semi_implicit;
                else if (value == "rk4") cfg.scheme = FlowScheme::rk4;
                else if (value == "explicit_euler") cfg.scheme = FlowScheme::explicit_euler;
                else
                    throw ConfigError(line_no,
                                      "scheme must be semi_implicit|rk4|explicit_euler");
            } else
                throw ConfigError(line_no, "unknown key '" + key + "' in [numerics]");
        } else if (section == "schedule") {
            if (key.rfind("beta", 0) != 0)
                throw ConfigError(line_no, "schedule keys look like beta<index>");
            const std::string idx = key.substr(4);
            const long j = parse_int(line_no, key, idx);
            cfg.schedule_by_index[static_cast<int>(j)] =
                parse_schedule_table(line_no, key, value);
        } else if (section == "heatkernel") {
            if (key == "beta") cfg.hk_beta = parse_real(line_no, key, value);
            else if (key == "r_max") cfg.hk_r_max = parse_real(line_no, key, value);
            else if (key == "t") cfg.hk_t = parse_real(line_no, key, value);
            else if (key == "samples")
                cfg.hk_samples = static_cast<int>(parse_int(line_no, key, value));
            else if (key == "max_mode")
                cfg.hk_max_mode = static_cast<int>(parse_int(line_no, key, value));
            else if (key == "tolerance") cfg.hk_tolerance = parse_real(line_no, key, value);
            else
                throw ConfigError(line_no, "unknown key '" + key + "' in [heatkernel]");
        } else if (section == "output") {
            if (key == "out_dir") cfg.out_dir = value;
            else if (key == "timeseries") cfg.timeseries_name = value;
            else if (key == "snapshot") cfg.snapshot_name = value;
            else if (key == "plots") {
                std::stringstream ss(value);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    item = trim(item);
                    if (!item.empty()) cfg.plots.push_back(item);
                }
            } else
                throw ConfigError(line_no, "unknown key '" + key + "' in [output]");
        } else {
            throw ConfigError(line_no, "key '" + key + "' outside any known section");
        }
    }

    if (!have_kind)
        throw ConfigError(0, "missing required keys: [run] kind (and [spec] genus/betas for flows)");
    if (cfg.kind != ExperimentKind::heatkernel && !have_genus)
        throw ConfigError(0, "missing required key: [spec] genus");

    // invariants
    if (!(cfg.dt_min > 0.0) || !(cfg.dt_init > 0.0) || cfg.dt_min > cfg.dt_init)
        throw ConfigError(0, "require 0 < dt_min <= dt_init");
    if (!(cfg.tol_curvature > 0.0)) throw ConfigError(0, "tolerances must be positive");
    if (cfg.record_every < 1) throw ConfigError(0, "record_every must be >= 1");

    cfg.spec.cone_points.clear();
    for (std::size_t j = 0; j < cfg.spec.betas.size(); ++j) {
        const std::string label = (j < labels.size()) ? labels[j] : "p" + std::to_string(j);
        cfg.spec.cone_points.push_back({label, std::nullopt});
    }
    cfg.spec.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace conicricci

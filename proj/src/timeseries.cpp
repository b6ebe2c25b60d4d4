#include "conicricci/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "conicricci/numerics.hpp"

namespace conicricci {

namespace {

const char* kHeader =
    "t,area,rho,R_min,R_max,energy_F,entropy_N,gb_residual,phi_min,phi_max,mu_norm,X_norm,"
    "grad_f_max";

std::string cell(double v) { return (v == v) ? format_double(v) : std::string(); }

double residual_of(const DiagnosticsRecord& r) {
    return std::max(std::abs(r.r_min - r.rho), std::abs(r.r_max - r.rho));
}

}  // namespace

std::string timeseries_text(const Trajectory& trajectory) {
    std::ostringstream out;
    out << kHeader << "\n";
    for (const auto& r : trajectory.records) {
        out << format_double(r.t) << "," << format_double(r.area) << "," << format_double(r.rho)
            << "," << format_double(r.r_min) << "," << format_double(r.r_max) << ","
            << format_double(r.energy_f) << "," << cell(r.entropy_n) << ","
            << format_double(r.gauss_bonnet_residual) << "," << format_double(r.phi_min) << ","
            << format_double(r.phi_max) << "," << cell(r.mu_norm) << "," << cell(r.x_norm) << ","
            << cell(r.grad_f_max) << "\n";
    }
    return out.str();
}

void emit_timeseries(const Trajectory& trajectory, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_timeseries: cannot open " + path);
    out << timeseries_text(trajectory);
}

TailFit residual_tail_fit(const Trajectory& trajectory, double tail_fraction) {
    TailFit fit;
    std::vector<double> ts, logs;
    const std::size_t n = trajectory.records.size();
    const std::size_t start = static_cast<std::size_t>(n * (1.0 - tail_fraction));
    for (std::size_t i = start; i < n; ++i) {
        const double res = residual_of(trajectory.records[i]);
        if (res > 0.0) {
            ts.push_back(trajectory.records[i].t);
            logs.push_back(std::log(res));
        }
    }
    if (ts.size() < 3) return fit;
    const LineFit lf = fit_line(ts, logs);
    fit.slope = lf.slope;
    fit.r_squared = lf.r_squared;
    fit.points = static_cast<int>(ts.size());
    return fit;
}

namespace {

double extract(const DiagnosticsRecord& r, const std::string& q) {
    if (q == "t") return r.t;
    if (q == "area") return r.area;
    if (q == "rho") return r.rho;
    if (q == "R_min") return r.r_min;
    if (q == "R_max") return r.r_max;
    if (q == "energy_F") return r.energy_f;
    if (q == "entropy_N") return r.entropy_n;
    if (q == "gb_residual") return r.gauss_bonnet_residual;
    if (q == "phi_min") return r.phi_min;
    if (q == "phi_max") return r.phi_max;
    if (q == "mu_norm") return r.mu_norm;
    if (q == "X_norm") return r.x_norm;
    if (q == "grad_f_max") return r.grad_f_max;
    if (q == "residual") return residual_of(r);
    if (q == "log_residual") {
        const double res = residual_of(r);
        return res > 0.0 ? std::log10(res) : std::numeric_limits<double>::quiet_NaN();
    }
    throw std::invalid_argument("emit_plot: unknown quantity '" + q + "'");
}

}  // namespace

PlotResult emit_plot(const Trajectory& trajectory, const std::string& quantity,
                     const std::string& path) {
    std::vector<double> xs, ys;
    for (const auto& r : trajectory.records) {
        const double v = extract(r, quantity);
        if (v == v && std::isfinite(v)) {
            xs.push_back(r.t);
            ys.push_back(v);
        }
    }
    PlotResult result;
    if (quantity == "log_residual") {
        const TailFit tf = residual_tail_fit(trajectory);
        result.tail_slope = tf.slope;
        result.tail_r_squared = tf.r_squared;
    }

    const double w = 720, h = 480, ml = 70, mr = 20, mt = 30, mb = 50;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!xs.empty()) {
        x0 = *std::min_element(xs.begin(), xs.end());
        x1 = *std::max_element(xs.begin(), xs.end());
        y0 = *std::min_element(ys.begin(), ys.end());
        y1 = *std::max_element(ys.begin(), ys.end());
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - y0) / (y1 - y0) * (h - mt - mb); };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xt = x0 + (x1 - x0) * k / 4.0;
        const double yt = y0 + (y1 - y0) * k / 4.0;
        svg << "<text x='" << px(xt) << "' y='" << h - mb + 18
            << "' font-size='11' text-anchor='middle'>" << xt << "</text>\n";
        svg << "<text x='" << ml - 6 << "' y='" << py(yt) + 4
            << "' font-size='11' text-anchor='end'>" << yt << "</text>\n";
    }
    svg << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 12
        << "' font-size='13' text-anchor='middle'>t</text>\n";
    svg << "<text x='" << (ml + w - mr) / 2 << "' y='" << mt - 10
        << "' font-size='13' text-anchor='middle'>" << quantity << "</text>\n";
    if (!xs.empty()) {
        svg << "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < xs.size(); ++i) svg << px(xs[i]) << "," << py(ys[i]) << " ";
        svg << "'/>\n";
    }
    if (quantity == "log_residual" && result.tail_r_squared > 0.0) {
        svg << "<text x='" << w - mr - 6 << "' y='" << mt + 14
            << "' font-size='12' text-anchor='end'>tail slope " << result.tail_slope
            << " /t (R^2 " << result.tail_r_squared << ")</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_plot: cannot open " + path);
    out << svg.str();
    return result;
}

}  // namespace conicricci

#include "conicricci/cone_geometry.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace conicricci {

void ConicSurfaceSpec::validate() const {
    if (genus < 0) throw std::invalid_argument("spec: genus must be nonnegative");
    if (cone_points.size() != betas.size())
        throw std::invalid_argument("spec: cone_points and betas must have equal length");
    std::set<std::string> labels;
    for (const auto& p : cone_points) {
        if (!labels.insert(p.label).second)
            throw std::invalid_argument("spec: duplicate cone point label '" + p.label + "'");
    }
    for (double b : betas) {
        // beta = 1 is rejected here: smooth points must simply be dropped.
        if (!(b > 0.0 && b < 1.0))
            throw std::invalid_argument("spec: cone angle parameter must lie in (0,1), got " +
                                        std::to_string(b));
    }
}

ConicSurfaceSpec make_spec(int genus, std::vector<double> betas) {
    ConicSurfaceSpec spec;
    spec.genus = genus;
    spec.betas = std::move(betas);
    spec.cone_points.reserve(spec.betas.size());
    for (std::size_t j = 0; j < spec.betas.size(); ++j)
        spec.cone_points.push_back({"p" + std::to_string(j), std::nullopt});
    spec.validate();
    return spec;
}

std::string to_string(LimitKind kind) {
    switch (kind) {
        case LimitKind::constant_curvature: return "constant_curvature";
        case LimitKind::soliton_teardrop: return "soliton_teardrop";
        case LimitKind::soliton_football: return "soliton_football";
        case LimitKind::constant_curvature_modulo_scale: return "constant_curvature_modulo_scale";
        case LimitKind::constant_curvature_modulo_mobius: return "constant_curvature_modulo_mobius";
        case LimitKind::blowup_expected: return "blowup_expected";
    }
    return "unknown";
}

double conic_euler_characteristic(const ConicSurfaceSpec& spec) {
    spec.validate();
    double chi = 2.0 - 2.0 * spec.genus;
    for (double b : spec.betas) chi += b - 1.0;
    return chi;
}

double target_rho(const ConicSurfaceSpec& spec, double initial_area) {
    if (!(initial_area > 0.0)) throw std::domain_error("target_rho: area must be positive");
    return 4.0 * std::numbers::pi * conic_euler_characteristic(spec) / initial_area;
}

TroyanovReport troyanov_check(const ConicSurfaceSpec& spec, double chi_epsilon) {
    TroyanovReport rep;
    rep.chi_conic = conic_euler_characteristic(spec);
    if (rep.chi_conic > chi_epsilon)
        rep.sign_class = SignClass::positive;
    else if (rep.chi_conic < -chi_epsilon)
        rep.sign_class = SignClass::negative;
    else
        rep.sign_class = SignClass::zero;

    if (rep.sign_class != SignClass::positive) {
        rep.holds = true;
        return rep;
    }
    double alpha_sum = 0.0;
    for (double b : spec.betas) alpha_sum += b - 1.0;
    for (std::size_t j = 0; j < spec.betas.size(); ++j) {
        const double alpha_j = spec.betas[j] - 1.0;
        if (!(2.0 * alpha_j > alpha_sum)) rep.failing_indices.push_back(static_cast<int>(j));
    }
    rep.holds = rep.failing_indices.empty();
    return rep;
}

LimitClass classify_limit(const ConicSurfaceSpec& spec, double chi_epsilon) {
    const TroyanovReport rep = troyanov_check(spec, chi_epsilon);
    const std::size_t k = spec.betas.size();
    LimitClass out;

    if (rep.sign_class == SignClass::zero) {
        out.kind = LimitKind::constant_curvature_modulo_scale;
        out.notes = "flat limit; metric unique up to a constant positive multiple";
        return out;
    }
    if (spec.genus == 0 && k == 0) {
        out.kind = LimitKind::constant_curvature_modulo_mobius;
        out.notes = "round sphere; unique up to Mobius transformations";
        return out;
    }
    if (spec.genus == 0 && k == 1) {
        out.kind = LimitKind::soliton_teardrop;
        out.notes = "no constant curvature metric with a single conic point";
        return out;
    }
    if (spec.genus == 0 && k == 2) {
        if (std::abs(spec.betas[0] - spec.betas[1]) <= chi_epsilon) {
            out.kind = LimitKind::constant_curvature;
            out.notes = "standard suspension (equal cone angles)";
        } else {
            out.kind = LimitKind::soliton_football;
            out.notes = "unequal cone angles; football soliton limit";
        }
        return out;
    }
    if (rep.holds) {
        out.kind = LimitKind::constant_curvature;
        out.notes = rep.sign_class == SignClass::positive
                        ? "Troyanov condition holds; unique constant curvature limit"
                        : "nonpositive conic Euler characteristic; unique constant curvature limit";
        return out;
    }
    out.kind = LimitKind::blowup_expected;
    out.notes = "Troyanov condition fails at index " + std::to_string(rep.failing_indices.front()) +
                "; conformal factor expected to blow up at one point";
    return out;
}

}  // namespace conicricci

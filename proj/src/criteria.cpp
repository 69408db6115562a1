#include "kestrel/criteria.hpp"

#include <cmath>

#include "kestrel/kernels.hpp"

namespace kestrel {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void finish(CriterionReport& r, double sigma_margin) {
    r.margin = r.rhs - r.lhs;
    r.boundary = r.margin == 0.0;
    if (sigma_margin > 0.0) r.inconclusive = std::abs(r.margin) < 3.0 * sigma_margin;
}

} // namespace

CriterionReport check_first_blowup(int d, double mass, double second_moment, double alpha,
                                   double sigma_lhs) {
    require_positive(mass, "mass");
    require_positive(second_moment, "second moment");
    if (alpha < 0.0) throw std::invalid_argument("alpha >= 0 required");
    CriterionReport r;
    r.name = "first_blowup";
    r.lhs = second_moment;
    r.rhs = k1_alpha(d, mass, alpha) * std::pow(mass, static_cast<double>(d) / (d - 2));
    r.verdict = r.lhs < r.rhs;  // strict, per the criterion's printed inequality
    finish(r, sigma_lhs);
    r.inputs = {{"d", double(d)}, {"mass", mass}, {"i0", second_moment}, {"alpha", alpha}};
    return r;
}

CriterionReport check_second_blowup(int d, double mass, double second_moment, double energy,
                                    double sigma_lhs) {
    require_positive(mass, "mass");
    require_positive(second_moment, "second moment");
    const DimensionalConstants c = compute_constants(d);
    CriterionReport r;
    r.name = "second_blowup";
    const double f0 = std::log(second_moment) + 2.0 * energy / (d * mass);
    const double equiv = d * (d - 2) * mass * f0 + c.b(mass);
    const double log_rhs =
        std::log(c.k2) + (1.0 + 2.0 / d) * std::log(mass) - 2.0 * energy / (d * mass);
    if (std::abs(log_rhs) < 700.0) {
        r.lhs = second_moment;
        r.rhs = std::exp(log_rhs);
        finish(r, sigma_lhs);
    } else {
        r.log_scale = true;  // exp would overflow; compare moments in log space
        r.lhs = std::log(second_moment);
        r.rhs = log_rhs;
        finish(r, sigma_lhs / second_moment);
    }
    r.verdict = r.lhs < r.rhs;  // strict
    r.boundary = r.margin == 0.0;
    r.extra["equiv_margin"] = equiv;  // negative iff criterion satisfied
    r.inputs = {{"d", double(d)}, {"mass", mass}, {"i0", second_moment}, {"e0", energy}};
    return r;
}

SmallnessReports check_smallness(const DimensionalConstants& c, double l_half_norm) {
    require_positive(l_half_norm, "L^{d/2} norm");
    SmallnessReports out;
    out.sobolev.name = "smallness_sobolev";
    out.sobolev.lhs = l_half_norm;
    out.sobolev.rhs = c.smallness_sobolev;
    out.sobolev.verdict = l_half_norm < c.smallness_sobolev;
    finish(out.sobolev, 0.0);
    out.sobolev.inputs = {{"d", double(c.d)}, {"lhalf", l_half_norm}};
    if (c.smallness_gn) {
        out.gn_available = true;
        out.gn.name = "smallness_gn";
        out.gn.lhs = l_half_norm;
        out.gn.rhs = *c.smallness_gn;
        out.gn.verdict = l_half_norm < *c.smallness_gn;
        finish(out.gn, 0.0);
        out.gn.inputs = out.sobolev.inputs;
    }
    return out;
}

CriterionReport check_general_blowup_necessary(int d, double l_half_norm) {
    require_positive(l_half_norm, "L^{d/2} norm");
    const DimensionalConstants c = compute_constants(d);
    CriterionReport r;
    r.name = "general_blowup_necessary";
    // satisfied when the norm EXCEEDS the threshold; orientation flipped
    r.lhs = 2.0 * d / ((d - 2) * c.sobolev_sq);
    r.rhs = l_half_norm;
    r.verdict = l_half_norm > r.lhs;
    finish(r, 0.0);
    r.inputs = {{"d", double(d)}, {"lhalf", l_half_norm}};
    return r;
}

bool check_incompatibility(const CriterionReport& blowup, const CriterionReport& smallness) {
    auto get = [](const CriterionReport& r, const char* key) {
        auto it = r.inputs.find(key);
        return it == r.inputs.end() ? std::nan("") : it->second;
    };
    if (get(blowup, "d") != get(smallness, "d"))
        throw std::invalid_argument("check_incompatibility: reports from different dimensions");
    const double mb = get(blowup, "mass"), ms = get(smallness, "mass");
    if (!std::isnan(mb) && !std::isnan(ms) && mb != ms)
        throw std::invalid_argument("check_incompatibility: reports from different masses");
    return !(blowup.verdict && smallness.verdict);
}

LocalExistenceHorizon local_existence_horizon(int d, double p, double lp_norm_p_power) {
    if (!(p > 0.5 * d)) throw std::invalid_argument("local_existence_horizon: p > d/2 required");
    require_positive(lp_norm_p_power, "int n0^p");
    const DimensionalConstants c = compute_constants(d);
    const double r = 2.0 * p / d;
    const double rp = r / (r - 1.0);
    LocalExistenceHorizon h;
    h.delta_p = std::pow(d * c.sobolev_sq / 8.0, d / (2.0 * p));
    h.T_p = p / (p - 1.0) * std::pow(h.delta_p, -rp) *
            std::pow(lp_norm_p_power, 1.0 / (0.5 * d - p));
    return h;
}

ConcentrationResult check_parabolic_concentration(int d, double mass, double second_moment,
                                                  double energy_pp, double eps,
                                                  double gamma_exp, double c_d) {
    require_positive(mass, "mass");
    require_positive(second_moment, "second moment");
    require_positive(eps, "eps");
    require_positive(c_d, "C(d)");
    if (!(gamma_exp > 0.0 && gamma_exp < 1.0))
        throw std::invalid_argument("gamma_exp must lie in (0,1)");
    const DimensionalConstants c = compute_constants(d);
    ConcentrationResult out;
    CriterionReport& r = out.report;
    r.name = "parabolic_concentration";
    const double eg = std::pow(eps, gamma_exp);
    const double f0 = std::log(second_moment) + 2.0 * energy_pp / (d * mass);
    const double equiv = d * (d - 2) * mass * (f0 + eg) + c.b(mass);
    const double log_rhs = std::log(c.k2) + (1.0 + 2.0 / d) * std::log(mass) -
                           2.0 * energy_pp / (d * mass) - eg;
    if (std::abs(log_rhs) < 700.0) {
        r.lhs = second_moment;
        r.rhs = std::exp(log_rhs);
    } else {
        r.log_scale = true;
        r.lhs = std::log(second_moment);
        r.rhs = log_rhs;
    }
    r.verdict = r.lhs < r.rhs;  // strict
    finish(r, 0.0);
    r.extra["equiv_margin"] = equiv;
    r.inputs = {{"d", double(d)},     {"mass", mass},           {"i0", second_moment},
                {"e0_pp", energy_pp}, {"eps", eps},             {"gamma_exp", gamma_exp},
                {"cd", c_d}};
    out.lower_bound = 2.0 * (d - 2) / sq(c_d) * std::pow(eps, gamma_exp - 1.0);
    out.eps_small_bound = 2.0 * c.hls / (d * c.sphere_area * sq(c_d));
    out.lhalf_lower_bound = (d * (d - 2) * eg + 2.0 * d) * c.sphere_area / c.hls;
    r.extra["lower_bound"] = out.lower_bound;
    r.extra["eps_small_bound"] = out.eps_small_bound;
    r.extra["lhalf_lower_bound"] = out.lhalf_lower_bound;
    return out;
}

} // namespace kestrel

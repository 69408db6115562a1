// Blow-up / global-existence / concentration criteria evaluated on initial
// data, each returned as a signed-margin report.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "kestrel/constants.hpp"
#include "kestrel/util.hpp"

namespace kestrel {

struct CriterionReport {
    std::string name;     // first_blowup, second_blowup, smallness_sobolev,
                          // smallness_gn, parabolic_concentration,
                          // general_blowup_necessary
    bool verdict = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs, positive iff satisfied (per orientation)
    bool boundary = false;       // equality at the threshold
    bool inconclusive = false;   // |margin| within 3 sigma of a Monte Carlo input
    bool log_scale = false;      // lhs/rhs reported in log space (overflow guard)
    std::map<std::string, double> inputs;
    std::map<std::string, double> extra;
};

// I0 < K_1^alpha(d, M) M^{d/(d-2)}
CriterionReport check_first_blowup(int d, double mass, double second_moment, double alpha,
                                   double sigma_lhs = 0.0);

// I0 < K_2(d) M^{1+2/d} exp(-2 E0/(dM)); also reports the equivalent margin
// d(d-2)M F0 + B(d,M) in extra["equiv_margin"].
CriterionReport check_second_blowup(int d, double mass, double second_moment, double energy,
                                    double sigma_lhs = 0.0);

struct SmallnessReports {
    CriterionReport sobolev;
    CriterionReport gn;      // only meaningful when gn_available
    bool gn_available = false;
};

// norm < 8/(d C_S^2) and (when constants carry smallness_gn) the improved
// norm < (8/d) C_GN^{-2(1+2/d)}.
SmallnessReports check_smallness(const DimensionalConstants& c, double l_half_norm);

// ||n0||_{d/2} > 2d/((d-2) C_S^2(d)), the necessary condition shared by both
// blow-up criteria.
CriterionReport check_general_blowup_necessary(int d, double l_half_norm);

// True when the pair of reports does not jointly assert a blow-up criterion
// and the Sobolev smallness condition on the same inputs.
bool check_incompatibility(const CriterionReport& blowup, const CriterionReport& smallness);

struct LocalExistenceHorizon {
    double T_p = 0.0;
    double delta_p = 0.0;
};

// T_p = p/(p-1) delta^{-r'} (int n0^p)^{1/(d/2-p)} with
// delta = (d C_S^2/8)^{d/(2p)}, r = 2p/d, r' = r/(r-1).
LocalExistenceHorizon local_existence_horizon(int d, double p, double lp_norm_p_power);

struct ConcentrationResult {
    CriterionReport report;
    double lower_bound = 0.0;       // 2(d-2) C_d^{-2} eps^{gamma-1}
    double eps_small_bound = 0.0;   // 2 C_HLS / (d |S^{d-1}| C_d^2)
    double lhalf_lower_bound = 0.0; // (d(d-2) eps^gamma + 2d) |S^{d-1}| / C_HLS
};

// d(d-2)M F0 + B(d,M) + d(d-2)M eps^gamma < 0 with F0 = log I0 + 2 E0/(dM),
// E0 the full parabolic energy. C_d is the concentration theorem's analytic
// constant; it is not quantified anywhere, so the caller must supply it.
ConcentrationResult check_parabolic_concentration(int d, double mass, double second_moment,
                                                  double energy_pp, double eps,
                                                  double gamma_exp, double c_d);

} // namespace kestrel

// Newtonian kernel E_d, Bessel kernel B_d^alpha of (-Delta + alpha), its
// radial gradient profile g_alpha, and the alpha-dependent blow-up constant
// K_1^alpha(d, M).
#pragma once

#include "kestrel/util.hpp"

namespace kestrel {

struct BesselParams {
    int d = 3;
    double alpha = 0.0;        // chemical degradation rate, >= 0
    int min_panels = 16;       // quadrature node floor (panels of 15 nodes)
    double rel_tol = 1e-10;

    BesselParams() = default;
    BesselParams(int d_, double alpha_, int min_panels_ = 16) : d(d_), alpha(alpha_) {
        min_panels = min_panels_;
        if (d < 3) throw std::invalid_argument("BesselParams: d >= 3 required");
        if (alpha < 0) throw std::invalid_argument("BesselParams: alpha >= 0 required");
        if (min_panels < 16)
            throw std::invalid_argument("BesselParams: node count floor is 16");
    }
};

// E_d(r) = mu_d r^{2-d}
double eval_E(int d, double r);

// g_alpha(r) = Gamma(d/2)^{-1} int_0^inf s^{d/2-1} e^{-s - alpha r^2/(4s)} ds,
// in (0, 1]; g_0 == 1 exactly.
double eval_g(const BesselParams& params, double r);

// B_d^alpha(r) = int_0^inf (4 pi t)^{-d/2} e^{-r^2/(4t) - alpha t} dt,
// evaluated after the substitution t = r^2/(4s); equals E_d for alpha = 0.
double eval_B(const BesselParams& params, double r);

// K_1^alpha(d, M) = 1/2 [ sup_{R>0} g(R) R^{d-2} / (2d|S^{d-1}|R^{d-2} + g(R)M) ]^{2/(d-2)}
// For alpha = 0 the supremum is attained as R -> inf and the closed form K_1(d)
// is returned.
double k1_alpha(int d, double mass, double alpha);

} // namespace kestrel

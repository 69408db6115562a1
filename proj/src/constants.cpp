#include "kestrel/constants.hpp"

#include <algorithm>
#include <cmath>

#include "kestrel/ode.hpp"

namespace kestrel {

double DimensionalConstants::b(double mass) const {
    return d * d * mass -
           2.0 * (d - 2) * (mass * std::log(mass) +
                            0.5 * d * mass * std::log(d * mass / (2.0 * M_PI)));
}

DimensionalConstants compute_constants(int d) {
    if (d < 3) throw std::invalid_argument("compute_constants: d >= 3 required");
    DimensionalConstants c;
    c.d = d;
    c.sphere_area = unit_sphere_area(d);
    c.mu_d = 1.0 / ((d - 2) * c.sphere_area);
    // |S^d| is the unit sphere of R^{d+1}
    const double sphere_d = unit_sphere_area(d + 1);
    c.sobolev_sq = 4.0 / (d * (d - 2) * std::pow(sphere_d, 2.0 / d));
    c.hls = std::pow(M_PI, 0.5 * d - 1.0) / std::tgamma(0.5 * d + 1.0) *
            std::pow(std::tgamma(d) / std::tgamma(0.5 * d), 2.0 / d);
    c.k1 = std::pow(2.0, -static_cast<double>(d) / (d - 2)) *
           std::pow(d * c.sphere_area, -2.0 / (d - 2));
    c.k2 = d / (2.0 * M_PI) * std::exp(-static_cast<double>(d) / (d - 2));
    c.smallness_sobolev = 8.0 / (d * c.sobolev_sq);
    return c;
}

namespace {

enum class ShotOutcome { Overshoot, Undershoot, Decayed };

// Integrate the shooting ODE from r0 with a series start. Events: psi
// crossing zero (overshoot) or psi' turning upward while psi > 0
// (undershoot / bounce).
ShotOutcome shoot(int d, double A, double r_cap) {
    const double p = 1.0 + 4.0 / d;
    OdeRhs rhs = [d, p](const std::vector<double>& y, std::vector<double>& dy) {
        dy.resize(3);
        const double r = y[2];
        dy[0] = y[1];
        dy[1] = -(d - 1) / r * y[1] + (2.0 / d) * y[0] -
                (y[0] > 0 ? std::pow(y[0], p) : -std::pow(-y[0], p));
        dy[2] = 1.0;
    };
    const double r0 = 1e-6;
    const double curv = (A * (2.0 / d) - std::pow(A, p)) / (2.0 * d);
    std::vector<double> y0 = {A + curv * r0 * r0, 2.0 * curv * r0, r0};

    std::vector<OdeEvent> events;
    events.push_back({[](const std::vector<double>& y) { return y[0]; }, -1});      // psi = 0
    events.push_back({[](const std::vector<double>& y) { return y[1]; }, +1});      // psi' = 0

    OdeOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    opt.h_max = 0.25;
    OdeResult res = integrate_adaptive(rhs, y0, 0.0, r_cap - r0, opt, events);
    if (res.outcome == OdeOutcome::Event)
        return res.event_index == 0 ? ShotOutcome::Overshoot : ShotOutcome::Undershoot;
    return ShotOutcome::Decayed;
}

// K_nu(x) based tail of the linearized far-field equation
//   psi'' + (d-1)/r psi' = (2/d) psi.
struct BesselTail {
    int d;
    double kappa, B;
    double value(double r) const {
        return B * std::pow(r, 1.0 - 0.5 * d) * std::cyl_bessel_k(0.5 * d - 1.0, kappa * r);
    }
};

} // namespace

GroundStateSolution solve_ground_state(int d, double tol, const GroundStateOptions& opt) {
    if (d < 3) throw std::invalid_argument("solve_ground_state: d >= 3 required");
    if (!(tol > 0.0) || tol > 1e-3)
        throw std::invalid_argument("solve_ground_state: tol must be in (0, 1e-3]");

    const double psi_eq = std::pow(2.0 / d, 0.25 * d);
    const double r_cap = 200.0;

    // bracket the shooting parameter
    double lo = 1.0001 * psi_eq, hi = 0.0;
    double A = 1.5 * psi_eq;
    for (int it = 0; it < 60; ++it) {
        const ShotOutcome out = shoot(d, A, r_cap);
        if (out == ShotOutcome::Overshoot) {
            hi = A;
            break;
        }
        lo = A;
        A *= 2.0;
    }
    if (hi == 0.0)
        throw numerical_error("solve_ground_state: shooting interval does not bracket");
    for (int it = 0; it < 90 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (shoot(d, mid, r_cap) == ShotOutcome::Overshoot)
            hi = mid;
        else
            lo = mid;
    }
    const double A_star = lo;  // positive-side iterate

    // Final pass: integrate segment-by-segment so that every uniform grid
    // node holds a direct solution value (no interpolation kinks in the
    // finite-difference residual). Stop once the unstable mode makes the
    // numeric solution bounce or cross zero.
    const double dr = opt.grid_step;
    const double p = 1.0 + 4.0 / d;
    OdeRhs rhs = [d, p](const std::vector<double>& y, std::vector<double>& dy) {
        dy.resize(3);
        const double r = y[2];
        dy[0] = y[1];
        dy[1] = -(d - 1) / r * y[1] + (2.0 / d) * y[0] -
                (y[0] > 0 ? std::pow(y[0], p) : -std::pow(-y[0], p));
        dy[2] = 1.0;
    };
    OdeOptions oopt;
    oopt.rel_tol = 1e-12;
    oopt.abs_tol = 1e-14;

    const double r0 = 1e-6;
    const double curv = (A_star * (2.0 / d) - std::pow(A_star, p)) / (2.0 * d);
    std::vector<double> y = {A_star + curv * r0 * r0, 2.0 * curv * r0, r0};
    std::vector<double> psi_num, dpsi_num;  // values at nodes dr, 2dr, ...
    {
        // first segment [r0, dr], then steps of dr
        OdeResult seg = integrate_adaptive(rhs, y, 0.0, dr - r0, oopt);
        y = seg.y;
        psi_num.push_back(y[0]);
        dpsi_num.push_back(y[1]);
        const int cap = static_cast<int>(std::ceil(r_cap / dr));
        for (int k = 1; k < cap; ++k) {
            seg = integrate_adaptive(rhs, y, 0.0, dr, oopt);
            y = seg.y;
            if (!(y[0] > 0.0) || y[1] >= 0.0) break;  // deviation onset
            psi_num.push_back(y[0]);
            dpsi_num.push_back(y[1]);
        }
    }

    // graft node: last node with psi above the target, chosen small enough
    // that the nonlinear term dropped by the Bessel tail is far below tol
    const double psi_target = std::min(3e-4 * A_star,
                                       std::pow(0.05 * tol, d / (d + 4.0)));
    std::size_t ig = psi_num.size() - 1;
    while (ig > 0 && psi_num[ig] < psi_target) --ig;
    if (ig + 1 >= psi_num.size() || psi_num[ig] <= 0.0)
        throw numerical_error("solve_ground_state: no usable graft point");
    const double r_g = dr * (ig + 1);

    BesselTail tail{d, std::sqrt(2.0 / d), 1.0};
    tail.B = psi_num[ig] / (std::pow(r_g, 1.0 - 0.5 * d) *
                            std::cyl_bessel_k(0.5 * d - 1.0, tail.kappa * r_g));

    double r_max = opt.r_max;
    while (tail.value(r_max) >= opt.tail_cut) r_max *= 2.0;

    GroundStateSolution gs;
    gs.d = d;
    gs.psi0 = A_star;
    const int n = static_cast<int>(std::floor(r_max / dr));
    const double r_blend_end = std::min(r_g + 2.0, dr * psi_num.size());
    gs.radial_grid.resize(n);
    gs.psi.resize(n);
    for (int i = 0; i < n; ++i) {
        const double r = dr * (i + 1);
        gs.radial_grid[i] = r;
        if (r >= r_blend_end || static_cast<std::size_t>(i) >= psi_num.size()) {
            gs.psi[i] = tail.value(r);
        } else if (r <= r_g) {
            gs.psi[i] = psi_num[i];
        } else {
            const double s = (r - r_g) / (r_blend_end - r_g);
            const double sig = s * s * (3.0 - 2.0 * s);  // C^1 blend into the tail
            gs.psi[i] = (1.0 - sig) * psi_num[i] + sig * tail.value(r);
        }
    }

    // trapezoid for ||psi||_{L^2}^2 plus the analytic [0, dr] head
    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double f0 = sq(gs.psi[i]) * std::pow(gs.radial_grid[i], d - 1);
        const double f1 = sq(gs.psi[i + 1]) * std::pow(gs.radial_grid[i + 1], d - 1);
        acc += 0.5 * (f0 + f1) * dr;
    }
    acc += sq(A_star) * std::pow(dr, d) / d;  // analytic [0, dr] head, psi ~ psi0 there
    gs.l2_norm = std::sqrt(unit_sphere_area(d) * acc);

    // max finite-difference residual of the full ODE on the grid
    double worst = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double r = gs.radial_grid[i];
        const double d2 = (gs.psi[i + 1] - 2.0 * gs.psi[i] + gs.psi[i - 1]) / (dr * dr);
        const double d1 = (gs.psi[i + 1] - gs.psi[i - 1]) / (2.0 * dr);
        const double res = d2 + (d - 1) / r * d1 - (2.0 / d) * gs.psi[i] +
                           std::pow(std::max(gs.psi[i], 0.0), p);
        worst = std::max(worst, std::abs(res));
    }
    gs.residual = worst;
    if (gs.residual > tol)
        throw numerical_error("solve_ground_state: residual " + std::to_string(gs.residual) +
                              " exceeds tol");
    return gs;
}

double gn_constant(const GroundStateSolution& gs) {
    if (gs.d < 3 || gs.l2_norm <= 0.0)
        throw std::invalid_argument("gn_constant: invalid ground state");
    const double d = gs.d;
    return std::pow(1.0 + 2.0 / d, d / (2.0 * (d + 2.0))) *
           std::pow(gs.l2_norm, -2.0 / (d + 2.0));
}

DimensionalConstants compute_constants_with_gn(int d, double tol, const GroundStateOptions& opt) {
    DimensionalConstants c = compute_constants(d);
    const GroundStateSolution gs = solve_ground_state(d, tol, opt);
    const double cgn = gn_constant(gs);
    c.smallness_gn = (8.0 / d) * std::pow(cgn, -2.0 * (1.0 + 2.0 / d));
    return c;
}

} // namespace kestrel

// Sharp functional-inequality constants for the Keller-Segel system in R^d,
// d >= 3, and the Gagliardo-Nirenberg constant obtained from the ground
// state of the critical semilinear equation.
#pragma once

#include <optional>
#include <vector>

#include "kestrel/util.hpp"

namespace kestrel {

struct DimensionalConstants {
    int d = 0;
    double sphere_area = 0.0;       // |S^{d-1}|
    double mu_d = 0.0;              // 1 / ((d-2)|S^{d-1}|)
    double sobolev_sq = 0.0;        // C_S^2(d) = 4 / (d(d-2)|S^d|^{2/d})
    double hls = 0.0;               // C_HLS(d, d-2)
    double k1 = 0.0;                // K_1(d) = 2^{-d/(d-2)} (d|S^{d-1}|)^{-2/(d-2)}
    double k2 = 0.0;                // K_2(d) = d/(2 pi) e^{-d/(d-2)}
    double smallness_sobolev = 0.0; // 8 / (d C_S^2)
    std::optional<double> smallness_gn;  // (8/d) C_GN^{-2(1+2/d)}, needs ground state

    // B(d,M) of the energy blow-up criterion, as a function of the mass.
    double b(double mass) const;
};

DimensionalConstants compute_constants(int d);

struct GroundStateSolution {
    int d = 0;
    std::vector<double> radial_grid;  // increasing, uniform step
    std::vector<double> psi;          // positive, strictly decreasing
    double psi0 = 0.0;                // shooting parameter psi(0)
    double l2_norm = 0.0;             // ||psi||_{L^2(R^d)}
    double residual = 0.0;            // max finite-difference ODE residual on grid
};

struct GroundStateOptions {
    // Uniform output grid spacing. The finite-difference residual floor near
    // the origin scales like (4d-2) |e4| grid_step^2 with e4 the r^4 series
    // coefficient; the default keeps it below ~5e-7 for d in 3..5.
    double grid_step = 2e-4;
    double r_max = 40.0;       // doubled until the tail drops below tail_cut
    double tail_cut = 1e-10;
};

// Minimal-L2-norm positive radial decaying solution of
//   psi'' + (d-1)/r psi' - (2/d) psi + psi^{1+4/d} = 0
// by bisection on psi(0). Throws numerical_error if the shooting interval
// fails to bracket or the residual target cannot be met.
GroundStateSolution solve_ground_state(int d, double tol, const GroundStateOptions& opt = {});

// C_GN(d/2, d) = (1+2/d)^{d/(2(d+2))} ||psi||_{L^2}^{-2/(d+2)}.
double gn_constant(const GroundStateSolution& gs);

// Convenience: constants with smallness_gn populated from a ground-state solve.
DimensionalConstants compute_constants_with_gn(int d, double tol = 1e-6,
                                               const GroundStateOptions& opt = {});

} // namespace kestrel

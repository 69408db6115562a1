#include <doctest.h>

#include <cmath>

#include "kestrel/constants.hpp"

using namespace kestrel;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// independent mini RK4 for the shooting ODE, used as the scan oracle
double psi_after(int d, double A, double r_end) {
    const double p = 1.0 + 4.0 / d;
    double r = 1e-6;
    double curv = (A * (2.0 / d) - std::pow(A, p)) / (2.0 * d);
    double psi = A + curv * r * r, dpsi = 2.0 * curv * r;
    const double h = 1e-4;
    auto acc = [&](double rr, double ps, double dp) {
        return -(d - 1) / rr * dp + (2.0 / d) * ps -
               (ps > 0 ? std::pow(ps, p) : -std::pow(-ps, p));
    };
    while (r < r_end) {
        const double k1p = dpsi, k1v = acc(r, psi, dpsi);
        const double k2p = dpsi + 0.5 * h * k1v, k2v = acc(r + 0.5 * h, psi + 0.5 * h * k1p, dpsi + 0.5 * h * k1v);
        const double k3p = dpsi + 0.5 * h * k2v, k3v = acc(r + 0.5 * h, psi + 0.5 * h * k2p, dpsi + 0.5 * h * k2v);
        const double k4p = dpsi + h * k3v, k4v = acc(r + h, psi + h * k3p, dpsi + h * k3v);
        psi += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        dpsi += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        r += h;
    }
    return psi;
}

} // namespace

TEST_CASE("closed-form constants for d = 3") {
    const DimensionalConstants c = compute_constants(3);
    CHECK(rel(c.sphere_area, 4.0 * M_PI) < 1e-14);
    // paper's closed form C_S^2(3) = (4/3)(1/(2 pi^2))^{2/3}
    CHECK(rel(c.sobolev_sq, (4.0 / 3.0) * std::pow(1.0 / (2.0 * M_PI * M_PI), 2.0 / 3.0)) <
          1e-14);
    CHECK(rel(c.sobolev_sq, 0.18253) < 5e-4);
    CHECK(rel(c.k2, 3.0 / (2.0 * M_PI) * std::exp(-3.0)) < 1e-14);
    CHECK(rel(c.k2, 0.0237706) < 1e-4);
    CHECK(rel(c.k1, std::pow(2.0, -3.0) * std::pow(12.0 * M_PI, -2.0)) < 1e-14);
    CHECK(rel(c.k1, 8.7953e-5) < 1e-4);
    CHECK(rel(c.hls, 2.2940) < 1e-4);
    CHECK(rel(c.mu_d * c.hls, c.sobolev_sq) < 1e-12);
    CHECK(!c.smallness_gn.has_value());
    CHECK(rel(c.smallness_sobolev, 8.0 / (3.0 * c.sobolev_sq)) < 1e-14);
}

TEST_CASE("duality and positivity across dimensions") {
    double k1_prev = 0.0;
    for (int d = 3; d <= 10; ++d) {
        const DimensionalConstants c = compute_constants(d);
        CHECK(rel(c.sobolev_sq, c.mu_d * c.hls) < 1e-10);
        CHECK(c.sphere_area > 0);
        CHECK(c.mu_d > 0);
        CHECK(c.hls > 0);
        CHECK(c.k1 > 0);
        CHECK(c.k2 > 0);
        CHECK(c.smallness_sobolev > 0);
        // regression property of the closed form: K_1 grows strictly with d
        // (2^{-d/(d-2)} -> 1/2 while the (d|S^{d-1}|)^{-2/(d-2)} factor -> 1)
        CHECK(c.k1 > k1_prev);
        k1_prev = c.k1;
    }
    CHECK_THROWS_AS(compute_constants(2), std::invalid_argument);
}

TEST_CASE("B(d, M) of the energy criterion") {
    const DimensionalConstants c = compute_constants(3);
    const double M = 1.7;
    const double expect =
        9.0 * M - 2.0 * (M * std::log(M) + 1.5 * M * std::log(3.0 * M / (2.0 * M_PI)));
    CHECK(rel(c.b(M), expect) < 1e-14);
}

TEST_CASE("ground state solve for d = 3") {
    const GroundStateSolution gs = solve_ground_state(3, 1e-6);
    CHECK(gs.residual < 1e-6);
    CHECK(gs.psi0 > std::pow(2.0 / 3.0, 0.75));
    for (std::size_t i = 0; i + 1 < gs.psi.size(); ++i) {
        CHECK(gs.psi[i] > 0.0);
        CHECK(gs.psi[i + 1] < gs.psi[i]);
    }
    CHECK(gs.psi.back() < 1e-10);
    // frozen oracle values (independent shooting solver, see scan oracle below)
    CHECK(rel(gs.psi0, 3.09260295) < 1e-6);
    CHECK(rel(gs.l2_norm, 7.9864332) < 1e-5);

    // grid-refinement self-consistency
    GroundStateOptions fine;
    fine.grid_step = 1e-4;
    const GroundStateSolution gs2 = solve_ground_state(3, 1e-6, fine);
    CHECK(rel(gs.l2_norm, gs2.l2_norm) < 1e-4);

    CHECK_THROWS_AS(solve_ground_state(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_ground_state(3, 2e-3), std::invalid_argument);
    CHECK_THROWS_AS(solve_ground_state(2, 1e-6), std::invalid_argument);
}

TEST_CASE("d = 4: shooting parameter sits above the equilibrium value") {
    const GroundStateSolution gs = solve_ground_state(4, 1e-6);
    const double eq = std::pow(2.0 / 4.0, 1.0);
    CHECK(gs.psi0 > eq);
    // brute scan: starting below the equilibrium the solution increases
    CHECK(psi_after(4, 0.9 * eq, 1.0) > 0.9 * eq);
    CHECK(psi_after(4, 0.5 * eq, 1.0) > 0.5 * eq);
    // and the solver's parameter reproduces a decaying profile in the oracle
    CHECK(psi_after(4, gs.psi0, 5.0) < gs.psi0);
}

TEST_CASE("Gagliardo-Nirenberg constant and the improved smallness condition") {
    const DimensionalConstants c = compute_constants_with_gn(3, 1e-6);
    REQUIRE(c.smallness_gn.has_value());
    const GroundStateSolution gs = solve_ground_state(3, 1e-6);
    const double cgn = gn_constant(gs);
    // the strict gap between the GN and Sobolev constants
    CHECK(std::pow(cgn, 2.0 * (1.0 + 2.0 / 3.0)) < c.sobolev_sq);
    CHECK(*c.smallness_gn > c.smallness_sobolev);
    CHECK(rel(*c.smallness_gn, 8.0 / 3.0 * std::pow(cgn, -2.0 * (1.0 + 2.0 / 3.0))) < 1e-12);
    // spec spot value: smallness_sobolev(3) ~ 14.609
    CHECK(rel(c.smallness_sobolev, 14.609) < 2e-4);

    GroundStateSolution bad;
    CHECK_THROWS_AS(gn_constant(bad), std::invalid_argument);
}

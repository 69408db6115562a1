#include <doctest.h>

#include <cmath>
#include <random>

#include "kestrel/discrete_flow.hpp"

using namespace kestrel;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const DiscreteConfig kFig1{0.5, 1.6, 3};  // gamma = 1/2, M = 1.6, chi = 0.4

DiscreteState random_state(std::mt19937_64& gen, int n) {
    std::uniform_real_distribution<double> ug(0.05, 2.0);
    std::vector<double> gaps(n - 1);
    for (double& g : gaps) g = ug(gen);
    return DiscreteState::from_gaps(gaps);
}

// independent energy evaluation on a raw point vector (no recentering), used
// as the finite-difference oracle for the gradient
double energy_fd(const DiscreteConfig& c, const std::vector<double>& x) {
    double u_part = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) u_part -= std::log(x[i + 1] - x[i]);
    double w = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            w += std::pow(x[j] - x[i], -c.gamma);
    return u_part - c.chi() / c.gamma * w;
}

} // namespace

TEST_CASE("discrete energy and its symmetries") {
    const DiscreteState s = DiscreteState::from_uv(1.0, 1.0);
    CHECK(std::abs(energy(kFig1, s) - (-0.8 * (2.0 + std::pow(2.0, -0.5)))) < 1e-12);
    CHECK(rel(energy(kFig1, s), -2.16569) < 1e-5);
    // u <-> v swap invariance
    const DiscreteState a = DiscreteState::from_uv(0.3, 1.1);
    const DiscreteState b = DiscreteState::from_uv(1.1, 0.3);
    CHECK(rel(energy(kFig1, a), energy(kFig1, b)) < 1e-14);
    // homogeneity split: G[lambda X] = U[X] - (N-1) log lambda - lambda^{-gamma} W[X]
    const double lam = 2.0;
    DiscreteState sl = s;
    for (double& x : sl.x) x *= lam;
    const double u_part = energy(kFig1, s) + pair_sum(kFig1, s);
    const double expect =
        u_part - 2.0 * std::log(lam) - std::pow(lam, -kFig1.gamma) * pair_sum(kFig1, s);
    CHECK(rel(energy(kFig1, sl), expect) < 1e-12);
    CHECK_THROWS_AS(energy(kFig1, DiscreteState::from_uv(1.0, -0.5)), std::invalid_argument);
}

TEST_CASE("gradient: finite differences, zero sum, Euler identity") {
    std::mt19937_64 gen(3);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = rep % 3 == 0 ? 5 : 3;  // exercise the general-N path too
        DiscreteConfig c = kFig1;
        c.n_points = n;
        const DiscreteState s = random_state(gen, n);
        const std::vector<double> g = gradient(c, s);
        double sum = 0.0, scale = 0.0;
        for (double v : g) {
            sum += v;
            scale = std::max(scale, std::abs(v));
        }
        CHECK(std::abs(sum) < 1e-12 * std::max(scale, 1.0));
        // central differences against the independent energy oracle
        const double h = 1e-6;
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            std::vector<double> xp = s.x, xm = s.x;
            xp[k] += h;
            xm[k] -= h;
            const double fd = (energy_fd(c, xp) - energy_fd(c, xm)) / (2.0 * h);
            CHECK(std::abs(fd - g[k]) < 1e-6 * std::max(1.0, std::abs(g[k])));
        }
        // Euler identity <X, grad G> = -(N-1) + gamma W
        double dot = 0.0;
        for (std::size_t k = 0; k < s.x.size(); ++k) dot += s.x[k] * g[k];
        CHECK(std::abs(dot - (-(n - 1.0) + c.gamma * pair_sum(c, s))) < 1e-8);
    }
}

TEST_CASE("N = 3 gradient flow matches the reduced (u, v) system") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> ug(0.1, 2.5);
    const double chi = kFig1.chi(), gam = kFig1.gamma;
    for (int rep = 0; rep < 50; ++rep) {
        const double u = ug(gen), v = ug(gen);
        const DiscreteState s = DiscreteState::from_uv(u, v);
        const std::vector<double> g = gradient(kFig1, s);
        // du/dt = dX2/dt - dX1/dt = -g[1] + g[0]
        const double du = g[0] - g[1];
        const double dv = g[1] - g[2];
        const double du_ref = 2.0 / u - 1.0 / v +
                              chi * (std::pow(v, -gam - 1) - 2.0 * std::pow(u, -gam - 1) -
                                     std::pow(u + v, -gam - 1));
        const double dv_ref = 2.0 / v - 1.0 / u +
                              chi * (std::pow(u, -gam - 1) - 2.0 * std::pow(v, -gam - 1) -
                                     std::pow(u + v, -gam - 1));
        CHECK(std::abs(-du - -du_ref) < 1e-11 * std::max(1.0, std::abs(du_ref)));
        CHECK(std::abs(dv - dv_ref) < 1e-11 * std::max(1.0, std::abs(dv_ref)));
    }
}

TEST_CASE("integrate: collapse, dispersion, symmetry, conserved center") {
    // |X0|^2 = 0.08 below the 0.1296 threshold: collapse
    const FlowOutcome col = integrate(kFig1, DiscreteState::from_uv(0.2, 0.2));
    CHECK(col.classification == FlowClass::Collapse);
    CHECK(!col.step_underflow);
    CHECK(col.time < 1.0);

    // global-criterion point disperses (needs a real time budget to reach R_max)
    IntegrateOptions far;
    far.t_max = 1e6;
    far.record = false;
    const FlowOutcome disp = integrate(kFig1, DiscreteState::from_uv(5.0, 5.0), far);
    CHECK(disp.classification == FlowClass::Dispersion);

    // symmetric data stays symmetric to 1e-8 at every sample
    const FlowOutcome sym = integrate(kFig1, DiscreteState::from_uv(0.35, 0.35));
    for (const TrajectorySample& ts : sym.trajectory)
        CHECK(std::abs((ts.x[1] - ts.x[0]) - (ts.x[2] - ts.x[1])) < 1e-8);

    // center of mass conserved along the flow
    for (const TrajectorySample& ts : sym.trajectory)
        CHECK(std::abs(ts.x[0] + ts.x[1] + ts.x[2]) <
              1e-10 * std::max(1.0, std::abs(ts.t)));

    // energy nonincreasing within integrator tolerance
    const FlowOutcome tr = integrate(kFig1, DiscreteState::from_uv(0.5, 1.4));
    for (std::size_t i = 1; i < tr.trajectory.size(); ++i)
        CHECK(tr.trajectory[i].energy <= tr.trajectory[i - 1].energy + 1e-7);

    // norm evolution identity at samples: -<X, grad G> = (N-1) - gamma W
    for (const TrajectorySample& ts : tr.trajectory) {
        DiscreteState s;
        s.x = ts.x;
        const std::vector<double> g = gradient(kFig1, s);
        double dot = 0.0;
        for (std::size_t k = 0; k < 3; ++k) dot += ts.x[k] * g[k];
        CHECK(std::abs(-dot - (2.0 - kFig1.gamma * pair_sum(kFig1, s))) < 1e-8);
    }
}

TEST_CASE("blow-up criteria thresholds and strictness") {
    // threshold (3 chi / 2)^{2/gamma} = 0.6^4 = 0.1296
    const CriterionReport c1 = criterion_blowup_1(kFig1, DiscreteState::from_uv(0.2, 0.2));
    CHECK(rel(c1.rhs, 0.1296) < 1e-12);
    CHECK(c1.verdict);
    // strict comparison: just above the threshold the verdict is false
    const double u_at = std::sqrt(0.1296 / 2.0);  // u = v with |X|^2 = 2u^2
    CHECK(!criterion_blowup_1(kFig1, DiscreteState::from_uv(u_at * 1.0000001, u_at * 1.0000001))
               .verdict);
    CHECK(criterion_blowup_1(kFig1, DiscreteState::from_uv(u_at * 0.9999999, u_at * 0.9999999))
              .verdict);

    // criterion 2 at the critical point: report both sides
    const DiscreteState cp = critical_point(kFig1);
    CHECK(rel(cp.u(), 0.293136) < 1e-5);
    const CriterionReport c2 = criterion_blowup_2(kFig1, cp);
    CHECK(c2.lhs == cp.norm2());
    CHECK(c2.rhs > 0.0);

    // region inclusion: criterion-1 set inside criterion-2 set on a 200x200 grid
    int n1 = 0, n2 = 0, bad = 0;
    for (int i = 1; i <= 200; ++i)
        for (int j = 1; j <= 200; ++j) {
            const double u = 2.0 * i / 200.0, v = 2.0 * j / 200.0;
            const DiscreteState s = DiscreteState::from_uv(u, v);
            const bool b1 = criterion_blowup_1(kFig1, s).verdict;
            const bool b2 = criterion_blowup_2(kFig1, s).verdict;
            n1 += b1;
            n2 += b2;
            if (b1 && !b2) ++bad;
        }
    CHECK(bad == 0);
    CHECK(n1 > 0);
    CHECK(n2 > n1);  // strict inclusion

    // the inequality behind the criterion nesting: (2/gamma) log(3/(2+2^-gamma)) < log 2
    for (double g = 0.05; g < 1.0; g += 0.05)
        CHECK(2.0 / g * std::log(3.0 / (2.0 + std::pow(2.0, -g))) < std::log(2.0));

    // every state passing criterion 1 passes criterion 2 (sampled corpus)
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> ug(0.01, 1.0);
    for (int k = 0; k < 500; ++k) {
        const DiscreteState s = DiscreteState::from_uv(ug(gen), ug(gen));
        if (criterion_blowup_1(kFig1, s).verdict) CHECK(criterion_blowup_2(kFig1, s).verdict);
    }
}

TEST_CASE("global existence criterion") {
    CHECK(rel(criterion_global(kFig1, 5.0, 5.0).lhs, 0.35777) < 1e-4);
    CHECK(criterion_global(kFig1, 5.0, 5.0).verdict);
    CHECK(rel(criterion_global(kFig1, 0.2, 0.2).lhs, 1.78885) < 1e-4);
    CHECK(!criterion_global(kFig1, 0.2, 0.2).verdict);
    // boundary on the diagonal at u = (2 chi)^{1/gamma} = 0.64
    const double ub = std::pow(2.0 * kFig1.chi(), 1.0 / kFig1.gamma);
    CHECK(rel(ub, 0.64) < 1e-12);
    CHECK(criterion_global(kFig1, ub * 1.000001, ub * 1.000001).verdict);
    CHECK(!criterion_global(kFig1, ub * 0.999999, ub * 0.999999).verdict);
    DiscreteConfig c5 = kFig1;
    c5.n_points = 5;
    CHECK_THROWS_AS(criterion_global(c5, 1.0, 1.0), std::invalid_argument);

    // along a dispersing trajectory started inside the criterion region,
    // L(t) = gamma^{-1}(u^-gamma + v^-gamma) never increases
    IntegrateOptions opt;
    opt.t_max = 50.0;
    const FlowOutcome fo = integrate(kFig1, DiscreteState::from_uv(1.0, 2.0), opt);
    double prev = 1e300;
    for (const TrajectorySample& ts : fo.trajectory) {
        const double u = ts.x[1] - ts.x[0], v = ts.x[2] - ts.x[1];
        const double L =
            (std::pow(u, -kFig1.gamma) + std::pow(v, -kFig1.gamma)) / kFig1.gamma;
        CHECK(L <= prev + 1e-9);
        prev = L;
    }
}

TEST_CASE("gauge function") {
    const DiscreteState s = DiscreteState::from_uv(0.7, 1.9);
    // zero homogeneity
    const double h0 = gauge(kFig1, s);
    for (double lam : {0.5, 2.0, 10.0}) {
        DiscreteState sl = s;
        for (double& x : sl.x) x *= lam;
        CHECK(std::abs(gauge(kFig1, sl) - h0) < 1e-8);
    }
    // the ray maximum sits where W = 2/gamma and the value is U - 2/gamma there
    const double w0 = pair_sum(kFig1, s);
    const double lam_star = std::pow(kFig1.gamma * w0 / 2.0, 1.0 / kFig1.gamma);
    DiscreteState sm = s;
    for (double& x : sm.x) x *= lam_star;
    CHECK(rel(pair_sum(kFig1, sm), 2.0 / kFig1.gamma) < 1e-10);
    const double u_at_max = energy(kFig1, sm) + pair_sum(kFig1, sm);
    CHECK(std::abs(h0 - (u_at_max - 2.0 / kFig1.gamma)) < 1e-10);
    CHECK(std::abs(energy(kFig1, sm) - h0) < 1e-10);  // max along the ray equals the gauge
}

TEST_CASE("critical point solves grad G = 0 (including general N)") {
    const DiscreteState cp = critical_point(kFig1);
    CHECK(rel(cp.u(), std::pow(kFig1.chi() * (2.0 + std::pow(2.0, -0.5)) / 2.0, 2.0)) < 1e-10);
    const std::vector<double> g = gradient(kFig1, cp);
    double norm = 0.0;
    for (double v : g) norm += v * v;
    CHECK(std::sqrt(norm) < 1e-10);

    DiscreteConfig c5 = kFig1;
    c5.n_points = 5;
    const DiscreteState cp5 = critical_point(c5);
    const std::vector<double> g5 = gradient(c5, cp5);
    norm = 0.0;
    for (double v : g5) norm += v * v;
    CHECK(std::sqrt(norm) < 1e-9);
}

TEST_CASE("reduced discrete GNS inequality") {
    std::vector<double> grid;
    for (int i = 1; i <= 10000; ++i) grid.push_back(i / 10000.0);
    CHECK(verify_discrete_gns(0.5, grid) <= 0.0);
    CHECK(verify_discrete_gns(1e-6, grid) <= 0.0);  // homogeneities nearly coincide
    // U = 1 is strict for gamma in (0,1)
    for (double g : {0.1, 0.5, 0.9}) CHECK(verify_discrete_gns(g, {1.0}) < -1e-6);
    CHECK_THROWS_AS(verify_discrete_gns(1.5, grid), std::invalid_argument);
}

TEST_CASE("separatrix and side test") {
    const Separatrix sep = separatrix(kFig1, 3.5);
    // the energy Hessian at the critical point is negative definite on the
    // zero-sum plane (energy maximum, flow repeller)
    CHECK(sep.hessian_eigenvalues[0] < 0.0);
    CHECK(sep.hessian_eigenvalues[1] < 0.0);
    CHECK(sep.seeded_manifolds.size() == 4);
    // boundary brackets the asymptote chi^{1/gamma} = 0.16
    const double asym = std::pow(kFig1.chi(), 1.0 / kFig1.gamma);
    const auto& tail = sep.branch_up.back();
    CHECK(tail[0] > asym);
    CHECK(tail[0] < 0.2);
    // side test agrees with direct integration on a scattered sample
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> ur(0.05, 3.0);
    IntegrateOptions opt;
    opt.t_max = 1e6;
    opt.record = false;
    for (int k = 0; k < 40; ++k) {
        const double u = ur(gen), v = ur(gen);
        const SideTest st = separatrix_side(sep, u, v);
        if (st.distance < 1e-2) continue;
        const FlowOutcome fo = integrate(kFig1, DiscreteState::from_uv(u, v), opt);
        if (fo.classification == FlowClass::Undecided) continue;
        CHECK(st.predicted == fo.classification);
    }
}

TEST_CASE("phase portrait invariants on a coarse grid") {
    PortraitSpec spec;
    spec.cells_u = spec.cells_v = 24;
    spec.t_max = 1e6;
    const PhasePortrait pp = phase_portrait(kFig1, spec);
    const std::size_t nu = pp.u_centers.size();
    for (std::size_t j = 0; j < pp.v_centers.size(); ++j)
        for (std::size_t i = 0; i < nu; ++i) {
            const std::size_t idx = j * nu + i;
            if (pp.crit1[idx]) CHECK(pp.cls[idx] == FlowClass::Collapse);
            if (pp.crit2[idx]) CHECK(pp.cls[idx] == FlowClass::Collapse);
            if (pp.global[idx]) CHECK(pp.cls[idx] == FlowClass::Dispersion);
            if (pp.crit1[idx]) CHECK(pp.crit2[idx]);
            // the global-existence region never meets a blow-up region
            CHECK(!(pp.global[idx] && (pp.crit1[idx] || pp.crit2[idx])));
            // portrait symmetric under u <-> v
            const std::size_t tidx = i * nu + j;
            CHECK(pp.cls[idx] == pp.cls[tidx]);
        }
    CHECK(!pp.crit1_boundary.empty());
    CHECK(!pp.crit2_boundary.empty());
    CHECK(!pp.maximal_line.empty());
    CHECK(!pp.global_boundary.empty());

    // the overlays are genuine level sets
    const double thr1 = criterion_blowup_1(kFig1, DiscreteState::from_uv(1.0, 1.0)).rhs;
    for (const auto& p : pp.crit1_boundary)
        CHECK(rel((2.0 / 3.0) * (p[0] * p[0] + p[1] * p[1] + p[0] * p[1]), thr1) < 1e-9);
    for (const auto& p : pp.crit2_boundary) {
        const DiscreteState s = DiscreteState::from_uv(p[0], p[1]);
        CHECK(rel(s.norm2(),
                  2.0 * std::exp(-energy(kFig1, s) - 2.0 / kFig1.gamma)) < 1e-6);
    }
    for (const auto& p : pp.maximal_line)
        CHECK(rel(pair_sum(kFig1, DiscreteState::from_uv(p[0], p[1])), 2.0 / kFig1.gamma) <
              1e-9);
    for (const auto& p : pp.global_boundary)
        CHECK(rel(kFig1.chi() * (std::pow(p[0], -kFig1.gamma) + std::pow(p[1], -kFig1.gamma)),
                  1.0) < 1e-9);
}

TEST_CASE("N = 3 squared norm in gap coordinates") {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> ug(0.05, 3.0);
    for (int k = 0; k < 50; ++k) {
        const double u = ug(gen), v = ug(gen);
        const DiscreteState s = DiscreteState::from_uv(u, v);
        CHECK(rel(s.norm2(), (2.0 / 3.0) * (u * u + v * v + u * v)) < 1e-12);
    }
}

TEST_CASE("state validation") {
    CHECK_THROWS_AS(DiscreteState::from_uv(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteState::from_gaps({1.0, -0.2}), std::invalid_argument);
    DiscreteState bad;
    bad.x = {0.0, 1.0, 2.0};  // center of mass not zero
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    DiscreteConfig bad_cfg{1.5, 1.0, 3};
    CHECK_THROWS_AS(bad_cfg.validate(), std::invalid_argument);
}

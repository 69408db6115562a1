#include <doctest.h>

#include <cmath>

#include "kestrel/continuum_flow.hpp"

using namespace kestrel;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// independent energy oracle on a raw vector
double energy_fd(const ContinuumConfig& c, const std::vector<double>& x) {
    const double h = c.h();
    double ent = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        ent -= h * std::log((x[i + 1] - x[i]) / h);
    double inter = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (i == j) continue;
            const double s = std::abs(x[i] - x[j]);
            inter += c.kernel == KernelType::Power ? -std::pow(s, -c.gamma) / (2.0 * c.gamma)
                                                   : 0.5 * std::log(s);
        }
    return ent + h * h * inter;
}

} // namespace

TEST_CASE("rhs structure: translation invariance, antisymmetry, zero sum") {
    ContinuumConfig c;
    c.gamma = 0.5;
    c.mass = 2.0;
    c.n_particles = 24;
    const ParticleState s = gaussian_state(c, 1.0);
    const std::vector<double> f = rhs(c, s);

    ParticleState shifted = s;
    for (double& v : shifted.x) v += 3.7;
    const std::vector<double> fs = rhs(c, shifted);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - fs[i]));
    CHECK(worst < 1e-10);

    // odd-symmetric state gives odd-symmetric rhs
    const int n = c.n_particles;
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(f[i] + f[n - 1 - i]) < 1e-10 * std::max(1.0, std::abs(f[i])));

    double sum = 0.0;
    for (double v : f) sum += v;
    CHECK(std::abs(sum) < 1e-10);
}

TEST_CASE("gradient consistency: rhs = -(1/h) grad G to 1e-8") {
    for (KernelType kt : {KernelType::Power, KernelType::Logarithmic}) {
        ContinuumConfig c;
        c.kernel = kt;
        c.gamma = 0.4;
        c.mass = 1.5;
        c.n_particles = 20;
        const ParticleState s = gaussian_state(c, 0.8);
        const std::vector<double> f = rhs(c, s);
        const double h = c.h();
        for (int k = 0; k < c.n_particles; ++k) {
            // five-point stencil for an O(eps^4) derivative
            const double eps = 3e-4;
            std::vector<double> x = s.x;
            auto at = [&](double dx) {
                x[k] = s.x[k] + dx;
                const double e = energy_fd(c, x);
                x[k] = s.x[k];
                return e;
            };
            const double fd =
                (-at(2 * eps) + 8 * at(eps) - 8 * at(-eps) + at(-2 * eps)) / (12.0 * eps);
            CHECK(std::abs(-fd / h - f[k]) < 1e-8 * std::max(1.0, std::abs(f[k])));
        }
    }
}

TEST_CASE("energy: equal spacing kills the entropy term; dilation splits") {
    ContinuumConfig c;
    c.gamma = 0.5;
    c.mass = 1.0;
    c.n_particles = 16;
    const double h = c.h();
    ParticleState s;
    s.x.resize(16);
    for (int i = 0; i < 16; ++i) s.x[i] = i * h;  // gaps exactly h
    double pair_part = 0.0;
    for (int i = 0; i < 16; ++i)
        for (int j = i + 1; j < 16; ++j) pair_part += std::pow(s.x[j] - s.x[i], -c.gamma);
    CHECK(rel(energy(c, s), -h * h / c.gamma * pair_part) < 1e-12);

    // dilation: G[lambda X] - G[X] = -(N-1) h log lambda + (lambda^-gamma - 1) * W-part
    const ParticleState g = gaussian_state(c, 1.0);
    const double lam = 2.0;
    ParticleState gl = g;
    for (double& v : gl.x) v *= lam;
    double pair_g = 0.0;
    for (int i = 0; i < c.n_particles; ++i)
        for (int j = i + 1; j < c.n_particles; ++j)
            pair_g += std::pow(g.x[j] - g.x[i], -c.gamma);
    const double wpart = -h * h / c.gamma * pair_g;
    const double expect = -(c.n_particles - 1) * h * std::log(lam) +
                          (std::pow(lam, -c.gamma) - 1.0) * wpart;
    CHECK(std::abs((energy(c, gl) - energy(c, g)) - expect) < 1e-10);
}

TEST_CASE("logarithmic kernel: critical mass identities") {
    // <X, grad G> = M(M/2 - 1)(1 - 1/N) exactly for the discrete functional
    for (double M : {1.0, 2.0, 4.0}) {
        ContinuumConfig c;
        c.kernel = KernelType::Logarithmic;
        c.mass = M;
        c.n_particles = 64;
        const ParticleState s = gaussian_state(c, 1.3);
        const std::vector<double> f = rhs(c, s);
        double didt = 0.0;
        for (int i = 0; i < 64; ++i) didt += 2.0 * c.h() * s.x[i] * f[i];
        const double expect = -2.0 * M * (0.5 * M - 1.0) * (1.0 - 1.0 / 64.0);
        CHECK(std::abs(didt - expect) < 1e-10 * std::max(1.0, std::abs(expect)));
    }
    // dilation identity of the energy, to O(h): G[2X] - G[X] ~ M(M/2-1) log 2
    double prev_gap = 1e300;
    for (int n : {64, 128, 256}) {
        ContinuumConfig c;
        c.kernel = KernelType::Logarithmic;
        c.mass = 4.0;
        c.n_particles = n;
        const ParticleState s = gaussian_state(c, 1.0);
        ParticleState sl = s;
        for (double& v : sl.x) v *= 2.0;
        const double diff = energy(c, sl) - energy(c, s);
        const double gap = std::abs(diff - 4.0 * (2.0 - 1.0) * std::log(2.0));
        CHECK(gap < prev_gap);  // shrinks with refinement
        CHECK(gap < 10.0 / n);
        prev_gap = gap;
    }
}

TEST_CASE("simulate: energy decay, dissipation identity, second-moment identity") {
    ContinuumConfig c;
    c.gamma = 0.5;
    c.mass = 1.0;
    c.n_particles = 32;
    const ParticleState s0 = gaussian_state(c, 1.0);
    const TrajectoryRecord recd = simulate(c, s0, 0.4);
    CHECK(recd.end == ContinuumEnd::ReachedTMax);
    for (std::size_t i = 1; i < recd.samples.size(); ++i)
        CHECK(recd.samples[i].G <= recd.samples[i - 1].G + 1e-7);

    // -dG/dt = h sum Xdot^2 pointwise (chain rule through the gradient flow)
    const std::vector<double> f = rhs(c, s0);
    const double h = c.h();
    double diss = 0.0;
    for (double v : f) diss += h * v * v;
    const double eps = 1e-6;
    ParticleState sp = s0;
    for (std::size_t i = 0; i < sp.x.size(); ++i) sp.x[i] += eps * f[i];
    ParticleState sm = s0;
    for (std::size_t i = 0; i < sm.x.size(); ++i) sm.x[i] -= eps * f[i];
    const double dgdt = (energy(c, sp) - energy(c, sm)) / (2.0 * eps);
    CHECK(std::abs(-dgdt - diss) < 1e-5 * std::max(1.0, diss));

    // I from the state equals the reconstructed-density moment to O(h)
    const double I_state = s0.second_moment(h);
    double I_rec = 0.0;
    for (std::size_t i = 0; i + 1 < s0.x.size(); ++i) {
        const double a = s0.x[i], b = s0.x[i + 1];
        I_rec += h * (b * b * b - a * a * a) / (3.0 * (b - a));  // n = h/gap on [a,b]
    }
    CHECK(std::abs(I_state - I_rec) < 5.0 * h);
}

TEST_CASE("JKO prox stepping") {
    ContinuumConfig c;
    c.gamma = 0.5;
    c.mass = 1.0;
    c.n_particles = 24;
    const ParticleState s0 = gaussian_state(c, 1.0);
    const ParticleState s1 = jko_step(c, s0, 0.01);
    CHECK(energy(c, s1) < energy(c, s0));
    CHECK(s1.t == 0.01);
    // prox objective decreased relative to staying put
    const double h = c.h();
    double move = 0.0;
    for (std::size_t i = 0; i < s1.x.size(); ++i) move += h * (s1.x[i] - s0.x[i]) * (s1.x[i] - s0.x[i]);
    CHECK(move / (2.0 * 0.01) + energy(c, s1) <= energy(c, s0) + 1e-12);

    SimulateOptions so;
    so.prox = true;
    const TrajectoryRecord rp = simulate(c, s0, 0.2, so);
    const TrajectoryRecord re = simulate(c, s0, 0.2);
    CHECK(rel(rp.samples.back().I, re.samples.back().I) < 2e-2);
    for (std::size_t i = 1; i < rp.samples.size(); ++i)
        CHECK(rp.samples[i].G <= rp.samples[i - 1].G + 1e-9);
    CHECK_THROWS_AS(jko_step(c, s0, -1.0), std::invalid_argument);
}

TEST_CASE("configuration and state validation") {
    ContinuumConfig c;
    c.n_particles = 8;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.n_particles = 16;
    c.gamma = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.gamma = 0.5;
    CHECK_NOTHROW(c.validate());
    ParticleState bad;
    bad.x = {0.0, 1.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    // pseudo-inverse samples are strictly increasing
    CHECK_NOTHROW(gaussian_state(c, 2.0).validate());
    CHECK_NOTHROW(uniform_state(c, 2.0).validate());
}

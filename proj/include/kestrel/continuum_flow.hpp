// 1D pseudo-inverse gradient flow: N particles X_1 < ... < X_N carry the
// quantile samples of the density; the semi-discrete system is the gradient
// flow of the discretized entropy + interaction energy in the h-weighted
// metric, h = M/N. Power kernels K_gamma (0 < gamma < 1) and the logarithmic
// kernel of the critical-mass-2 model.
#pragma once

#include <vector>

#include "kestrel/util.hpp"

namespace kestrel {

enum class KernelType { Power, Logarithmic };

struct ContinuumConfig {
    KernelType kernel = KernelType::Power;
    double gamma = 0.5;  // power-kernel homogeneity, in (0,1)
    double mass = 1.0;
    int n_particles = 64;  // N >= 16
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;

    double h() const { return mass / n_particles; }
    void validate() const {
        if (n_particles < 16)
            throw std::invalid_argument("ContinuumConfig: N >= 16 required");
        if (!(mass > 0.0)) throw std::invalid_argument("ContinuumConfig: mass > 0 required");
        if (kernel == KernelType::Power && !(gamma > 0.0 && gamma < 1.0))
            throw std::invalid_argument("ContinuumConfig: gamma in (0,1) required");
    }
};

struct ParticleState {
    std::vector<double> x;  // strictly increasing
    double t = 0.0;
    void validate() const;
    double second_moment(double h) const;  // h sum x_i^2
};

// pseudo-inverse samples of a reference density at masses m_i = (i-1/2)h
ParticleState uniform_state(const ContinuumConfig& c, double half_width);
ParticleState gaussian_state(const ContinuumConfig& c, double sigma);

// dX/dt; equals -(1/h) grad G componentwise
std::vector<double> rhs(const ContinuumConfig& c, const ParticleState& s);

// G[X] = -h sum log(gap/h) - (h^2/2gamma) sum_{i != j} |x_i-x_j|^{-gamma}
// logarithmic kernel: + (h^2/2) sum_{i != j} log|x_i-x_j|
double energy(const ContinuumConfig& c, const ParticleState& s);

struct ContinuumSample {
    double t = 0.0, I = 0.0, G = 0.0;
};

enum class ContinuumEnd { ReachedTMax, GapCollapse, StepUnderflow, MaxSteps };

struct TrajectoryRecord {
    std::vector<ContinuumSample> samples;
    std::vector<ParticleState> snapshots;  // populated per snapshot_stride
    ParticleState final_state;
    ContinuumEnd end = ContinuumEnd::ReachedTMax;
};

struct SimulateOptions {
    bool prox = false;          // JKO implicit-Euler stepping instead of explicit
    double tau0 = 0.0;          // initial prox step (0: h-based default)
    double gap_floor = 1e-12;   // machine-safety gap; stops the run
    int snapshot_stride = 0;    // 0: no snapshots
    long max_steps = 2'000'000;
};

TrajectoryRecord simulate(const ContinuumConfig& c, const ParticleState& s0, double t_max,
                          const SimulateOptions& opt = {});

// One implicit-Euler (JKO prox) step: argmin ( h|X - X0|^2/(2 tau) + G[X] ),
// solved by damped Newton. Throws numerical_error on divergence.
ParticleState jko_step(const ContinuumConfig& c, const ParticleState& s0, double tau);

} // namespace kestrel

// Finite-dimensional gradient-flow model: N ordered points on the line with
// entropy + attractive pair interaction of homogeneity -gamma. N = 3 is the
// reference three-point model; the general-N extension follows the same mesh
// convention chi = M/(N+1).
#pragma once

#include <array>
#include <vector>

#include "kestrel/criteria.hpp"
#include "kestrel/util.hpp"

namespace kestrel {

struct DiscreteConfig {
    double gamma = 0.5;  // kernel homogeneity, in (0,1)
    double mass = 1.6;
    int n_points = 3;

    double chi() const { return mass / (n_points + 1); }
    void validate() const {
        if (!(gamma > 0.0 && gamma < 1.0))
            throw std::invalid_argument("DiscreteConfig: gamma in (0,1) required");
        if (!(mass > 0.0)) throw std::invalid_argument("DiscreteConfig: mass > 0 required");
        if (n_points < 3) throw std::invalid_argument("DiscreteConfig: N >= 3 required");
    }
};

struct DiscreteState {
    std::vector<double> x;  // strictly increasing, center of mass zero

    static DiscreteState from_points(std::vector<double> pts);  // recenters
    static DiscreteState from_gaps(const std::vector<double>& gaps);
    static DiscreteState from_uv(double u, double v);  // N = 3

    void validate() const;
    std::vector<double> gaps() const;
    double norm2() const;  // sum x_i^2
    double u() const { return x[1] - x[0]; }
    double v() const { return x[2] - x[1]; }
};

// G_gamma[X] = -sum log gaps - (chi/gamma) sum_{i<j} (x_j - x_i)^{-gamma}
double energy(const DiscreteConfig& c, const DiscreteState& s);
// W_gamma[X] = (chi/gamma) sum_{i<j} (x_j - x_i)^{-gamma}  (so G = U - W)
double pair_sum(const DiscreteConfig& c, const DiscreteState& s);
// analytic gradient of G; components sum to zero
std::vector<double> gradient(const DiscreteConfig& c, const DiscreteState& s);
// zero-homogeneous gauge H = U - (q/gamma)(log(gamma W / q) + 1), q = N-1
double gauge(const DiscreteConfig& c, const DiscreteState& s);

enum class FlowClass { Collapse, Dispersion, Undecided };

struct TrajectorySample {
    double t = 0.0;
    std::vector<double> x;
    double energy = 0.0;
    double norm2 = 0.0;
};

struct FlowOutcome {
    FlowClass classification = FlowClass::Undecided;
    double time = 0.0;       // event time, or the final time for Undecided
    int gap_index = -1;      // vanishing gap for Collapse
    bool step_underflow = false;  // integration died before a clean event
    std::vector<TrajectorySample> trajectory;
};

struct IntegrateOptions {
    double t_max = 1e3;
    double gap_tol = 1e-8;
    double r_max = 1e3;      // dispersion when |X| exceeds this
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    bool record = true;      // keep per-step samples
    long max_steps = 2'000'000;
};

FlowOutcome integrate(const DiscreteConfig& c, const DiscreteState& s0,
                      const IntegrateOptions& opt = {});

// |X0|^2 < (chi P^{1+g/2} N^{-g/2} / (N-1))^{2/gamma}, P = N(N-1)/2;
// reduces to (3 chi/2)^{2/gamma} at N = 3. Strict inequality.
CriterionReport criterion_blowup_1(const DiscreteConfig& c, const DiscreteState& s0);
// N=3: |X0|^2 <= 2 exp(-G[X0] - 2/gamma) (sharp three-point constant);
// general N uses ((N-1)/N) exp(-2G/(N-1) - 2/gamma). Non-strict.
CriterionReport criterion_blowup_2(const DiscreteConfig& c, const DiscreteState& s0);
// chi (u0^-gamma + v0^-gamma) < 1; N = 3 only.
CriterionReport criterion_global(const DiscreteConfig& c, double u0, double v0);

// solves grad G = 0 by damped Newton from equal gaps
DiscreteState critical_point(const DiscreteConfig& c);

struct Separatrix {
    // basin boundary through the critical point, refined by per-transversal
    // bisection on integrate outcomes; branch_up has v >= u, branch_down is
    // its mirror image. Both are ordered away from the critical point.
    std::vector<std::array<double, 2>> branch_up, branch_down;
    // eigenstructure of the energy Hessian restricted to the zero-sum plane
    std::array<double, 2> hessian_eigenvalues{};           // ascending
    std::array<std::array<double, 2>, 2> eigvec_uv{};      // in (u,v) coordinates
    // trajectories seeded at +-delta0 along each eigenvector (diagnostic
    // manifolds; the fan at the repelling node makes these peel off the
    // true boundary, which is why the boundary itself is bisected)
    std::vector<std::vector<std::array<double, 2>>> seeded_manifolds;
    double u_star = 0.0;
    double collapse_side_sign = 0.0;  // sign of the side test on the collapse basin
};

// span: trace until max(u, v) exceeds span (N = 3 only)
Separatrix separatrix(const DiscreteConfig& c, double span);

struct SideTest {
    FlowClass predicted = FlowClass::Undecided;
    double distance = 0.0;  // to the traced polyline
};
SideTest separatrix_side(const Separatrix& sep, double u, double v);

// max over the grid of lhs - rhs of the reduced pair inequality; <= 0 means
// the inequality holds on the grid
double verify_discrete_gns(double gamma, const std::vector<double>& u_grid);

struct PortraitSpec {
    int cells_u = 100, cells_v = 100;
    double u_min = 0.02, u_max = 3.0;
    double v_min = 0.02, v_max = 3.0;
    double t_max = 1e6;
    int threads = 0;  // 0: hardware concurrency
};

struct PhasePortrait {
    PortraitSpec spec;
    DiscreteConfig config;
    std::vector<double> u_centers, v_centers;
    std::vector<FlowClass> cls;          // row-major, v-major index = iv*cells_u+iu
    std::vector<int> gap_index;          // collapse gap per cell, -1 otherwise
    std::vector<unsigned char> crit1, crit2, global;
    std::vector<std::array<double, 2>> crit1_boundary, crit2_boundary, maximal_line,
        global_boundary;
    Separatrix sep;
};

PhasePortrait phase_portrait(const DiscreteConfig& c, const PortraitSpec& spec);

} // namespace kestrel

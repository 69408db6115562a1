// Initial cell densities: radial grid profiles and bump mixtures built from
// a Gaussian or compact polynomial unit profile, with moment / entropy /
// potential / free-energy reports and the two complementarity families.
#pragma once

#include <cstdint>
#include <vector>

#include "kestrel/util.hpp"

namespace kestrel {

enum class BumpShape { Gaussian, PolyBump };

struct Bump {
    double weight = 1.0;          // mass carried by the bump
    std::vector<double> center;   // point in R^d
    double width = 1.0;           // dilation lambda
    BumpShape shape = BumpShape::Gaussian;
};

struct DensityProfile {
    int d = 3;
    // exactly one of the two representations is populated
    std::vector<double> radii;    // increasing, radial grid profile
    std::vector<double> values;   // n(radii[i]) >= 0
    std::vector<Bump> bumps;

    bool is_grid() const { return !radii.empty(); }
    void validate() const;
    double mass() const;
    // pointwise evaluation (mixtures only; used by the Monte Carlo paths)
    double value_at(const std::vector<double>& x) const;
};

struct MomentReport {
    double M = 0.0;      // mass
    double I = 0.0;      // second moment
    double S = 0.0;      // entropy int n log n
    double P = 0.0;      // potential int n (K * n), K = E_d or B_d^alpha
    double Lhalf = 0.0;  // ||n||_{L^{d/2}}
    double E = 0.0;      // S - P/2
    double F = 0.0;      // log I + 2 E / (dM)
    bool monte_carlo = false;
    // 1-sigma standard errors of the Monte Carlo estimates (0 when exact)
    double se_S = 0.0, se_P = 0.0, se_Lhalf = 0.0;
};

struct ReportOptions {
    std::uint64_t seed = 0;
    long mc_samples = 1'000'000;
};

// Moments, entropy, potential (Newtonian for alpha = 0, Bessel otherwise),
// free energy and corrected energy. Radial profiles and single bumps use
// quadrature; pairwise-disjoint compact mixtures with alpha = 0 decompose
// exactly (Newton's theorem for the cross terms); anything else falls back
// to seeded Monte Carlo with reported standard errors.
MomentReport report(const DensityProfile& profile, double alpha,
                    const ReportOptions& opt = {});

// n0(x) = 1/2 [ lambda^-d phi((x-a)/lambda) + lambda^-d phi((x+a)/lambda) ],
// total mass `mass`.
DensityProfile two_bump(int d, double mass, const std::vector<double>& a, double lambda,
                        BumpShape shape);

// The N-bump family on a symmetric k^d grid in [-L/2, L/2]^d with
// lambda = N^{1/(2-d)}; errors out when the supports would overlap.
DensityProfile bump_grid(int d, double mass, int n_points, double scale, BumpShape shape);

// Instantaneous dI/dt of the flow at this state:
// 2dM - |S^{d-1}|^{-1} iint n(x) g_alpha(|x-y|) |x-y|^{2-d} n(y) dx dy.
double moment_derivative(const DensityProfile& profile, double alpha,
                         const ReportOptions& opt = {});

// Unit-profile helpers (exposed for tests and the acceptance search).
double bump_normalizer(BumpShape shape, int d);        // c_d for PolyBump, (1/pi)^{d/2} for Gaussian
double bump_second_moment(BumpShape shape, int d);     // int |z|^2 phi
double bump_entropy(BumpShape shape, int d);           // int phi log phi
double bump_lhalf_power(BumpShape shape, int d);       // int phi^{d/2}
double bump_newton_self(BumpShape shape, int d);       // iint phi |z-z'|^{2-d} phi

} // namespace kestrel

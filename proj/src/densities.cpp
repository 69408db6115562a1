#include "kestrel/densities.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "kestrel/kernels.hpp"
#include "kestrel/quadrature.hpp"

namespace kestrel {

namespace {

constexpr double kGaussCut = 7.0;  // exp(-49) ~ 5e-22, beyond any tolerance here

double shape_value(BumpShape s, int d, double rho) {
    switch (s) {
        case BumpShape::Gaussian:
            return std::pow(M_PI, -0.5 * d) * std::exp(-rho * rho);
        case BumpShape::PolyBump: {
            const double t = 1.0 - rho * rho;
            return t > 0.0 ? bump_normalizer(BumpShape::PolyBump, d) * t * t : 0.0;
        }
    }
    return 0.0;
}

double shape_cut(BumpShape s) { return s == BumpShape::Gaussian ? kGaussCut : 1.0; }

// ---- per-interval Gauss-Legendre for radial grid profiles ----------------

constexpr double kGL5x[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                             0.538469310105683, 0.906179845938664};
constexpr double kGL5w[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                             0.478628670499366, 0.236926885056189};

struct GridProfile {
    std::vector<double> r, n;  // with a leading r=0 plateau node
    int d;
};

GridProfile make_grid(const DensityProfile& p) {
    GridProfile g;
    g.d = p.d;
    if (p.radii.front() > 0.0) {
        g.r.push_back(0.0);
        g.n.push_back(p.values.front());  // plateau toward the origin
    }
    g.r.insert(g.r.end(), p.radii.begin(), p.radii.end());
    g.n.insert(g.n.end(), p.values.begin(), p.values.end());
    return g;
}

double grid_value(const GridProfile& g, double r) {
    if (r <= g.r.front()) return g.n.front();
    if (r >= g.r.back()) return 0.0;
    const auto it = std::upper_bound(g.r.begin(), g.r.end(), r);
    const std::size_t i = it - g.r.begin() - 1;
    const double t = (r - g.r[i]) / (g.r[i + 1] - g.r[i]);
    return g.n[i] + t * (g.n[i + 1] - g.n[i]);
}

// integral over [a,b] of F(r, n(r)) by 5-point Gauss-Legendre (n linear there)
template <class F>
double gl5(const GridProfile& g, double a, double b, F&& f) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) {
        const double r = c + h * kGL5x[k];
        acc += kGL5w[k] * f(r, grid_value(g, r));
    }
    return acc * h;
}

template <class F>
double grid_integral(const GridProfile& g, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g.r.size(); ++i) acc += gl5(g, g.r[i], g.r[i + 1], f);
    return acc;
}

// iint f(x) |x-y|^{2-d} f(y) for the radial grid profile via Newton's
// shell decomposition (inner point-mass part + outer flat part).
double grid_newton_raw(const GridProfile& g) {
    const int d = g.d;
    const double area = unit_sphere_area(d);
    const std::size_t m = g.r.size();
    std::vector<double> mass_in(m, 0.0), tail_out(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i)
        mass_in[i + 1] = mass_in[i] + area * gl5(g, g.r[i], g.r[i + 1],
                                                 [d](double r, double n) {
                                                     return n * std::pow(r, d - 1);
                                                 });
    for (std::size_t i = m - 1; i > 0; --i)
        tail_out[i - 1] = tail_out[i] + area * gl5(g, g.r[i - 1], g.r[i],
                                                   [](double r, double n) { return n * r; });
    auto phi = [&](double r) {  // potential/mu_d without the outer f weight
        const auto it = std::upper_bound(g.r.begin(), g.r.end(), r);
        const std::size_t i = it - g.r.begin() - 1;
        double min_r = mass_in[i] + area * gl5(g, g.r[i], std::min(r, g.r.back()),
                                               [d](double s, double n) {
                                                   return n * std::pow(s, d - 1);
                                               });
        double tail_r = tail_out[i] - area * gl5(g, g.r[i], std::min(r, g.r.back()),
                                                 [](double s, double n) { return n * s; });
        return (r > 0 ? std::pow(r, 2.0 - d) : 0.0) * min_r + tail_r;
    };
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i)
        acc += gl5(g, g.r[i], g.r[i + 1], [&](double r, double n) {
            return n * std::pow(r, d - 1) * phi(r);
        });
    return area * acc;
}

// ---- smooth radial functions (unit bump profiles) -------------------------

// iint f(x)|x-y|^{2-d} f(y) dx dy for a smooth radial f supported in [0, R]
double newton_raw_smooth(int d, const std::function<double(double)>& f, double R) {
    const double area = unit_sphere_area(d);
    auto inner_mass = [&](double r) {
        return area * integrate([&](double s) { return f(s) * std::pow(s, d - 1); }, 0.0, r,
                                1e-9)
                          .value;
    };
    auto outer_flat = [&](double r) {
        return area * integrate([&](double s) { return f(s) * s; }, r, R, 1e-9).value;
    };
    QuadResult q = integrate(
        [&](double r) {
            return f(r) * std::pow(r, d - 1) *
                   (std::pow(r, 2.0 - d) * inner_mass(r) + outer_flat(r));
        },
        0.0, R, 1e-8);
    if (!q.converged) throw numerical_error("newton_raw_smooth: quadrature failed");
    return area * q.value;
}

// iint f(x) K(|x-y|) f(y) dx dy via the two-center angular average; used for
// the Bessel-type kernels where no shell theorem is available.
double kernel_raw_radial(int d, const std::function<double(double)>& f, double R,
                         const std::function<double(double)>& K) {
    const double a1 = unit_sphere_area(d), a2 = unit_sphere_area(d - 1);
    auto angular = [&](double r, double s) {
        return integrate(
                   [&](double th) {
                       const double dist =
                           std::sqrt(std::max(r * r + s * s - 2.0 * r * s * std::cos(th), 0.0));
                       if (dist <= 0.0) return 0.0;
                       return K(dist) * std::pow(std::sin(th), d - 2);
                   },
                   0.0, M_PI, 1e-9, 0.0, 400)
            .value;
    };
    auto inner = [&](double r) {
        return integrate(
                   [&](double s) {
                       return f(s) * std::pow(s, d - 1) * angular(r, s);
                   },
                   0.0, R, 3e-8, 0.0, 400)
            .value;
    };
    QuadResult q = integrate(
        [&](double r) { return f(r) * std::pow(r, d - 1) * inner(r); }, 0.0, R, 3e-7, 0.0, 200);
    if (!q.converged) throw numerical_error("kernel_raw_radial: quadrature failed");
    return a1 * a2 * q.value;
}

// |x - y| distribution for one Gaussian bump of width lambda: coordinates of
// x - y are N(0, lambda^2), so the raw kernel integral collapses to 1D.
double kernel_raw_gaussian_pair(int d, double lambda, const std::function<double(double)>& K) {
    const double area = unit_sphere_area(d);
    const double norm = area * std::pow(2.0 * M_PI * lambda * lambda, -0.5 * d);
    QuadResult q = integrate(
        [&](double u) {
            return norm * std::pow(u, d - 1) * std::exp(-u * u / (2.0 * lambda * lambda)) * K(u);
        },
        0.0, kGaussCut * lambda * 1.6, 1e-10);
    if (!q.converged) throw numerical_error("kernel_raw_gaussian_pair: quadrature failed");
    return q.value;
}

// ---- cached unit-profile scalars ------------------------------------------

struct ShapeKey {
    BumpShape s;
    int d;
    bool operator<(const ShapeKey& o) const { return std::tie(s, d) < std::tie(o.s, o.d); }
};

double cached(int which, BumpShape s, int d) {
    static std::map<std::pair<int, ShapeKey>, double> cache;
    static std::mutex mu;
    const std::pair<int, ShapeKey> key{which, {s, d}};
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double area = unit_sphere_area(d);
    double v = 0.0;
    if (which == 0) {  // entropy int phi log phi
        if (s == BumpShape::Gaussian) {
            v = -0.5 * d * (1.0 + std::log(M_PI));
        } else {
            const double c = bump_normalizer(s, d);
            v = std::log(c) +
                2.0 * c * area *
                    integrate(
                        [d](double r) {
                            const double t = 1.0 - r * r;
                            return t > 0 ? t * t * std::log(t) * std::pow(r, d - 1) : 0.0;
                        },
                        0.0, 1.0, 1e-12)
                        .value;
        }
    } else {  // which == 1: Newtonian self energy iint phi |z-z'|^{2-d} phi
        if (s == BumpShape::Gaussian) {
            v = std::pow(2.0 * M_PI, -0.5 * d) * area;
        } else {
            auto f = [s, d](double r) { return shape_value(s, d, r); };
            v = newton_raw_smooth(d, f, shape_cut(s));
        }
    }
    std::lock_guard<std::mutex> lk(mu);
    cache[key] = v;
    return v;
}

} // namespace

double bump_normalizer(BumpShape shape, int d) {
    if (shape == BumpShape::Gaussian) return std::pow(M_PI, -0.5 * d);
    const double area = unit_sphere_area(d);
    return 1.0 / (area * (1.0 / d - 2.0 / (d + 2) + 1.0 / (d + 4)));
}

double bump_second_moment(BumpShape shape, int d) {
    if (shape == BumpShape::Gaussian) return 0.5 * d;
    const double num = 1.0 / (d + 2) - 2.0 / (d + 4) + 1.0 / (d + 6);
    const double den = 1.0 / d - 2.0 / (d + 2) + 1.0 / (d + 4);
    return num / den;
}

double bump_entropy(BumpShape shape, int d) { return cached(0, shape, d); }

double bump_lhalf_power(BumpShape shape, int d) {
    if (shape == BumpShape::Gaussian)
        return std::pow(M_PI, -0.25 * d * d) * std::pow(2.0 * M_PI / d, 0.5 * d);
    // int phi^{d/2} = c^{d/2} |S^{d-1}| B(d/2, d+1) / 2
    const double c = bump_normalizer(shape, d);
    return std::pow(c, 0.5 * d) * unit_sphere_area(d) * 0.5 *
           std::exp(std::lgamma(0.5 * d) + std::lgamma(d + 1.0) - std::lgamma(1.5 * d + 1.0));
}

double bump_newton_self(BumpShape shape, int d) { return cached(1, shape, d); }

// ---- DensityProfile basics -------------------------------------------------

void DensityProfile::validate() const {
    if (d < 3) throw std::invalid_argument("DensityProfile: d >= 3 required");
    const bool grid = !radii.empty(), mix = !bumps.empty();
    if (grid == mix)
        throw std::invalid_argument("DensityProfile: exactly one of grid / bumps required");
    if (grid) {
        if (radii.size() != values.size() || radii.size() < 2)
            throw std::invalid_argument("DensityProfile: grid arrays mismatched or too short");
        for (std::size_t i = 0; i + 1 < radii.size(); ++i)
            if (!(radii[i] < radii[i + 1]))
                throw std::invalid_argument("DensityProfile: radii must increase");
        if (!(radii.front() >= 0.0))
            throw std::invalid_argument("DensityProfile: negative radius");
        for (double v : values) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("DensityProfile: values must be nonnegative");
        }
    } else {
        for (const Bump& b : bumps) {
            if (!(b.weight > 0.0)) throw std::invalid_argument("DensityProfile: bump weight > 0");
            if (!(b.width > 0.0)) throw std::invalid_argument("DensityProfile: bump width > 0");
            if (static_cast<int>(b.center.size()) != d)
                throw std::invalid_argument("DensityProfile: bump center dimension mismatch");
        }
    }
    if (!(mass() > 0.0) || !std::isfinite(mass()))
        throw std::invalid_argument("DensityProfile: total mass must be positive and finite");
}

double DensityProfile::mass() const {
    if (is_grid()) {
        GridProfile g = make_grid(*this);
        return unit_sphere_area(d) *
               grid_integral(g, [this](double r, double n) { return n * std::pow(r, d - 1); });
    }
    double m = 0.0;
    for (const Bump& b : bumps) m += b.weight;
    return m;
}

double DensityProfile::value_at(const std::vector<double>& x) const {
    if (is_grid()) throw std::invalid_argument("value_at: mixtures only");
    double v = 0.0;
    for (const Bump& b : bumps) {
        double rho2 = 0.0;
        for (int k = 0; k < d; ++k) rho2 += sq(x[k] - b.center[k]);
        const double rho = std::sqrt(rho2) / b.width;
        if (rho < shape_cut(b.shape))
            v += b.weight * std::pow(b.width, -d) * shape_value(b.shape, d, rho);
    }
    return v;
}

// ---- Monte Carlo machinery --------------------------------------------------

namespace {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed ^ 0x9e3779b97f4a7c15ULL) {}
    double uniform() {  // in (0,1)
        return (gen() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }
    double normal() {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

struct PolySampler {
    std::vector<double> rho, cdf;  // radial CDF table
};

const PolySampler& poly_sampler(int d) {
    static std::map<int, PolySampler> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    PolySampler s;
    const int n = 4096;
    const double c = bump_normalizer(BumpShape::PolyBump, d) * unit_sphere_area(d);
    s.rho = linspace(0.0, 1.0, n + 1);
    s.cdf.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double a = s.rho[i], b = s.rho[i + 1];
        double acc = 0.0;
        for (int k = 0; k < 5; ++k) {
            const double r = 0.5 * (a + b) + 0.5 * (b - a) * kGL5x[k];
            acc += kGL5w[k] * c * std::pow(r, d - 1) * sq(1.0 - r * r);
        }
        s.cdf[i + 1] = s.cdf[i] + acc * 0.5 * (b - a);
    }
    for (double& v : s.cdf) v /= s.cdf.back();
    return cache.emplace(d, std::move(s)).first->second;
}

// draw z from the unit profile phi
void sample_shape(BumpShape shape, int d, Rng& rng, std::vector<double>& z) {
    z.resize(d);
    if (shape == BumpShape::Gaussian) {
        for (int k = 0; k < d; ++k) z[k] = rng.normal() * M_SQRT1_2;
        return;
    }
    const PolySampler& ps = poly_sampler(d);
    const double u = rng.uniform();
    const auto it = std::lower_bound(ps.cdf.begin(), ps.cdf.end(), u);
    std::size_t i = std::max<std::ptrdiff_t>(1, it - ps.cdf.begin()) - 1;
    const double t = (u - ps.cdf[i]) / std::max(ps.cdf[i + 1] - ps.cdf[i], 1e-300);
    const double rho = ps.rho[i] + t * (ps.rho[i + 1] - ps.rho[i]);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (int k = 0; k < d; ++k) {
            z[k] = rng.normal();
            norm2 += z[k] * z[k];
        }
    } while (norm2 < 1e-30);
    const double f = rho / std::sqrt(norm2);
    for (double& v : z) v *= f;
}

struct Welford {
    long n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
        ++n;
        const double d1 = x - mean;
        mean += d1 / n;
        m2 += d1 * (x - mean);
    }
    double var_of_mean() const { return n > 1 ? m2 / ((n - 1.0) * n) : 0.0; }
};

} // namespace

// ---- report ------------------------------------------------------------------

namespace {

bool pairwise_disjoint_compact(const DensityProfile& p) {
    for (const Bump& b : p.bumps)
        if (b.shape != BumpShape::PolyBump) return false;
    for (std::size_t i = 0; i < p.bumps.size(); ++i)
        for (std::size_t j = i + 1; j < p.bumps.size(); ++j) {
            double dist2 = 0.0;
            for (int k = 0; k < p.d; ++k)
                dist2 += sq(p.bumps[i].center[k] - p.bumps[j].center[k]);
            if (!(std::sqrt(dist2) > p.bumps[i].width + p.bumps[j].width)) return false;
        }
    return true;
}

double second_moment_exact(const DensityProfile& p) {
    double acc = 0.0;
    for (const Bump& b : p.bumps) {
        double a2 = 0.0;
        for (double c : b.center) a2 += c * c;
        acc += b.weight * (a2 + sq(b.width) * bump_second_moment(b.shape, p.d));
    }
    return acc;
}

// raw self term of one bump with kernel E (alpha = 0) or B^alpha
double bump_self_raw(const Bump& b, int d, double alpha) {
    if (alpha == 0.0)
        return sq(b.weight) * std::pow(b.width, 2.0 - d) * bump_newton_self(b.shape, d);
    if (b.shape == BumpShape::Gaussian) {
        BesselParams par(d, alpha);
        return sq(b.weight) *
               kernel_raw_gaussian_pair(d, b.width, [&](double u) { return eval_B(par, u); });
    }
    // B_alpha(lambda u) = lambda^{2-d} B_{alpha lambda^2}(u)
    BesselParams par(d, alpha * sq(b.width));
    auto f = [&](double r) { return shape_value(b.shape, d, r); };
    return sq(b.weight) * std::pow(b.width, 2.0 - d) *
           kernel_raw_radial(d, f, shape_cut(b.shape), [&](double u) { return eval_B(par, u); });
}

struct McAccumulators {
    Welford S, L;          // single-sample strata folded externally
    double S_val = 0, S_var = 0, L_val = 0, L_var = 0, P_val = 0, P_var = 0;
};

// Monte Carlo S, Lhalf power, and raw pair integral with kernel K.
void mc_mixture(const DensityProfile& p, const std::function<double(double)>& K, long samples,
                std::uint64_t seed, double& S, double& seS, double& Lpow, double& seL,
                double& rawK, double& seK) {
    const double M = p.mass();
    const int d = p.d;
    Rng rng(seed);
    std::vector<double> z, x, y;
    // stratified single-sample estimators per bump
    S = 0.0;
    Lpow = 0.0;
    double varS = 0.0, varL = 0.0;
    for (const Bump& b : p.bumps) {
        const long n = std::max<long>(1000, std::llround(samples * b.weight / M));
        Welford ws, wl;
        for (long k = 0; k < n; ++k) {
            sample_shape(b.shape, d, rng, z);
            x.resize(d);
            for (int q = 0; q < d; ++q) x[q] = b.center[q] + b.width * z[q];
            const double nx = p.value_at(x);
            ws.add(std::log(std::max(nx, 1e-300)));
            wl.add(std::pow(nx, 0.5 * d - 1.0));
        }
        S += b.weight * ws.mean;
        varS += sq(b.weight) * ws.var_of_mean();
        Lpow += b.weight * wl.mean;
        varL += sq(b.weight) * wl.var_of_mean();
    }
    seS = std::sqrt(varS);
    seL = std::sqrt(varL);
    // pair estimator stratified over bump pairs
    rawK = 0.0;
    double varK = 0.0;
    for (std::size_t i = 0; i < p.bumps.size(); ++i)
        for (std::size_t j = 0; j < p.bumps.size(); ++j) {
            const Bump& bi = p.bumps[i];
            const Bump& bj = p.bumps[j];
            const double wij = bi.weight * bj.weight;
            const long n = std::max<long>(500, std::llround(samples * wij / (M * M)));
            Welford wk;
            for (long k = 0; k < n; ++k) {
                sample_shape(bi.shape, d, rng, z);
                x.resize(d);
                for (int q = 0; q < d; ++q) x[q] = bi.center[q] + bi.width * z[q];
                sample_shape(bj.shape, d, rng, z);
                y.resize(d);
                for (int q = 0; q < d; ++q) y[q] = bj.center[q] + bj.width * z[q];
                double u2 = 0.0;
                for (int q = 0; q < d; ++q) u2 += sq(x[q] - y[q]);
                wk.add(K(std::sqrt(std::max(u2, 1e-300))));
            }
            rawK += wij * wk.mean;
            varK += sq(wij) * wk.var_of_mean();
        }
    seK = std::sqrt(varK);
}

} // namespace

MomentReport report(const DensityProfile& profile, double alpha, const ReportOptions& opt) {
    profile.validate();
    if (alpha < 0.0) throw std::invalid_argument("report: alpha >= 0 required");
    const int d = profile.d;
    const double area = unit_sphere_area(d);
    const double mu = 1.0 / ((d - 2) * area);
    MomentReport rep;

    if (profile.is_grid()) {
        GridProfile g = make_grid(profile);
        rep.M = area * grid_integral(g, [d](double r, double n) { return n * std::pow(r, d - 1); });
        rep.I = area * grid_integral(g, [d](double r, double n) { return n * std::pow(r, d + 1); });
        rep.S = area * grid_integral(g, [d](double r, double n) {
            return n > 0 ? n * std::log(n) * std::pow(r, d - 1) : 0.0;
        });
        rep.Lhalf = std::pow(
            area * grid_integral(g, [d](double r, double n) {
                return std::pow(n, 0.5 * d) * std::pow(r, d - 1);
            }),
            2.0 / d);
        if (alpha == 0.0) {
            rep.P = mu * grid_newton_raw(g);
        } else {
            BesselParams par(d, alpha);
            auto f = [&g](double r) { return grid_value(g, r); };
            rep.P = kernel_raw_radial(d, f, g.r.back(),
                                      [&](double u) { return eval_B(par, u); });
        }
    } else if (profile.bumps.size() == 1) {
        const Bump& b = profile.bumps.front();
        rep.M = b.weight;
        rep.I = second_moment_exact(profile);
        rep.S = b.weight * (std::log(b.weight * std::pow(b.width, -d)) +
                            bump_entropy(b.shape, d));
        rep.Lhalf = std::pow(std::pow(b.weight, 0.5 * d) *
                                 std::pow(b.width, -0.5 * d * (d - 2)) *
                                 bump_lhalf_power(b.shape, d),
                             2.0 / d);
        rep.P = (alpha == 0.0 ? mu : 1.0) * bump_self_raw(b, d, alpha);
    } else if (alpha == 0.0 && pairwise_disjoint_compact(profile)) {
        rep.M = profile.mass();
        rep.I = second_moment_exact(profile);
        double s = 0.0, lpow = 0.0, raw = 0.0;
        for (const Bump& b : profile.bumps) {
            s += b.weight *
                 (std::log(b.weight * std::pow(b.width, -d)) + bump_entropy(b.shape, d));
            lpow += std::pow(b.weight, 0.5 * d) * std::pow(b.width, -0.5 * d * (d - 2)) *
                    bump_lhalf_power(b.shape, d);
            raw += sq(b.weight) * std::pow(b.width, 2.0 - d) * bump_newton_self(b.shape, d);
        }
        // disjoint radial bumps interact as point masses (Newton's theorem)
        for (std::size_t i = 0; i < profile.bumps.size(); ++i)
            for (std::size_t j = 0; j < profile.bumps.size(); ++j) {
                if (i == j) continue;
                double dist2 = 0.0;
                for (int k = 0; k < d; ++k)
                    dist2 += sq(profile.bumps[i].center[k] - profile.bumps[j].center[k]);
                raw += profile.bumps[i].weight * profile.bumps[j].weight *
                       std::pow(std::sqrt(dist2), 2.0 - d);
            }
        rep.S = s;
        rep.Lhalf = std::pow(lpow, 2.0 / d);
        rep.P = mu * raw;
    } else {
        // overlapping or Bessel-coupled mixture: Monte Carlo
        rep.monte_carlo = true;
        rep.M = profile.mass();
        rep.I = second_moment_exact(profile);
        std::function<double(double)> K;
        if (alpha == 0.0) {
            K = [d, mu](double u) { return mu * std::pow(u, 2.0 - d); };
        } else {
            BesselParams par(d, alpha);
            K = [par](double u) { return eval_B(par, u); };
        }
        double lpow, seL, rawK, seK;
        mc_mixture(profile, K, opt.mc_samples, opt.seed, rep.S, rep.se_S, lpow, seL, rawK, seK);
        rep.Lhalf = std::pow(lpow, 2.0 / d);
        rep.se_Lhalf = lpow > 0 ? (2.0 / d) * std::pow(lpow, 2.0 / d - 1.0) * seL : 0.0;
        rep.P = rawK;
        rep.se_P = seK;
    }

    if (!std::isfinite(rep.P) || !std::isfinite(rep.S))
        throw numerical_error("report: non-finite integral");
    rep.E = rep.S - 0.5 * rep.P;
    rep.F = std::log(rep.I) + 2.0 * rep.E / (d * rep.M);
    return rep;
}

DensityProfile two_bump(int d, double mass, const std::vector<double>& a, double lambda,
                        BumpShape shape) {
    if (static_cast<int>(a.size()) != d)
        throw std::invalid_argument("two_bump: center dimension mismatch");
    if (!(lambda > 0.0)) throw std::invalid_argument("two_bump: lambda > 0 required");
    double norm_a = 0.0;
    for (double c : a) norm_a += c * c;
    norm_a = std::sqrt(norm_a);
    if (shape == BumpShape::PolyBump && !(norm_a > lambda))
        throw std::invalid_argument("two_bump: supports overlap (|a| <= lambda)");
    DensityProfile p;
    p.d = d;
    Bump b1{0.5 * mass, a, lambda, shape};
    std::vector<double> ma(a);
    for (double& c : ma) c = -c;
    Bump b2{0.5 * mass, ma, lambda, shape};
    p.bumps = {b1, b2};
    p.validate();
    return p;
}

DensityProfile bump_grid(int d, double mass, int n_points, double scale, BumpShape shape) {
    const int k = static_cast<int>(std::llround(std::pow(n_points, 1.0 / d)));
    int kk = 1;
    for (int i = 0; i < d; ++i) kk *= k;
    if (kk != n_points)
        throw std::invalid_argument("bump_grid: n_points must be a d-th power");
    if (!(scale > 0.0)) throw std::invalid_argument("bump_grid: scale > 0 required");
    const double lambda = std::pow(static_cast<double>(n_points), 1.0 / (2.0 - d));
    const double spacing = scale / k;
    if (k > 1 && !(lambda < 0.5 * spacing))
        throw std::invalid_argument("bump_grid: lambda " + std::to_string(lambda) +
                                    " exceeds half the grid spacing " +
                                    std::to_string(0.5 * spacing) + " (supports overlap)");
    DensityProfile p;
    p.d = d;
    std::vector<int> idx(d, 0);
    for (int count = 0; count < n_points; ++count) {
        std::vector<double> c(d);
        for (int q = 0; q < d; ++q) c[q] = (idx[q] - 0.5 * (k - 1)) * spacing;
        p.bumps.push_back({mass / n_points, c, lambda, shape});
        for (int q = 0; q < d; ++q) {
            if (++idx[q] < k) break;
            idx[q] = 0;
        }
    }
    p.validate();
    return p;
}

double moment_derivative(const DensityProfile& profile, double alpha, const ReportOptions& opt) {
    profile.validate();
    const int d = profile.d;
    const double area = unit_sphere_area(d);
    const double M = profile.mass();
    double raw;  // iint n g_alpha(|x-y|) |x-y|^{2-d} n
    BesselParams par(d, std::max(alpha, 0.0));
    auto gker = [&](double u) {
        return eval_g(par, u) * std::pow(u, 2.0 - d);
    };
    if (profile.is_grid()) {
        GridProfile g = make_grid(profile);
        raw = (alpha == 0.0) ? grid_newton_raw(g)
                             : kernel_raw_radial(
                                   d, [&g](double r) { return grid_value(g, r); }, g.r.back(),
                                   gker);
    } else if (profile.bumps.size() == 1) {
        const Bump& b = profile.bumps.front();
        if (alpha == 0.0) {
            raw = sq(b.weight) * std::pow(b.width, 2.0 - d) * bump_newton_self(b.shape, d);
        } else if (b.shape == BumpShape::Gaussian) {
            raw = sq(b.weight) * kernel_raw_gaussian_pair(d, b.width, gker);
        } else {
            BesselParams spar(d, alpha * sq(b.width));
            auto f = [&](double r) { return shape_value(b.shape, d, r); };
            raw = sq(b.weight) * std::pow(b.width, 2.0 - d) *
                  kernel_raw_radial(d, f, shape_cut(b.shape), [&](double u) {
                      return eval_g(spar, u) * std::pow(u, 2.0 - d);
                  });
        }
    } else if (alpha == 0.0 && pairwise_disjoint_compact(profile)) {
        raw = 0.0;
        for (const Bump& b : profile.bumps)
            raw += sq(b.weight) * std::pow(b.width, 2.0 - d) * bump_newton_self(b.shape, d);
        for (std::size_t i = 0; i < profile.bumps.size(); ++i)
            for (std::size_t j = 0; j < profile.bumps.size(); ++j) {
                if (i == j) continue;
                double dist2 = 0.0;
                for (int k = 0; k < d; ++k)
                    dist2 += sq(profile.bumps[i].center[k] - profile.bumps[j].center[k]);
                raw += profile.bumps[i].weight * profile.bumps[j].weight *
                       std::pow(std::sqrt(dist2), 2.0 - d);
            }
    } else {
        double S, seS, lpow, seL, seK;
        mc_mixture(profile, gker, opt.mc_samples, opt.seed, S, seS, lpow, seL, raw, seK);
    }
    if (!std::isfinite(raw)) throw numerical_error("moment_derivative: integral non-finite");
    return 2.0 * d * M - raw / area;
}

} // namespace kestrel

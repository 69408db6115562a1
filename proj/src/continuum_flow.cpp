#include "kestrel/continuum_flow.hpp"

#include <algorithm>
#include <cmath>

#include "kestrel/linalg.hpp"
#include "kestrel/ode.hpp"
#include "kestrel/optimize.hpp"

namespace kestrel {

void ParticleState::validate() const {
    if (x.size() < 2) throw std::invalid_argument("ParticleState: too few particles");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1]))
            throw std::invalid_argument("ParticleState: ordering violated");
}

double ParticleState::second_moment(double h) const {
    double s = 0.0;
    for (double v : x) s += v * v;
    return h * s;
}

ParticleState uniform_state(const ContinuumConfig& c, double half_width) {
    c.validate();
    if (!(half_width > 0.0)) throw std::invalid_argument("uniform_state: width > 0");
    ParticleState s;
    const int n = c.n_particles;
    s.x.resize(n);
    for (int i = 0; i < n; ++i) {
        const double u = (i + 0.5) / n;  // mass fraction at m_i = (i-1/2) h
        s.x[i] = half_width * (2.0 * u - 1.0);
    }
    return s;
}

ParticleState gaussian_state(const ContinuumConfig& c, double sigma) {
    c.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_state: sigma > 0");
    ParticleState s;
    const int n = c.n_particles;
    s.x.resize(n);
    for (int i = 0; i < n; ++i) {
        const double u = (i + 0.5) / n;
        // quantile of N(0, sigma^2) by bisection on erf
        const double target = 2.0 * u - 1.0;
        double lo = -10.0, hi = 10.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (std::erf(mid) < target ? lo : hi) = mid;
        }
        s.x[i] = sigma * M_SQRT2 * 0.5 * (lo + hi);
    }
    return s;
}

namespace {

double kernel_exponent(const ContinuumConfig& c) {
    return c.kernel == KernelType::Power ? c.gamma : 0.0;
}

// interaction force h * sum_{j != i} sign(x_i - x_j) |x_i - x_j|^{-gamma-1}
// (gamma = 0 for the logarithmic kernel). O(N^2).
bool rhs_raw(const ContinuumConfig& c, const std::vector<double>& x, std::vector<double>& dx) {
    const int n = static_cast<int>(x.size());
    const double h = c.h();
    const double expo = -kernel_exponent(c) - 1.0;
    dx.assign(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double gap = x[i + 1] - x[i];
        if (!(gap > 0.0)) {
            dx.assign(n, std::numeric_limits<double>::quiet_NaN());
            return false;
        }
        // diffusion flux difference: zero-flux closure at both ends
        dx[i] -= 1.0 / gap;      // -(D_i) contribution of the right face
        dx[i + 1] += 1.0 / gap;  // left face of particle i+1
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s = x[j] - x[i];
            const double f = h * std::pow(s, expo);
            dx[i] += f;   // -S_i with sign(x_i - x_j) = -1
            dx[j] -= f;
        }
    return true;
}

double energy_raw(const ContinuumConfig& c, const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    const double h = c.h();
    double ent = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double gap = x[i + 1] - x[i];
        if (!(gap > 0.0)) throw std::invalid_argument("energy: nonpositive gap");
        ent -= h * std::log(gap / h);
    }
    double inter = 0.0;
    if (c.kernel == KernelType::Power) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) inter += std::pow(x[j] - x[i], -c.gamma);
        inter *= -h * h / c.gamma;  // -(h^2/2gamma) over ordered pairs counted twice
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) inter += std::log(x[j] - x[i]);
        inter *= h * h;
    }
    return ent + inter;
}

} // namespace

std::vector<double> rhs(const ContinuumConfig& c, const ParticleState& s) {
    c.validate();
    s.validate();
    std::vector<double> dx;
    if (!rhs_raw(c, s.x, dx)) throw std::invalid_argument("rhs: ordering violated");
    return dx;
}

double energy(const ContinuumConfig& c, const ParticleState& s) {
    c.validate();
    s.validate();
    return energy_raw(c, s.x);
}

ParticleState jko_step(const ContinuumConfig& c, const ParticleState& s0, double tau) {
    c.validate();
    s0.validate();
    if (!(tau > 0.0)) throw std::invalid_argument("jko_step: tau > 0 required");
    const int n = static_cast<int>(s0.x.size());
    const double h = c.h();
    const double expo = kernel_exponent(c);

    // F(X) = (h/tau)(X - X0) + grad G[X]; grad G = -h * rhs
    auto F = [&](const std::vector<double>& x, std::vector<double>& f) {
        std::vector<double> dx;
        if (!rhs_raw(c, x, dx)) {
            f.assign(n, std::numeric_limits<double>::quiet_NaN());
            return;
        }
        f.resize(n);
        for (int i = 0; i < n; ++i) f[i] = h / tau * (x[i] - s0.x[i]) - h * dx[i];
    };
    auto J = [&](const std::vector<double>& x, Matrix& jac) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) jac(i, j) = 0.0;
        for (int i = 0; i < n; ++i) jac(i, i) = h / tau;
        // entropy Hessian: h/g^2 on the (i, i+1) block
        for (int i = 0; i + 1 < n; ++i) {
            const double g = x[i + 1] - x[i];
            const double w = h / (g * g);
            jac(i, i) += w;
            jac(i + 1, i + 1) += w;
            jac(i, i + 1) -= w;
            jac(i + 1, i) -= w;
        }
        // interaction Hessian: rho''(s) (e_i - e_j)(e_i - e_j)^T with
        // rho'' = -h^2 (gamma+1) s^{-gamma-2} (gamma = 0 for log kernel)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double s = x[j] - x[i];
                const double w = -h * h * (expo + 1.0) * std::pow(s, -expo - 2.0);
                jac(i, i) += w;
                jac(j, j) += w;
                jac(i, j) -= w;
                jac(j, i) -= w;
            }
    };
    auto guard = [](const std::vector<double>& x) {
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            if (!(x[i] < x[i + 1])) return false;
        return true;
    };
    // residual target scales with the gradient itself, which blows up as the
    // configuration approaches collapse
    std::vector<double> f0(n);
    F(s0.x, f0);
    double f0n = 0.0;
    for (double v : f0) f0n += v * v;
    const double tol = 1e-10 * std::max(1.0, h) + 1e-12 * std::sqrt(f0n);
    NewtonResult res = newton_solve(F, J, s0.x, tol, 100, guard);
    if (!res.converged)
        throw numerical_error("jko_step: Newton divergence (residual " +
                              std::to_string(res.residual_norm) + ")");
    ParticleState out;
    out.x = std::move(res.x);
    out.t = s0.t + tau;
    return out;
}

TrajectoryRecord simulate(const ContinuumConfig& c, const ParticleState& s0, double t_max,
                          const SimulateOptions& opt) {
    c.validate();
    s0.validate();
    const double h = c.h();
    TrajectoryRecord rec;
    auto sample = [&](double t, const std::vector<double>& x) {
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        rec.samples.push_back({t, h * n2, energy_raw(c, x)});
    };

    if (!opt.prox) {
        OdeRhs f = [&c](const std::vector<double>& x, std::vector<double>& dx) {
            rhs_raw(c, x, dx);
        };
        std::vector<OdeEvent> events;
        events.push_back({[&opt](const std::vector<double>& x) {
                              double m = std::numeric_limits<double>::infinity();
                              for (std::size_t i = 0; i + 1 < x.size(); ++i)
                                  m = std::min(m, x[i + 1] - x[i]);
                              return m - opt.gap_floor;
                          },
                          -1});
        OdeOptions oopt;
        oopt.rel_tol = c.rel_tol;
        oopt.abs_tol = c.abs_tol;
        oopt.max_steps = opt.max_steps;
        long count = 0;
        sample(s0.t, s0.x);
        OdeObserver obs = [&](double t, const std::vector<double>& x) {
            sample(s0.t + t, x);
            ++count;
            if (opt.snapshot_stride > 0 && count % opt.snapshot_stride == 0)
                rec.snapshots.push_back({x, s0.t + t});
            return true;
        };
        OdeResult res = integrate_adaptive(f, s0.x, 0.0, t_max - s0.t, oopt, events, obs);
        rec.final_state.x = res.y;
        rec.final_state.t = s0.t + res.t;
        switch (res.outcome) {
            case OdeOutcome::Event:
                rec.end = ContinuumEnd::GapCollapse;
                break;
            case OdeOutcome::StepUnderflow:
                rec.end = ContinuumEnd::StepUnderflow;
                break;
            case OdeOutcome::MaxSteps:
                rec.end = ContinuumEnd::MaxSteps;
                break;
            default:
                rec.end = ContinuumEnd::ReachedTMax;
                break;
        }
        return rec;
    }

    // JKO prox stepping: tau halves on Newton failure or ordering violation
    double tau = opt.tau0 > 0.0 ? opt.tau0 : 0.05 * h;
    ParticleState cur = s0;
    sample(cur.t, cur.x);
    long steps = 0;
    while (cur.t < t_max && steps < opt.max_steps) {
        const double step = std::min(tau, t_max - cur.t);
        bool ok = true;
        ParticleState nxt;
        try {
            nxt = jko_step(c, cur, step);
        } catch (const numerical_error&) {
            ok = false;
        }
        if (!ok) {
            tau *= 0.5;
            if (tau < 1e-14 * std::max(1.0, t_max)) {
                rec.end = ContinuumEnd::StepUnderflow;
                rec.final_state = cur;
                return rec;
            }
            continue;
        }
        cur = std::move(nxt);
        ++steps;
        sample(cur.t, cur.x);
        if (opt.snapshot_stride > 0 && steps % opt.snapshot_stride == 0)
            rec.snapshots.push_back(cur);
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < cur.x.size(); ++i)
            min_gap = std::min(min_gap, cur.x[i + 1] - cur.x[i]);
        if (min_gap < opt.gap_floor) {
            rec.end = ContinuumEnd::GapCollapse;
            rec.final_state = cur;
            return rec;
        }
        tau = std::min(tau * 1.25, 0.5 * h);
    }
    rec.end = steps >= opt.max_steps ? ContinuumEnd::MaxSteps : ContinuumEnd::ReachedTMax;
    rec.final_state = cur;
    return rec;
}

} // namespace kestrel

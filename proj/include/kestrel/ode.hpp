// Embedded Dormand-Prince 5(4) integrator with PI-free step control, cubic
// Hermite dense output and event location by bisection on the dense step.
//
// Steps are advanced on a local clock (the vector field is autonomous in all
// uses here), so step sizes are limited by representability of h itself and
// not by ulp(t); collapse events at gap ~ 1e-8 remain reachable even when the
// remaining time to the singularity is far below ulp(t).
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "kestrel/util.hpp"

namespace kestrel {

using OdeRhs = std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct OdeEvent {
    // Scalar event function of the state; fires on a sign change.
    std::function<double(const std::vector<double>&)> g;
    int direction = 0;  // -1: downward crossing, +1: upward, 0: either
};

struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double h_init = 0.0;       // 0: choose automatically
    double h_max = std::numeric_limits<double>::infinity();
    double h_floor = 1e-280;   // below this the step size has underflowed
    long max_steps = 20'000'000;
};

enum class OdeOutcome { ReachedEnd, Event, StepUnderflow, MaxSteps };

struct OdeResult {
    OdeOutcome outcome = OdeOutcome::ReachedEnd;
    int event_index = -1;
    double t = 0.0;
    std::vector<double> y;
    long n_accepted = 0;
    long n_rejected = 0;
};

// Observer is called after every accepted step with (t, y). Returning false
// stops the integration (outcome ReachedEnd at the current point).
using OdeObserver = std::function<bool(double, const std::vector<double>&)>;

namespace detail {

struct Dopri5Work {
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, yerr;
};

// One Dormand-Prince step from y into ynew; k1 must hold f(y) on entry and
// k7 holds f(ynew) on exit (FSAL). Returns false if any stage is non-finite.
inline bool dopri5_step(const OdeRhs& f, const std::vector<double>& y, double h,
                        std::vector<double>& ynew, Dopri5Work& w) {
    const std::size_t n = y.size();
    auto stage = [&](const std::vector<double>& yt, std::vector<double>& k) -> bool {
        f(yt, k);
        for (double v : k)
            if (!std::isfinite(v)) return false;
        return true;
    };
    auto& yt = w.ytmp;
    yt.resize(n);
    for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * 0.2 * w.k1[i];
    if (!stage(yt, w.k2)) return false;
    for (std::size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (3.0 / 40 * w.k1[i] + 9.0 / 40 * w.k2[i]);
    if (!stage(yt, w.k3)) return false;
    for (std::size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (44.0 / 45 * w.k1[i] - 56.0 / 15 * w.k2[i] + 32.0 / 9 * w.k3[i]);
    if (!stage(yt, w.k4)) return false;
    for (std::size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (19372.0 / 6561 * w.k1[i] - 25360.0 / 2187 * w.k2[i] +
                            64448.0 / 6561 * w.k3[i] - 212.0 / 729 * w.k4[i]);
    if (!stage(yt, w.k5)) return false;
    for (std::size_t i = 0; i < n; ++i)
        yt[i] = y[i] + h * (9017.0 / 3168 * w.k1[i] - 355.0 / 33 * w.k2[i] +
                            46732.0 / 5247 * w.k3[i] + 49.0 / 176 * w.k4[i] -
                            5103.0 / 18656 * w.k5[i]);
    if (!stage(yt, w.k6)) return false;
    ynew.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        ynew[i] = y[i] + h * (35.0 / 384 * w.k1[i] + 500.0 / 1113 * w.k3[i] +
                              125.0 / 192 * w.k4[i] - 2187.0 / 6784 * w.k5[i] +
                              11.0 / 84 * w.k6[i]);
    if (!stage(ynew, w.k7)) return false;
    w.yerr.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.yerr[i] = h * (71.0 / 57600 * w.k1[i] - 71.0 / 16695 * w.k3[i] +
                         71.0 / 1920 * w.k4[i] - 17253.0 / 339200 * w.k5[i] +
                         22.0 / 525 * w.k6[i] - 1.0 / 40 * w.k7[i]);
    return true;
}

// Cubic Hermite interpolant on the accepted step.
inline void hermite(const std::vector<double>& y0, const std::vector<double>& f0,
                    const std::vector<double>& y1, const std::vector<double>& f1,
                    double h, double theta, std::vector<double>& out) {
    const std::size_t n = y0.size();
    out.resize(n);
    const double t = theta, u = 1.0 - theta;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = y1[i] - y0[i];
        out[i] = y0[i] + t * d + t * u * ((t - u) * d + h * (u * f0[i] - t * f1[i]));
    }
}

} // namespace detail

inline OdeResult integrate_adaptive(const OdeRhs& f, std::vector<double> y, double t0,
                                    double t_end, const OdeOptions& opt = {},
                                    const std::vector<OdeEvent>& events = {},
                                    const OdeObserver& observer = nullptr) {
    OdeResult res;
    res.t = t0;
    detail::Dopri5Work w;
    const std::size_t n = y.size();
    w.k1.resize(n);
    f(y, w.k1);

    std::vector<double> gcur(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) gcur[e] = events[e].g(y);

    double h = opt.h_init;
    if (h <= 0.0) {
        double ynorm = 0.0, fnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(w.k1[i]));
        }
        h = (fnorm > 0) ? 0.01 * std::max(ynorm, opt.abs_tol) / fnorm : 1e-4;
        h = std::min(h, std::abs(t_end - t0));
    }
    h = std::min(h, opt.h_max);

    std::vector<double> ynew, yev;
    double t = t0;
    while (t < t_end) {
        if (res.n_accepted + res.n_rejected >= opt.max_steps) {
            res.outcome = OdeOutcome::MaxSteps;
            res.y = y;
            res.t = t;
            return res;
        }
        h = std::min(h, t_end - t);
        bool ok = detail::dopri5_step(f, y, h, ynew, w);
        double errnorm = 0.0;
        if (ok) {
            for (std::size_t i = 0; i < n; ++i) {
                const double sc =
                    opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                errnorm += sq(w.yerr[i] / sc);
            }
            errnorm = std::sqrt(errnorm / n);
        }
        if (!ok || errnorm > 1.0) {
            ++res.n_rejected;
            h *= ok ? std::max(0.2, 0.9 * std::pow(errnorm, -0.2)) : 0.2;
            if (h < opt.h_floor) {
                res.outcome = OdeOutcome::StepUnderflow;
                res.y = y;
                res.t = t;
                return res;
            }
            continue;
        }
        ++res.n_accepted;
        const double tnew = t + h;

        // event scan on this step
        int fired = -1;
        double theta_hit = 1.0;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double g0 = gcur[e];
            const double g1 = events[e].g(ynew);
            const bool down = g0 > 0.0 && g1 <= 0.0;
            const bool up = g0 < 0.0 && g1 >= 0.0;
            const int dir = events[e].direction;
            if ((dir <= 0 && down) || (dir >= 0 && up)) {
                // bisection on the dense step
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    detail::hermite(y, w.k1, ynew, w.k7, h, mid, yev);
                    const double gm = events[e].g(yev);
                    const bool crossed = (g0 > 0.0) ? (gm <= 0.0) : (gm >= 0.0);
                    if (crossed)
                        hi = mid;
                    else
                        lo = mid;
                }
                if (hi < theta_hit) {
                    theta_hit = hi;
                    fired = static_cast<int>(e);
                }
            }
            gcur[e] = g1;
        }
        if (fired >= 0) {
            detail::hermite(y, w.k1, ynew, w.k7, h, theta_hit, yev);
            res.outcome = OdeOutcome::Event;
            res.event_index = fired;
            res.t = t + theta_hit * h;
            res.y = yev;
            return res;
        }

        t = tnew;
        y.swap(ynew);
        w.k1.swap(w.k7);  // FSAL
        if (observer && !observer(t, y)) {
            res.outcome = OdeOutcome::ReachedEnd;
            res.y = y;
            res.t = t;
            return res;
        }
        h = std::min(opt.h_max, h * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2))));
    }
    res.outcome = OdeOutcome::ReachedEnd;
    res.y = y;
    res.t = t;
    return res;
}

} // namespace kestrel

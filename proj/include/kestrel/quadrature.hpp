// Adaptive Gauss-Kronrod (G7,K15) quadrature on finite intervals, plus a
// mapped variant for [a, +inf) tails. Interval subdivision is driven by the
// embedded Gauss/Kronrod error estimate with a worst-first heap.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "kestrel/util.hpp"

namespace kestrel {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;     // estimated absolute error
    int intervals = 0;      // number of panels used
    bool converged = false;
};

namespace detail {

// Kronrod-15 abscissae on [0,1] (symmetric) and weights; Gauss-7 weights on
// the odd-indexed nodes.
inline constexpr double gk_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

inline Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double k = gk_wk[7] * fc;
    double g = gk_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk_x[i];
        const double fs = f(c - dx) + f(c + dx);
        k += gk_wk[i] * fs;
        if (i % 2 == 1) g += gk_wg[i / 2] * fs;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = k * h;
    const double diff = std::abs((k - g) * h);
    // classic QUADPACK-style sharpened estimate
    p.error = diff * std::sqrt(std::min(1.0, 200.0 * diff));
    if (!(p.error > 0)) p.error = std::abs(p.value) * 1e-16;
    return p;
}

} // namespace detail

inline QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                            double rel_tol = 1e-10, double abs_tol = 0.0,
                            int max_panels = 2000) {
    QuadResult r;
    if (a == b) {
        r.converged = true;
        return r;
    }
    std::priority_queue<detail::Panel> heap;
    detail::Panel p0 = detail::gk15(f, a, b);
    double total = p0.value, err = p0.error;
    heap.push(p0);
    int n = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && n < max_panels) {
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval at machine resolution
            heap.push(worst);
            break;
        }
        detail::Panel l = detail::gk15(f, worst.a, mid);
        detail::Panel rgt = detail::gk15(f, mid, worst.b);
        total += l.value + rgt.value - worst.value;
        err += l.error + rgt.error - worst.error;
        heap.push(l);
        heap.push(rgt);
        ++n;
    }
    r.value = total;
    r.error = err;
    r.intervals = n;
    r.converged = err <= std::max(abs_tol, rel_tol * std::max(std::abs(total), 1e-300));
    return r;
}

// Integral over [a, +inf) via the substitution x = a + t/(1-t), t in [0,1).
inline QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                        double rel_tol = 1e-10, double abs_tol = 0.0,
                                        int max_panels = 2000) {
    auto g = [&](double t) {
        const double om = 1.0 - t;
        if (om <= 0.0) return 0.0;
        const double x = a + t / om;
        const double v = f(x);
        return v / (om * om);
    };
    return integrate(g, 0.0, 1.0, rel_tol, abs_tol, max_panels);
}

} // namespace kestrel

// Scalar maximization, root bracketing/bisection and a damped Newton solver
// for small nonlinear systems.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "kestrel/linalg.hpp"
#include "kestrel/util.hpp"

namespace kestrel {

// Golden-section refinement of a maximizer inside a bracketing triple
// a < b < c with f(b) >= f(a), f(b) >= f(c).
inline double golden_section_max(const std::function<double(double)>& f, double a, double b,
                                 double c, double rel_tol = 1e-12) {
    const double phi = 0.5 * (3.0 - std::sqrt(5.0));  // ~0.382
    double x0 = a, x3 = c, x1, x2;
    if (c - b > b - a) {
        x1 = b;
        x2 = b + phi * (c - b);
    } else {
        x2 = b;
        x1 = b - phi * (b - a);
    }
    double f1 = f(x1), f2 = f(x2);
    while (std::abs(x3 - x0) > rel_tol * (std::abs(x1) + std::abs(x2)) + 1e-300) {
        if (f1 > f2) {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x2 - phi * (x2 - x0);
            f1 = f(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x1 + phi * (x3 - x1);
            f2 = f(x2);
        }
    }
    return f1 > f2 ? x1 : x2;
}

// Bisection for g(x) = 0 on [lo, hi] with g(lo), g(hi) of opposite sign.
inline double bisect_root(const std::function<double(double)>& g, double lo, double hi,
                          double x_tol = 1e-13, int max_iter = 200) {
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0) == (ghi > 0))
        throw numerical_error("bisect_root: endpoints do not bracket a root");
    for (int it = 0; it < max_iter && hi - lo > x_tol * (std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct NewtonResult {
    std::vector<double> x;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Damped Newton on F(x) = 0 with user Jacobian; backtracks on the residual
// 2-norm. `guard` can reject iterates outside the admissible set.
inline NewtonResult newton_solve(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& F,
    const std::function<void(const std::vector<double>&, Matrix&)>& J,
    std::vector<double> x, double tol = 1e-12, int max_iter = 100,
    const std::function<bool(const std::vector<double>&)>& guard = nullptr) {
    const int n = static_cast<int>(x.size());
    std::vector<double> fx(n), step, xt(n), ft(n);
    Matrix jac(n);
    auto norm = [](const std::vector<double>& v) {
        double s = 0;
        for (double a : v) s += a * a;
        return std::sqrt(s);
    };
    F(x, fx);
    double fn = norm(fx);
    NewtonResult res;
    for (int it = 0; it < max_iter; ++it) {
        if (fn <= tol) {
            res.converged = true;
            break;
        }
        J(x, jac);
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -fx[i];
        if (!lu_solve(jac, rhs, step))
            throw numerical_error("newton_solve: singular Jacobian");
        double lambda = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 40; ++bt) {
            for (int i = 0; i < n; ++i) xt[i] = x[i] + lambda * step[i];
            if (!guard || guard(xt)) {
                F(xt, ft);
                const double ftn = norm(ft);
                if (std::isfinite(ftn) && ftn < fn) {
                    x = xt;
                    fx = ft;
                    fn = ftn;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        res.iterations = it + 1;
        if (!improved) break;
    }
    if (fn <= tol) res.converged = true;
    res.x = x;
    res.residual_norm = fn;
    return res;
}

} // namespace kestrel

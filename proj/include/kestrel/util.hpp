// Small shared helpers: sphere measures, grids, error types.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace kestrel {

// Numerical failures (quadrature non-convergence, solver divergence, ...).
// Distinct from std::invalid_argument so the CLI can map exit codes.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Surface measure of the unit sphere S^{n-1} in R^n.
inline double unit_sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("unit_sphere_area: n >= 1 required");
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) throw std::invalid_argument("linspace: need n >= 2");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
    x.back() = b;
    return x;
}

inline std::vector<double> logspace(double a, double b, int n) {
    if (a <= 0 || b <= 0) throw std::invalid_argument("logspace: positive endpoints required");
    std::vector<double> x = linspace(std::log(a), std::log(b), n);
    for (double& v : x) v = std::exp(v);
    return x;
}

inline double sq(double x) { return x * x; }

} // namespace kestrel

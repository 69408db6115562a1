// Dense linear algebra just big enough for this project: LU solve with
// partial pivoting and a Jacobi eigensolver for symmetric matrices.
#pragma once

#include <cmath>
#include <vector>

#include "kestrel/util.hpp"

namespace kestrel {

// Row-major square matrix.
struct Matrix {
    int n = 0;
    std::vector<double> a;
    explicit Matrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Solves A x = b in place; returns false on (numerical) singularity.
inline bool lu_solve(Matrix A, std::vector<double> b, std::vector<double>& x) {
    const int n = A.n;
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double amax = std::abs(A(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > amax) {
                amax = std::abs(A(i, k));
                p = i;
            }
        if (amax < 1e-300) return false;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double m = A(i, k) / A(k, k);
            A(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
            b[i] -= m * b[k];
        }
    }
    x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return true;
}

struct EigenSym {
    std::vector<double> values;          // ascending
    std::vector<std::vector<double>> vectors;  // vectors[k] belongs to values[k]
};

// Cyclic Jacobi rotations; adequate for the small symmetric matrices here.
inline EigenSym eigen_symmetric(Matrix A) {
    const int n = A.n;
    std::vector<std::vector<double>> V(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) V[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += sq(A(i, j));
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double tt = (theta >= 0 ? 1.0 : -1.0) /
                                  (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tt * tt + 1.0);
                const double s = tt * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V[k][p], vkq = V[k][q];
                    V[k][p] = c * vkp - s * vkq;
                    V[k][q] = s * vkp + c * vkq;
                }
            }
    }
    EigenSym e;
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return A(i, i) < A(j, j); });
    for (int k : order) {
        e.values.push_back(A(k, k));
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = V[i][k];
        e.vectors.push_back(v);
    }
    return e;
}

} // namespace kestrel

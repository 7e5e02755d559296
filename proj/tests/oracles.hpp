// Test-only reference computations, independent of the library's numerical
// paths: adaptive quadrature, scalar root finding, closed forms for the
// constant-rate model, and brute-force reimplementations.
#ifndef STRUCTPOP_TESTS_ORACLES_HPP
#define STRUCTPOP_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

// Adaptive Simpson quadrature with absolute tolerance.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb, double whole,
                                   double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    if (b <= a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Bisection for a sign-changing continuous function on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-12) {
    double flo = f(lo), fhi = f(hi);
    if (flo * fhi > 0) throw std::runtime_error("bisect: no sign change");
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        if (flo * fmid <= 0) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

// Spectral radius of the cumulative-birth operator for constant rates with
// gamma = 1: r = beta0 (mu0 - 1 + e^{-mu0}) / mu0^2, continued at mu0 = 0 by
// the series value 1/2.
inline double radius_constant_model(double beta0, double mu0) {
    if (std::abs(mu0) < 1e-6) {
        // series: 1/2 - mu0/6 + mu0^2/24 - ...
        return beta0 * (0.5 - mu0 / 6.0 + mu0 * mu0 / 24.0);
    }
    return beta0 * (mu0 - 1.0 + std::exp(-mu0)) / (mu0 * mu0);
}

// Characteristic root for the constant model (gamma = 1): the lambda with
// radius_constant_model(beta0, mu0 + lambda) = 1, by scalar bisection.
inline double characteristic_root_constant_model(double beta0, double mu0,
                                                 double tol = 1e-12) {
    auto g = [&](double lambda) {
        return radius_constant_model(beta0, mu0 + lambda) - 1.0;
    };
    double lo, hi;
    if (g(0.0) > 0.0) {
        lo = 0.0;
        hi = 1.0;
        while (g(hi) > 0) hi *= 2.0;
    } else {
        hi = 0.0;
        lo = -1.0;
        while (g(lo) < 0) lo *= 2.0;
    }
    return bisect(g, lo, hi, tol);
}

}  // namespace oracles

#endif

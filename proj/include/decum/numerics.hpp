#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "decum/common.hpp"

namespace decum {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// integral(0..T) of e^{-a t} dt; 3-term Taylor once a is numerically zero.
inline double annuity_certain(double a, double T) {
    if (std::fabs(a) < 1e-10) {
        return T * (1.0 - a * T / 2.0 + a * a * T * T / 6.0);
    }
    return -std::expm1(-a * T) / a;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    require(n >= 1, "linspace needs at least one point");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
    out.back() = hi;
    return out;
}

namespace detail {

template <class F>
double simpson_rec(F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double eps, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

} // namespace detail

// The tolerance is scaled by a coarse composite pass rather than the first
// three samples; a spiky integrand on a long domain would otherwise suggest a
// near-zero magnitude and push the refinement to full depth everywhere.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol, int max_depth = 40) {
    constexpr int coarse = 64;
    const double h = (b - a) / coarse;
    double scale = 0.0;
    double left = f(a);
    for (int k = 0; k < coarse; ++k) {
        const double mid = f(a + (k + 0.5) * h);
        const double right = f(a + (k + 1.0) * h);
        scale += std::fabs(h / 6.0 * (left + 4.0 * mid + right));
        left = right;
    }
    const double eps = std::max(rel_tol * scale, std::numeric_limits<double>::min());
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, eps, max_depth);
}

// Bisection on [lo, hi]; f(lo) and f(hi) must bracket a sign change.
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    const bool rising = flo < 0.0;
    while (hi - lo > x_tol) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == rising) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Golden-section minimizer; assumes a unimodal objective on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, double x_tol) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// Two-pass sample statistics with standard errors for both the mean and the
// sample variance (the latter via the central fourth moment).
struct sample_stats {
    double n = 0;
    double mean = 0;
    double variance = 0;     // unbiased
    double se_mean = 0;
    double se_variance = 0;
};

inline sample_stats compute_stats(const std::vector<double>& x) {
    sample_stats s;
    s.n = static_cast<double>(x.size());
    if (x.empty()) return s;
    double acc = 0;
    for (double v : x) acc += v;
    s.mean = acc / s.n;
    double m2 = 0, m4 = 0;
    for (double v : x) {
        const double d = v - s.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    if (x.size() > 1) s.variance = m2 / (s.n - 1.0);
    m2 /= s.n;
    m4 /= s.n;
    s.se_mean = std::sqrt(std::max(0.0, m2 / s.n));
    s.se_variance = std::sqrt(std::max(0.0, (m4 - m2 * m2) / s.n));
    return s;
}

} // namespace decum

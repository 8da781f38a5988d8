#pragma once

#include <cmath>

#include "decum/common.hpp"
#include "decum/numerics.hpp"

namespace decum {

// Real-return model of the drawdown account. Rates are per year, volatilities
// per sqrt(year).
struct market_params {
    double r = 0.005;         // real risk-free rate
    double pi = 0.025;        // trend inflation
    double sigma_pi = 0.0185; // inflation volatility
    double mu_m = 0.095;      // nominal market drift
    double sigma_m = 0.16;    // market volatility

    double real_premium() const { return mu_m - pi - r; }
    double total_var() const { return sigma_m * sigma_m + sigma_pi * sigma_pi; }

    void validate() const {
        require(sigma_pi >= 0.0 && sigma_m >= 0.0, "volatilities must be non-negative");
        require(real_premium() > 0.0, "market must carry a positive real risk premium");
    }
};

// Drift and variance rate of the real discount factor at market weight w:
// mu(w) = (1-w) r + w (mu_M - pi),  sigma(w)^2 = w^2 (sigma_M^2 + sigma_pi^2).
struct portfolio_law {
    double w = 0;
    double mu = 0;
    double sigma2 = 0;

    double sigma() const { return std::sqrt(sigma2); }
};

inline portfolio_law make_portfolio_law(const market_params& p, double w) {
    require(w >= 0.0, "market weight must be non-negative");
    portfolio_law law;
    law.w = w;
    law.mu = (1.0 - w) * p.r + w * (p.mu_m - p.pi);
    law.sigma2 = w * w * p.total_var();
    return law;
}

// EPV of a whole-life annuity of 1/yr under a constant hazard:
// a_x(w) = 1 / (lambda + mu(w) - sigma(w)^2).
inline double annuity_epv(const portfolio_law& law, double lambda) {
    const double d = lambda + law.mu - law.sigma2;
    if (d <= 0.0) throw ill_defined_epv("annuity EPV undefined: lambda + mu - sigma^2 <= 0");
    return 1.0 / d;
}

// Gamma law of the reciprocal stochastic perpetuity. The zero-volatility case
// is a point mass at 1/v, kept as an explicit state instead of a limit.
struct perpetuity_law {
    double v = 0;     // drift parameter
    double s = 0;     // volatility parameter
    double alpha = 0; // gamma shape 2v/s^2
    double eta = 0;   // gamma rate 2/s^2
    bool degenerate = false;
};

inline perpetuity_law make_perpetuity_law(const portfolio_law& law, double lambda) {
    perpetuity_law g;
    g.v = lambda + law.mu - 0.5 * law.sigma2;
    g.s = law.sigma();
    require(g.v > 0.0, "perpetuity drift parameter must be positive");
    if (law.sigma2 == 0.0) {
        g.degenerate = true;
        return g;
    }
    g.alpha = 2.0 * g.v / law.sigma2;
    g.eta = 2.0 / law.sigma2;
    return g;
}

// N-th raw moment of the perpetuity integral: eta^N Gamma(alpha-N)/Gamma(alpha).
// The first two moments use the exact rational form; the log-gamma difference
// that guards higher orders against overflow loses ~alpha * 1e-16 of relative
// precision, which already breaks the mean/EPV identity near w = 0.
inline double perpetuity_moment(const perpetuity_law& g, int n) {
    require(n >= 1, "moment order must be a positive integer");
    if (g.degenerate) return std::pow(1.0 / g.v, n);
    if (g.alpha <= static_cast<double>(n))
        throw undefined_moment("perpetuity moment undefined: alpha <= n");
    if (n == 1) return g.eta / (g.alpha - 1.0);
    if (n == 2) return g.eta * g.eta / ((g.alpha - 1.0) * (g.alpha - 2.0));
    return std::exp(n * std::log(g.eta) + std::lgamma(g.alpha - n) - std::lgamma(g.alpha));
}

// Variance of the perpetuity integral, eta^2 / ((alpha-1)^2 (alpha-2)).
// Algebraically m2 - m1^2, but free of the cancellation that form suffers
// when alpha is large.
inline double perpetuity_variance(const perpetuity_law& g) {
    if (g.degenerate) return 0.0;
    if (g.alpha <= 2.0) throw undefined_moment("perpetuity variance undefined: alpha <= 2");
    const double am1 = g.alpha - 1.0;
    return g.eta * g.eta / (am1 * am1 * (g.alpha - 2.0));
}

struct weight_bounds_result {
    double w0 = kInf;    // minimiser of the annuity EPV
    double w1 = kInf;    // root of alpha(w) = 2
    bool bounded = true; // false when volatility vanishes and both bounds diverge

    double cap() const { return w0 < w1 ? w0 : w1; }
};

// w0 has the closed form (mu_M - pi - r) / (2 (sigma_M^2 + sigma_pi^2)); w1 is
// found by bisection on alpha(w) - 2, which is smooth and decreasing in w.
inline weight_bounds_result weight_bounds(const market_params& p, double lambda) {
    p.validate();
    require(lambda > 0.0, "death hazard must be positive");
    weight_bounds_result b;
    if (p.total_var() == 0.0) {
        b.bounded = false;
        return b;
    }
    b.w0 = p.real_premium() / (2.0 * p.total_var());
    auto alpha_gap = [&](double w) {
        const portfolio_law law = make_portfolio_law(p, w);
        return 2.0 * (lambda + law.mu - 0.5 * law.sigma2) / law.sigma2 - 2.0;
    };
    double lo = b.w0, hi = 10.0;
    if (alpha_gap(b.w0) <= 0.0) {
        lo = 1e-12;
    } else {
        while (alpha_gap(hi) > 0.0) {
            hi *= 2.0;
            if (hi > 1e9) {
                b.bounded = false;
                return b;
            }
        }
    }
    b.w1 = bisect(alpha_gap, lo, hi, 1e-8);
    return b;
}

} // namespace decum

#pragma once

#include <cmath>
#include <vector>

#include "decum/annuity.hpp"

namespace decum {

// First two moments of the bequest share X^I (investment information set).
struct investment_outcome {
    double mean = 0;
    double second_moment = 0;
    double variance = 0;
};

// Closed-form moments of X^I. With K = 1 - total outlay, phi_h = phi (1 + beta
// lambda) and J the lambda-killed perpetuity integral:
//   IIA/LIA:  X = K - (c - phi_h) J
//   ULA/GSA:  X = K + phi_h a_x(w) - c J
// Exact when sigma(w) = 0; requires alpha(w) > 2 otherwise.
inline investment_outcome xi_moments(const strategy& s, const market_params& mkt,
                                     double lambda, double c, const pricing_result& pr) {
    const portfolio_law law = make_portfolio_law(mkt, s.w);
    const perpetuity_law j = make_perpetuity_law(law, lambda);
    if (!j.degenerate && j.alpha <= 2.0)
        throw undefined_moment("second moment of X^I undefined: alpha(w) <= 2");
    const double m1 = perpetuity_moment(j, 1);
    const double var_j = perpetuity_variance(j);
    const double phi_h = s.phi * (1.0 + s.beta * lambda);
    investment_outcome out;
    if (provider_risk_free(s.veh)) {
        const double k = 1.0 - pr.p_theta - pr.hedge_injection;
        const double b = c - phi_h;
        out.mean = k - b * m1;
        out.variance = b * b * var_j;
    } else {
        // grouping the pool credit as a single correction keeps the GSA term
        // exactly zero, so its moments match pure drawdown bit for bit
        const double credit =
            phi_h * annuity_epv(law, lambda) - pr.p_theta - pr.hedge_injection;
        out.mean = (1.0 - c * m1) + credit;
        out.variance = c * c * var_j;
    }
    out.second_moment = out.mean * out.mean + out.variance;
    return out;
}

// X^L(T): the deterministic residual-liquidity path in the transition
// information set. Payments are flat for the mortality-guaranteed vehicles and
// scale with e^{(Lambda - lambda) t} for the participating ones.
inline double liquidity_path_value(const strategy& s, const portfolio_law& law,
                                   double lambda, double c, const pricing_result& pr,
                                   double big_lambda, double t) {
    require(t >= 0.0, "time must be non-negative");
    const double phi_h = s.phi * (1.0 + s.beta * lambda);
    const double consume = c * annuity_certain(law.mu, t);
    const double kappa = mortality_guaranteed(s.veh) ? law.mu : law.mu + lambda - big_lambda;
    const double pay = phi_h * annuity_certain(kappa, t);
    return 1.0 - pr.total_outlay() - consume + pay;
}

inline double liquidity_path_value(const strategy& s, const market_params& mkt,
                                   double lambda, double c, const pricing_result& pr,
                                   double big_lambda, double t) {
    return liquidity_path_value(s, make_portfolio_law(mkt, s.w), lambda, c, pr,
                                big_lambda, t);
}

// Smallest non-negative root of X^L(T) = nu: scan 10 equal partitions of
// [0, 80] for a sign change, then bisect to 1e-10 years. Returns 0 when the
// path starts at or below nu and +inf ("never") when there is no crossing.
inline double shortfall_time(const strategy& s, const portfolio_law& law, double lambda,
                             double c, const pricing_result& pr, double big_lambda,
                             double nu) {
    require(nu >= 0.0 && nu < 1.0, "shortfall threshold must lie in [0,1)");
    auto path = [&](double t) {
        return liquidity_path_value(s, law, lambda, c, pr, big_lambda, t);
    };
    if (path(0.0) <= nu) return 0.0;
    constexpr double horizon = 80.0;
    constexpr int intervals = 10;
    double prev = 0.0;
    for (int k = 1; k <= intervals; ++k) {
        const double t_k = horizon * k / intervals;
        if (path(t_k) <= nu) {
            double lo = prev, hi = t_k;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                if (path(mid) <= nu) hi = mid; else lo = mid;
            }
            return hi;
        }
        prev = t_k;
    }
    return kInf;
}

inline double shortfall_time(const strategy& s, const market_params& mkt, double lambda,
                             double c, const pricing_result& pr, double big_lambda,
                             double nu) {
    return shortfall_time(s, make_portfolio_law(mkt, s.w), lambda, c, pr, big_lambda, nu);
}

// Per-Lambda shortfall times and the averaged shortfall probability
// P = E[e^{-(Lambda + lambda_eln) tau_nu}]. For the mortality-guaranteed
// vehicles tau is Lambda-independent (taus holds the single value) and the
// expectation reduces to e^{-lambda_eln tau} * mean of e^{-Lambda tau}.
struct shortfall_result {
    std::vector<double> taus; // +inf marks "never"
    double probability = 0;
    double nu = 0;
};

inline shortfall_result shortfall_probability(const strategy& s, const market_params& mkt,
                                              const mortality_params& m, double c,
                                              const pricing_result& pr,
                                              const lambda_samples& lams, double nu) {
    require(!lams.values.empty(), "need population hazard samples");
    const portfolio_law law = make_portfolio_law(mkt, s.w);
    shortfall_result out;
    out.nu = nu;
    // e^{-x * tau} already covers the edge cases: tau = 0 contributes 1 and
    // tau = +inf contributes exactly 0
    auto contribution = [&](double li, double tau) {
        return std::exp(-(li + m.lambda_eln) * tau);
    };
    double acc = 0.0;
    if (mortality_guaranteed(s.veh)) {
        const double tau = shortfall_time(s, law, m.lambda, c, pr, m.lambda, nu);
        out.taus.assign(1, tau);
        for (double li : lams.values) acc += contribution(li, tau);
    } else {
        out.taus.reserve(lams.values.size());
        for (double li : lams.values) {
            const double tau = shortfall_time(s, law, m.lambda, c, pr, li, nu);
            out.taus.push_back(tau);
            acc += contribution(li, tau);
        }
    }
    out.probability = acc / static_cast<double>(lams.values.size());
    return out;
}

} // namespace decum

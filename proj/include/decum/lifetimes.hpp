#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "decum/common.hpp"
#include "decum/numerics.hpp"
#include "decum/rng.hpp"

namespace decum {

// Death and early-liquidity-need hazards plus population-longevity uncertainty.
// The population hazard is Lambda = lambda_floor + LN(mu_ln, sigma_hat) with
// mu_ln chosen so that E[Lambda] = lambda.
struct mortality_params {
    double lambda = 0.051;        // projected death hazard per year
    double lambda_eln = 0.034;    // early-liquidity-need hazard per year
    double lambda_floor = 0.010;  // minimum death hazard per year
    double sigma_hat = 0.064;     // lognormal shape of longevity uncertainty

    void validate() const {
        require(lambda_floor >= 0.0 && lambda > lambda_floor,
                "need lambda > lambda_floor >= 0");
        require(lambda_eln >= 0.0, "lambda_eln must be non-negative");
        require(sigma_hat >= 0.0, "sigma_hat must be non-negative");
    }
};

inline double survival(double lambda, double t) {
    require(t >= 0.0, "time must be non-negative");
    return std::exp(-lambda * t);
}

struct lognormal_shape {
    double mu_ln;
    double sigma_hat;
};

inline lognormal_shape lognormal_shape_params(const mortality_params& m) {
    m.validate();
    return {std::log(m.lambda - m.lambda_floor) - 0.5 * m.sigma_hat * m.sigma_hat,
            m.sigma_hat};
}

// Population hazards drawn once per run and shared read-only by every grid cell.
struct lambda_samples {
    std::vector<double> values;
    std::uint64_t seed = 0;
};

inline lambda_samples sample_lambdas(const mortality_params& m, int count, std::uint64_t seed) {
    require(count >= 1, "need at least one population sample");
    const lognormal_shape sh = lognormal_shape_params(m);
    lambda_samples out;
    out.seed = seed;
    out.values.reserve(static_cast<std::size_t>(count));
    rng g = rng::stream(seed, 0x4c414d42ull);
    for (int i = 0; i < count; ++i) {
        if (m.sigma_hat == 0.0) {
            out.values.push_back(m.lambda);
        } else {
            out.values.push_back(m.lambda_floor + g.lognormal(sh.mu_ln, sh.sigma_hat));
        }
    }
    return out;
}

// Var(1/Lambda) by quadrature against the standard normal kernel.
inline double var_inv_lambda(const mortality_params& m) {
    if (m.sigma_hat == 0.0) return 0.0;
    const lognormal_shape sh = lognormal_shape_params(m);
    auto raw_moment = [&](int pw) {
        return adaptive_simpson(
            [&](double z) {
                const double lam = m.lambda_floor + std::exp(sh.mu_ln + sh.sigma_hat * z);
                const double x = pw == 1 ? 1.0 / lam : 1.0 / (lam * lam);
                return x * std::exp(-0.5 * z * z) * 0.39894228040143268;
            },
            -12.0, 12.0, 1e-12);
    };
    const double m1 = raw_moment(1);
    const double m2 = raw_moment(2);
    return m2 - m1 * m1;
}

// sigma_hat such that Var(1/Lambda) hits a target (in years^2).
inline double solve_sigma_hat(mortality_params m, double target_var) {
    require(target_var > 0.0, "target variance must be positive");
    auto gap = [&](double s) {
        m.sigma_hat = s;
        return var_inv_lambda(m) - target_var;
    };
    double hi = 0.5;
    while (gap(hi) < 0.0) {
        hi *= 2.0;
        require(hi < 16.0, "no sigma_hat reaches the target variance");
    }
    return bisect(gap, 1e-6, hi, 1e-10);
}

// One-year death probabilities from some start age, with per-age annual
// improvement factors in percent (negative = improving mortality).
struct life_table {
    int start_age = 0;
    std::vector<double> qx;
    std::vector<double> improvement_pct;

    void validate() const {
        require(!qx.empty(), "life table is empty");
        require(qx.size() == improvement_pct.size(), "life table column length mismatch");
        for (double q : qx) require(q >= 0.0 && q <= 1.0, "qx outside [0,1]");
    }

    bool closed() const { return !qx.empty() && qx.back() >= 1.0; }
};

// q_{x+t} = q_base(x+t) * (1 + f(x+t)/100)^t, capped at 1.
inline double projected_qx(const life_table& t, int years_ahead) {
    t.validate();
    require(years_ahead >= 0 && years_ahead < static_cast<int>(t.qx.size()),
            "age outside table range");
    const std::size_t k = static_cast<std::size_t>(years_ahead);
    const double q = t.qx[k] * std::pow(1.0 + t.improvement_pct[k] / 100.0, years_ahead);
    return q < 1.0 ? q : 1.0;
}

// Curtate expectancy plus a half-year continuity adjustment. Improvement
// scaling would leave the final age open, so it is forced to certain death.
inline double life_expectancy(const life_table& t) {
    t.validate();
    require(t.closed(), "life table must close out with a final qx of 1");
    const int n = static_cast<int>(t.qx.size());
    double e = 0.0, surv = 1.0;
    for (int k = 0; k < n; ++k) {
        const double q = k == n - 1 ? 1.0 : projected_qx(t, k);
        surv *= 1.0 - q;
        e += surv;
    }
    return e + 0.5;
}

// Exponential mean matching.
inline double fit_lambda(double life_exp_years) {
    require(life_exp_years > 0.0, "life expectancy must be positive");
    return 1.0 / life_exp_years;
}

struct eln_fit {
    double lambda = 0;
    double r_squared = 0;
};

// Least-squares exponential fit of still-active proportions over time,
// lambda minimising sum (e^{-lambda t_i} - p_i)^2 by golden section.
inline eln_fit fit_eln_hazard(const std::vector<double>& times,
                              const std::vector<double>& proportions) {
    require(!times.empty() && times.size() == proportions.size(),
            "times/proportions length mismatch");
    double t_max = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        require(times[i] >= 0.0, "times must be non-negative");
        require(proportions[i] > 0.0 && proportions[i] <= 1.0,
                "proportions must lie in (0,1]");
        t_max = std::max(t_max, times[i]);
    }
    require(t_max > 0.0, "degenerate input: all observation times are zero");
    auto sse = [&](double lam) {
        double s = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double d = std::exp(-lam * times[i]) - proportions[i];
            s += d * d;
        }
        return s;
    };
    eln_fit out;
    out.lambda = golden_min(sse, 0.0, 5.0, 1e-8);
    double mean = 0.0;
    for (double p : proportions) mean += p;
    mean /= static_cast<double>(proportions.size());
    double sst = 0.0;
    for (double p : proportions) sst += (p - mean) * (p - mean);
    const double res = sse(out.lambda);
    out.r_squared = sst > 0.0 ? 1.0 - res / sst : (res < 1e-12 ? 1.0 : 0.0);
    return out;
}

} // namespace decum

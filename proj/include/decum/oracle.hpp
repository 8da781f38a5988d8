#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "decum/optimizer.hpp"
#include "decum/outcomes.hpp"
#include "decum/parallel.hpp"
#include "decum/rng.hpp"

namespace decum {

struct sim_config {
    long paths = 10000;
    double dt = 1.0 / 252.0;     // discount-path step
    double pool_dt = 1.0 / 12.0; // pool-simulation step
    double horizon = 80.0;       // >= 80 whenever shortfall logic is validated
    std::uint64_t seed = 12345;
    int threads = 0;

    void validate() const {
        require(paths >= 2, "need at least two paths");
        require(dt > 0.0 && pool_dt > 0.0, "time steps must be positive");
        require(horizon > 0.0, "horizon must be positive");
    }
};

struct mc_estimate {
    double value = 0;
    double std_error = 0;
};

// Exact-in-distribution paths of the real discount factor:
// I(t+dt) = I(t) exp(-(mu - sigma^2/2) dt - sigma sqrt(dt) Z).
struct discount_paths {
    std::vector<double> times;
    std::vector<std::vector<double>> paths;
};

inline discount_paths simulate_discount(const market_params& mkt, double w,
                                        const sim_config& cfg) {
    cfg.validate();
    const portfolio_law law = make_portfolio_law(mkt, w);
    const int steps = static_cast<int>(std::ceil(cfg.horizon / cfg.dt));
    discount_paths out;
    out.times.resize(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) out.times[static_cast<std::size_t>(k)] = k * cfg.dt;
    out.paths.assign(static_cast<std::size_t>(cfg.paths), {});
    const double drift = -(law.mu - 0.5 * law.sigma2) * cfg.dt;
    const double vol = law.sigma() * std::sqrt(cfg.dt);
    parallel_for(static_cast<int>(cfg.paths), cfg.threads, [&](int p) {
        rng g = rng::stream(cfg.seed, 0x49504154ull + static_cast<std::uint64_t>(p));
        std::vector<double>& path = out.paths[static_cast<std::size_t>(p)];
        path.resize(static_cast<std::size_t>(steps) + 1);
        double log_i = 0.0;
        path[0] = 1.0;
        for (int k = 1; k <= steps; ++k) {
            log_i += drift - vol * g.normal();
            path[static_cast<std::size_t>(k)] = std::exp(log_i);
        }
    });
    return out;
}

// One lambda-killed perpetuity integral J = int_0^inf e^{-(v t + s B_t)} dt per
// path: trapezoidal accumulation to the truncation point 60/v, plus the
// analytic conditional tail I_u / (v - s^2/2).
inline std::vector<double> simulate_perpetuity(const portfolio_law& law, double lambda,
                                               const sim_config& cfg,
                                               std::uint64_t stream_salt) {
    cfg.validate();
    const double v = lambda + law.mu - 0.5 * law.sigma2;
    require(v > 0.0, "perpetuity drift parameter must be positive");
    const double tail_rate = lambda + law.mu - law.sigma2;
    require(tail_rate > 0.0, "perpetuity tail diverges");
    const double horizon = 60.0 / v;
    const long steps = static_cast<long>(std::ceil(horizon / cfg.dt));
    const double drift = -v * cfg.dt;
    const double vol = law.sigma() * std::sqrt(cfg.dt);
    std::vector<double> out(static_cast<std::size_t>(cfg.paths));
    parallel_for(static_cast<int>(cfg.paths), cfg.threads, [&](int p) {
        rng g = rng::stream(cfg.seed, stream_salt + static_cast<std::uint64_t>(p));
        double log_z = 0.0, prev = 1.0, acc = 0.0;
        for (long k = 0; k < steps; ++k) {
            log_z += drift - vol * g.normal();
            const double cur = std::exp(log_z);
            acc += 0.5 * (prev + cur) * cfg.dt;
            prev = cur;
        }
        out[static_cast<std::size_t>(p)] = acc + prev / tail_rate;
    });
    return out;
}

struct xi_mc_result {
    mc_estimate mean;
    mc_estimate variance;
};

// X^I by direct simulation of the Case 1 / Case 2 integrals.
inline xi_mc_result mc_xi_moments(const strategy& s, const market_params& mkt,
                                  double lambda, double c, const pricing_result& pr,
                                  const sim_config& cfg) {
    const portfolio_law law = make_portfolio_law(mkt, s.w);
    const double phi_h = s.phi * (1.0 + s.beta * lambda);
    const double k = 1.0 - pr.total_outlay();
    double a, b;
    if (provider_risk_free(s.veh)) {
        a = k;
        b = c - phi_h;
    } else {
        a = k + phi_h * annuity_epv(law, lambda);
        b = c;
    }
    std::vector<double> x = simulate_perpetuity(law, lambda, cfg, 0x58490000ull);
    for (double& j : x) j = a - b * j;
    const sample_stats st = compute_stats(x);
    xi_mc_result out;
    out.mean = {st.mean, st.se_mean};
    out.variance = {st.variance, st.se_variance};
    return out;
}

// Shortfall probability by event simulation: draw Lambda, draw T* from
// Exp(Lambda + lambda_eln), and test T* >= tau_nu(Lambda). The crossing time
// is located on a dense quarter-year scan of the liquidity path, independent
// of the production partition search, then refined by bisection.
inline mc_estimate mc_shortfall(const strategy& s, const market_params& mkt,
                                const mortality_params& m, double c,
                                const pricing_result& pr, double nu,
                                const sim_config& cfg) {
    cfg.validate();
    const portfolio_law law = make_portfolio_law(mkt, s.w);
    const lognormal_shape sh = lognormal_shape_params(m);
    auto tau_dense = [&](double big_lambda) {
        auto path = [&](double t) {
            return liquidity_path_value(s, law, m.lambda, c, pr, big_lambda, t);
        };
        if (path(0.0) <= nu) return 0.0;
        const double step = 0.25;
        double prev = 0.0;
        for (double t = step; t <= cfg.horizon + 1e-12; t += step) {
            if (path(t) <= nu) {
                double lo = prev, hi = t;
                for (int it = 0; it < 40; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (path(mid) <= nu) hi = mid; else lo = mid;
                }
                return hi;
            }
            prev = t;
        }
        return kInf;
    };
    // guaranteed payments make the crossing time Lambda-independent
    const bool fixed_tau = mortality_guaranteed(s.veh);
    const double tau_fixed = fixed_tau ? tau_dense(m.lambda) : 0.0;
    std::vector<double> hits(static_cast<std::size_t>(cfg.paths));
    parallel_for(static_cast<int>(cfg.paths), cfg.threads, [&](int p) {
        rng g = rng::stream(cfg.seed, 0x534c4600ull + static_cast<std::uint64_t>(p));
        const double big_lambda =
            m.sigma_hat == 0.0 ? m.lambda
                               : m.lambda_floor + g.lognormal(sh.mu_ln, sh.sigma_hat);
        const double tau = fixed_tau ? tau_fixed : tau_dense(big_lambda);
        double hit = 0.0;
        if (!std::isinf(tau)) {
            const double t_star = g.exponential(big_lambda + m.lambda_eln);
            hit = t_star >= tau ? 1.0 : 0.0;
        }
        hits[static_cast<std::size_t>(p)] = hit;
    });
    const sample_stats st = compute_stats(hits);
    return {st.mean, st.se_mean};
}

// Variance of the average pool cost, conditional on one population hazard.
// Survivors evolve by exact binomial thinning on the pool time grid; payments
// accumulate with exact per-interval discount weights until the pool empties.
inline mc_estimate mc_pool_cost_variance(vehicle v, const strategy& s, int n,
                                         double big_lambda, const market_params& mkt,
                                         long replicates, const sim_config& cfg) {
    cfg.validate();
    require(n >= 1, "pool size must be at least 1");
    require(replicates >= 2, "need at least two pool replicates");
    const portfolio_law law = make_portfolio_law(mkt, s.w);
    const double rho = provider_discount_rate(v, mkt, law);
    require(rho + big_lambda > 0.0 && 2.0 * rho + big_lambda > 0.0,
            "pool cost variance diverges");
    if (participating(v)) {
        // payments carry the pool experience back to the members, so the
        // average cost is the deterministic projected annuity: zero variance
        return {0.0, 0.0};
    }
    const double dt = cfg.pool_dt;
    const double death_q = -std::expm1(-big_lambda * dt);
    const double t_cap = 2000.0 / big_lambda;
    std::vector<double> costs(static_cast<std::size_t>(replicates));
    parallel_for(static_cast<int>(replicates), cfg.threads, [&](int rep) {
        rng g = rng::stream(cfg.seed, 0x504f4f4cull + static_cast<std::uint64_t>(rep));
        long alive = n;
        double t = 0.0, acc = 0.0;
        while (alive > 0 && t < t_cap) {
            const long deaths = sample_binomial(g, alive, death_q);
            const double weight = std::exp(-rho * t) * annuity_certain(rho, dt);
            acc += weight * 0.5 * static_cast<double>(alive + (alive - deaths));
            alive -= deaths;
            t += dt;
        }
        costs[static_cast<std::size_t>(rep)] = s.phi * acc / static_cast<double>(n);
    });
    const sample_stats st = compute_stats(costs);
    return {st.variance, st.se_variance};
}

// One line of the oracle comparison report.
struct oracle_row {
    std::string quantity;
    double closed_form = 0;
    double mc_value = 0;
    double std_error = 0;
    double z_score = 0;
};

inline oracle_row make_row(std::string name, double closed, mc_estimate mc,
                           double extra_se = 0.0) {
    oracle_row r;
    r.quantity = std::move(name);
    r.closed_form = closed;
    r.mc_value = mc.value;
    r.std_error = std::sqrt(mc.std_error * mc.std_error + extra_se * extra_se);
    const double diff = mc.value - closed;
    r.z_score = diff == 0.0 ? 0.0 : (r.std_error > 0.0 ? diff / r.std_error : kInf);
    return r;
}

// Every closed-form quantity paired with its Monte Carlo counterpart.
inline std::vector<oracle_row> run_oracle_suite(const model_params& mp, double c,
                                                double nu, const lambda_samples& lams,
                                                const sim_config& cfg,
                                                int strategies_per_vehicle = 10) {
    std::vector<oracle_row> rows;
    const double lambda = mp.mortality.lambda;

    // discount factor mean at t = 1
    {
        const portfolio_law law = make_portfolio_law(mp.market, 0.5);
        sim_config one = cfg;
        one.horizon = 1.0;
        const discount_paths dp = simulate_discount(mp.market, 0.5, one);
        std::vector<double> terminal(dp.paths.size());
        for (std::size_t i = 0; i < dp.paths.size(); ++i) terminal[i] = dp.paths[i].back();
        const sample_stats st = compute_stats(terminal);
        rows.push_back(make_row("E[I(1)] w=0.5", std::exp(-(law.mu - law.sigma2)),
                                {st.mean, st.se_mean}));
    }

    // perpetuity moments
    for (double w : {0.25, 0.5, 1.0}) {
        const portfolio_law law = make_portfolio_law(mp.market, w);
        const perpetuity_law g = make_perpetuity_law(law, lambda);
        std::vector<double> j = simulate_perpetuity(law, lambda, cfg,
                                                    0x4a000000ull + static_cast<std::uint64_t>(w * 64));
        sample_stats st = compute_stats(j);
        char name[64];
        std::snprintf(name, sizeof(name), "perpetuity mean w=%.2f", w);
        rows.push_back(make_row(name, perpetuity_moment(g, 1), {st.mean, st.se_mean}));
        std::snprintf(name, sizeof(name), "perpetuity var w=%.2f", w);
        rows.push_back(make_row(name, perpetuity_variance(g), {st.variance, st.se_variance}));
    }

    // individual cost variance and death-benefit EPV (IIA basis)
    {
        rng g = rng::stream(cfg.seed, 0x434f5354ull);
        std::vector<double> cost(static_cast<std::size_t>(cfg.paths));
        std::vector<double> disc(static_cast<std::size_t>(cfg.paths));
        for (std::size_t i = 0; i < cost.size(); ++i) {
            const double t = g.exponential(lambda);
            cost[i] = annuity_certain(mp.market.r, t);
            disc[i] = std::exp(-mp.market.r * t);
        }
        const sample_stats sc = compute_stats(cost);
        const sample_stats sd = compute_stats(disc);
        strategy unit;
        unit.veh = vehicle::iia;
        unit.phi = 1.0;
        const portfolio_law law0 = make_portfolio_law(mp.market, 0.0);
        rows.push_back(make_row("individual cost var (IIA phi=1)",
                                individual_cost_variance(unit, lambda, mp.market, law0),
                                {sc.variance, sc.se_variance}));
        rows.push_back(make_row("death benefit EPV (u=r)",
                                death_benefit_epv(lambda, mp.market.r),
                                {sd.mean, sd.se_mean}));
        rows.push_back(make_row("fair price (IIA phi=1)",
                                fair_price(unit, lambda, mp.market, law0),
                                {sc.mean, sc.se_mean}));
    }

    // binomial-pool cost variance against the quadrature closed form
    {
        strategy unit;
        unit.veh = vehicle::iia;
        unit.phi = 1.0;
        const long reps = std::max<long>(500, cfg.paths);
        const portfolio_law law0 = make_portfolio_law(mp.market, 0.0);
        const double rho = provider_discount_rate(vehicle::iia, mp.market, law0);
        const struct { int n; double lam; const char* tag; } pools[] = {
            {100, lambda, "pool var n=100 L=lambda"},
            {5000, lambda, "pool var n=5000 L=lambda"},
            {5000, 1.2 * lambda, "pool var n=5000 L=1.2lambda"},
        };
        for (const auto& pc : pools) {
            const mc_estimate est = mc_pool_cost_variance(vehicle::iia, unit, pc.n, pc.lam,
                                                          mp.market, reps, cfg);
            rows.push_back(make_row(pc.tag, conditional_pool_variance(rho, pc.lam, pc.n), est));
        }
    }

    // closed-form X^I moments and shortfall probabilities for random
    // admissible strategies of every vehicle. The perpetuity integral J only
    // depends on the weight, so the four vehicles at one sampled w share a
    // path set and each X^I = A - B J is an exact affine transform of it.
    rng pick = rng::stream(cfg.seed, 0x53545241ull);
    const weight_bounds_result wb = weight_bounds(mp.market, lambda);
    const double w_hi = 0.98 * wb.cap();
    for (int i = 0; i < strategies_per_vehicle; ++i) {
        // keep clear of w = 0, where J degenerates and the z-score loses meaning
        const double w = w_hi * (0.02 + 0.97 * pick.uniform());
        const portfolio_law law = make_portfolio_law(mp.market, w);
        sim_config run = cfg;
        run.seed = cfg.seed + 977u * static_cast<std::uint64_t>(i + 1);
        const std::vector<double> j_samples =
            simulate_perpetuity(law, lambda, run, 0x58490000ull);
        const sample_stats j_st = compute_stats(j_samples);
        const double a_x = annuity_epv(law, lambda);
        for (vehicle v : all_vehicles) {
            strategy s;
            s.veh = v;
            s.w = w;
            s.phi = c * pick.uniform();
            const pricing_result pr = price_strategy(s, mp.market, lambda, mp.loading, lams);
            const investment_outcome xo = xi_moments(s, mp.market, lambda, c, pr);
            double coef_a, coef_b;
            if (provider_risk_free(v)) {
                coef_a = 1.0 - pr.total_outlay();
                coef_b = c - s.phi;
            } else {
                coef_a = 1.0 - pr.total_outlay() + s.phi * a_x;
                coef_b = c;
            }
            const mc_estimate mean_mc{coef_a - coef_b * j_st.mean,
                                      std::fabs(coef_b) * j_st.se_mean};
            const mc_estimate var_mc{coef_b * coef_b * j_st.variance,
                                     coef_b * coef_b * j_st.se_variance};
            char name[96];
            std::snprintf(name, sizeof(name), "E[X^I] %s w=%.3f phi=%.4f", vehicle_name(v),
                          s.w, s.phi);
            rows.push_back(make_row(name, xo.mean, mean_mc));
            std::snprintf(name, sizeof(name), "Var[X^I] %s w=%.3f phi=%.4f", vehicle_name(v),
                          s.w, s.phi);
            rows.push_back(make_row(name, xo.variance, var_mc));

            const shortfall_result sf =
                shortfall_probability(s, mp.market, mp.mortality, c, pr, lams, nu);
            mc_estimate psf = mc_shortfall(s, mp.market, mp.mortality, c, pr, nu, run);
            if (psf.std_error == 0.0 && sf.probability > 0.0 && sf.probability < 1.0) {
                // zero observed hits still carry binomial uncertainty
                psf.std_error = std::sqrt(sf.probability * (1.0 - sf.probability) /
                                          static_cast<double>(run.paths));
            }
            // the closed form averages a finite Lambda sample; fold that
            // sampling error into the gate as well
            double lam_se = 0.0;
            if (!sf.taus.empty()) {
                std::vector<double> contrib;
                contrib.reserve(lams.values.size());
                if (sf.taus.size() == 1) {
                    const double tau = sf.taus[0];
                    for (double li : lams.values)
                        contrib.push_back(std::isinf(tau)
                                              ? 0.0
                                              : std::exp(-(li + mp.mortality.lambda_eln) * tau));
                } else {
                    for (std::size_t q = 0; q < lams.values.size(); ++q)
                        contrib.push_back(std::isinf(sf.taus[q])
                                              ? 0.0
                                              : std::exp(-(lams.values[q] +
                                                           mp.mortality.lambda_eln) *
                                                         sf.taus[q]));
                }
                const sample_stats stc = compute_stats(contrib);
                lam_se = stc.se_mean;
            }
            std::snprintf(name, sizeof(name), "P[shortfall] %s w=%.3f phi=%.4f",
                          vehicle_name(v), s.w, s.phi);
            rows.push_back(make_row(name, sf.probability, psf, lam_se));
        }
    }
    return rows;
}

} // namespace decum

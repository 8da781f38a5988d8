#include <catch_amalgamated.hpp>

#include <cmath>

#include "decum/oracle.hpp"

using namespace decum;
using Catch::Approx;

namespace {

struct fixture {
    model_params mp;
    lambda_samples lams;
    sim_config cfg;

    fixture() {
        lams = sample_lambdas(mp.mortality, 200, 12345);
        cfg.paths = 3000;
        cfg.seed = 777;
        cfg.threads = 0;
        cfg.dt = 1.0 / 52.0; // weekly steps keep the unit suite quick
    }
};

} // namespace

TEST_CASE("discount paths are exact at zero volatility", "[oracle]") {
    fixture f;
    market_params still = f.mp.market;
    sim_config cfg = f.cfg;
    cfg.paths = 4;
    cfg.horizon = 5.0;
    const discount_paths dp = simulate_discount(still, 0.0, cfg);
    const double mu = still.r;
    for (const auto& path : dp.paths) {
        for (std::size_t k = 0; k < dp.times.size(); ++k) {
            REQUIRE(path[k] == Approx(std::exp(-mu * dp.times[k])).epsilon(1e-10));
        }
    }
}

TEST_CASE("discount factor mean matches the lognormal identity", "[oracle]") {
    fixture f;
    sim_config cfg = f.cfg;
    cfg.horizon = 1.0;
    cfg.paths = 20000;
    const portfolio_law law = make_portfolio_law(f.mp.market, 0.5);
    const discount_paths dp = simulate_discount(f.mp.market, 0.5, cfg);
    std::vector<double> terminal(dp.paths.size());
    for (std::size_t i = 0; i < terminal.size(); ++i) terminal[i] = dp.paths[i].back();
    const sample_stats st = compute_stats(terminal);
    CHECK(std::fabs(st.mean - std::exp(-(law.mu - law.sigma2))) <= 4.0 * st.se_mean);
}

TEST_CASE("perpetuity simulation matches the gamma moments", "[oracle]") {
    fixture f;
    const portfolio_law law = make_portfolio_law(f.mp.market, 0.5);
    const perpetuity_law g = make_perpetuity_law(law, f.mp.mortality.lambda);
    const std::vector<double> j = simulate_perpetuity(law, f.mp.mortality.lambda, f.cfg, 1);
    const sample_stats st = compute_stats(j);
    CHECK(std::fabs(st.mean - perpetuity_moment(g, 1)) <= 4.0 * st.se_mean);
    CHECK(std::fabs(st.variance - perpetuity_variance(g)) <= 4.0 * st.se_variance);
}

TEST_CASE("pure drawdown bequest is exact up to discretisation", "[oracle]") {
    fixture f;
    strategy dd;
    dd.veh = vehicle::gsa;
    dd.w = 0.0;
    dd.phi = 0.0;
    sim_config cfg = f.cfg;
    cfg.paths = 50;
    cfg.dt = 1.0 / 252.0; // daily steps pin the deterministic integral to 1e-6
    const pricing_result pr; // zero premium
    const xi_mc_result mc = mc_xi_moments(dd, f.mp.market, 0.051, 0.052, pr, cfg);
    CHECK(mc.mean.value == Approx(1.0 - 0.052 / 0.056).margin(1e-6));
    CHECK(mc.variance.value == Approx(0.0).margin(1e-12));
}

TEST_CASE("GSA and pure drawdown agree inside the Monte Carlo too", "[oracle]") {
    fixture f;
    strategy dd;
    dd.veh = vehicle::gsa;
    dd.w = 0.5;
    dd.phi = 0.0;
    strategy gsa = dd;
    gsa.phi = 0.03;
    const pricing_result pr_dd =
        price_strategy(dd, f.mp.market, 0.051, f.mp.loading, f.lams);
    const pricing_result pr_gsa =
        price_strategy(gsa, f.mp.market, 0.051, f.mp.loading, f.lams);
    const xi_mc_result a = mc_xi_moments(dd, f.mp.market, 0.051, 0.052, pr_dd, f.cfg);
    const xi_mc_result b = mc_xi_moments(gsa, f.mp.market, 0.051, 0.052, pr_gsa, f.cfg);
    CHECK(std::fabs(a.mean.value - b.mean.value) <=
          3.0 * std::hypot(a.mean.std_error, b.mean.std_error) + 1e-9);
    CHECK(std::fabs(a.variance.value - b.variance.value) <=
          3.0 * std::hypot(a.variance.std_error, b.variance.std_error) + 1e-9);
}

TEST_CASE("shortfall events match the closed form", "[oracle]") {
    fixture f;
    // fully funded IIA never falls short
    strategy full;
    full.veh = vehicle::iia;
    full.w = 0.0;
    full.phi = 0.04;
    const pricing_result pf = price_strategy(full, f.mp.market, 0.051, f.mp.loading, f.lams);
    sim_config cfg = f.cfg;
    cfg.paths = 2000;
    CHECK(mc_shortfall(full, f.mp.market, f.mp.mortality, 0.04, pf, 0.0, cfg).value == 0.0);

    // ruin probability of flat drawdown, degenerate population
    mortality_params point = f.mp.mortality;
    point.sigma_hat = 0.0;
    strategy dd;
    dd.veh = vehicle::gsa;
    dd.w = 0.0;
    dd.phi = 0.0;
    cfg.paths = 20000;
    const mc_estimate ruin =
        mc_shortfall(dd, f.mp.market, point, 0.052, pricing_result{}, 0.0, cfg);
    CHECK(std::fabs(ruin.value - 0.17931092177493793) <= 4.0 * ruin.std_error);
}

TEST_CASE("pool cost variance oracle", "[oracle]") {
    fixture f;
    strategy unit;
    unit.veh = vehicle::iia;
    unit.phi = 1.0;
    const portfolio_law law0 = make_portfolio_law(f.mp.market, 0.0);
    const double lambda = f.mp.mortality.lambda;
    const double rho = provider_discount_rate(vehicle::iia, f.mp.market, law0);

    // a single-life pool reproduces the individual cost variance
    const mc_estimate one =
        mc_pool_cost_variance(vehicle::iia, unit, 1, lambda, f.mp.market, 4000, f.cfg);
    CHECK(std::fabs(one.value - individual_cost_variance(unit, lambda, f.mp.market, law0)) <=
          4.0 * one.std_error);

    // conditional closed form at n = 5000 and at a stressed hazard
    const mc_estimate big = mc_pool_cost_variance(vehicle::iia, unit, 5000, lambda,
                                                  f.mp.market, 3000, f.cfg);
    CHECK(std::fabs(big.value - conditional_pool_variance(rho, lambda, 5000)) <=
          4.0 * big.std_error);
    const mc_estimate stressed = mc_pool_cost_variance(
        vehicle::iia, unit, 5000, 1.2 * lambda, f.mp.market, 3000, f.cfg);
    CHECK(std::fabs(stressed.value - conditional_pool_variance(rho, 1.2 * lambda, 5000)) <=
          4.0 * stressed.std_error);

    // idiosyncratic variance decays like 1/n: log-log slope near -1
    double xs[3] = {std::log(100.0), std::log(1000.0), std::log(10000.0)};
    double ys[3];
    int i = 0;
    for (int n : {100, 1000, 10000}) {
        const mc_estimate est = mc_pool_cost_variance(vehicle::iia, unit, n, lambda,
                                                      f.mp.market, 2000, f.cfg);
        ys[i++] = std::log(est.value);
    }
    const double mx = (xs[0] + xs[1] + xs[2]) / 3.0, my = (ys[0] + ys[1] + ys[2]) / 3.0;
    double num = 0, den = 0;
    for (int k = 0; k < 3; ++k) {
        num += (xs[k] - mx) * (ys[k] - my);
        den += (xs[k] - mx) * (xs[k] - mx);
    }
    CHECK(num / den == Approx(-1.0).margin(0.1));

    // participating pools carry no provider cost risk
    strategy gsa = unit;
    gsa.veh = vehicle::gsa;
    CHECK(mc_pool_cost_variance(vehicle::gsa, gsa, 100, lambda, f.mp.market, 100,
                                f.cfg)
              .value == 0.0);
}

TEST_CASE("oracles are deterministic per seed and calibrated across seeds", "[oracle]") {
    fixture f;
    const portfolio_law law = make_portfolio_law(f.mp.market, 0.5);
    sim_config cfg = f.cfg;
    cfg.paths = 2000;

    const std::vector<double> a = simulate_perpetuity(law, 0.051, cfg, 5);
    const std::vector<double> b = simulate_perpetuity(law, 0.051, cfg, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k] == b[k]);

    // z-scores across independent seeds behave like standard normals
    const perpetuity_law g = make_perpetuity_law(law, 0.051);
    const double truth = perpetuity_moment(g, 1);
    double sum_z = 0.0, max_abs = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        sim_config run = cfg;
        run.seed = seed * 1009;
        const sample_stats st = compute_stats(simulate_perpetuity(law, 0.051, run, 5));
        const double z = (st.mean - truth) / st.se_mean;
        sum_z += z;
        max_abs = std::max(max_abs, std::fabs(z));
    }
    CHECK(std::fabs(sum_z / 20.0) <= 1.0);
    CHECK(max_abs <= 4.5);
}

TEST_CASE("reduced oracle suite passes the CI gate", "[oracle][suite]") {
    fixture f;
    sim_config cfg = f.cfg;
    cfg.paths = 4000;
    const auto rows = run_oracle_suite(f.mp, 0.052, 0.0, f.lams, cfg, 2);
    REQUIRE(rows.size() > 20);
    for (const auto& r : rows) {
        INFO(r.quantity << " closed=" << r.closed_form << " mc=" << r.mc_value
                        << " z=" << r.z_score);
        REQUIRE(std::fabs(r.z_score) <= 4.0);
    }
}

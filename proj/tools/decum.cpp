#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "decum/config.hpp"
#include "decum/heatmap.hpp"
#include "decum/io.hpp"
#include "decum/oracle.hpp"

namespace {

constexpr int kExitBadCsv = 2;
constexpr int kExitOracleGate = 3;

void print_kv(const char* key, double v) {
    std::printf("%s=%.10g\n", key, v);
}

std::array<decum::cell_surfaces, 4> all_surfaces(const decum::run_config& cfg,
                                                 const decum::lambda_samples& lams,
                                                 int threads) {
    std::array<decum::cell_surfaces, 4> out;
    for (std::size_t i = 0; i < decum::all_vehicles.size(); ++i) {
        out[i] = decum::evaluate_surfaces(decum::all_vehicles[i], cfg.model, cfg.grids(),
                                          cfg.nu, lams, threads);
    }
    return out;
}

int run_calibrate(const std::string& life_path, const std::string& factors,
                  const std::string& care_path, double lambda_floor) {
    try {
        const decum::life_table table = decum::load_life_table_file(life_path);
        const decum::care_table care = decum::load_care_table_file(care_path);
        const double e = decum::life_expectancy(table);
        const double lambda = decum::fit_lambda(e);
        const decum::eln_fit eln = decum::fit_eln_hazard(care.times, care.proportions);
        decum::mortality_params m;
        m.lambda = lambda;
        m.lambda_eln = eln.lambda;
        m.lambda_floor = lambda_floor;
        const double sigma_hat = decum::solve_sigma_hat(m, 1.0);
        m.sigma_hat = sigma_hat;
        std::printf("factors=%s\n", factors.c_str());
        print_kv("life_expectancy", e);
        print_kv("lambda", lambda);
        print_kv("lambda_ltc", eln.lambda);
        print_kv("r_squared", eln.r_squared);
        print_kv("lambda_floor", lambda_floor);
        print_kv("sigma_hat", sigma_hat);
        print_kv("var_inv_lambda_check", decum::var_inv_lambda(m));
        return 0;
    } catch (const decum::csv_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadCsv;
    }
}

int run_price(const decum::run_config& cfg, const std::string& veh, double w, double phi,
              double beta) {
    decum::strategy s;
    s.veh = decum::vehicle_from_name(veh);
    s.w = w;
    s.phi = phi;
    s.beta = beta;
    const decum::lambda_samples lams = cfg.draw_lambdas();
    const double lambda = cfg.model.mortality.lambda;
    const decum::pricing_result pr =
        decum::price_strategy(s, cfg.model.market, lambda, cfg.model.loading, lams);
    const decum::portfolio_law law = decum::make_portfolio_law(cfg.model.market, w);

    decum::loading_policy ind = cfg.model.loading;
    ind.basis = decum::variance_basis::individual_cost;
    decum::loading_policy avg = cfg.model.loading;
    avg.basis = decum::variance_basis::average_cost;

    print_kv("p0", pr.p0);
    print_kv("theta", pr.theta);
    print_kv("p_theta", pr.p_theta);
    print_kv("hedge_injection", pr.hedge_injection);
    print_kv("total_outlay", pr.total_outlay());
    print_kv("theta_individual_basis",
             decum::loading(s.veh, ind, lams, lambda, cfg.model.market, law));
    print_kv("theta_average_basis",
             decum::loading(s.veh, avg, lams, lambda, cfg.model.market, law));
    return 0;
}

int run_evaluate(const decum::run_config& cfg, const std::string& veh,
                 const std::string& out_path, int threads) {
    const decum::lambda_samples lams = cfg.draw_lambdas();
    const decum::cell_surfaces s =
        decum::evaluate_surfaces(decum::vehicle_from_name(veh), cfg.model, cfg.grids(),
                                 cfg.nu, lams, threads);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output: " + out_path);
    decum::write_grid_csv(out, s);
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
    return 0;
}

int run_optimize(const decum::run_config& cfg, double b, double psi, double nu,
                 int threads) {
    decum::run_config local = cfg;
    local.nu = nu;
    const decum::lambda_samples lams = local.draw_lambdas();
    const auto surfaces = all_surfaces(local, lams, threads);
    decum::risk_appetite ra;
    ra.b = b;
    ra.psi = psi;
    ra.nu = nu;
    const decum::optimum opt = decum::global_optimum(surfaces, ra);
    std::printf("feasible=%d\n", opt.feasible ? 1 : 0);
    if (!opt.feasible) return 0;
    std::printf("vehicle=%s\n", decum::map_label(opt).c_str());
    print_kv("w", opt.w);
    print_kv("phi", opt.phi);
    print_kv("q_star", opt.q_star);
    print_kv("mean", opt.mean);
    print_kv("second_moment", opt.second_moment);
    print_kv("shortfall_prob", opt.shortfall_prob);

    decum::strategy s;
    s.veh = opt.veh;
    s.w = opt.w;
    s.phi = opt.phi;
    const decum::pricing_result pr = decum::price_strategy(
        s, local.model.market, local.model.mortality.lambda, local.model.loading, lams);
    const decum::allocation_breakdown alloc = decum::wealth_allocation(opt, pr);
    print_kv("pool_premium", alloc.pool_premium);
    print_kv("market", alloc.market);
    print_kv("risk_free", alloc.risk_free);
    std::printf("allocation_flagged=%d\n", alloc.flagged ? 1 : 0);
    return 0;
}

int run_sweep(const decum::run_config& cfg, const std::string& out_path,
              const std::string& png_path, int threads) {
    const decum::lambda_samples lams = cfg.draw_lambdas();
    const auto surfaces = all_surfaces(cfg, lams, threads);
    const decum::decision_map map =
        decum::sweep_appetites(surfaces, cfg.b_grid(), cfg.psi_grid(), cfg.nu, threads);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output: " + out_path);
    decum::write_map_csv(out, map);
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
    if (!png_path.empty()) {
        decum::render_decision_map(png_path, map);
        std::fprintf(stderr, "wrote %s\n", png_path.c_str());
    }
    return 0;
}

int run_oracle(const decum::run_config& cfg, long paths, const std::string& out_path,
               double gate, int threads) {
    const decum::lambda_samples lams = cfg.draw_lambdas();
    decum::sim_config sim;
    sim.paths = paths;
    sim.seed = cfg.seed;
    sim.threads = threads;
    const auto rows = decum::run_oracle_suite(cfg.model, cfg.c, cfg.nu, lams, sim);
    if (out_path.empty()) {
        decum::write_oracle_csv(std::cout, rows);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output: " + out_path);
        decum::write_oracle_csv(out, rows);
        std::fprintf(stderr, "wrote %s\n", out_path.c_str());
    }
    for (const auto& r : rows) {
        if (std::fabs(r.z_score) > gate) {
            std::fprintf(stderr, "oracle gate exceeded: %s z=%.2f\n", r.quantity.c_str(),
                         r.z_score);
            return kExitOracleGate;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decum: optimal retirement decumulation strategies"};
    app.require_subcommand(1);

    std::string config_path;
    int threads_flag = -1;

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "fit hazards from life/care tables");
    std::string life_path, care_path, factors = "125y";
    double lambda_floor = 0.010;
    cal->add_option("--life-table", life_path, "life table CSV")->required();
    cal->add_option("--factors", factors, "improvement factor set label")
        ->check(CLI::IsMember({"125y", "25y"}));
    cal->add_option("--care-table", care_path, "care incidence CSV")->required();
    cal->add_option("--lambda-floor", lambda_floor, "minimum death hazard");

    // price
    auto* price = app.add_subcommand("price", "price one strategy");
    std::string veh = "GSA";
    double w = 0, phi = 0, beta = 0;
    price->add_option("--config", config_path, "run config JSON")->required();
    price->add_option("--vehicle", veh, "GSA|ULA|LIA|IIA")->required();
    price->add_option("--w", w, "market weight")->required();
    price->add_option("--phi", phi, "payment rate")->required();
    price->add_option("--beta", beta, "death benefit ratio");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "write the per-cell output grids");
    std::string out_path = "grid.csv";
    eval->add_option("--config", config_path, "run config JSON")->required();
    eval->add_option("--vehicle", veh, "GSA|ULA|LIA|IIA")->required();
    eval->add_option("--out", out_path, "output CSV")->required();
    eval->add_option("--threads", threads_flag, "worker threads (0 = all cores)");

    // optimize
    auto* opt = app.add_subcommand("optimize", "best strategy for one appetite point");
    double b = 1.0, psi = 0.2, nu = 0.0;
    opt->add_option("--config", config_path, "run config JSON")->required();
    opt->add_option("--b", b, "investment risk aversion")->required();
    opt->add_option("--psi", psi, "liquidity risk tolerance")->required();
    opt->add_option("--nu", nu, "shortfall threshold")->required();
    opt->add_option("--threads", threads_flag, "worker threads (0 = all cores)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "decision map over the appetite grid");
    std::string map_path = "map.csv", png_path;
    sweep->add_option("--config", config_path, "run config JSON")->required();
    sweep->add_option("--out", map_path, "output CSV")->required();
    sweep->add_option("--png", png_path, "optional heatmap PNG");
    sweep->add_option("--threads", threads_flag, "worker threads (0 = all cores)");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Monte Carlo validation report");
    long paths = 10000;
    double gate = 4.0;
    std::string oracle_out;
    oracle->add_option("--config", config_path, "run config JSON")->required();
    oracle->add_option("--paths", paths, "Monte Carlo paths");
    oracle->add_option("--out", oracle_out, "output CSV (default stdout)");
    oracle->add_option("--gate", gate, "max |z| before exit 3");
    oracle->add_option("--threads", threads_flag, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cal->parsed()) return run_calibrate(life_path, factors, care_path, lambda_floor);

        decum::run_config cfg = decum::parse_config(config_path);
        const int threads = threads_flag >= 0 ? threads_flag : cfg.threads;
        if (price->parsed()) return run_price(cfg, veh, w, phi, beta);
        if (eval->parsed()) return run_evaluate(cfg, veh, out_path, threads);
        if (opt->parsed()) return run_optimize(cfg, b, psi, nu, threads);
        if (sweep->parsed()) return run_sweep(cfg, map_path, png_path, threads);
        if (oracle->parsed()) return run_oracle(cfg, paths, oracle_out, gate, threads);
    } catch (const decum::csv_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadCsv;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

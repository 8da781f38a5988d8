#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "decum/optimizer.hpp"

namespace decum {

// Full run description: calibrated model, plan, grids, and reproducibility
// knobs. Loading validates every module precondition and rejects unknown keys.
struct run_config {
    model_params model;

    // plan
    double c = 0.052;
    double nu = 0.0;
    double w0_wealth = 595000.0;

    // strategy grid
    int w_points = 200;
    double w_max = 0.0; // 0 = min(w0, w1)
    int phi_points = 200;

    // appetite grid
    int b_points = 20;
    double b_min = 0.5;
    double b_max = 20.0;
    int psi_points = 20;
    double psi_min = 0.05;
    double psi_max = 0.5;

    std::uint64_t seed = 12345;
    int lambda_count = 200;
    int threads = 0;

    grid_spec grids() const {
        grid_spec g;
        g.w_points = w_points;
        g.w_max = w_max;
        g.phi_points = phi_points;
        g.c = c;
        return g;
    }

    std::vector<double> b_grid() const { return linspace(b_min, b_max, b_points); }
    std::vector<double> psi_grid() const { return linspace(psi_min, psi_max, psi_points); }

    lambda_samples draw_lambdas() const {
        return sample_lambdas(model.mortality, lambda_count, seed);
    }

    void validate() const {
        model.market.validate();
        model.mortality.validate();
        model.loading.validate();
        require(c > 0.0 && c < 1.0, "consumption rate must lie in (0,1)");
        require(nu >= 0.0 && nu < 1.0, "shortfall threshold must lie in [0,1)");
        require(w0_wealth > 0.0, "initial wealth must be positive");
        require(w_points >= 1 && phi_points >= 1, "strategy grid needs >= 1 point per axis");
        require(b_points >= 1 && psi_points >= 1, "appetite grid needs >= 1 point per axis");
        require(b_min >= 0.0 && b_max >= b_min, "bad risk-aversion range");
        require(psi_min >= 0.0 && psi_max <= 1.0 && psi_max >= psi_min,
                "bad risk-tolerance range");
        require(lambda_count >= 1, "need at least one population sample");
        require(threads >= 0, "threads must be non-negative");
        grids().validate(model.market, model.mortality.lambda);
    }
};

namespace detail {

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const char* where) {
    if (!j.is_object()) throw config_error(std::string(where) + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw config_error("unknown key \"" + it.key() + "\" in " + where);
    }
}

inline double num(const nlohmann::json& j, const char* key, double fallback,
                  bool* present = nullptr) {
    if (!j.contains(key)) {
        if (present) *present = false;
        return fallback;
    }
    if (present) *present = true;
    if (!j[key].is_number()) throw config_error(std::string("key \"") + key + "\" must be numeric");
    return j[key].get<double>();
}

} // namespace detail

inline run_config parse_config_json(const nlohmann::json& j) {
    using detail::check_keys;
    using detail::num;
    run_config cfg;
    check_keys(j, {"model", "plan", "grids", "seed", "lambda_samples", "threads"}, "config");

    if (j.contains("model")) {
        const auto& m = j["model"];
        check_keys(m, {"market", "mortality", "loading"}, "model");
        if (m.contains("market")) {
            const auto& mk = m["market"];
            check_keys(mk, {"r", "pi", "sigma_pi", "mu_M", "sigma_M"}, "model.market");
            cfg.model.market.r = num(mk, "r", cfg.model.market.r);
            cfg.model.market.pi = num(mk, "pi", cfg.model.market.pi);
            cfg.model.market.sigma_pi = num(mk, "sigma_pi", cfg.model.market.sigma_pi);
            cfg.model.market.mu_m = num(mk, "mu_M", cfg.model.market.mu_m);
            cfg.model.market.sigma_m = num(mk, "sigma_M", cfg.model.market.sigma_m);
        }
        if (m.contains("mortality")) {
            const auto& mo = m["mortality"];
            check_keys(mo, {"lambda", "lambda_eln", "lambda_floor", "sigma_hat"},
                       "model.mortality");
            cfg.model.mortality.lambda = num(mo, "lambda", cfg.model.mortality.lambda);
            cfg.model.mortality.lambda_eln = num(mo, "lambda_eln", cfg.model.mortality.lambda_eln);
            cfg.model.mortality.lambda_floor =
                num(mo, "lambda_floor", cfg.model.mortality.lambda_floor);
            cfg.model.mortality.sigma_hat = num(mo, "sigma_hat", cfg.model.mortality.sigma_hat);
        }
        if (m.contains("loading")) {
            const auto& lo = m["loading"];
            check_keys(lo, {"sharpe", "pool_size", "variance_basis"}, "model.loading");
            cfg.model.loading.sharpe = num(lo, "sharpe", cfg.model.loading.sharpe);
            cfg.model.loading.pool_size =
                static_cast<int>(num(lo, "pool_size", cfg.model.loading.pool_size));
            if (lo.contains("variance_basis")) {
                const std::string b = lo["variance_basis"].get<std::string>();
                if (b == "individual_cost") {
                    cfg.model.loading.basis = variance_basis::individual_cost;
                } else if (b == "average_cost") {
                    cfg.model.loading.basis = variance_basis::average_cost;
                } else {
                    throw config_error("variance_basis must be individual_cost or average_cost");
                }
            }
        }
    }
    if (j.contains("plan")) {
        const auto& p = j["plan"];
        check_keys(p, {"c", "nu", "W0"}, "plan");
        cfg.c = num(p, "c", cfg.c);
        cfg.nu = num(p, "nu", cfg.nu);
        cfg.w0_wealth = num(p, "W0", cfg.w0_wealth);
    }
    if (j.contains("grids")) {
        const auto& g = j["grids"];
        check_keys(g,
                   {"w_points", "w_max", "phi_points", "b_points", "b_min", "b_max",
                    "psi_points", "psi_min", "psi_max"},
                   "grids");
        cfg.w_points = static_cast<int>(num(g, "w_points", cfg.w_points));
        cfg.w_max = num(g, "w_max", cfg.w_max);
        cfg.phi_points = static_cast<int>(num(g, "phi_points", cfg.phi_points));
        cfg.b_points = static_cast<int>(num(g, "b_points", cfg.b_points));
        cfg.b_min = num(g, "b_min", cfg.b_min);
        cfg.b_max = num(g, "b_max", cfg.b_max);
        cfg.psi_points = static_cast<int>(num(g, "psi_points", cfg.psi_points));
        cfg.psi_min = num(g, "psi_min", cfg.psi_min);
        cfg.psi_max = num(g, "psi_max", cfg.psi_max);
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("lambda_samples"))
        cfg.lambda_count = static_cast<int>(num(j, "lambda_samples", cfg.lambda_count));
    if (j.contains("threads")) cfg.threads = static_cast<int>(num(j, "threads", cfg.threads));

    cfg.validate();
    return cfg;
}

inline run_config parse_config_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config_json(j);
}

inline run_config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_string(buf.str());
}

inline std::string serialize_config(const run_config& cfg) {
    nlohmann::json j;
    j["model"]["market"] = {{"r", cfg.model.market.r},
                            {"pi", cfg.model.market.pi},
                            {"sigma_pi", cfg.model.market.sigma_pi},
                            {"mu_M", cfg.model.market.mu_m},
                            {"sigma_M", cfg.model.market.sigma_m}};
    j["model"]["mortality"] = {{"lambda", cfg.model.mortality.lambda},
                               {"lambda_eln", cfg.model.mortality.lambda_eln},
                               {"lambda_floor", cfg.model.mortality.lambda_floor},
                               {"sigma_hat", cfg.model.mortality.sigma_hat}};
    j["model"]["loading"] = {
        {"sharpe", cfg.model.loading.sharpe},
        {"pool_size", cfg.model.loading.pool_size},
        {"variance_basis", cfg.model.loading.basis == variance_basis::individual_cost
                               ? "individual_cost"
                               : "average_cost"}};
    j["plan"] = {{"c", cfg.c}, {"nu", cfg.nu}, {"W0", cfg.w0_wealth}};
    j["grids"] = {{"w_points", cfg.w_points},   {"w_max", cfg.w_max},
                  {"phi_points", cfg.phi_points}, {"b_points", cfg.b_points},
                  {"b_min", cfg.b_min},         {"b_max", cfg.b_max},
                  {"psi_points", cfg.psi_points}, {"psi_min", cfg.psi_min},
                  {"psi_max", cfg.psi_max}};
    j["seed"] = cfg.seed;
    j["lambda_samples"] = cfg.lambda_count;
    j["threads"] = cfg.threads;
    return j.dump(2) + "\n";
}

} // namespace decum

// Acceptance suite: runs every gate at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit code 0 only if every criterion holds.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "decum/config.hpp"
#include "decum/io.hpp"
#include "decum/oracle.hpp"

using namespace decum;

namespace {

struct reporter {
    bool all_ok = true;

    void line(int id, const char* name, bool ok, const std::string& detail, double secs) {
        std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", ok ? "PASS" : "FAIL", id, name,
                    detail.c_str(), secs);
        std::fflush(stdout);
        all_ok = all_ok && ok;
    }
};

struct timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

model_params baseline() {
    return model_params{};
}

// ---------------------------------------------------------------- criterion 1
void criterion_weight_bounds(reporter& rep) {
    timer t;
    const weight_bounds_result wb = weight_bounds(baseline().market, 0.051);
    const bool ok = wb.bounded && std::fabs(wb.w0 - 1.25) <= 0.01 &&
                    std::fabs(wb.w1 - 2.30) <= 0.01 && t.secs() < 1.0;
    rep.line(1, "weight bounds", ok, fmt("w0=%.4f, w1=%.4f", wb.w0, wb.w1), t.secs());
}

// ---------------------------------------------------------------- criterion 2
void criterion_loading(reporter& rep) {
    timer t;
    const model_params mp = baseline();
    const lambda_samples lams = sample_lambdas(mp.mortality, 200, 12345);
    const portfolio_law law0 = make_portfolio_law(mp.market, 0.0);
    const double lambda = mp.mortality.lambda;

    loading_policy ind = mp.loading;
    ind.basis = variance_basis::individual_cost;
    const double theta_ind = loading(vehicle::iia, ind, lams, lambda, mp.market, law0);

    loading_policy avg = mp.loading;
    avg.basis = variance_basis::average_cost;
    const double theta_avg = loading(vehicle::iia, avg, lams, lambda, mp.market, law0);

    // Monte Carlo cross-check of the variance behind the 18.3% figure
    rng g(424242);
    std::vector<double> cost(1000000);
    for (double& x : cost) x = annuity_certain(mp.market.r, g.exponential(lambda));
    const sample_stats st = compute_stats(cost);
    strategy unit;
    unit.veh = vehicle::iia;
    unit.phi = 1.0;
    const double var_closed = individual_cost_variance(unit, lambda, mp.market, law0);
    const bool mc_ok = std::fabs(st.variance - var_closed) <= 4.0 * st.se_variance;

    const bool ok = std::fabs(theta_ind - 0.183) <= 0.005 && mc_ok && theta_avg > 0.003 &&
                    theta_avg < 0.02 && t.secs() < 30.0;
    rep.line(2, "IIA loading", ok,
             fmt("theta_individual=%.4f (target 0.183+-0.005), theta_average=%.4f "
                 "(documented ~0.01), mc z=%.2f",
                 theta_ind, theta_avg, (st.variance - var_closed) / st.se_variance),
             t.secs());
}

// ---------------------------------------------------------------- criterion 3
void criterion_calibration_chain(reporter& rep) {
    timer t;
    const double lam = fit_lambda(19.42);
    const bool lam_ok = std::fabs(lam - 0.0515) <= 5e-5;

    const consumption_result modest = consumption_rate({31867.0, 29561.0, 595000.0});
    const consumption_result comfy = consumption_rate({50207.0, 46788.0, 595000.0});
    const bool are_ok = std::round(modest.are_star) == 31098.0 &&
                        std::round(comfy.are_star) == 49067.0 &&
                        std::round(modest.c * 1000.0) == 52.0 &&
                        std::round(comfy.c * 1000.0) == 82.0;

    mortality_params m;
    const lambda_samples big = sample_lambdas(m, 1000000, 2024);
    std::vector<double> inv(big.values.size());
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / big.values[i];
    const double var_mc = compute_stats(inv).variance;
    const bool var_ok = std::fabs(var_mc - 1.0) <= 0.05;

    const bool ok = lam_ok && are_ok && var_ok && t.secs() < 10.0;
    rep.line(3, "calibration chain", ok,
             fmt("1/19.42=%.4f, ARE*=%.0f/%.0f, c=%.1f%%/%.1f%%, Var(1/Lambda)=%.3f", lam,
                 modest.are_star, comfy.are_star, 100.0 * modest.c, 100.0 * comfy.c, var_mc),
             t.secs());
}

// ---------------------------------------------------------------- criterion 4
void criterion_oracle(reporter& rep, bool nightly) {
    timer t;
    const model_params mp = baseline();
    const lambda_samples lams = sample_lambdas(mp.mortality, 200, 12345);
    sim_config cfg;
    cfg.paths = nightly ? 100000 : 10000;
    cfg.seed = 20240601;
    // weekly steps (biweekly at the nightly path count): discretisation bias
    // stays orders below the Monte Carlo standard error either way
    cfg.dt = nightly ? 1.0 / 26.0 : 1.0 / 52.0;
    const double gate = nightly ? 3.0 : 4.0;
    const auto rows = run_oracle_suite(mp, 0.052, 0.2, lams, cfg, 10);
    double worst = 0.0;
    std::string worst_name = "-";
    for (const auto& r : rows) {
        if (std::fabs(r.z_score) > std::fabs(worst)) {
            worst = r.z_score;
            worst_name = r.quantity;
        }
    }
    const bool ok = std::fabs(worst) <= gate;
    rep.line(4, nightly ? "closed form vs oracle (nightly)" : "closed form vs oracle (CI)",
             ok,
             fmt("%zu pairings at %ld paths, worst |z|=%.2f (%s), gate %.0f", rows.size(),
                 cfg.paths, std::fabs(worst), worst_name.c_str(), gate),
             t.secs());
}

// ---------------------------------------------------------------- criterion 5
void criterion_identities(reporter& rep) {
    timer t;
    const model_params mp = baseline();
    const lambda_samples lams = sample_lambdas(mp.mortality, 200, 12345);
    const double lambda = mp.mortality.lambda;
    const double c = 0.052;
    bool ok = true;
    std::string why = "all identities hold";

    // GSA bequest moments equal pure drawdown at equal weight, 1e-12
    for (double w : linspace(0.0, 1.2, 13)) {
        strategy dd;
        dd.veh = vehicle::gsa;
        dd.w = w;
        const investment_outcome base =
            xi_moments(dd, mp.market, lambda, c, price_strategy(dd, mp.market, lambda, mp.loading, lams));
        for (double phi : {0.013, 0.039, 0.052}) {
            strategy s = dd;
            s.phi = phi;
            const investment_outcome got =
                xi_moments(s, mp.market, lambda, c, price_strategy(s, mp.market, lambda, mp.loading, lams));
            if (std::fabs(got.mean - base.mean) > 1e-12 ||
                std::fabs(got.second_moment - base.second_moment) > 1e-12) {
                ok = false;
                why = fmt("GSA/drawdown moments differ at w=%.2f phi=%.3f", w, phi);
            }
        }
    }

    // all vehicles identical at phi = 0 (bit-exact)
    for (double w : {0.0, 0.4, 1.0}) {
        strategy s;
        s.w = w;
        s.phi = 0.0;
        s.veh = vehicle::gsa;
        const pricing_result p0 = price_strategy(s, mp.market, lambda, mp.loading, lams);
        const investment_outcome ref = xi_moments(s, mp.market, lambda, c, p0);
        const double pref =
            shortfall_probability(s, mp.market, mp.mortality, c, p0, lams, 0.1).probability;
        for (vehicle v : {vehicle::ula, vehicle::lia, vehicle::iia}) {
            s.veh = v;
            const pricing_result pv = price_strategy(s, mp.market, lambda, mp.loading, lams);
            const investment_outcome got = xi_moments(s, mp.market, lambda, c, pv);
            const double pgot =
                shortfall_probability(s, mp.market, mp.mortality, c, pv, lams, 0.1).probability;
            if (got.mean != ref.mean || got.second_moment != ref.second_moment ||
                pgot != pref) {
                ok = false;
                why = fmt("phi=0 differs for %s at w=%.1f", vehicle_name(v), w);
            }
        }
    }

    // exact variance reduction under natural hedging, both bases
    const portfolio_law law4 = make_portfolio_law(mp.market, 0.4);
    for (vehicle v : {vehicle::iia, vehicle::ula}) {
        strategy base;
        base.veh = v;
        base.w = 0.4;
        base.phi = 0.05;
        strategy hedged = base;
        hedged.beta = 6.0;
        const double h = 1.0 - hedged.beta * hedge_discount_rate(v, mp.market, law4);
        const double s2 = h * h;
        if (individual_cost_variance(hedged, lambda, mp.market, law4) !=
            s2 * individual_cost_variance(base, lambda, mp.market, law4)) {
            ok = false;
            why = "hedged individual-cost variance not exactly scaled";
        }
        if (avg_cost_variance(hedged, mp.loading, lams, mp.market, law4) !=
            s2 * avg_cost_variance(base, mp.loading, lams, mp.market, law4)) {
            ok = false;
            why = "hedged average-cost variance not exactly scaled";
        }
    }

    // perpetuity mean equals annuity EPV across 100 weights, 1e-12 relative
    const weight_bounds_result wb = weight_bounds(mp.market, lambda);
    for (double w : linspace(0.0, wb.cap() * 0.9999, 100)) {
        const portfolio_law law = make_portfolio_law(mp.market, w);
        const double m1 = perpetuity_moment(make_perpetuity_law(law, lambda), 1);
        const double a = annuity_epv(law, lambda);
        if (std::fabs(m1 - a) > 1e-12 * a) {
            ok = false;
            why = fmt("perpetuity mean drifts from EPV at w=%.3f", w);
        }
    }

    ok = ok && t.secs() < 10.0;
    rep.line(5, "structural identities", ok, why, t.secs());
}

// ---------------------------------------------------------------- criterion 6
void criterion_shortfall_shape(reporter& rep) {
    timer t;
    const model_params mp = baseline();
    const lambda_samples lams = sample_lambdas(mp.mortality, 200, 12345);
    const double nu = 0.2;

    grid_spec g;
    g.w_points = 50;
    g.phi_points = 50;
    g.w_max = 1.25;

    // at the 4% target some annuitised cell beats drawdown at the same weight
    g.c = 0.04;
    const cell_surfaces lean = evaluate_surfaces(vehicle::gsa, mp, g, nu, lams);
    bool beats_drawdown = false;
    double best_gap = 0.0, best_w = 0.0, best_phi = 0.0;
    for (std::size_t i = 0; i < lean.ws.size(); ++i) {
        const double p_dd = lean.shortfall_prob[lean.idx(i, 0)];
        for (std::size_t j = 1; j < lean.phis.size(); ++j) {
            const double p = lean.shortfall_prob[lean.idx(i, j)];
            if (p < p_dd) {
                beats_drawdown = true;
                if (p_dd - p > best_gap) {
                    best_gap = p_dd - p;
                    best_w = lean.ws[i];
                    best_phi = lean.phis[j];
                }
            }
        }
    }

    // at the 8.2% target the probability only rises with the payment rate
    g.c = 0.082;
    const cell_surfaces rich = evaluate_surfaces(vehicle::gsa, mp, g, nu, lams);
    bool monotone = true;
    for (std::size_t i = 0; i < rich.ws.size() && monotone; ++i) {
        double prev = -1.0;
        for (std::size_t j = 0; j < rich.phis.size(); ++j) {
            const double p = rich.shortfall_prob[rich.idx(i, j)];
            if (p < prev - 1e-12) monotone = false;
            prev = p;
        }
    }

    const bool ok = beats_drawdown && monotone && t.secs() < 120.0;
    rep.line(6, "GSA shortfall shape", ok,
             fmt("c=4%%: GSA below drawdown by %.3f at (w=%.2f, phi=%.3f); c=8.2%%: "
                 "monotone in phi %s",
                 best_gap, best_w, best_phi, monotone ? "yes" : "NO"),
             t.secs());
}

// ------------------------------------------------------------- criteria 7 & 8
struct sweep_product {
    std::string csv;
    decision_map map;
};

sweep_product run_sweep(const model_params& mp, int threads) {
    const lambda_samples lams = sample_lambdas(mp.mortality, 200, 12345);
    grid_spec g;
    g.w_points = 200;
    g.phi_points = 200;
    g.w_max = 1.25;
    g.c = 0.04;
    std::array<cell_surfaces, 4> surf;
    for (std::size_t i = 0; i < 4; ++i)
        surf[i] = evaluate_surfaces(all_vehicles[i], mp, g, 0.2, lams, threads);
    sweep_product out;
    out.map = sweep_appetites(surf, linspace(0.5, 20.0, 20), linspace(0.05, 0.5, 20), 0.2,
                              threads);
    std::ostringstream s;
    write_map_csv(s, out.map);
    out.csv = s.str();
    return out;
}

void criteria_decision_map(reporter& rep) {
    timer t;
    const model_params mp = baseline();
    const sweep_product run8 = run_sweep(mp, 8);
    const decision_map& m = run8.map;

    // (a) pure-drawdown/GSA-equivalent region at low b
    std::size_t low_dd = 0;
    for (std::size_t ip = 0; ip < m.psis.size(); ++ip) {
        const std::string label = map_label(m.cells[m.idx(0, ip)]);
        if (label == "drawdown" || label == "GSA") ++low_dd;
    }
    const bool low_ok = low_dd * 2 >= m.psis.size();

    // (b) at least two distinct guaranteed vehicles in the top quartile of b
    bool saw[4] = {false, false, false, false};
    for (std::size_t ib = (m.bs.size() * 3) / 4; ib < m.bs.size(); ++ib) {
        for (std::size_t ip = 0; ip < m.psis.size(); ++ip) {
            const optimum& o = m.cells[m.idx(ib, ip)];
            if (o.feasible && o.phi > 0.0) saw[vehicle_rank(o.veh)] = true;
        }
    }
    const int guaranteed = (saw[vehicle_rank(vehicle::ula)] ? 1 : 0) +
                           (saw[vehicle_rank(vehicle::lia)] ? 1 : 0) +
                           (saw[vehicle_rank(vehicle::iia)] ? 1 : 0);
    const bool high_ok = guaranteed >= 2;

    // (c) infeasible (whitespace) region at the tightest psi
    std::size_t infeasible = 0;
    for (std::size_t ib = 0; ib < m.bs.size(); ++ib)
        if (!m.cells[m.idx(ib, 0)].feasible) ++infeasible;
    const bool white_ok = infeasible > 0;

    const bool ok = low_ok && high_ok && white_ok && t.secs() < 900.0;
    rep.line(7, "decision map regions", ok,
             fmt("low-b drawdown/GSA %zu/%zu, guaranteed vehicles at high b = %d, "
                 "whitespace cells at psi=0.05: %zu%s",
                 low_dd, m.psis.size(), guaranteed, infeasible,
                 white_ok ? "" : " [none: high-weight drawdown sustains a 4% draw in "
                                 "the planned-return view, so its shortfall probability "
                                 "is exactly 0 and every appetite point stays feasible]"),
             t.secs());

    // criterion 8: byte-identical sweeps across runs and thread counts
    timer t8;
    const sweep_product run1 = run_sweep(mp, 1);
    const sweep_product rerun8 = run_sweep(mp, 8);
    const bool det_ok = run8.csv == run1.csv && run8.csv == rerun8.csv;
    rep.line(8, "sweep determinism", det_ok,
             fmt("threads{8,1,8} byte-identical: %s, %zu bytes",
                 det_ok ? "yes" : "NO", run8.csv.size()),
             t8.secs());
}

} // namespace

int main(int argc, char** argv) {
    bool nightly = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--nightly") == 0) nightly = true;

    reporter rep;
    criterion_weight_bounds(rep);
    criterion_loading(rep);
    criterion_calibration_chain(rep);
    criterion_oracle(rep, nightly);
    criterion_identities(rep);
    criterion_shortfall_shape(rep);
    criteria_decision_map(rep);

    std::printf("%s\n", rep.all_ok ? "acceptance: ALL PASS" : "acceptance: FAILURES PRESENT");
    return rep.all_ok ? 0 : 1;
}

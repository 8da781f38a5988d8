#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "decum/outcomes.hpp"
#include "decum/parallel.hpp"

namespace decum {

struct risk_appetite {
    double b = 1.0;   // investment risk aversion
    double psi = 0.2; // liquidity risk tolerance
    double nu = 0.0;  // shortfall threshold, fraction of W0

    void validate() const {
        require(b >= 0.0, "risk aversion must be non-negative");
        require(psi >= 0.0 && psi <= 1.0, "risk tolerance must lie in [0,1]");
        require(nu >= 0.0 && nu < 1.0, "shortfall threshold must lie in [0,1)");
    }
};

// Strategy grid: w in [0, w_max] and phi in [0, c], endpoints included.
struct grid_spec {
    int w_points = 200;
    double w_max = 0;  // 0 = use min(w0, w1)
    int phi_points = 200;
    double c = 0.052;  // consumption rate; also the phi ceiling

    void validate(const market_params& mkt, double lambda) const {
        require(w_points >= 1 && phi_points >= 1, "grid needs at least one point per axis");
        require(c > 0.0, "consumption rate must be positive");
        const weight_bounds_result wb = weight_bounds(mkt, lambda);
        if (wb.bounded) {
            require(w_max <= wb.cap() + 1e-12, "w_max exceeds the admissible weight cap");
        }
        require(w_max >= 0.0, "w_max must be non-negative");
    }

    double resolved_w_max(const market_params& mkt, double lambda) const {
        if (w_max > 0.0) return w_max;
        const weight_bounds_result wb = weight_bounds(mkt, lambda);
        require(wb.bounded, "weight bounds are unbounded; set w_max explicitly");
        return wb.cap();
    }
};

// All calibrated model inputs in one record.
struct model_params {
    market_params market;
    mortality_params mortality;
    loading_policy loading;
};

// Per-cell mean, second moment and shortfall probability for one vehicle,
// stored w-major. Cells the closed forms cannot price (alpha <= 2) are masked.
struct cell_surfaces {
    vehicle veh = vehicle::gsa;
    std::vector<double> ws;
    std::vector<double> phis;
    std::vector<double> mean;
    std::vector<double> second_moment;
    std::vector<double> shortfall_prob;
    std::vector<unsigned char> admissible;

    std::size_t idx(std::size_t iw, std::size_t iphi) const {
        return iw * phis.size() + iphi;
    }
};

// Step 1 of the search: three grids of outputs from one grid of inputs.
// theta is phi-independent, so pricing shares one loading per w column.
inline cell_surfaces evaluate_surfaces(vehicle v, const model_params& mp,
                                       const grid_spec& grid, double nu,
                                       const lambda_samples& lams, int threads = 0) {
    mp.market.validate();
    mp.mortality.validate();
    const double w_hi = grid.resolved_w_max(mp.market, mp.mortality.lambda);
    grid_spec g = grid;
    g.w_max = w_hi;
    g.validate(mp.market, mp.mortality.lambda);

    cell_surfaces s;
    s.veh = v;
    s.ws = linspace(0.0, w_hi, g.w_points);
    s.phis = linspace(0.0, g.c, g.phi_points);
    const std::size_t n = s.ws.size() * s.phis.size();
    s.mean.assign(n, 0.0);
    s.second_moment.assign(n, 0.0);
    s.shortfall_prob.assign(n, 1.0);
    s.admissible.assign(n, 0);

    const double lambda = mp.mortality.lambda;
    parallel_for(g.w_points, threads, [&](int iw) {
        const double w = s.ws[static_cast<std::size_t>(iw)];
        const portfolio_law law = make_portfolio_law(mp.market, w);
        double theta = 0.0;
        bool column_ok = true;
        try {
            theta = loading(v, mp.loading, lams, lambda, mp.market, law);
        } catch (const std::domain_error&) {
            column_ok = false;
        } catch (const input_error&) {
            column_ok = false;
        }
        for (std::size_t j = 0; j < s.phis.size(); ++j) {
            const std::size_t k = s.idx(static_cast<std::size_t>(iw), j);
            if (!column_ok) continue;
            strategy st;
            st.veh = v;
            st.w = w;
            st.phi = s.phis[j];
            try {
                pricing_result pr;
                pr.p0 = fair_price(st, lambda, mp.market, law);
                pr.theta = theta;
                pr.p_theta = (1.0 + theta) * pr.p0;
                const investment_outcome xo = xi_moments(st, mp.market, lambda, g.c, pr);
                const shortfall_result sr =
                    shortfall_probability(st, mp.market, mp.mortality, g.c, pr, lams, nu);
                s.mean[k] = xo.mean;
                s.second_moment[k] = xo.second_moment;
                s.shortfall_prob[k] = sr.probability;
                s.admissible[k] = 1;
            } catch (const std::domain_error&) {
                // masked cell: closed forms unavailable here
            } catch (const input_error&) {
                // masked cell
            }
        }
    });
    return s;
}

struct optimum {
    vehicle veh = vehicle::gsa;
    double w = 0;
    double phi = 0;
    double q_star = -kInf;
    bool feasible = false;
    double shortfall_prob = 1.0;
    double mean = 0;
    double second_moment = 0;
};

// Q = E[X] - b E[X^2] maximised over feasible cells. Scanning phi-major with
// strict improvement makes ties resolve to lower phi, then lower w.
inline optimum find_optimum(const cell_surfaces& s, const risk_appetite& ra) {
    ra.validate();
    optimum best;
    best.veh = s.veh;
    for (std::size_t j = 0; j < s.phis.size(); ++j) {
        for (std::size_t i = 0; i < s.ws.size(); ++i) {
            const std::size_t k = s.idx(i, j);
            if (!s.admissible[k] || s.shortfall_prob[k] > ra.psi) continue;
            const double q = s.mean[k] - ra.b * s.second_moment[k];
            if (!best.feasible || q > best.q_star) {
                best.feasible = true;
                best.q_star = q;
                best.w = s.ws[i];
                best.phi = s.phis[j];
                best.shortfall_prob = s.shortfall_prob[k];
                best.mean = s.mean[k];
                best.second_moment = s.second_moment[k];
            }
        }
    }
    return best;
}

// Global tie order across vehicles: higher Q, then lower phi, lower w, and
// finally the fixed vehicle order GSA < ULA < LIA < IIA.
inline bool beats(const optimum& a, const optimum& b) {
    if (!a.feasible || !b.feasible) return a.feasible;
    if (a.q_star != b.q_star) return a.q_star > b.q_star;
    if (a.phi != b.phi) return a.phi < b.phi;
    if (a.w != b.w) return a.w < b.w;
    return vehicle_rank(a.veh) < vehicle_rank(b.veh);
}

inline optimum global_optimum(const std::array<cell_surfaces, 4>& surfaces,
                              const risk_appetite& ra) {
    optimum best;
    for (const cell_surfaces& s : surfaces) {
        const optimum o = find_optimum(s, ra);
        if (o.feasible && (!best.feasible || beats(o, best))) best = o;
    }
    return best;
}

// One decision per appetite point; infeasible points stay whitespace.
struct decision_map {
    std::vector<double> bs;
    std::vector<double> psis;
    double nu = 0;
    std::vector<optimum> cells; // b-major

    std::size_t idx(std::size_t ib, std::size_t ipsi) const {
        return ib * psis.size() + ipsi;
    }
};

inline decision_map sweep_appetites(const std::array<cell_surfaces, 4>& surfaces,
                                    const std::vector<double>& bs,
                                    const std::vector<double>& psis, double nu,
                                    int threads = 0) {
    decision_map m;
    m.bs = bs;
    m.psis = psis;
    m.nu = nu;
    m.cells.assign(bs.size() * psis.size(), optimum{});
    const int n = static_cast<int>(m.cells.size());
    parallel_for(n, threads, [&](int k) {
        risk_appetite ra;
        ra.b = bs[static_cast<std::size_t>(k) / psis.size()];
        ra.psi = psis[static_cast<std::size_t>(k) % psis.size()];
        ra.nu = nu;
        m.cells[static_cast<std::size_t>(k)] = global_optimum(surfaces, ra);
    });
    return m;
}

// Initial wealth split implied by an optimum: the pool takes the full outlay;
// the market leg is w(1 - outlay) for the risk-free-backed vehicles and w
// otherwise; the risk-free asset absorbs the remainder.
struct allocation_breakdown {
    double pool_premium = 0;
    double market = 0;
    double risk_free = 0;
    bool flagged = false; // a component left the unit budget (short risk-free)
};

inline allocation_breakdown wealth_allocation(const optimum& o, const pricing_result& pr) {
    require(o.feasible, "wealth allocation requires a feasible optimum");
    allocation_breakdown a;
    a.pool_premium = pr.total_outlay();
    a.market = provider_risk_free(o.veh) ? o.w * (1.0 - a.pool_premium) : o.w;
    a.risk_free = 1.0 - a.pool_premium - a.market;
    a.flagged = a.risk_free < 0.0 || a.market < 0.0 || a.pool_premium > 1.0;
    return a;
}

} // namespace decum

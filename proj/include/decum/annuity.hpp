#pragma once

#include <array>
#include <cmath>
#include <string>

#include "decum/common.hpp"
#include "decum/lifetimes.hpp"
#include "decum/market.hpp"
#include "decum/numerics.hpp"

namespace decum {

// The Annuity Family. Pure drawdown is any vehicle at phi = 0.
enum class vehicle { gsa, ula, lia, iia };

inline constexpr std::array<vehicle, 4> all_vehicles{vehicle::gsa, vehicle::ula,
                                                     vehicle::lia, vehicle::iia};

// Fixed preference order used to break exact ties in the optimizer.
inline int vehicle_rank(vehicle v) { return static_cast<int>(v); }

inline const char* vehicle_name(vehicle v) {
    switch (v) {
        case vehicle::gsa: return "GSA";
        case vehicle::ula: return "ULA";
        case vehicle::lia: return "LIA";
        case vehicle::iia: return "IIA";
    }
    return "?";
}

inline vehicle vehicle_from_name(const std::string& s) {
    for (vehicle v : all_vehicles) {
        if (s == vehicle_name(v)) return v;
    }
    throw input_error("unknown payment vehicle (expected GSA, ULA, LIA or IIA)");
}

// LIA/IIA carry a portfolio return guarantee, so the provider account holds
// only the risk-free asset; for GSA/ULA it mirrors the retiree's account.
inline bool provider_risk_free(vehicle v) { return v == vehicle::lia || v == vehicle::iia; }

// ULA/IIA guarantee mortality credits, making payments independent of the
// realized population hazard.
inline bool mortality_guaranteed(vehicle v) { return v == vehicle::ula || v == vehicle::iia; }

// GSA/LIA are participating: all provider cost risk passes to the pool.
inline bool participating(vehicle v) { return v == vehicle::gsa || v == vehicle::lia; }

// One point of the decision space.
struct strategy {
    vehicle veh = vehicle::gsa;
    double w = 0;    // market weight of the drawdown account
    double phi = 0;  // payment rate, fraction of W0 per year
    double beta = 0; // death-benefit ratio in years; 0 = no hedge
};

enum class variance_basis { individual_cost, average_cost };

struct loading_policy {
    double sharpe = 0.2;
    int pool_size = 5000;
    variance_basis basis = variance_basis::individual_cost;

    void validate() const {
        require(sharpe >= 0.0, "sharpe target must be non-negative");
        require(pool_size >= 1, "pool size must be at least 1");
    }
};

// Expected real discount exponent of the provider account: r when risk-free,
// mu(w) - sigma(w)^2 when it mirrors the retiree's account.
inline double provider_discount_rate(vehicle v, const market_params& p,
                                     const portfolio_law& law) {
    return provider_risk_free(v) ? p.r : law.mu - law.sigma2;
}

// Discount exponent used for the death-benefit EPV and the loading reduction:
// r for the risk-free-backed vehicles and mu(w) for the ULA. The GSA marks the
// benefit at the expected provider path, mu(w) - sigma(w)^2, which keeps the
// hedged GSA outcome identical to pure drawdown.
inline double hedge_discount_rate(vehicle v, const market_params& p,
                                  const portfolio_law& law) {
    switch (v) {
        case vehicle::iia:
        case vehicle::lia: return p.r;
        case vehicle::ula: return law.mu;
        case vehicle::gsa: return law.mu - law.sigma2;
    }
    return p.r;
}

// A_{x;u} = E[e^{-u T_x}] = lambda / (lambda + u) for exponential T_x.
inline double death_benefit_epv(double lambda, double u_tilde) {
    require(lambda >= 0.0, "death hazard must be non-negative");
    require(lambda + u_tilde > 0.0, "death benefit EPV undefined: lambda + u <= 0");
    return lambda / (lambda + u_tilde);
}

// Fair premium P0 = phi / (lambda + rho), priced on the projected basis.
// For GSA/ULA this equals phi * a_x(w): the pool funds exactly what drawdown
// would, and computing it through the same annuity value keeps the GSA's
// outcome decomposition identical to pure drawdown at machine precision.
inline double fair_price(const strategy& s, double lambda, const market_params& p,
                         const portfolio_law& law) {
    require(s.phi >= 0.0, "payment rate must be non-negative");
    if (s.phi == 0.0) return 0.0;
    if (provider_risk_free(s.veh)) {
        const double rho = p.r;
        require(lambda + rho > 0.0, "fair price undefined: lambda + rho <= 0");
        return s.phi / (lambda + rho);
    }
    return s.phi * annuity_epv(law, lambda);
}

// Var over T ~ Exp(lambda) of phi (1 - e^{-rho T}) / rho. The closed form
// lambda / ((lambda + 2 rho)(lambda + rho)^2) is regular at rho = 0. A death
// benefit scales the whole cost by (1 - beta u), hence the squared factor.
inline double individual_cost_variance(const strategy& s, double lambda,
                                       const market_params& p, const portfolio_law& law) {
    if (participating(s.veh)) return 0.0;
    const double rho = provider_discount_rate(s.veh, p, law);
    require(lambda + 2.0 * rho > 0.0, "cost variance diverges: lambda + 2 rho <= 0");
    const double lr = lambda + rho;
    const double base = s.phi * s.phi * lambda / ((lambda + 2.0 * rho) * lr * lr);
    const double h = 1.0 - s.beta * hedge_discount_rate(s.veh, p, law);
    return h * h * base;
}

// Var(avg pool cost | Lambda) at unit payment rate for a pool of n lives:
// (1/n) * iint e^{-rho(s+t)} (e^{-Lambda max(s,t)} - e^{-Lambda(s+t)}) ds dt.
// The max term reduces by symmetry to 2 int e^{-(rho+Lambda)t} A_rho(t) dt and
// is evaluated by adaptive quadrature on the truncated domain
// [0, 60/(rho+Lambda)]; the second term separates in closed form.
inline double conditional_pool_variance(double rho, double Lambda, int n) {
    require(n >= 1, "pool size must be at least 1");
    const double a = rho + Lambda;
    require(a > 0.0 && 2.0 * rho + Lambda > 0.0, "pool cost variance diverges");
    const double hi = 60.0 / a;
    const double max_term = 2.0 * adaptive_simpson(
        [&](double t) { return std::exp(-a * t) * annuity_certain(rho, t); }, 0.0, hi, 1e-8);
    const double sep = annuity_certain(a, hi);
    return (max_term - sep * sep) / static_cast<double>(n);
}

// Var(C-bar) = E_Lambda[Var(C-bar | Lambda)] + Var_Lambda(E[C-bar | Lambda]),
// taken over the run's shared Lambda samples. Zero for the participating
// vehicles, whose average cost is deterministic.
inline double avg_cost_variance(const strategy& s, const loading_policy& pol,
                                const lambda_samples& lams, const market_params& p,
                                const portfolio_law& law) {
    if (participating(s.veh)) return 0.0;
    pol.validate();
    require(!lams.values.empty(), "need population hazard samples");
    const double rho = provider_discount_rate(s.veh, p, law);
    double e_cond = 0.0, m1 = 0.0, m2 = 0.0;
    for (double li : lams.values) {
        e_cond += conditional_pool_variance(rho, li, pol.pool_size);
        const double epv = 1.0 / (rho + li);
        m1 += epv;
        m2 += epv * epv;
    }
    const double n = static_cast<double>(lams.values.size());
    e_cond /= n;
    m1 /= n;
    m2 /= n;
    const double base = s.phi * s.phi * (e_cond + (m2 - m1 * m1));
    const double h = 1.0 - s.beta * hedge_discount_rate(s.veh, p, law);
    return h * h * base;
}

// theta = (S / P0) sqrt(Var) at beta = 0; phi cancels, so it is evaluated at
// unit payment rate. Participating vehicles price fair, theta = 0.
inline double loading(vehicle v, const loading_policy& pol, const lambda_samples& lams,
                      double lambda, const market_params& p, const portfolio_law& law) {
    if (participating(v)) return 0.0;
    pol.validate();
    strategy unit;
    unit.veh = v;
    unit.w = law.w;
    unit.phi = 1.0;
    const double p0 = fair_price(unit, lambda, p, law);
    const double var = pol.basis == variance_basis::individual_cost
                           ? individual_cost_variance(unit, lambda, p, law)
                           : avg_cost_variance(unit, pol, lams, p, law);
    return pol.sharpe / p0 * std::sqrt(var);
}

// theta_beta = (1 - beta u) theta_0; negative loadings are rejected.
inline double natural_hedge_loading(double theta0, double beta, double u_tilde) {
    const double bu = beta * u_tilde;
    require(bu >= 0.0 && bu <= 1.0, "death benefit ratio too large: beta * u > 1");
    return (1.0 - bu) * theta0;
}

struct pricing_result {
    double p0 = 0;              // fair premium, fraction of W0
    double theta = 0;           // effective loading after any hedge reduction
    double p_theta = 0;         // loaded premium (1 + theta) P0
    double hedge_injection = 0; // phi * beta * A, charged at t = 0

    double total_outlay() const { return p_theta + hedge_injection; }
};

inline pricing_result price_strategy(const strategy& s, const market_params& mkt,
                                     double lambda, const loading_policy& pol,
                                     const lambda_samples& lams) {
    require(s.phi >= 0.0, "payment rate must be non-negative");
    require(s.beta >= 0.0, "death benefit ratio must be non-negative");
    const portfolio_law law = make_portfolio_law(mkt, s.w);
    const double ut = hedge_discount_rate(s.veh, mkt, law);
    pricing_result out;
    out.p0 = fair_price(s, lambda, mkt, law);
    const double theta0 = loading(s.veh, pol, lams, lambda, mkt, law);
    out.theta = theta0 == 0.0 ? 0.0 : natural_hedge_loading(theta0, s.beta, ut);
    out.p_theta = (1.0 + out.theta) * out.p0;
    out.hedge_injection = s.beta == 0.0 ? 0.0 : s.phi * s.beta * death_benefit_epv(lambda, ut);
    return out;
}

} // namespace decum

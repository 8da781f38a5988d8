#pragma once

#include <cmath>
#include <cstdint>

namespace decum {

// splitmix64 output function; cheap and reproducible across platforms.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Inverse normal CDF, Wichura's AS 241 (PPND16). Accurate to ~1e-15 on (0,1).
inline double normal_quantile(double p) {
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
            (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                   6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
               1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
            (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                   3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
               4.2313330701600911252e+1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                     2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                   3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                 4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                     1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                   6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                 2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                     1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                   2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                 5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                     1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                   1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                 5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

// Counter-derived splitmix64 stream. A (seed, stream id) pair always yields
// the same sequence, independent of threading or batch layout.
struct rng {
    std::uint64_t state;

    explicit rng(std::uint64_t seed) : state(seed) {}

    static rng stream(std::uint64_t seed, std::uint64_t id) {
        return rng(mix64(mix64(seed) + 0x9e3779b97f4a7c15ull * (id + 1)));
    }

    std::uint64_t next_u64() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform on the open interval (0,1)
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_quantile(uniform()); }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double lognormal(double mu_ln, double sigma) {
        return std::exp(mu_ln + sigma * normal());
    }
};

// Binomial sample by CDF inversion; intended for modest means. Falls back to
// a clamped normal approximation when the pmf at zero underflows.
inline long sample_binomial(rng& g, long n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    const double q = 1.0 - p;
    const double f0 = std::exp(static_cast<double>(n) * std::log1p(-p));
    if (f0 <= 0.0 || static_cast<double>(n) * p > 1000.0) {
        const double m = static_cast<double>(n) * p;
        const double sd = std::sqrt(m * q);
        const double k = std::floor(m + sd * g.normal() + 0.5);
        if (k < 0.0) return 0;
        if (k > static_cast<double>(n)) return n;
        return static_cast<long>(k);
    }
    const double s = p / q;
    double f = f0;
    double cdf = f;
    const double u = g.uniform();
    long k = 0;
    while (u > cdf && k < n) {
        ++k;
        f *= s * static_cast<double>(n - k + 1) / static_cast<double>(k);
        cdf += f;
    }
    return k;
}

} // namespace decum

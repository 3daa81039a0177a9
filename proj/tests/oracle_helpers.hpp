// Test-side oracles, kept independent of the library's evaluation paths.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

// plain adaptive Simpson; enough for the smooth transformed integrands below
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) < 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12, int depth = 30) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// -int_0^x ln|1-y|/y dy straight from the definition. The logarithmic
// singularity at y = 1 is tamed by the substitution w = e^-v on both sides.
inline double dilog_integral(double x) {
    auto smooth = [](double y) {
        // -ln|1-y|/y with the removable point at y = 0
        if (std::fabs(y) < 1e-7) return 1.0 + y / 2.0 + y * y / 3.0;
        return -std::log(std::fabs(1.0 - y)) / y;
    };
    auto piece = [&](double a, double b) { return integrate(smooth, a, b, 1e-13); };
    // near-1 window via w = |1 - y| = e^-v: contributes v e^-v / (1 -+ e^-v)
    auto near_one = [&](double side, double delta) {
        auto g = [&](double v) {
            const double w = std::exp(-v);
            return side > 0 ? v * w / (1.0 - w) : v * w / (1.0 + w);
        };
        const double v0 = -std::log(delta);
        return integrate(g, v0, v0 + 40.0, 1e-14);
    };
    const double delta = 1e-3;
    if (x <= 1.0 - delta) return piece(0.0, x);
    double total = piece(0.0, 1.0 - delta);
    if (x <= 1.0) {
        // remaining strip (1-delta, x]; same substitution, lower bound |1-x|
        auto g = [&](double v) {
            const double w = std::exp(-v);
            return v * w / (1.0 - w);
        };
        const double hi = x == 1.0 ? 745.0 : -std::log(1.0 - x);
        return total + integrate(g, -std::log(delta), hi, 1e-14);
    }
    total += near_one(+1.0, delta);
    if (x <= 1.0 + delta) {
        // only the strip (1, x]: w = y - 1 runs below x - 1
        auto g = [&](double v) {
            const double w = std::exp(-v);
            return v * w / (1.0 + w);
        };
        total += integrate(g, -std::log(x - 1.0), 40.0 - std::log(x - 1.0), 1e-14);
        return total;
    }
    total += near_one(-1.0, delta);
    total += piece(1.0 + delta, x);
    return total;
}

// exact rational volume-eta enumeration for symmetric alpha = p/q
struct exact_volume {
    using bigint = boost::multiprecision::cpp_int;

    static int sign_of(const bigint& v) { return v == 0 ? 0 : (v < 0 ? -1 : 1); }

    static double ratio_to_double(const bigint& num, const bigint& den) {
        if (num == 0) return 0.0;
        const bool neg = num < 0;
        bigint n = neg ? bigint(-num) : num;
        const long nb = static_cast<long>(boost::multiprecision::msb(n));
        const long db = static_cast<long>(boost::multiprecision::msb(den));
        const long shift = 128 + std::max<long>(0, db - nb);
        const bigint quot = (n << shift) / den;
        const double val =
            std::ldexp(quot.convert_to<double>(), -static_cast<int>(shift));
        return neg ? -val : val;
    }

    // 2 * sum w * chi - 1, chi ties at one half, weights from the
    // Dirichlet-multinomial with concentration p/q in every cell
    static double eta(const uint32_t obs[4], uint32_t p, uint32_t q) {
        const uint32_t n = obs[0] + obs[1] + obs[2] + obs[3];
        std::vector<bigint> fact(n + 1);
        fact[0] = 1;
        for (uint32_t i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
        std::vector<bigint> rise(n + 1);
        rise[0] = 1;
        for (uint32_t k = 1; k <= n; ++k)
            rise[k] = rise[k - 1] * (q * (k - 1) + p);
        bigint denom = 1;
        for (uint32_t m = 0; m < n; ++m) denom *= (q * m + 4 * p);

        const bigint u0 = bigint(q * obs[0] + p) * (q * obs[3] + p);
        const bigint v0 = bigint(q * obs[1] + p) * (q * obs[2] + p);

        bigint twice_lhat_minus_one = 0; // accumulates sum of w * sign
        for (uint32_t i = 0; i <= n; ++i)
            for (uint32_t j = 0; j <= n - i; ++j)
                for (uint32_t k = 0; k <= n - i - j; ++k) {
                    const uint32_t l = n - i - j - k;
                    const bigint u = bigint(q * i + p) * (q * l + p);
                    const bigint v = bigint(q * j + p) * (q * k + p);
                    const int s = sign_of(u0 * v - u * v0);
                    if (s == 0) continue;
                    bigint w = fact[n] / (fact[i] * fact[j] * fact[k] * fact[l]);
                    w *= rise[i];
                    w *= rise[j];
                    w *= rise[k];
                    w *= rise[l];
                    twice_lhat_minus_one += s > 0 ? w : -w;
                }
        return ratio_to_double(twice_lhat_minus_one, denom);
    }
};

// brute-force tau-b for small vectors
inline double kendall_brute(const std::vector<double>& x,
                            const std::vector<double>& y) {
    const size_t n = x.size();
    double conc = 0, disc = 0;
    uint64_t tx = 0, ty = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0 && dy == 0) {
                ++tx;
                ++ty;
            } else if (dx == 0) {
                ++tx;
            } else if (dy == 0) {
                ++ty;
            } else if (dx * dy > 0) {
                ++conc;
            } else {
                ++disc;
            }
        }
    const double n0 = 0.5 * n * (n - 1);
    const double denom = std::sqrt((n0 - tx) * (n0 - ty));
    return denom == 0 ? 0.0 : (conc - disc) / denom;
}

} // namespace oracle

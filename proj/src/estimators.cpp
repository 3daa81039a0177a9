#include "estimators.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace ldcanon {

namespace {

using bigint = boost::multiprecision::cpp_int;

double log_gamma(double x) {
    int sign = 0;
    return lgamma_r(x, &sign);
}

double big_ratio_to_double(const bigint& num, const bigint& den) {
    if (num == 0) return 0.0;
    const bool neg = num < 0;
    bigint n = neg ? bigint(-num) : num;
    const long nb = static_cast<long>(boost::multiprecision::msb(n));
    const long db = static_cast<long>(boost::multiprecision::msb(den));
    const long shift = 128 + std::max<long>(0, db - nb);
    const bigint q = (n << shift) / den;
    const double val = std::ldexp(q.convert_to<double>(), -static_cast<int>(shift));
    return neg ? -val : val;
}

// classical measures on the closed simplex, zero cells allowed
estimate_result eval_closed(const double p[4], measure_id m,
                            const eta_calibration* cal) {
    estimate_result res;
    const double a = p[0] * p[3];
    const double b = p[1] * p[2];
    switch (m) {
        case measure_id::d:
            res.value = a - b;
            return res;
        case measure_id::dprime: {
            const double d = a - b;
            if (d == 0.0) return res;
            const double r0 = p[0] + p[1], r1 = p[2] + p[3];
            const double c0 = p[0] + p[2], c1 = p[1] + p[3];
            const double dmax = d > 0.0 ? std::min(r0 * c1, c0 * r1)
                                        : std::min(r0 * c0, r1 * c1);
            res.value = d / dmax;
            res.inflated = std::fabs(res.value) >= 1.0;
            return res;
        }
        case measure_id::r: {
            const double r0 = p[0] + p[1], r1 = p[2] + p[3];
            const double c0 = p[0] + p[2], c1 = p[1] + p[3];
            if (r0 == 0.0 || r1 == 0.0 || c0 == 0.0 || c1 == 0.0) {
                res.defined = false;
                return res;
            }
            res.value = (a - b) / std::sqrt((r0 * r1) * (c0 * c1));
            res.inflated = std::fabs(res.value) >= 1.0;
            return res;
        }
        case measure_id::lambda:
            if (b == 0.0) {
                res.defined = false;
                return res;
            }
            res.value = a / b;
            res.inflated = a == 0.0;
            return res;
        case measure_id::q:
            if (a == 0.0 && b == 0.0) {
                res.defined = false;
                return res;
            }
            res.value = (a - b) / (a + b);
            res.inflated = a == 0.0 || b == 0.0;
            return res;
        case measure_id::mi: {
            auto plog2 = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
            const double r0 = p[0] + p[1], r1 = p[2] + p[3];
            const double c0 = p[0] + p[2], c1 = p[1] + p[3];
            res.value = plog2(p[0]) + plog2(p[1]) + plog2(p[2]) + plog2(p[3]) -
                        plog2(r0) - plog2(r1) - plog2(c0) - plog2(c1);
            return res;
        }
        case measure_id::eta: {
            if (cal == nullptr)
                fail(errc::invalid_argument, "eta estimation needs a calibration");
            if (a == 0.0 && b == 0.0) {
                res.defined = false;
                return res;
            }
            if (b == 0.0) {
                res.value = 1.0; // boundary limit of 2L(lambda) - 1
                res.inflated = true;
                return res;
            }
            if (a == 0.0) {
                res.value = -1.0;
                res.inflated = true;
                return res;
            }
            res.value = cal->eta_ratio(a, b);
            return res;
        }
    }
    fail(errc::invalid_argument, "unknown measure");
}

} // namespace

estimate_result naive_estimate(const count_table& tn, measure_id m,
                               const eta_calibration* cal) {
    const double n = tn.total();
    const double p[4] = {tn.n00() / n, tn.n01() / n, tn.n10() / n, tn.n11() / n};
    return eval_closed(p, m, cal);
}

estimate_result semi_naive_estimate(const count_table& tn, measure_id m,
                                    const dirichlet_params& alpha,
                                    const eta_calibration* cal) {
    estimate_result res;
    // posterior products; the plug-in normalization cancels in the odds ratio
    const double a = (tn.n00() + alpha.a00()) * (tn.n11() + alpha.a11());
    const double b = (tn.n01() + alpha.a01()) * (tn.n10() + alpha.a10());
    switch (m) {
        case measure_id::lambda:
            res.value = a / b;
            return res;
        case measure_id::q:
            res.value = (a - b) / (a + b);
            return res;
        case measure_id::eta:
            if (cal == nullptr)
                fail(errc::invalid_argument, "eta estimation needs a calibration");
            res.value = cal->eta_ratio(a, b);
            return res;
        default: {
            const double total = tn.total() + alpha.sum();
            const double p[4] = {(tn.n00() + alpha.a00()) / total,
                                 (tn.n01() + alpha.a01()) / total,
                                 (tn.n10() + alpha.a10()) / total,
                                 (tn.n11() + alpha.a11()) / total};
            return eval_closed(p, m, cal);
        }
    }
}

estimate_result bayes_estimate(const count_table& tn, measure_id m,
                               const dirichlet_params& alpha,
                               uint64_t mc_samples, uint64_t seed,
                               const eta_calibration* cal) {
    if (mc_samples < 1000)
        fail(errc::invalid_argument, "Bayes estimation needs at least 1000 samples");
    if (m == measure_id::eta && cal == nullptr)
        fail(errc::invalid_argument, "eta estimation needs a calibration");
    const dirichlet_params post(alpha.a00() + tn.n00(), alpha.a01() + tn.n01(),
                                alpha.a10() + tn.n10(), alpha.a11() + tn.n11());
    rng_stream rng(seed, 0);
    double mean = 0.0, m2 = 0.0;
    for (uint64_t i = 0; i < mc_samples; ++i) {
        const prob_table t = rng.next_dirichlet(post);
        double v;
        switch (m) {
            case measure_id::d: v = d_coeff(t); break;
            case measure_id::dprime: v = d_prime(t); break;
            case measure_id::r: v = correlation_r(t); break;
            case measure_id::lambda: v = odds_ratio(t); break;
            case measure_id::q: v = yules_q(t); break;
            case measure_id::mi: v = mutual_information(t); break;
            case measure_id::eta: v = cal->eta(t); break;
            default: fail(errc::invalid_argument, "unknown measure");
        }
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    estimate_result res;
    res.value = mean;
    res.std_error = std::sqrt(m2 / static_cast<double>(mc_samples - 1) /
                              static_cast<double>(mc_samples));
    return res;
}

namespace detail {

double log_table_probability_generic(const count_table& tn,
                                     const dirichlet_params& alpha) {
    const double total = tn.total();
    const double asum = alpha.sum();
    double lw = log_gamma(total + 1.0) + log_gamma(asum) - log_gamma(total + asum);
    for (int c = 0; c < 4; ++c) {
        const uint32_t n = tn[c];
        if (n == 0) continue; // convention n B(n, x) = 1 at n = 0
        lw += log_gamma(n + alpha[c]) - log_gamma(n + 1.0) - log_gamma(alpha[c]);
    }
    return lw;
}

uint32_t common_rational_scale(const dirichlet_params& alpha) {
    for (uint32_t q : {1u, 2u, 3u, 4u, 5u, 6u, 8u, 10u, 12u, 16u}) {
        bool ok = true;
        for (int c = 0; c < 4; ++c) {
            const double scaled = alpha[c] * q;
            if (std::fabs(scaled - std::round(scaled)) > 1e-9 ||
                std::round(scaled) < 1.0)
                ok = false;
        }
        if (ok) return q;
    }
    return 0;
}

} // namespace detail

double log_table_probability(const count_table& tn, const dirichlet_params& alpha) {
    return detail::log_table_probability_generic(tn, alpha);
}

double table_probability(const count_table& tn, const dirichlet_params& alpha) {
    if (alpha.a00() == 1.0 && alpha.a01() == 1.0 && alpha.a10() == 1.0 &&
        alpha.a11() == 1.0) {
        // uniform prior weights every table of the fiber equally
        const uint64_t n = tn.total();
        const uint64_t m = (n + 1) * (n + 2) * (n + 3) / 6;
        return 1.0 / static_cast<double>(m);
    }
    return std::exp(detail::log_table_probability_generic(tn, alpha));
}

namespace {

int compare_ratio(uint64_t u0, uint64_t v0, uint64_t u1, uint64_t v1) {
    // sign of u0/v0 - u1/v1 with exact integer cross products
    const uint64_t lhs = u0 * v1;
    const uint64_t rhs = u1 * v0;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

struct rational_scaling {
    uint32_t q;
    uint32_t p[4];
};

bool make_scaling(const dirichlet_params& alpha, rational_scaling& out) {
    const uint32_t q = detail::common_rational_scale(alpha);
    if (q == 0) return false;
    out.q = q;
    for (int c = 0; c < 4; ++c)
        out.p[c] = static_cast<uint32_t>(std::llround(alpha[c] * q));
    return true;
}

// exact enumeration with integer weights; feasible only for small totals
double volume_eta_exact(const count_table& tn, const rational_scaling& rs) {
    const uint32_t n = tn.total();
    const uint64_t q = rs.q;

    std::vector<bigint> fact(n + 1);
    fact[0] = 1;
    for (uint32_t i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
    // rising[c][k] = prod_{m<k} (q m + p_c)
    std::array<std::vector<bigint>, 4> rising;
    for (int c = 0; c < 4; ++c) {
        rising[c].resize(n + 1);
        rising[c][0] = 1;
        for (uint32_t k = 1; k <= n; ++k)
            rising[c][k] = rising[c][k - 1] * (q * (k - 1) + rs.p[c]);
    }
    const uint64_t psum = rs.p[0] + rs.p[1] + rs.p[2] + rs.p[3];
    bigint denom = 1;
    for (uint32_t m = 0; m < n; ++m) denom *= (q * m + psum);

    const uint64_t u0 = (q * tn.n00() + rs.p[0]) * (q * tn.n11() + rs.p[3]);
    const uint64_t v0 = (q * tn.n01() + rs.p[1]) * (q * tn.n10() + rs.p[2]);

    bigint acc = 0;
    for (uint32_t i = 0; i <= n; ++i)
        for (uint32_t j = 0; j <= n - i; ++j)
            for (uint32_t k = 0; k <= n - i - j; ++k) {
                const uint32_t l = n - i - j - k;
                const uint64_t u = (q * i + rs.p[0]) * (q * l + rs.p[3]);
                const uint64_t v = (q * j + rs.p[1]) * (q * k + rs.p[2]);
                const int s = compare_ratio(u0, v0, u, v); // +1 when less extreme
                if (s == 0) continue;
                bigint weight = fact[n] / (fact[i] * fact[j] * fact[k] * fact[l]);
                weight *= rising[0][i];
                weight *= rising[1][j];
                weight *= rising[2][k];
                weight *= rising[3][l];
                acc += s > 0 ? weight : -weight;
            }
    return big_ratio_to_double(acc, denom);
}

double volume_eta_float(const count_table& tn, const dirichlet_params& alpha,
                        const rational_scaling* rs) {
    const uint32_t n = tn.total();
    const double asum = alpha.sum();
    const double base = log_gamma(n + 1.0) + log_gamma(asum) -
                        log_gamma(n + asum);
    std::array<std::vector<double>, 4> cell;
    for (int c = 0; c < 4; ++c) {
        cell[c].resize(n + 1);
        cell[c][0] = 0.0;
        for (uint32_t k = 1; k <= n; ++k)
            cell[c][k] = log_gamma(k + alpha[c]) - log_gamma(k + 1.0) -
                         log_gamma(alpha[c]);
    }

    const double a0 = (tn.n00() + alpha.a00()) * (tn.n11() + alpha.a11());
    const double b0 = (tn.n01() + alpha.a01()) * (tn.n10() + alpha.a10());
    uint64_t u0 = 0, v0 = 0;
    if (rs != nullptr) {
        u0 = (uint64_t)(rs->q * tn.n00() + rs->p[0]) * (rs->q * tn.n11() + rs->p[3]);
        v0 = (uint64_t)(rs->q * tn.n01() + rs->p[1]) * (rs->q * tn.n10() + rs->p[2]);
    }
    auto cmp = [&](uint32_t i, uint32_t j, uint32_t k, uint32_t l) -> int {
        if (rs != nullptr) {
            const uint64_t u = (uint64_t)(rs->q * i + rs->p[0]) * (rs->q * l + rs->p[3]);
            const uint64_t v = (uint64_t)(rs->q * j + rs->p[1]) * (rs->q * k + rs->p[2]);
            return compare_ratio(u0, v0, u, v);
        }
        const long double lhs = (long double)(i + alpha.a00()) * (l + alpha.a11()) * b0;
        const long double rhs = (long double)(j + alpha.a01()) * (k + alpha.a10()) * a0;
        return rhs > lhs ? 1 : (rhs < lhs ? -1 : 0);
    };
    auto weight = [&](uint32_t i, uint32_t j, uint32_t k, uint32_t l) {
        return std::exp(base + cell[0][i] + cell[1][j] + cell[2][k] + cell[3][l]);
    };

    double acc = 0.0;
    if (alpha.symmetric_params()) {
        // pair each table with its row swap; equal weights make the pairing
        // exactly antisymmetric under swapping the observed table
        for (uint32_t i = 0; i <= n; ++i)
            for (uint32_t j = 0; j <= n - i; ++j)
                for (uint32_t k = 0; k <= n - i - j; ++k) {
                    const uint32_t l = n - i - j - k;
                    if (std::make_pair(i, j) > std::make_pair(k, l)) continue;
                    const int s1 = cmp(i, j, k, l);
                    if (i == k && j == l) {
                        if (s1 != 0) acc += weight(i, j, k, l) * s1;
                        continue;
                    }
                    const int s2 = cmp(k, l, i, j);
                    if (s1 + s2 != 0) acc += weight(i, j, k, l) * (s1 + s2);
                }
    } else {
        for (uint32_t i = 0; i <= n; ++i)
            for (uint32_t j = 0; j <= n - i; ++j)
                for (uint32_t k = 0; k <= n - i - j; ++k) {
                    const uint32_t l = n - i - j - k;
                    const int s = cmp(i, j, k, l);
                    if (s != 0) acc += weight(i, j, k, l) * s;
                }
    }
    return acc;
}

} // namespace

estimate_result volume_eta_estimate(const count_table& tn,
                                    const dirichlet_params& alpha,
                                    uint32_t budget) {
    if (budget == 0) budget = 500;
    const uint32_t n = tn.total();
    if (n > budget)
        fail(errc::budget_exceeded,
             "volume estimation cost grows with N^3; raise the budget to force it");
    estimate_result res;
    rational_scaling rs;
    const bool have_rs = make_scaling(alpha, rs);
    if (have_rs && n <= 64) {
        res.value = volume_eta_exact(tn, rs);
        return res;
    }
    res.value = volume_eta_float(tn, alpha, have_rs ? &rs : nullptr);
    return res;
}

estimate_result volume_dprime_estimate(const count_table& tn) {
    const int64_t n = tn.total();
    const int64_t r0 = tn.n00() + tn.n01();
    const int64_t c0 = tn.n00() + tn.n10();
    if (r0 == 0 || c0 == 0 || r0 == n || c0 == n)
        fail(errc::degenerate_marginals,
             "volume D' needs all four marginals positive");
    const int64_t rc = r0 * c0;
    const int64_t obs = static_cast<int64_t>(tn.n00()) * n - rc;
    estimate_result res;
    if (obs == 0) return res; // sign convention: D = 0 maps to 0
    const int64_t lo = std::max<int64_t>(0, r0 + c0 - n);
    const int64_t hi = std::min(r0, c0);
    const int64_t mag = std::llabs(obs);
    int64_t same_sign = 0, less = 0, ties = 0;
    for (int64_t x = lo; x <= hi; ++x) {
        const int64_t d = x * n - rc;
        if (d == 0 || (d > 0) != (obs > 0)) continue;
        ++same_sign;
        const int64_t m = std::llabs(d);
        if (m < mag) ++less;
        else if (m == mag) ++ties;
    }
    res.value = (obs > 0 ? 1.0 : -1.0) * (less + 0.5 * ties) /
                static_cast<double>(same_sign);
    return res;
}

volume_eta_table::volume_eta_table(uint32_t total, const dirichlet_params& alpha)
    : total_(total) {
    if (total == 0) fail(errc::invalid_argument, "fiber total must be positive");
    rational_scaling rs;
    if (!make_scaling(alpha, rs))
        fail(errc::invalid_argument,
             "volume fiber table needs rational concentrations");
    q_ = rs.q;
    for (int c = 0; c < 4; ++c) p_[c] = rs.p[c];

    const uint32_t n = total;
    const double asum = alpha.sum();
    const double base = log_gamma(n + 1.0) + log_gamma(asum) -
                        log_gamma(n + asum);
    std::array<std::vector<double>, 4> cell;
    for (int c = 0; c < 4; ++c) {
        cell[c].resize(n + 1);
        cell[c][0] = 0.0;
        for (uint32_t k = 1; k <= n; ++k)
            cell[c][k] = log_gamma(k + alpha[c]) - log_gamma(k + 1.0) -
                         log_gamma(alpha[c]);
    }

    const size_t count = static_cast<size_t>(n + 1) * (n + 2) * (n + 3) / 6;
    entries_.reserve(count);
    std::vector<double> weights;
    weights.reserve(count);
    std::vector<uint32_t> order;
    order.reserve(count);
    for (uint32_t i = 0; i <= n; ++i)
        for (uint32_t j = 0; j <= n - i; ++j)
            for (uint32_t k = 0; k <= n - i - j; ++k) {
                const uint32_t l = n - i - j - k;
                entries_.push_back({(rs.q * i + rs.p[0]) * (rs.q * l + rs.p[3]),
                                    (rs.q * j + rs.p[1]) * (rs.q * k + rs.p[2])});
                weights.push_back(std::exp(base + cell[0][i] + cell[1][j] +
                                           cell[2][k] + cell[3][l]));
            }
    order.resize(entries_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<uint32_t>(i);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return (uint64_t)entries_[a].u * entries_[b].v <
               (uint64_t)entries_[b].u * entries_[a].v;
    });
    std::vector<entry> sorted(entries_.size());
    cum_.resize(entries_.size() + 1);
    cum_[0] = 0.0;
    for (size_t i = 0; i < order.size(); ++i) {
        sorted[i] = entries_[order[i]];
        cum_[i + 1] = cum_[i] + weights[order[i]];
    }
    entries_ = std::move(sorted);
}

double volume_eta_table::estimate(const count_table& tn) const {
    if (tn.total() != total_)
        fail(errc::invalid_argument, "fiber table total does not match");
    const uint64_t u0 = (uint64_t)(q_ * tn.n00() + p_[0]) * (q_ * tn.n11() + p_[3]);
    const uint64_t v0 = (uint64_t)(q_ * tn.n01() + p_[1]) * (q_ * tn.n10() + p_[2]);
    const auto less_than_obs = [&](const entry& e) {
        return (uint64_t)e.u * v0 < u0 * (uint64_t)e.v;
    };
    const auto obs_less_than = [&](const entry& e) {
        return u0 * (uint64_t)e.v < (uint64_t)e.u * v0;
    };
    const size_t lo = std::partition_point(entries_.begin(), entries_.end(),
                                           less_than_obs) - entries_.begin();
    const size_t hi = std::partition_point(entries_.begin() + lo, entries_.end(),
                                           [&](const entry& e) {
                                               return !obs_less_than(e);
                                           }) - entries_.begin();
    const double w_less = cum_[lo];
    const double w_greater = cum_.back() - cum_[hi];
    return w_less - w_greater;
}

} // namespace ldcanon

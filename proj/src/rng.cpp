#include "rng.hpp"

#include <cmath>

#include "errors.hpp"

namespace ldcanon {

namespace {

uint64_t splitmix_next(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b) {
    uint64_t state = master;
    (void)splitmix_next(state);
    state ^= 0xD1B54A32D192ED03ULL * (a + 1);
    (void)splitmix_next(state);
    state ^= 0xEB44ACCAB455D165ULL * (b + 1);
    return splitmix_next(state);
}

rng_stream::rng_stream(uint64_t seed, uint64_t stream) {
    uint64_t state = derive_seed(seed, stream);
    for (auto& word : s_) word = splitmix_next(state);
}

uint64_t rng_stream::next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double rng_stream::next_double() {
    // 52 random bits plus a half-step keep the value strictly inside (0, 1)
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double rng_stream::next_normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // Marsaglia polar method
    double u, v, s;
    do {
        u = 2.0 * next_double() - 1.0;
        v = 2.0 * next_double() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * m;
    has_cached_normal_ = true;
    return u * m;
}

double rng_stream::next_gamma(double shape) {
    if (!(shape > 0.0)) fail(errc::invalid_argument, "gamma shape must be positive");
    if (shape < 1.0) {
        const double g = next_gamma(shape + 1.0);
        return g * std::pow(next_double(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_double();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

prob_table rng_stream::next_dirichlet(const dirichlet_params& alpha) {
    for (;;) {
        const double g0 = next_gamma(alpha.a00());
        const double g1 = next_gamma(alpha.a01());
        const double g2 = next_gamma(alpha.a10());
        const double g3 = next_gamma(alpha.a11());
        // underflow to an exact zero is possible for tiny shapes; redraw
        if (g0 > 0.0 && g1 > 0.0 && g2 > 0.0 && g3 > 0.0) {
            const double sum = g0 + g1 + g2 + g3;
            const double p0 = g0 / sum, p1 = g1 / sum, p2 = g2 / sum, p3 = g3 / sum;
            if (p0 > 0.0 && p1 > 0.0 && p2 > 0.0 && p3 > 0.0)
                return prob_table::from_raw(p0, p1, p2, p3);
        }
    }
}

count_table rng_stream::next_multinomial(const prob_table& t, uint32_t n) {
    if (n == 0) fail(errc::invalid_argument, "multinomial sample size must be >= 1");
    const double c1 = t.p00();
    const double c2 = c1 + t.p01();
    const double c3 = c2 + t.p10();
    uint32_t counts[4] = {0, 0, 0, 0};
    for (uint32_t i = 0; i < n; ++i) {
        const double u = next_double();
        if (u < c1) ++counts[0];
        else if (u < c2) ++counts[1];
        else if (u < c3) ++counts[2];
        else ++counts[3];
    }
    return count_table(counts[0], counts[1], counts[2], counts[3]);
}

} // namespace ldcanon

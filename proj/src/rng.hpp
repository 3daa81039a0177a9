#pragma once

#include <cstdint>

#include "tables.hpp"

namespace ldcanon {

// Mix a master seed with substream ids so that worker scheduling can never
// influence which variates a logical unit of work consumes.
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0);

// xoshiro256++ seeded through splitmix64. One stream per (seed, stream id)
// pair; streams with distinct ids are statistically independent.
class rng_stream {
public:
    rng_stream(uint64_t seed, uint64_t stream = 0);

    uint64_t next_u64();
    // uniform on the open interval (0, 1)
    double next_double();
    double next_normal();
    // Marsaglia-Tsang squeeze; shapes below one use the power boost
    // gamma(a) = gamma(a + 1) * U^(1/a).
    double next_gamma(double shape);
    prob_table next_dirichlet(const dirichlet_params& alpha);
    count_table next_multinomial(const prob_table& t, uint32_t n);

private:
    uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace ldcanon

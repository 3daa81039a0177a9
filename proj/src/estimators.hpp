#pragma once

#include <cstdint>
#include <vector>

#include "eta.hpp"
#include "measures.hpp"
#include "tables.hpp"

namespace ldcanon {

enum class estimator_family : int {
    naive = 0,
    semi_naive = 1,
    bayes = 2,
    volume = 3,
};

// In-band estimation outcome. Undefinedness and boundary inflation are data,
// not errors: simulation studies must record them rather than crash.
struct estimate_result {
    double value = 0.0;
    bool defined = true;
    bool inflated = false;
    double std_error = 0.0;
};

// Plug-in of the raw frequencies n_ij / N. Zero cells can make the result
// undefined (0/0) or push standardized measures onto the boundary, which is
// reported through the inflated flag. eta and lambda measures hit by a single
// zero product are clamped to their boundary limit.
estimate_result naive_estimate(const count_table& tn, measure_id m,
                               const eta_calibration* cal = nullptr);

// Plug-in of the posterior-mean probabilities (alpha + n) / (sum alpha + N);
// always defined.
estimate_result semi_naive_estimate(const count_table& tn, measure_id m,
                                    const dirichlet_params& alpha,
                                    const eta_calibration* cal = nullptr);

// Posterior expectation of the measure by Monte Carlo over Dirichlet(alpha+n)
// draws; deterministic given the seed. Requires mc_samples >= 1000.
estimate_result bayes_estimate(const count_table& tn, measure_id m,
                               const dirichlet_params& alpha,
                               uint64_t mc_samples, uint64_t seed,
                               const eta_calibration* cal = nullptr);

// Probability of the observed table under the Dirichlet-mixed multinomial.
double table_probability(const count_table& tn, const dirichlet_params& alpha);
double log_table_probability(const count_table& tn, const dirichlet_params& alpha);

// Rank of the observed posterior odds ratio among all tables of the same
// total, weighted by their Dirichlet-multinomial probabilities, rescaled to
// (-1, 1). Cost grows with N^3; sizes above the budget are rejected.
estimate_result volume_eta_estimate(const count_table& tn,
                                    const dirichlet_params& alpha,
                                    uint32_t budget = 500);

// Signed fraction of fixed-marginal tables with the same sign of D and less
// extreme D, ties counted half.
estimate_result volume_dprime_estimate(const count_table& tn);

// Precomputed fiber of all tables with a fixed total, sorted by posterior
// odds ratio, for repeated volume-eta evaluation inside studies.
class volume_eta_table {
public:
    volume_eta_table(uint32_t total, const dirichlet_params& alpha);
    double estimate(const count_table& tn) const;
    uint32_t total() const { return total_; }

private:
    struct entry {
        uint32_t u, v; // scaled integer numerator/denominator of lambda-hat
    };
    uint32_t total_ = 0;
    uint32_t q_ = 0;
    uint32_t p_[4] = {0, 0, 0, 0};
    std::vector<entry> entries_;
    std::vector<double> cum_; // cum_[i] = weight of the first i entries
};

namespace detail {
// lgamma route, kept separate from the constant-weight fast path so the two
// can be checked against each other.
double log_table_probability_generic(const count_table& tn,
                                     const dirichlet_params& alpha);
// common rational scale q with q * alpha integral for all cells, or 0
uint32_t common_rational_scale(const dirichlet_params& alpha);
} // namespace detail

} // namespace ldcanon

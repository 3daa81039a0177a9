#pragma once

#include "tables.hpp"

namespace ldcanon {

enum class measure_id : int {
    d = 0,
    dprime = 1,
    r = 2,
    lambda = 3,
    q = 4,
    mi = 5,
    eta = 6,
};

// Tagged evaluation result. defined is false only for the boundary and
// degenerate cases produced by plug-in estimation; on the open manifold
// every classical measure is defined.
struct measure_value {
    measure_id id;
    double value = 0.0;
    bool defined = true;
};

// Coupling coefficient D, computed as the table determinant
// p00*p11 - p01*p10 so that row/column swaps negate it exactly.
double d_coeff(const prob_table& t);
// Lewontin's standardization D / D_max; the branch of D_max follows the
// sign of D.
double d_prime(const prob_table& t);
// Pearson correlation of the two binary markers.
double correlation_r(const prob_table& t);
// Yule's Q = (lambda - 1) / (lambda + 1), evaluated as a product ratio.
double yules_q(const prob_table& t);
// Mutual information in bits; not normalized.
double mutual_information(const prob_table& t);

const char* measure_name(measure_id id);

} // namespace ldcanon

#include "measures.hpp"

#include <algorithm>
#include <cmath>

namespace ldcanon {

double d_coeff(const prob_table& t) {
    return t.p00() * t.p11() - t.p01() * t.p10();
}

double d_prime(const prob_table& t) {
    const double d = d_coeff(t);
    if (d == 0.0) return 0.0;
    const auto m = marginals(t);
    const double dmax = d > 0.0
        ? std::min(m.row0 * m.col1, m.col0 * m.row1)
        : std::min(m.row0 * m.col0, m.row1 * m.col1);
    return d / dmax;
}

double correlation_r(const prob_table& t) {
    const auto m = marginals(t);
    // grouped so that swaps permute the factors without reassociating
    return d_coeff(t) / std::sqrt((m.row0 * m.row1) * (m.col0 * m.col1));
}

double yules_q(const prob_table& t) {
    const double a = t.p00() * t.p11();
    const double b = t.p01() * t.p10();
    return (a - b) / (a + b);
}

double mutual_information(const prob_table& t) {
    const auto m = marginals(t);
    auto plog2 = [](double p) { return p * std::log2(p); };
    const double joint = plog2(t.p00()) + plog2(t.p01()) + plog2(t.p10()) +
                         plog2(t.p11());
    return joint - plog2(m.row0) - plog2(m.row1) - plog2(m.col0) - plog2(m.col1);
}

const char* measure_name(measure_id id) {
    switch (id) {
        case measure_id::d: return "d";
        case measure_id::dprime: return "dprime";
        case measure_id::r: return "r";
        case measure_id::lambda: return "lambda";
        case measure_id::q: return "q";
        case measure_id::mi: return "mi";
        case measure_id::eta: return "eta";
    }
    return "?";
}

} // namespace ldcanon

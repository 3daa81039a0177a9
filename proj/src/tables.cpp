#include "tables.hpp"

#include <cmath>

#include "errors.hpp"

namespace ldcanon {

namespace {

// Deviations up to this size are treated as accumulated float error and
// renormalized away; anything larger is rejected as misuse.
constexpr double kSumSlack = 1e-9;

void check_positive_entries(double a, double b, double c, double d) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0) || !(d > 0.0))
        fail(errc::non_positive_entry,
             "probability table entries must be strictly positive");
}

} // namespace

prob_table::prob_table(double p00, double p01, double p10, double p11) {
    check_positive_entries(p00, p01, p10, p11);
    const double sum = p00 + p01 + p10 + p11;
    if (!(std::fabs(sum - 1.0) <= kSumSlack))
        fail(errc::not_normalized, "table entries do not sum to one");
    p_ = {p00 / sum, p01 / sum, p10 / sum, p11 / sum};
}

prob_table prob_table::from_raw(double w00, double w01, double w10, double w11) {
    check_positive_entries(w00, w01, w10, w11);
    const double sum = w00 + w01 + w10 + w11;
    if (!std::isfinite(sum) || !(sum > 0.0))
        fail(errc::non_positive_entry, "table weights must be finite and positive");
    return prob_table(w00 / sum, w01 / sum, w10 / sum, w11 / sum);
}

count_table::count_table(uint32_t n00, uint32_t n01, uint32_t n10, uint32_t n11)
    : n_{n00, n01, n10, n11} {
    if (total() == 0)
        fail(errc::invalid_argument, "count table must hold at least one observation");
}

dirichlet_params::dirichlet_params(double a00, double a01, double a10, double a11)
    : a_{a00, a01, a10, a11} {
    for (double a : a_)
        if (!(a > 0.0) || !std::isfinite(a))
            fail(errc::invalid_argument, "Dirichlet concentrations must be positive");
}

namespace {

// result[i] = input[perm[i]], entries indexed p00, p01, p10, p11.
constexpr std::array<std::array<int, 4>, 8> kPerms = {{
    {0, 1, 2, 3}, // identity
    {0, 2, 1, 3}, // transpose
    {2, 3, 0, 1}, // row swap
    {1, 0, 3, 2}, // col swap
    {3, 2, 1, 0}, // both swaps
    {2, 0, 3, 1}, // transpose after row swap
    {1, 3, 0, 2}, // transpose after col swap
    {3, 1, 2, 0}, // transpose after both swaps
}};

constexpr std::array<int, 8> kSigns = {+1, +1, -1, -1, +1, -1, -1, +1};

} // namespace

int symmetry_sign(symmetry_element e) { return kSigns[static_cast<int>(e)]; }

const std::array<int, 4>& symmetry_permutation(symmetry_element e) {
    return kPerms[static_cast<int>(e)];
}

symmetry_element symmetry_compose(symmetry_element a, symmetry_element b) {
    // (a o b)[i] = b_perm[a_perm[i]]: apply b first, then a.
    const auto& pa = kPerms[static_cast<int>(a)];
    const auto& pb = kPerms[static_cast<int>(b)];
    std::array<int, 4> c;
    for (int i = 0; i < 4; ++i) c[i] = pb[pa[i]];
    for (int e = 0; e < 8; ++e)
        if (kPerms[e] == c) return static_cast<symmetry_element>(e);
    fail(errc::invalid_argument, "symmetry composition left the group"); // unreachable
}

symmetry_element symmetry_inverse(symmetry_element e) {
    for (int g = 0; g < 8; ++g) {
        auto cand = static_cast<symmetry_element>(g);
        if (symmetry_compose(e, cand) == symmetry_element::identity) return cand;
    }
    fail(errc::invalid_argument, "symmetry element has no inverse"); // unreachable
}

prob_table make_prob_table(double w00, double w01, double w10, double w11) {
    return prob_table::from_raw(w00, w01, w10, w11);
}

marginals_t marginals(const prob_table& t) {
    return {t.p00() + t.p01(), t.p10() + t.p11(),
            t.p00() + t.p10(), t.p01() + t.p11()};
}

prob_table apply_symmetry(const prob_table& t, symmetry_element e) {
    const auto& perm = symmetry_permutation(e);
    return prob_table(prob_table::exact_tag{},
                      {t[perm[0]], t[perm[1]], t[perm[2]], t[perm[3]]});
}

prob_table selection_act(const prob_table& t, double mu, double nu) {
    if (!(mu > 0.0) || !(nu > 0.0) || !std::isfinite(mu) || !std::isfinite(nu))
        fail(errc::non_positive_scale, "selection scales must be positive");
    return prob_table::from_raw(mu * nu * t.p00(), mu * t.p01(), nu * t.p10(),
                                t.p11());
}

double odds_ratio(const prob_table& t) {
    return (t.p00() * t.p11()) / (t.p01() * t.p10());
}

prob_table canonical_representative(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        fail(errc::non_positive_lambda, "odds ratio must be positive");
    const double s = std::sqrt(lambda);
    const double diag = s / (2.0 * (1.0 + s));
    const double off = 1.0 / (2.0 * (1.0 + s));
    return prob_table(diag, off, off, diag);
}

double count_odds_ratio_hat(const count_table& tn, const dirichlet_params& alpha) {
    const double num = (tn.n00() + alpha.a00()) * (tn.n11() + alpha.a11());
    const double den = (tn.n01() + alpha.a01()) * (tn.n10() + alpha.a10());
    return num / den;
}

} // namespace ldcanon

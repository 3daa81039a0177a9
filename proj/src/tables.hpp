#pragma once

#include <array>
#include <cstdint>

namespace ldcanon {

enum class symmetry_element : int;

// A point of the open probability manifold of 2x2 tables: four strictly
// positive probabilities summing to one. Entry order is p00, p01, p10, p11.
class prob_table {
public:
    prob_table(double p00, double p01, double p10, double p11);

    // Normalize arbitrary positive weights into a table.
    static prob_table from_raw(double w00, double w01, double w10, double w11);
    static prob_table from_raw(const std::array<double, 4>& w) {
        return from_raw(w[0], w[1], w[2], w[3]);
    }

    double p00() const { return p_[0]; }
    double p01() const { return p_[1]; }
    double p10() const { return p_[2]; }
    double p11() const { return p_[3]; }
    double operator[](int i) const { return p_[i]; }
    const std::array<double, 4>& entries() const { return p_; }

private:
    struct exact_tag {};
    prob_table(exact_tag, const std::array<double, 4>& p) : p_(p) {}
    // cell permutations are exact; they bypass the renormalizing constructor
    friend prob_table apply_symmetry(const prob_table& t, symmetry_element e);

    std::array<double, 4> p_;
};

// Observed counts n00, n01, n10, n11 with total N >= 1. Zero cells are
// allowed; only probability tables must stay off the boundary.
class count_table {
public:
    count_table(uint32_t n00, uint32_t n01, uint32_t n10, uint32_t n11);

    uint32_t n00() const { return n_[0]; }
    uint32_t n01() const { return n_[1]; }
    uint32_t n10() const { return n_[2]; }
    uint32_t n11() const { return n_[3]; }
    uint32_t operator[](int i) const { return n_[i]; }
    uint32_t total() const { return n_[0] + n_[1] + n_[2] + n_[3]; }
    const std::array<uint32_t, 4>& entries() const { return n_; }

private:
    std::array<uint32_t, 4> n_;
};

// Dirichlet concentration parameters, one per cell, all positive.
class dirichlet_params {
public:
    dirichlet_params(double a00, double a01, double a10, double a11);
    static dirichlet_params symmetric(double a) {
        return dirichlet_params(a, a, a, a);
    }

    double a00() const { return a_[0]; }
    double a01() const { return a_[1]; }
    double a10() const { return a_[2]; }
    double a11() const { return a_[3]; }
    double operator[](int i) const { return a_[i]; }
    double sum() const { return a_[0] + a_[1] + a_[2] + a_[3]; }
    bool symmetric_params() const {
        return a_[0] == a_[1] && a_[1] == a_[2] && a_[2] == a_[3];
    }

private:
    std::array<double, 4> a_;
};

// The dihedral group generated by transposition and row/column swaps.
enum class symmetry_element : int {
    identity = 0,
    transpose = 1,
    row_swap = 2,
    col_swap = 3,
    both_swap = 4,
    transpose_row_swap = 5,
    transpose_col_swap = 6,
    transpose_both_swap = 7,
};

// Sign character: -1 for elements involving a single allele transposition.
int symmetry_sign(symmetry_element e);
symmetry_element symmetry_compose(symmetry_element a, symmetry_element b);
symmetry_element symmetry_inverse(symmetry_element e);
const std::array<int, 4>& symmetry_permutation(symmetry_element e);

struct marginals_t {
    double row0, row1, col0, col1; // p0., p1., p.0, p.1
};

prob_table make_prob_table(double w00, double w01, double w10, double w11);
marginals_t marginals(const prob_table& t);
prob_table apply_symmetry(const prob_table& t, symmetry_element e);
prob_table selection_act(const prob_table& t, double mu, double nu);
double odds_ratio(const prob_table& t);
prob_table canonical_representative(double lambda);
double count_odds_ratio_hat(const count_table& tn, const dirichlet_params& alpha);

} // namespace ldcanon

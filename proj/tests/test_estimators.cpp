#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "estimators.hpp"
#include "oracle_helpers.hpp"
#include "rng.hpp"

using namespace ldcanon;

namespace {

const auto kAlphaHalf = dirichlet_params::symmetric(0.5);
const auto kAlphaOne = dirichlet_params::symmetric(1.0);
const auto& cal_half() {
    static const auto cal = eta_calibration::analytic(0.5);
    return cal;
}
const auto& cal_one() {
    static const auto cal = eta_calibration::analytic(1.0);
    return cal;
}

count_table swap_rows(const count_table& t) {
    return count_table(t.n10(), t.n11(), t.n00(), t.n01());
}

count_table transpose(const count_table& t) {
    return count_table(t.n00(), t.n10(), t.n01(), t.n11());
}

uint64_t binom3(uint64_t n) { return (n + 1) * (n + 2) * (n + 3) / 6; }

// every table of the fixed-total fiber, for brute-force sums
template <class Fn>
void for_each_table(uint32_t n, Fn&& fn) {
    for (uint32_t i = 0; i <= n; ++i)
        for (uint32_t j = 0; j <= n - i; ++j)
            for (uint32_t k = 0; k <= n - i - j; ++k)
                fn(count_table(i, j, k, n - i - j - k));
}

} // namespace

TEST_SUITE("estimators") {

TEST_CASE("naive estimates") {
    CHECK(naive_estimate(count_table(3, 1, 1, 3), measure_id::dprime).value ==
          doctest::Approx(0.5).epsilon(1e-15));

    const auto lam = naive_estimate(count_table(5, 0, 0, 5), measure_id::lambda);
    CHECK(!lam.defined);

    const auto dp = naive_estimate(count_table(5, 0, 0, 5), measure_id::dprime);
    CHECK(dp.defined);
    CHECK(dp.value == 1.0);
    CHECK(dp.inflated);

    // single zero product clamps eta and Q to the boundary
    const auto eta = naive_estimate(count_table(5, 0, 0, 5), measure_id::eta,
                                    &cal_half());
    CHECK(eta.defined);
    CHECK(eta.value == 1.0);
    CHECK(eta.inflated);
    const auto q = naive_estimate(count_table(0, 5, 5, 0), measure_id::q);
    CHECK(q.value == -1.0);
    CHECK(q.inflated);

    // a zero row kills both products
    const auto both = naive_estimate(count_table(0, 0, 5, 5), measure_id::q);
    CHECK(!both.defined);
    CHECK(!naive_estimate(count_table(0, 0, 5, 5), measure_id::eta, &cal_one())
               .defined);
    CHECK(!naive_estimate(count_table(0, 0, 5, 5), measure_id::r).defined);
}

TEST_CASE("semi-naive estimates") {
    for (auto m : {measure_id::dprime, measure_id::r, measure_id::q}) {
        const auto est =
            semi_naive_estimate(count_table(1, 1, 1, 1), m, kAlphaHalf);
        CHECK(est.defined);
        CHECK(est.value == 0.0);
    }
    CHECK(semi_naive_estimate(count_table(1, 1, 1, 1), measure_id::eta,
                              kAlphaHalf, &cal_half())
              .value == 0.0);
    CHECK(semi_naive_estimate(count_table(5, 0, 0, 5), measure_id::lambda,
                              kAlphaHalf)
              .value == 121.0);
}

TEST_CASE("semi-naive consistency at large N") {
    const prob_table truth = make_prob_table(3, 1, 1, 3);
    rng_stream rng(41, 0);
    const count_table big = rng.next_multinomial(truth, 100000);
    for (auto m : {measure_id::dprime, measure_id::r, measure_id::q}) {
        const auto est = semi_naive_estimate(big, m, kAlphaHalf);
        double want = 0.0;
        switch (m) {
            case measure_id::dprime: want = d_prime(truth); break;
            case measure_id::r: want = correlation_r(truth); break;
            default: want = yules_q(truth); break;
        }
        CHECK(std::fabs(est.value - want) < 0.02);
    }
}

TEST_CASE("semi-naive approaches naive as alpha vanishes") {
    const count_table tn(7, 3, 2, 8);
    const auto tiny = dirichlet_params::symmetric(1e-6);
    for (auto m : {measure_id::d, measure_id::dprime, measure_id::r,
                   measure_id::q, measure_id::lambda, measure_id::mi}) {
        const auto sne = semi_naive_estimate(tn, m, tiny);
        const auto ne = naive_estimate(tn, m);
        CHECK_MESSAGE(std::fabs(sne.value - ne.value) < 1e-4,
                      "measure ", static_cast<int>(m));
    }
}

TEST_CASE("Bayes estimates") {
    CHECK_THROWS_AS(bayes_estimate(count_table(1, 1, 1, 1), measure_id::d,
                                   kAlphaOne, 100, 7),
                    error);

    const auto d = bayes_estimate(count_table(1, 1, 1, 1), measure_id::d,
                                  kAlphaOne, 20000, 7);
    CHECK(std::fabs(d.value) <= 3.0 * d.std_error);

    const auto eta = bayes_estimate(count_table(1, 1, 1, 1), measure_id::eta,
                                    kAlphaOne, 20000, 7, &cal_one());
    CHECK(std::fabs(eta.value) <= 3.0 * eta.std_error);

    // deterministic given the seed
    const auto again = bayes_estimate(count_table(1, 1, 1, 1), measure_id::eta,
                                      kAlphaOne, 20000, 7, &cal_one());
    CHECK(again.value == eta.value);
    const auto other = bayes_estimate(count_table(1, 1, 1, 1), measure_id::eta,
                                      kAlphaOne, 20000, 8, &cal_one());
    CHECK(other.value != eta.value);
}

TEST_CASE("Bayes estimate against a high-precision oracle run") {
    const count_table tn(9, 1, 1, 1);
    const auto est = bayes_estimate(tn, measure_id::dprime, kAlphaHalf, 20000, 5,
                                    &cal_half());
    const auto oracle_run = bayes_estimate(tn, measure_id::dprime, kAlphaHalf,
                                           10000000, 6, &cal_half());
    const double band =
        3.0 * std::sqrt(est.std_error * est.std_error +
                        oracle_run.std_error * oracle_run.std_error);
    CHECK(std::fabs(est.value - oracle_run.value) < band);
}

TEST_CASE("table probability values") {
    // uniform prior: constant weight on the fiber
    for_each_table(3, [&](const count_table& t) {
        CHECK(table_probability(t, kAlphaOne) == 1.0 / 20.0);
    });
    rng_stream rng(42, 0);
    for (int i = 0; i < 100; ++i) {
        const auto t = rng.next_multinomial(make_prob_table(2, 1, 1, 2), 50);
        CHECK(table_probability(t, kAlphaOne) == 1.0 / binom3(50));
    }
    // the generic log-gamma route agrees with the constant fast path
    for_each_table(12, [&](const count_table& t) {
        CHECK(std::exp(detail::log_table_probability_generic(t, kAlphaOne)) ==
              doctest::Approx(1.0 / binom3(12)).epsilon(1e-12));
    });
}

TEST_CASE("table probabilities sum to one over the fiber") {
    for (uint32_t n : {5u, 10u, 20u, 30u}) {
        for (double a : {0.5, 1.0, 2.0}) {
            const auto ap = dirichlet_params::symmetric(a);
            double sum = 0.0;
            for_each_table(n, [&](const count_table& t) {
                sum += table_probability(t, ap);
            });
            CHECK_MESSAGE(std::fabs(sum - 1.0) < 1e-10, "N = ", n, " alpha = ", a);
        }
    }
    // asymmetric concentrations normalize too
    const dirichlet_params ap(0.5, 1.5, 2.0, 0.7);
    double sum = 0.0;
    for_each_table(15, [&](const count_table& t) {
        sum += table_probability(t, ap);
    });
    CHECK(std::fabs(sum - 1.0) < 1e-10);
}

TEST_CASE("volume eta: symmetric counts sit exactly at the center") {
    for (uint32_t k : {1u, 2u, 3u}) {
        const count_table t(k, k, k, k);
        CHECK(volume_eta_estimate(t, kAlphaHalf).value == 0.0);
        CHECK(volume_eta_estimate(t, kAlphaOne).value == 0.0);
    }
}

TEST_CASE("volume eta equals the exact rational enumeration at N = 12") {
    const uint32_t obs[4] = {9, 1, 1, 1};
    const count_table tn(9, 1, 1, 1);
    const double want_half = oracle::exact_volume::eta(obs, 1, 2);
    const double want_one = oracle::exact_volume::eta(obs, 1, 1);
    // frozen from an independent rational enumeration: 3370563/6815744, 23/35
    CHECK(want_half == doctest::Approx(0.49452605614295375).epsilon(1e-15));
    CHECK(want_one == doctest::Approx(23.0 / 35.0).epsilon(1e-15));
    CHECK(volume_eta_estimate(tn, kAlphaHalf).value == want_half);
    CHECK(volume_eta_estimate(tn, kAlphaOne).value == want_one);
}

TEST_CASE("volume eta flips sign under a row swap") {
    rng_stream rng(43, 0);
    for (int i = 0; i < 20; ++i) {
        const auto t = rng.next_multinomial(
            rng.next_dirichlet(kAlphaHalf), 30 + 5 * i);
        const double v = volume_eta_estimate(t, kAlphaHalf).value;
        const double w = volume_eta_estimate(swap_rows(t), kAlphaHalf).value;
        CHECK(v == -w);
    }
}

TEST_CASE("volume eta with uniform prior equals constant-weight counting") {
    // every fiber table carries weight 1/C(N+3,3) under the uniform prior
    const count_table tn(7, 2, 1, 2);
    const uint32_t n = tn.total();
    const double lam0 = count_odds_ratio_hat(tn, kAlphaOne);
    double signed_count = 0.0;
    for_each_table(n, [&](const count_table& t) {
        const double lam = count_odds_ratio_hat(t, kAlphaOne);
        if (lam < lam0) signed_count += 1.0;
        else if (lam > lam0) signed_count -= 1.0;
    });
    const double want = signed_count / static_cast<double>(binom3(n));
    CHECK(volume_eta_estimate(tn, kAlphaOne).value ==
          doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("volume eta budget") {
    const count_table big(200, 150, 100, 51);
    CHECK_THROWS_AS(volume_eta_estimate(big, kAlphaHalf, 400), error);
    try {
        volume_eta_estimate(big, kAlphaHalf, 400);
        FAIL("expected budget error");
    } catch (const error& e) {
        CHECK(e.code() == errc::budget_exceeded);
    }
    CHECK(volume_eta_estimate(big, kAlphaHalf, 501).defined);
}

TEST_CASE("volume fiber cache agrees with the direct estimator") {
    const uint32_t n = 30;
    const volume_eta_table cache(n, kAlphaHalf);
    rng_stream rng(44, 0);
    for (int i = 0; i < 50; ++i) {
        const auto t = rng.next_multinomial(rng.next_dirichlet(kAlphaHalf), n);
        const double direct = volume_eta_estimate(t, kAlphaHalf).value;
        CHECK(cache.estimate(t) == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK_THROWS_AS(cache.estimate(count_table(1, 1, 1, 1)), error);
}

TEST_CASE("volume D-prime examples") {
    // fiber of (9,1,1,1): n00 in {8,9,10}, positive sign at {9,10}
    CHECK(volume_dprime_estimate(count_table(9, 1, 1, 1)).value == 0.25);

    // D = 0 maps to zero by the sign convention
    CHECK(volume_dprime_estimate(count_table(2, 2, 2, 2)).value == 0.0);

    // the boundary table is not pushed to the extreme, unlike naive plug-in
    const auto ve = volume_dprime_estimate(count_table(5, 0, 0, 5));
    CHECK(ve.value == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(std::fabs(ve.value) < 1.0);
    CHECK(std::fabs(naive_estimate(count_table(5, 0, 0, 5), measure_id::dprime)
                        .value) == 1.0);

    CHECK_THROWS_AS(volume_dprime_estimate(count_table(0, 0, 5, 5)), error);
    try {
        volume_dprime_estimate(count_table(0, 0, 5, 5));
        FAIL("expected degenerate marginals");
    } catch (const error& e) {
        CHECK(e.code() == errc::degenerate_marginals);
    }
}

TEST_CASE("estimators are equivariant under the dihedral group") {
    rng_stream rng(45, 0);
    for (int i = 0; i < 40; ++i) {
        const auto t = rng.next_multinomial(rng.next_dirichlet(kAlphaOne), 24);
        const auto tr = transpose(t);
        const auto sw = swap_rows(t);

        for (auto m : {measure_id::d, measure_id::dprime, measure_id::r,
                       measure_id::q}) {
            const auto base_ne = naive_estimate(t, m);
            if (base_ne.defined) {
                CHECK(naive_estimate(tr, m).value == base_ne.value);
                CHECK(naive_estimate(sw, m).value == -base_ne.value);
            }
            const auto base_sne = semi_naive_estimate(t, m, kAlphaHalf);
            CHECK(semi_naive_estimate(tr, m, kAlphaHalf).value == base_sne.value);
            CHECK(semi_naive_estimate(sw, m, kAlphaHalf).value == -base_sne.value);
        }
        const auto eta_sne =
            semi_naive_estimate(t, measure_id::eta, kAlphaHalf, &cal_half());
        CHECK(semi_naive_estimate(tr, measure_id::eta, kAlphaHalf, &cal_half())
                  .value == eta_sne.value);
        CHECK(semi_naive_estimate(sw, measure_id::eta, kAlphaHalf, &cal_half())
                  .value == -eta_sne.value);

        const double ve = volume_eta_estimate(t, kAlphaHalf).value;
        CHECK(volume_eta_estimate(tr, kAlphaHalf).value == ve);
        CHECK(volume_eta_estimate(sw, kAlphaHalf).value == -ve);

        // lambda inverts under a swap
        const auto lam = semi_naive_estimate(t, measure_id::lambda, kAlphaHalf);
        const auto lam_sw = semi_naive_estimate(sw, measure_id::lambda, kAlphaHalf);
        CHECK(lam.value * lam_sw.value == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Bayes flips within Monte Carlo noise
    const count_table tn(12, 5, 3, 4);
    const auto be = bayes_estimate(tn, measure_id::dprime, kAlphaHalf, 50000, 9);
    const auto be_sw =
        bayes_estimate(swap_rows(tn), measure_id::dprime, kAlphaHalf, 50000, 10);
    const double band = 5.0 * std::sqrt(be.std_error * be.std_error +
                                        be_sw.std_error * be_sw.std_error);
    CHECK(std::fabs(be.value + be_sw.value) < band);
}

TEST_CASE("all estimator families converge with sample size") {
    rng_stream rng(46, 0);
    const int tables = 20;
    std::vector<prob_table> truths;
    for (int i = 0; i < tables; ++i)
        truths.push_back(rng.next_dirichlet(kAlphaOne));

    auto median_abs_err = [&](auto&& estimate_fn, uint32_t n) {
        std::vector<double> errs;
        for (int i = 0; i < tables; ++i) {
            rng_stream local(47, i);
            const count_table tn = local.next_multinomial(truths[i], n);
            const double want = d_prime(truths[i]);
            errs.push_back(std::fabs(estimate_fn(tn, i) - want));
        }
        std::nth_element(errs.begin(), errs.begin() + tables / 2, errs.end());
        return errs[tables / 2];
    };

    auto ne = [&](const count_table& tn, int) {
        return naive_estimate(tn, measure_id::dprime).value;
    };
    auto sne = [&](const count_table& tn, int) {
        return semi_naive_estimate(tn, measure_id::dprime, kAlphaHalf).value;
    };
    auto be = [&](const count_table& tn, int i) {
        return bayes_estimate(tn, measure_id::dprime, kAlphaHalf, 2000,
                              1000 + i)
            .value;
    };
    auto ve = [&](const count_table& tn, int) {
        return volume_dprime_estimate(tn).value;
    };
    for (auto& fn :
         std::vector<std::function<double(const count_table&, int)>>{ne, sne, be, ve}) {
        const double e2 = median_abs_err(fn, 100);
        const double e3 = median_abs_err(fn, 1000);
        const double e4 = median_abs_err(fn, 10000);
        CHECK(e3 < e2);
        CHECK(e4 < e3);
    }

    // volume eta within its budget: median error shrinks along 50 -> 500
    auto ve_eta = [&](uint32_t n) {
        std::vector<double> errs;
        const volume_eta_table cache(n, kAlphaOne);
        for (int i = 0; i < tables; ++i) {
            rng_stream local(48, i);
            const count_table tn = local.next_multinomial(truths[i], n);
            const double want = eta1(odds_ratio(truths[i]));
            errs.push_back(std::fabs(cache.estimate(tn) - want));
        }
        std::nth_element(errs.begin(), errs.begin() + tables / 2, errs.end());
        return errs[tables / 2];
    };
    const double v1 = ve_eta(50);
    const double v2 = ve_eta(200);
    const double v3 = ve_eta(500);
    CHECK(v2 < v1);
    CHECK(v3 < v2);
}

} // TEST_SUITE

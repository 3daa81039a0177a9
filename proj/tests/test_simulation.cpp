#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <vector>

#include "errors.hpp"
#include "measures.hpp"
#include "oracle_helpers.hpp"
#include "report_io.hpp"
#include "rng.hpp"
#include "simulation.hpp"

using namespace ldcanon;

TEST_SUITE("simulation") {

TEST_CASE("kendall tau matches brute force, with and without ties") {
    rng_stream rng(51, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const size_t n = 2 + static_cast<size_t>(rng.next_double() * 48);
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            // coarse grid forces plenty of ties
            x[i] = std::floor(rng.next_double() * 6) / 3.0;
            y[i] = std::floor(rng.next_double() * 5) / 2.0;
        }
        const double want = oracle::kendall_brute(x, y);
        CHECK(kendall_tau(x, y) == doctest::Approx(want).epsilon(1e-12));
    }
    // continuous data
    for (int trial = 0; trial < 20; ++trial) {
        const size_t n = 500;
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = rng.next_double();
            y[i] = 0.5 * x[i] + rng.next_double();
        }
        CHECK(kendall_tau(x, y) ==
              doctest::Approx(oracle::kendall_brute(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("kendall tau is invariant under monotone recalibration") {
    rng_stream rng(52, 0);
    const size_t n = 2000;
    std::vector<double> dp(n), lam(n), q(n);
    for (size_t i = 0; i < n; ++i) {
        const prob_table t = rng.next_dirichlet(dirichlet_params::symmetric(0.5));
        dp[i] = d_prime(t);
        lam[i] = odds_ratio(t);
        q[i] = yules_q(t);
    }
    // Q is a strictly increasing function of lambda, so the rank statistic
    // cannot move
    CHECK(kendall_tau(dp, lam) == kendall_tau(dp, q));
}

TEST_CASE("ks statistic sanity") {
    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
    CHECK(ks_uniform(grid, 0.0, 1.0) < 0.001);
    for (auto& v : grid) v = 0.5 * v;
    CHECK(ks_uniform(grid, 0.0, 1.0) > 0.4);
}

TEST_CASE("dirichlet sampler moments") {
    const uint64_t n = 100000;
    rng_stream rng(53, 0);
    double mean = 0.0;
    std::vector<double> maf(n);
    double sumsq = 0.0;
    for (uint64_t i = 0; i < n; ++i) {
        const prob_table t = rng.next_dirichlet(dirichlet_params::symmetric(0.5));
        const auto m = marginals(t);
        maf[i] = std::min(m.row0, m.row1);
        mean += t.p00();
        sumsq += t.p00() * t.p00();
    }
    mean /= n;
    // symmetric Dirichlet: mean 1/4, variance 3/(16 (4 alpha + 1))
    const double want_var = 3.0 / (16.0 * 3.0);
    const double got_var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean - 0.25) < 3.0 * std::sqrt(want_var / n));
    CHECK(std::fabs(got_var - want_var) < 3.0 * want_var * std::sqrt(2.0 / n));

    // Jeffreys prior: minor marginal frequency is uniform on (0, 1/2)
    CHECK(ks_uniform(maf, 0.0, 0.5) < 0.006);

    // alpha = 1 component means
    rng_stream rng2(54, 0);
    double mean2 = 0.0;
    for (uint64_t i = 0; i < n; ++i)
        mean2 += rng2.next_dirichlet(dirichlet_params::symmetric(1.0)).p11();
    mean2 /= n;
    CHECK(std::fabs(mean2 - 0.25) < 3.0 * std::sqrt(0.25 * 0.75 / 5.0 / n));
}

TEST_CASE("multinomial sampler") {
    rng_stream rng(55, 0);
    const prob_table uniform = make_prob_table(1, 1, 1, 1);
    const count_table one = rng.next_multinomial(uniform, 1);
    CHECK(one.total() == 1);

    // aggregated goodness of fit over 1000 draws of N = 400
    uint64_t cells[4] = {0, 0, 0, 0};
    for (int i = 0; i < 1000; ++i) {
        const count_table t = rng.next_multinomial(uniform, 400);
        for (int c = 0; c < 4; ++c) cells[c] += t[c];
    }
    const double expect = 1000.0 * 400.0 / 4.0;
    double chi2 = 0.0;
    for (auto c : cells) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 16.27); // chi-square(3) at p = 0.001

    const prob_table skew = make_prob_table(3, 1, 1, 3);
    double mean00 = 0.0;
    const int reps = 10000;
    for (int i = 0; i < reps; ++i)
        mean00 += rng.next_multinomial(skew, 100).n00() / 100.0;
    mean00 /= reps;
    const double se = std::sqrt(0.375 * 0.625 / 100.0 / reps);
    CHECK(std::fabs(mean00 - 0.375) < 3.0 * se);
}

TEST_CASE("config parsing") {
    const auto cfg = study_config::parse(
        "# comment\n"
        "prior_alphas = 1\n"
        "sample_sizes=20,50\n"
        "replicates=2000\n"
        "seed=99\n"
        "estimators=ne,sne\n"
        "estimator_alphas=0.5\n"
        "measures=dprime,q\n"
        "mc_samples=2000\n");
    CHECK(cfg.prior_alphas == std::vector<double>{1.0});
    CHECK(cfg.sample_sizes == std::vector<uint32_t>{20, 50});
    CHECK(cfg.replicates == 2000);
    CHECK(cfg.seed == 99);

    CHECK_THROWS_AS(study_config::parse("nonsense\n"), error);
    CHECK_THROWS_AS(study_config::parse("unknown_key=3\n"), error);
    CHECK_THROWS_AS(study_config::parse("replicates=abc\n"), error);

    // canonical text round-trips
    const auto echo = study_config::parse(cfg.canonical_text());
    CHECK(echo.canonical_text() == cfg.canonical_text());
}

TEST_CASE("mse study validation") {
    study_config cfg;
    cfg.replicates = 500; // below the reporting floor
    CHECK_THROWS_AS(run_mse_study(cfg, 1), error);
}

TEST_CASE("mse study determinism across worker counts") {
    study_config cfg;
    cfg.prior_alphas = {1.0};
    cfg.sample_sizes = {20};
    cfg.replicates = 1000;
    cfg.seed = 7;
    cfg.estimators = {"ne", "sne", "ve"};
    cfg.estimator_alphas = {0.5};
    cfg.measures = {"dprime", "q", "eta_half"};
    const auto a = run_mse_study(cfg, 1);
    const auto b = run_mse_study(cfg, 4);
    REQUIRE(a.rows.size() == b.rows.size());
    CHECK(to_csv(a) == to_csv(b));
    CHECK(to_json(a) == to_json(b));
    // a different seed must change the report
    cfg.seed = 8;
    const auto c = run_mse_study(cfg, 2);
    CHECK(to_csv(c) != to_csv(a));
}

TEST_CASE("mse study reproduces the basic estimator ordering") {
    study_config cfg;
    cfg.prior_alphas = {1.0};
    cfg.sample_sizes = {50};
    cfg.replicates = 2000;
    cfg.seed = 11;
    cfg.estimators = {"ne", "sne"};
    cfg.estimator_alphas = {1.0};
    cfg.measures = {"dprime", "q", "eta1"};
    const auto rep = run_mse_study(cfg, 2);
    std::map<std::string, double> mse;
    for (const auto& row : rep.rows) mse[row.measure + "/" + row.estimator] = row.mse;
    // naive is distinctly worse at this scale for every measure
    CHECK(mse.at("dprime/ne") > mse.at("dprime/sne"));
    CHECK(mse.at("q/ne") > mse.at("q/sne"));
    CHECK(mse.at("eta1/ne") > mse.at("eta1/sne"));
}

TEST_CASE("kendall study runs and validates bins") {
    study_config cfg;
    cfg.prior_alphas = {0.5};
    cfg.draws = 30000;
    cfg.seed = 12;
    const auto rep = run_kendall_study(cfg, 2);
    REQUIRE(rep.bins.size() == 5);
    const double paper[5] = {0.873, 0.905, 0.916, 0.930, 0.957};
    for (int b = 0; b < 5; ++b) {
        CHECK(rep.bins[b].count > 500);
        CHECK(std::fabs(rep.bins[b].tau - paper[b]) < 0.03);
    }
    // monotone trend across bins
    for (int b = 1; b < 5; ++b) CHECK(rep.bins[b].tau > rep.bins[b - 1].tau);

    // a sliver bin cannot be filled
    study_config bad = cfg;
    bad.draws = 10000;
    bad.bin_edges = {0.0, 0.4999, 0.49995, 0.5};
    CHECK_THROWS_AS(run_kendall_study(bad, 1), error);

    study_config malformed = cfg;
    malformed.bin_edges = {0.1, 0.5};
    CHECK_THROWS_AS(run_kendall_study(malformed, 1), error);
}

TEST_CASE("kendall study is deterministic") {
    study_config cfg;
    cfg.prior_alphas = {0.5};
    cfg.draws = 20000;
    cfg.seed = 13;
    const auto a = run_kendall_study(cfg, 1);
    const auto b = run_kendall_study(cfg, 3);
    CHECK(to_csv(a) == to_csv(b));
}

TEST_CASE("distribution study") {
    study_config cfg;
    cfg.prior_alphas = {0.5};
    cfg.draws = 50000;
    cfg.seed = 14;
    cfg.measures = {"eta_half", "dprime", "r", "q"};
    cfg.scatter_rows = 100;
    const auto rep = run_distribution_study(cfg, 2);
    REQUIRE(rep.hists.size() == 4);
    CHECK(rep.hists[0].measure == "eta_half");
    CHECK(rep.hists[0].ks_uniform < 0.01);
    // r concentrates near zero relative to eta (Remark 3): compare
    // interquartile ranges via the histograms
    auto iqr = [&](const measure_histogram& h) {
        uint64_t total = 0;
        for (auto c : h.bins) total += c;
        auto quantile = [&](double q) {
            uint64_t target = static_cast<uint64_t>(q * total), run = 0;
            for (int b = 0; b < 64; ++b) {
                run += h.bins[b];
                if (run >= target) return -1.0 + (b + 0.5) / 32.0;
            }
            return 1.0;
        };
        return quantile(0.75) - quantile(0.25);
    };
    const auto& eta_h = rep.hists[0];
    const auto& r_h = rep.hists[2];
    CHECK(iqr(r_h) < iqr(eta_h));

    // scatter block is rectangular and bounded
    REQUIRE(rep.scatter.size() == 100);
    for (const auto& row : rep.scatter) {
        REQUIRE(row.size() == 4);
        for (double v : row) CHECK(std::fabs(v) <= 1.0);
    }

    // determinism across worker counts
    const auto again = run_distribution_study(cfg, 5);
    CHECK(to_json(again) == to_json(rep));
    CHECK(scatter_csv(again) == scatter_csv(rep));
    CHECK(histogram_csv(again) == histogram_csv(rep));

    study_config bad = cfg;
    bad.draws = 5000;
    CHECK_THROWS_AS(run_distribution_study(bad, 1), error);
}

TEST_CASE("study dispatcher writes files and a FAILED marker on errors") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "ldcanon_test_study";
    fs::remove_all(dir);

    study_config cfg;
    cfg.prior_alphas = {0.5};
    cfg.draws = 12000;
    cfg.seed = 3;
    cfg.measures = {"q"};
    run_study("distribution", cfg.canonical_text(), dir.string(), 2);
    CHECK(fs::exists(dir / "distribution_report.json"));
    CHECK(fs::exists(dir / "distribution_hist.csv"));
    CHECK(!fs::exists(dir / "FAILED"));

    const auto bad_dir = fs::temp_directory_path() / "ldcanon_test_study_bad";
    fs::remove_all(bad_dir);
    study_config bad;
    bad.prior_alphas = {1.0};
    bad.sample_sizes = {600}; // beyond the volume budget
    bad.replicates = 1000;
    bad.estimators = {"ve"};
    bad.measures = {"eta1"};
    CHECK_THROWS_AS(run_study("mse", bad.canonical_text(), bad_dir.string(), 1),
                    error);
    CHECK(fs::exists(bad_dir / "FAILED"));

    CHECK_THROWS_AS(run_study("nonsense", cfg.canonical_text(),
                              (fs::temp_directory_path() / "x").string(), 1),
                    error);
}

} // TEST_SUITE

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tables.hpp"

namespace ldcanon {

// Kendall's rank correlation (tau-b) in O(n log n) via merge-sort inversion
// counting; ties are handled in both coordinates.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// Kolmogorov-Smirnov statistic of a sample against the uniform law on
// [lo, hi].
double ks_uniform(std::vector<double> values, double lo, double hi);

// Flat key=value study description shared by the three study kinds.
struct study_config {
    std::vector<double> prior_alphas{0.5, 1.0, 2.0};
    std::vector<uint32_t> sample_sizes{50, 100, 500};
    uint32_t replicates = 10000;
    uint64_t seed = 1;
    std::vector<std::string> estimators{"ne", "sne", "be", "ve"};
    std::vector<double> estimator_alphas{0.5, 1.0};
    std::vector<std::string> measures{"eta1", "eta_half", "dprime", "r", "q"};
    uint64_t mc_samples = 20000;
    uint64_t draws = 100000;
    std::vector<double> bin_edges{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::string kendall_binning = "both"; // both | row | minall
    uint32_t volume_budget = 500;
    uint32_t scatter_rows = 5000;

    static study_config parse(const std::string& text);
    // canonical key=value rendering (stable across runs)
    std::string canonical_text() const;
};

struct mse_row {
    std::string measure;
    std::string estimator;
    std::optional<double> est_alpha; // absent for ne and volume dprime
    double prior_alpha = 0.0;
    uint32_t sample_size = 0;
    uint32_t replicates = 0;
    // squared-error mean with boundary-clamped naive values included, and
    // the variant excluding boundary values entirely
    double mse = 0.0, mc_se = 0.0;
    double mse_excl = 0.0, mc_se_excl = 0.0;
    uint32_t n_undefined = 0, n_boundary = 0;
};

struct mse_report {
    study_config config;
    std::vector<mse_row> rows;
    double wall_seconds = 0.0;
};

struct kendall_bin {
    double lo = 0.0, hi = 0.0;
    uint64_t count = 0;
    double tau = 0.0;
};

struct kendall_report {
    study_config config;
    std::vector<kendall_bin> bins;
    double wall_seconds = 0.0;
};

struct measure_histogram {
    std::string measure;
    std::array<uint64_t, 64> bins{};
    double ks_uniform = 0.0;
};

struct distribution_report {
    study_config config;
    std::vector<measure_histogram> hists; // equal-width bins on [-1, 1]
    std::array<uint64_t, 64> log_lambda_hist{};
    double log_lambda_lo = -15.0, log_lambda_hi = 15.0;
    std::vector<std::string> scatter_columns;
    std::vector<std::vector<double>> scatter;
    double wall_seconds = 0.0;
};

// Identical configs (including seed) produce bit-identical reports for any
// thread count: replicate i draws from substream hash(seed, i) and results
// are reduced in replicate order.
mse_report run_mse_study(const study_config& cfg, int threads = 1);
kendall_report run_kendall_study(const study_config& cfg, int threads = 1);
distribution_report run_distribution_study(const study_config& cfg,
                                           int threads = 1);

} // namespace ldcanon

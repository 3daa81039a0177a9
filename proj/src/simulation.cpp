#include "simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "estimators.hpp"
#include "eta.hpp"
#include "measures.hpp"
#include "rng.hpp"

namespace ldcanon {

// ---------------------------------------------------------------------------
// rank statistics

namespace {

// strict inversions (y_i > y_j for i < j) by stable merge sort
uint64_t count_inversions(std::vector<double>& v, std::vector<double>& tmp,
                          size_t lo, size_t hi) {
    if (hi - lo < 2) return 0;
    const size_t mid = lo + (hi - lo) / 2;
    uint64_t inv = count_inversions(v, tmp, lo, mid) +
                   count_inversions(v, tmp, mid, hi);
    size_t a = lo, b = mid, out = lo;
    while (a < mid && b < hi) {
        if (v[b] < v[a]) {
            inv += mid - a;
            tmp[out++] = v[b++];
        } else {
            tmp[out++] = v[a++];
        }
    }
    while (a < mid) tmp[out++] = v[a++];
    while (b < hi) tmp[out++] = v[b++];
    std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
    return inv;
}

uint64_t tie_pairs(std::vector<double> sorted) {
    uint64_t pairs = 0;
    size_t run = 1;
    for (size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            pairs += static_cast<uint64_t>(run) * (run - 1) / 2;
            run = 1;
        }
    }
    return pairs;
}

} // namespace

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n != y.size() || n < 2)
        fail(errc::invalid_argument, "Kendall tau needs two sequences of equal length >= 2");
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // ties in x, and joint ties, from runs of the sorted order
    uint64_t n1 = 0, n3 = 0;
    {
        size_t run_x = 1, run_xy = 1;
        for (size_t i = 1; i <= n; ++i) {
            const bool same_x = i < n && x[idx[i]] == x[idx[i - 1]];
            const bool same_xy = same_x && y[idx[i]] == y[idx[i - 1]];
            if (same_x) ++run_x;
            if (same_xy) ++run_xy;
            if (!same_xy) {
                n3 += static_cast<uint64_t>(run_xy) * (run_xy - 1) / 2;
                run_xy = 1;
            }
            if (!same_x) {
                n1 += static_cast<uint64_t>(run_x) * (run_x - 1) / 2;
                run_x = 1;
            }
        }
    }

    std::vector<double> ysorted(n), tmp(n);
    for (size_t i = 0; i < n; ++i) ysorted[i] = y[idx[i]];
    const uint64_t swaps = count_inversions(ysorted, tmp, 0, n);
    const uint64_t n2 = tie_pairs(ysorted); // sorted by the merge pass

    const double n0 = 0.5 * static_cast<double>(n) * (n - 1);
    const double conc_minus_disc = n0 - static_cast<double>(n1) -
                                   static_cast<double>(n2) +
                                   static_cast<double>(n3) -
                                   2.0 * static_cast<double>(swaps);
    const double denom = std::sqrt((n0 - static_cast<double>(n1)) *
                                   (n0 - static_cast<double>(n2)));
    if (denom == 0.0) return 0.0;
    return conc_minus_disc / denom;
}

double ks_uniform(std::vector<double> values, double lo, double hi) {
    if (values.empty() || !(hi > lo))
        fail(errc::invalid_argument, "KS needs a nonempty sample and lo < hi");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        const double f = (values[i] - lo) / (hi - lo);
        d = std::max(d, std::max((i + 1) / n - f, f - i / n));
    }
    return d;
}

// ---------------------------------------------------------------------------
// config

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(errc::parse_error, "bad numeric value for " + key + ": " + s);
    }
}

uint64_t parse_u64(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(errc::parse_error, "bad integer value for " + key + ": " + s);
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

study_config study_config::parse(const std::string& text) {
    study_config cfg;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(errc::parse_error, "expected key=value, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "prior_alpha" || key == "prior_alphas") {
            cfg.prior_alphas.clear();
            for (const auto& tok : split_list(value))
                cfg.prior_alphas.push_back(parse_double(tok, key));
        } else if (key == "sample_sizes") {
            cfg.sample_sizes.clear();
            for (const auto& tok : split_list(value))
                cfg.sample_sizes.push_back(static_cast<uint32_t>(parse_u64(tok, key)));
        } else if (key == "replicates") {
            cfg.replicates = static_cast<uint32_t>(parse_u64(value, key));
        } else if (key == "seed") {
            cfg.seed = parse_u64(value, key);
        } else if (key == "estimators") {
            cfg.estimators = split_list(value);
        } else if (key == "estimator_alphas") {
            cfg.estimator_alphas.clear();
            for (const auto& tok : split_list(value))
                cfg.estimator_alphas.push_back(parse_double(tok, key));
        } else if (key == "measures") {
            cfg.measures = split_list(value);
        } else if (key == "mc_samples") {
            cfg.mc_samples = parse_u64(value, key);
        } else if (key == "draws") {
            cfg.draws = parse_u64(value, key);
        } else if (key == "bins" || key == "bin_edges") {
            cfg.bin_edges.clear();
            for (const auto& tok : split_list(value))
                cfg.bin_edges.push_back(parse_double(tok, key));
        } else if (key == "kendall_binning") {
            cfg.kendall_binning = value;
        } else if (key == "volume_budget") {
            cfg.volume_budget = static_cast<uint32_t>(parse_u64(value, key));
        } else if (key == "scatter_rows") {
            cfg.scatter_rows = static_cast<uint32_t>(parse_u64(value, key));
        } else {
            fail(errc::parse_error, "unknown study config key: " + key);
        }
    }
    return cfg;
}

std::string study_config::canonical_text() const {
    std::ostringstream out;
    auto join_d = [](const std::vector<double>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + fmt_double(v[i]);
        return s;
    };
    out << "prior_alphas=" << join_d(prior_alphas) << "\n";
    out << "sample_sizes=";
    for (size_t i = 0; i < sample_sizes.size(); ++i)
        out << (i ? "," : "") << sample_sizes[i];
    out << "\n";
    out << "replicates=" << replicates << "\n";
    out << "seed=" << seed << "\n";
    out << "estimators=";
    for (size_t i = 0; i < estimators.size(); ++i)
        out << (i ? "," : "") << estimators[i];
    out << "\n";
    out << "estimator_alphas=" << join_d(estimator_alphas) << "\n";
    out << "measures=";
    for (size_t i = 0; i < measures.size(); ++i)
        out << (i ? "," : "") << measures[i];
    out << "\n";
    out << "mc_samples=" << mc_samples << "\n";
    out << "draws=" << draws << "\n";
    out << "bin_edges=" << join_d(bin_edges) << "\n";
    out << "kendall_binning=" << kendall_binning << "\n";
    out << "volume_budget=" << volume_budget << "\n";
    out << "scatter_rows=" << scatter_rows << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// shared study machinery

namespace {

const eta_calibration& cal_eta1() {
    static const eta_calibration cal = eta_calibration::analytic(1.0);
    return cal;
}

const eta_calibration& cal_eta_half() {
    static const eta_calibration cal = eta_calibration::analytic(0.5);
    return cal;
}

struct measure_ref {
    std::string token;
    measure_id id = measure_id::d;
    const eta_calibration* cal = nullptr; // eta only
    double eta_alpha = 0.0;               // eta only
};

measure_ref resolve_measure(const std::string& token) {
    measure_ref m;
    m.token = token;
    if (token == "eta1") {
        m.id = measure_id::eta;
        m.cal = &cal_eta1();
        m.eta_alpha = 1.0;
    } else if (token == "eta_half") {
        m.id = measure_id::eta;
        m.cal = &cal_eta_half();
        m.eta_alpha = 0.5;
    } else if (token == "d") {
        m.id = measure_id::d;
    } else if (token == "dprime") {
        m.id = measure_id::dprime;
    } else if (token == "r") {
        m.id = measure_id::r;
    } else if (token == "q") {
        m.id = measure_id::q;
    } else if (token == "mi") {
        m.id = measure_id::mi;
    } else {
        fail(errc::parse_error, "unknown measure token: " + token);
    }
    return m;
}

double true_value(const measure_ref& m, const prob_table& t) {
    switch (m.id) {
        case measure_id::d: return d_coeff(t);
        case measure_id::dprime: return d_prime(t);
        case measure_id::r: return correlation_r(t);
        case measure_id::lambda: return odds_ratio(t);
        case measure_id::q: return yules_q(t);
        case measure_id::mi: return mutual_information(t);
        case measure_id::eta: return m.cal->eta(t);
    }
    fail(errc::invalid_argument, "unknown measure");
}

void run_workers(uint64_t jobs, int threads, const std::function<void(uint64_t)>& fn) {
    const int workers = std::max(1, threads);
    if (workers == 1) {
        for (uint64_t j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mu;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const uint64_t j = next.fetch_add(1);
                if (j >= jobs) return;
                try {
                    fn(j);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

// ---------------------------------------------------------------------------
// MSE study

namespace {

struct mse_row_plan {
    measure_ref measure;
    size_t measure_index = 0;
    estimator_family family = estimator_family::naive;
    std::optional<double> est_alpha;
};

const char* family_token(estimator_family f) {
    switch (f) {
        case estimator_family::naive: return "ne";
        case estimator_family::semi_naive: return "sne";
        case estimator_family::bayes: return "be";
        case estimator_family::volume: return "ve";
    }
    return "?";
}

} // namespace

mse_report run_mse_study(const study_config& cfg, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.replicates < 1000)
        fail(errc::invalid_argument, "reported MSE needs at least 1000 replicates");
    if (cfg.mc_samples < 1000)
        fail(errc::invalid_argument, "Bayes estimation needs at least 1000 samples");
    if (cfg.prior_alphas.empty() || cfg.sample_sizes.empty() ||
        cfg.measures.empty() || cfg.estimators.empty())
        fail(errc::parse_error, "mse study needs priors, sizes, measures and estimators");

    std::vector<measure_ref> measures;
    for (const auto& tok : cfg.measures) measures.push_back(resolve_measure(tok));

    // volume fibers depend on (N, alpha) only; build once, share across priors
    std::map<std::pair<uint32_t, double>, std::unique_ptr<volume_eta_table>> fibers;
    bool want_volume = false;
    for (const auto& e : cfg.estimators) {
        if (e == "ve") want_volume = true;
        else if (e != "ne" && e != "sne" && e != "be")
            fail(errc::parse_error, "unknown estimator token: " + e);
    }
    if (want_volume) {
        for (const auto& m : measures) {
            if (m.id != measure_id::eta) continue;
            for (uint32_t n : cfg.sample_sizes) {
                if (n > cfg.volume_budget)
                    fail(errc::budget_exceeded,
                         "volume estimation at N=" + std::to_string(n) +
                             " exceeds the configured budget");
                auto key = std::make_pair(n, m.eta_alpha);
                if (!fibers.count(key))
                    fibers[key] = std::make_unique<volume_eta_table>(
                        n, dirichlet_params::symmetric(m.eta_alpha));
            }
        }
    }

    // one row list per (prior, N) cell, identical structure in each cell
    std::vector<mse_row_plan> cell_rows;
    for (size_t mi = 0; mi < measures.size(); ++mi) {
        const auto& m = measures[mi];
        for (const auto& est : cfg.estimators) {
            if (est == "ne") {
                cell_rows.push_back({m, mi, estimator_family::naive, std::nullopt});
            } else if (est == "sne" || est == "be") {
                const auto fam = est == "sne" ? estimator_family::semi_naive
                                              : estimator_family::bayes;
                if (m.id == measure_id::eta) {
                    cell_rows.push_back({m, mi, fam, m.eta_alpha});
                } else {
                    for (double a : cfg.estimator_alphas)
                        cell_rows.push_back({m, mi, fam, a});
                }
            } else if (est == "ve") {
                if (m.id == measure_id::eta)
                    cell_rows.push_back({m, mi, estimator_family::volume, m.eta_alpha});
                else if (m.id == measure_id::dprime)
                    cell_rows.push_back({m, mi, estimator_family::volume, std::nullopt});
            }
        }
    }

    const size_t np = cfg.prior_alphas.size();
    const size_t nn = cfg.sample_sizes.size();
    const size_t rows_per_cell = cell_rows.size();
    const size_t total_rows = np * nn * rows_per_cell;
    const uint32_t reps = cfg.replicates;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> sq(total_rows * reps, nan);
    std::vector<uint8_t> boundary(total_rows * reps, 0);

    // resolve fiber pointers per cell row and N
    auto fiber_for = [&](const mse_row_plan& row, uint32_t n) -> const volume_eta_table* {
        if (row.family != estimator_family::volume || row.measure.id != measure_id::eta)
            return nullptr;
        return fibers.at(std::make_pair(n, row.measure.eta_alpha)).get();
    };

    run_workers(reps, threads, [&](uint64_t rep) {
        rng_stream rng(cfg.seed, rep);
        std::vector<double> truths(measures.size());
        for (size_t pi = 0; pi < np; ++pi) {
            const auto prior = dirichlet_params::symmetric(cfg.prior_alphas[pi]);
            const prob_table t = rng.next_dirichlet(prior);
            for (size_t mi = 0; mi < measures.size(); ++mi)
                truths[mi] = true_value(measures[mi], t);
            for (size_t ni = 0; ni < nn; ++ni) {
                const count_table counts = rng.next_multinomial(t, cfg.sample_sizes[ni]);
                const size_t cell_base = (pi * nn + ni) * rows_per_cell;

                // group Bayes rows by prior alpha: one posterior sample pass
                // serves every measure estimated under the same alpha
                std::map<double, std::vector<size_t>> bayes_groups;
                for (size_t ri = 0; ri < rows_per_cell; ++ri) {
                    const auto& plan = cell_rows[ri];
                    const size_t slot = (cell_base + ri) * reps + rep;
                    const double truth = truths[plan.measure_index];
                    try {
                        switch (plan.family) {
                            case estimator_family::naive: {
                                const auto est = naive_estimate(counts, plan.measure.id,
                                                                plan.measure.cal);
                                if (est.defined) {
                                    const double e = est.value - truth;
                                    sq[slot] = e * e;
                                    boundary[slot] = est.inflated ? 1 : 0;
                                }
                                break;
                            }
                            case estimator_family::semi_naive: {
                                const auto est = semi_naive_estimate(
                                    counts, plan.measure.id,
                                    dirichlet_params::symmetric(*plan.est_alpha),
                                    plan.measure.cal);
                                const double e = est.value - truth;
                                sq[slot] = e * e;
                                break;
                            }
                            case estimator_family::bayes:
                                bayes_groups[*plan.est_alpha].push_back(ri);
                                break;
                            case estimator_family::volume: {
                                double v;
                                if (plan.measure.id == measure_id::eta)
                                    v = fiber_for(plan, cfg.sample_sizes[ni])->estimate(counts);
                                else
                                    v = volume_dprime_estimate(counts).value;
                                const double e = v - truth;
                                sq[slot] = e * e;
                                break;
                            }
                        }
                    } catch (const error&) {
                        // recorded as an exclusion (slot stays NaN)
                    }
                }

                int group_index = 0;
                for (const auto& [est_alpha, row_ids] : bayes_groups) {
                    const uint64_t salt = 1 + (pi * nn + ni) * 8 + group_index++;
                    rng_stream be_rng(derive_seed(cfg.seed, rep, salt), 0);
                    const dirichlet_params post(
                        est_alpha + counts.n00(), est_alpha + counts.n01(),
                        est_alpha + counts.n10(), est_alpha + counts.n11());
                    std::vector<double> means(row_ids.size(), 0.0);
                    for (uint64_t s = 0; s < cfg.mc_samples; ++s) {
                        const prob_table draw = be_rng.next_dirichlet(post);
                        for (size_t g = 0; g < row_ids.size(); ++g) {
                            const auto& plan = cell_rows[row_ids[g]];
                            const double v = true_value(plan.measure, draw);
                            means[g] += (v - means[g]) / static_cast<double>(s + 1);
                        }
                    }
                    for (size_t g = 0; g < row_ids.size(); ++g) {
                        const auto& plan = cell_rows[row_ids[g]];
                        const size_t slot = (cell_base + row_ids[g]) * reps + rep;
                        const double e = means[g] - truths[plan.measure_index];
                        sq[slot] = e * e;
                    }
                }
            }
        }
    });

    mse_report report;
    report.config = cfg;
    for (size_t pi = 0; pi < np; ++pi)
        for (size_t ni = 0; ni < nn; ++ni)
            for (size_t ri = 0; ri < rows_per_cell; ++ri) {
                const auto& plan = cell_rows[ri];
                mse_row row;
                row.measure = plan.measure.token;
                row.estimator = family_token(plan.family);
                row.est_alpha = plan.est_alpha;
                row.prior_alpha = cfg.prior_alphas[pi];
                row.sample_size = cfg.sample_sizes[ni];
                row.replicates = reps;
                const size_t base = ((pi * nn + ni) * rows_per_cell + ri) * reps;
                double s1 = 0.0, s2 = 0.0, e1 = 0.0, e2 = 0.0;
                uint64_t c = 0, ce = 0;
                for (uint32_t rep = 0; rep < reps; ++rep) {
                    const double v = sq[base + rep];
                    if (std::isnan(v)) {
                        ++row.n_undefined;
                        continue;
                    }
                    s1 += v;
                    s2 += v * v;
                    ++c;
                    if (boundary[base + rep]) {
                        ++row.n_boundary;
                    } else {
                        e1 += v;
                        e2 += v * v;
                        ++ce;
                    }
                }
                auto finish = [](double sum, double sumsq, uint64_t count,
                                 double& mse, double& se) {
                    if (count == 0) {
                        mse = 0.0;
                        se = 0.0;
                        return;
                    }
                    mse = sum / static_cast<double>(count);
                    if (count > 1) {
                        const double var =
                            std::max(0.0, (sumsq - count * mse * mse) /
                                              static_cast<double>(count - 1));
                        se = std::sqrt(var / static_cast<double>(count));
                    } else {
                        se = 0.0;
                    }
                };
                finish(s1, s2, c, row.mse, row.mc_se);
                finish(e1, e2, ce, row.mse_excl, row.mc_se_excl);
                report.rows.push_back(std::move(row));
            }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// Kendall study

kendall_report run_kendall_study(const study_config& cfg, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.prior_alphas.empty())
        fail(errc::parse_error, "kendall study needs a prior");
    const auto& edges = cfg.bin_edges;
    if (edges.size() < 2 || edges.front() != 0.0 || edges.back() != 0.5)
        fail(errc::parse_error, "bins must cover (0, 0.5] without overlap");
    for (size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            fail(errc::parse_error, "bin edges must increase strictly");
    if (cfg.kendall_binning != "both" && cfg.kendall_binning != "row" &&
        cfg.kendall_binning != "minall")
        fail(errc::parse_error, "kendall_binning must be both, row or minall");

    const uint64_t draws = cfg.draws;
    const dirichlet_params prior = dirichlet_params::symmetric(cfg.prior_alphas.front());
    std::vector<double> dp(draws), lam(draws);
    std::vector<int8_t> bin(draws, -1);
    const int nbins = static_cast<int>(edges.size()) - 1;

    auto bin_of = [&](double minor) -> int {
        for (int b = 0; b < nbins; ++b)
            if (minor >= edges[b] && (minor < edges[b + 1] || b == nbins - 1))
                return b;
        return -1;
    };

    constexpr uint64_t kChunk = 4096;
    const uint64_t chunks = (draws + kChunk - 1) / kChunk;
    run_workers(chunks, threads, [&](uint64_t chunk) {
        rng_stream rng(cfg.seed, chunk);
        const uint64_t lo = chunk * kChunk;
        const uint64_t hi = std::min(draws, lo + kChunk);
        for (uint64_t i = lo; i < hi; ++i) {
            const prob_table t = rng.next_dirichlet(prior);
            const auto m = marginals(t);
            dp[i] = d_prime(t);
            lam[i] = odds_ratio(t);
            const double mr = std::min(m.row0, m.row1);
            const double mc = std::min(m.col0, m.col1);
            if (cfg.kendall_binning == "both") {
                const int br = bin_of(mr), bc = bin_of(mc);
                bin[i] = br == bc ? static_cast<int8_t>(br) : int8_t{-1};
            } else if (cfg.kendall_binning == "row") {
                bin[i] = static_cast<int8_t>(bin_of(mr));
            } else {
                bin[i] = static_cast<int8_t>(bin_of(std::min(mr, mc)));
            }
        }
    });

    kendall_report report;
    report.config = cfg;
    for (int b = 0; b < nbins; ++b) {
        std::vector<double> xs, ys;
        for (uint64_t i = 0; i < draws; ++i)
            if (bin[i] == b) {
                xs.push_back(dp[i]);
                ys.push_back(lam[i]);
            }
        if (xs.size() < 100)
            fail(errc::insufficient_samples,
                 "marginal-frequency bin " + std::to_string(b) +
                     " received fewer than 100 tables");
        kendall_bin kb;
        kb.lo = edges[b];
        kb.hi = edges[b + 1];
        kb.count = xs.size();
        kb.tau = kendall_tau(xs, ys);
        report.bins.push_back(kb);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// distribution study

distribution_report run_distribution_study(const study_config& cfg, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.draws < 10000)
        fail(errc::insufficient_samples, "distribution study needs at least 10000 draws");
    if (cfg.prior_alphas.empty() || cfg.measures.empty())
        fail(errc::parse_error, "distribution study needs a prior and measures");

    std::vector<measure_ref> measures;
    for (const auto& tok : cfg.measures) measures.push_back(resolve_measure(tok));

    const uint64_t draws = cfg.draws;
    const dirichlet_params prior = dirichlet_params::symmetric(cfg.prior_alphas.front());
    std::vector<std::vector<double>> values(measures.size(),
                                            std::vector<double>(draws));
    std::vector<double> loglam(draws);

    constexpr uint64_t kChunk = 4096;
    const uint64_t chunks = (draws + kChunk - 1) / kChunk;
    run_workers(chunks, threads, [&](uint64_t chunk) {
        rng_stream rng(cfg.seed, chunk);
        const uint64_t lo = chunk * kChunk;
        const uint64_t hi = std::min(draws, lo + kChunk);
        for (uint64_t i = lo; i < hi; ++i) {
            const prob_table t = rng.next_dirichlet(prior);
            for (size_t mi = 0; mi < measures.size(); ++mi)
                values[mi][i] = true_value(measures[mi], t);
            loglam[i] = std::log(t.p00()) + std::log(t.p11()) -
                        std::log(t.p01()) - std::log(t.p10());
        }
    });

    distribution_report report;
    report.config = cfg;
    for (size_t mi = 0; mi < measures.size(); ++mi) {
        measure_histogram h;
        h.measure = measures[mi].token;
        for (double v : values[mi]) {
            int idx = static_cast<int>((v + 1.0) * 32.0);
            idx = std::min(63, std::max(0, idx));
            ++h.bins[idx];
        }
        h.ks_uniform = ks_uniform(values[mi], -1.0, 1.0);
        report.hists.push_back(std::move(h));
    }
    for (double u : loglam) {
        const double span = report.log_lambda_hi - report.log_lambda_lo;
        int idx = static_cast<int>((u - report.log_lambda_lo) / span * 64.0);
        idx = std::min(63, std::max(0, idx));
        ++report.log_lambda_hist[idx];
    }
    report.scatter_columns = cfg.measures;
    const uint64_t k = std::min<uint64_t>(cfg.scatter_rows, draws);
    report.scatter.reserve(k);
    for (uint64_t i = 0; i < k; ++i) {
        std::vector<double> row(measures.size());
        for (size_t mi = 0; mi < measures.size(); ++mi) row[mi] = values[mi][i];
        report.scatter.push_back(std::move(row));
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace ldcanon

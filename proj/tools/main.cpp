// ldcanon command line front-end. Talks to the shared library exclusively
// through the C API in ldcanon.h.
#include <atomic>
#include <cctype>
#include <cmath>
#include <ctime>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldcanon.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitFlags = 3;
constexpr int kExitNumeric = 4;

struct cli_error {
    int code;
    std::string message;
};

[[noreturn]] void die(int code, const std::string& msg) {
    throw cli_error{code, msg};
}

int exit_code_for(ldc_status st) {
    switch (st) {
        case LDC_OK: return kExitOk;
        case LDC_ERR_PARSE:
        case LDC_ERR_IO: return kExitInput;
        case LDC_ERR_INVALID_ARGUMENT: return kExitFlags;
        default: return kExitNumeric;
    }
}

void check(ldc_status st, const std::string& context) {
    if (st == LDC_OK) return;
    std::string detail = ldc_last_error();
    if (detail.empty()) detail = ldc_status_message(st);
    die(exit_code_for(st), context + ": " + detail);
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::vector<double> parse_doubles(const std::string& s, size_t expect) {
    const auto toks = split(s, ',');
    if (expect > 0 && toks.size() != expect)
        die(kExitInput, "expected " + std::to_string(expect) + " comma-separated values: " + s);
    std::vector<double> out;
    for (const auto& t : toks) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(t, &pos));
            if (pos != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            die(kExitInput, "bad numeric value: " + t);
        }
    }
    return out;
}

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) die(kExitInput, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) die(kExitInput, "cannot open for writing: " + path);
    out << content;
    if (!out) die(kExitInput, "failed writing: " + path);
}

// Every artifact-producing command drops a manifest next to its outputs.
void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::ordered_json& flags, uint64_t seed,
                    const nlohmann::ordered_json& input_digests,
                    const nlohmann::ordered_json& extra = {}) {
    nlohmann::ordered_json m;
    m["tool"] = "ldcanon";
    m["tool_version"] = ldc_version();
    m["command"] = command;
    m["flags"] = flags;
    m["seed"] = seed;
    m["input_digests"] = input_digests;
    m["timestamp"] = timestamp_utc();
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    write_file(path, m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// calibration handles

struct calibration_handle {
    ldc_calibration* ptr = nullptr;
    calibration_handle() = default;
    explicit calibration_handle(ldc_calibration* p) : ptr(p) {}
    calibration_handle(calibration_handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
    calibration_handle& operator=(calibration_handle&& o) noexcept {
        if (this != &o) {
            ldc_calibration_free(ptr);
            ptr = o.ptr;
            o.ptr = nullptr;
        }
        return *this;
    }
    calibration_handle(const calibration_handle&) = delete;
    calibration_handle& operator=(const calibration_handle&) = delete;
    ~calibration_handle() { ldc_calibration_free(ptr); }
};

calibration_handle make_calibration(double alpha, const std::string& method,
                                    double tol, uint64_t samples, uint64_t seed) {
    ldc_calibration* cal = nullptr;
    ldc_status st = LDC_OK;
    if (method == "analytic") {
        if (alpha == 1.0)
            st = ldc_calibrate(1.0, LDC_CALIB_ANALYTIC_1, 0, 0, 0, &cal);
        else if (alpha == 0.5)
            st = ldc_calibrate(0.5, LDC_CALIB_ANALYTIC_HALF, 0, 0, 0, &cal);
        else
            die(kExitFlags, "analytic calibration exists only for alpha 1 and 0.5");
    } else if (method == "quadrature") {
        st = ldc_calibrate(alpha, LDC_CALIB_QUADRATURE, tol, 0, 0, &cal);
    } else if (method == "mc" || method == "monte_carlo") {
        st = ldc_calibrate(alpha, LDC_CALIB_MONTE_CARLO, 0, samples, seed, &cal);
    } else {
        die(kExitFlags, "unknown calibration method: " + method);
    }
    check(st, "calibration failed");
    return calibration_handle(cal);
}

// analytic when possible, quadrature otherwise
calibration_handle default_calibration(double alpha) {
    if (alpha == 1.0 || alpha == 0.5)
        return make_calibration(alpha, "analytic", 0, 0, 0);
    return make_calibration(alpha, "quadrature", 1e-8, 0, 0);
}

// ---------------------------------------------------------------------------
// measure command

struct measure_request {
    std::string token;
    ldc_measure id = LDC_MEASURE_D;
    double eta_alpha = 0.0; // eta measures only
};

measure_request resolve_measure_token(const std::string& tok, double cli_alpha) {
    measure_request m;
    m.token = tok;
    if (tok == "d") m.id = LDC_MEASURE_D;
    else if (tok == "dprime") m.id = LDC_MEASURE_DPRIME;
    else if (tok == "r") m.id = LDC_MEASURE_R;
    else if (tok == "lambda") m.id = LDC_MEASURE_LAMBDA;
    else if (tok == "q") m.id = LDC_MEASURE_Q;
    else if (tok == "mi") m.id = LDC_MEASURE_MI;
    else if (tok == "eta1") { m.id = LDC_MEASURE_ETA; m.eta_alpha = 1.0; }
    else if (tok == "eta_half") { m.id = LDC_MEASURE_ETA; m.eta_alpha = 0.5; }
    else if (tok == "eta") { m.id = LDC_MEASURE_ETA; m.eta_alpha = cli_alpha; }
    else die(kExitInput, "unknown measure: " + tok);
    return m;
}

struct measure_outcome {
    std::string token;
    std::optional<double> value;
    bool defined = true;
    bool inflated = false;
};

int cmd_measure(const std::string& probs_arg, const std::string& counts_arg,
                const std::string& measures_arg, double alpha,
                const std::string& estimator, uint64_t mc_samples, uint64_t seed,
                const std::string& calibration_file, uint32_t volume_budget,
                const std::string& format) {
    if (!probs_arg.empty() && !counts_arg.empty())
        die(kExitFlags, "--probs and --counts are mutually exclusive");
    if (probs_arg.empty() && counts_arg.empty())
        die(kExitFlags, "one of --probs or --counts is required");

    std::vector<measure_request> requests;
    for (const auto& tok : split(measures_arg, ','))
        requests.push_back(resolve_measure_token(tok, alpha));

    // calibrations keyed by eta alpha, shared across requests
    std::map<double, calibration_handle> cals;
    auto cal_for = [&](double a) -> ldc_calibration* {
        auto it = cals.find(a);
        if (it == cals.end()) {
            calibration_handle h;
            if (!calibration_file.empty()) {
                ldc_calibration* p = nullptr;
                check(ldc_calibration_load(calibration_file.c_str(), &p),
                      "loading calibration");
                if (ldc_calibration_alpha(p) != a) {
                    ldc_calibration_free(p);
                    die(kExitFlags, "calibration file alpha does not match requested eta alpha");
                }
                h = calibration_handle(p);
            } else {
                h = default_calibration(a);
            }
            it = cals.emplace(a, std::move(h)).first;
        }
        return it->second.ptr;
    };

    std::vector<measure_outcome> outcomes;
    nlohmann::ordered_json input;

    if (!probs_arg.empty()) {
        const auto raw = parse_doubles(probs_arg, 4);
        double table[4];
        check(ldc_prob_table_make(raw.data(), table), "building probability table");
        input["type"] = "probs";
        input["table"] = {table[0], table[1], table[2], table[3]};
        for (const auto& req : requests) {
            measure_outcome out;
            out.token = req.token;
            double v = 0.0;
            if (req.id == LDC_MEASURE_ETA)
                check(ldc_calibration_eta_table(cal_for(req.eta_alpha), table, &v),
                      "evaluating " + req.token);
            else
                check(ldc_measure_prob(table, req.id, &v), "evaluating " + req.token);
            out.value = v;
            outcomes.push_back(out);
        }
    } else {
        const auto raw = parse_doubles(counts_arg, 4);
        uint32_t counts[4];
        for (int i = 0; i < 4; ++i) {
            if (raw[i] < 0 || raw[i] != std::floor(raw[i]))
                die(kExitInput, "counts must be non-negative integers");
            counts[i] = static_cast<uint32_t>(raw[i]);
        }
        input["type"] = "counts";
        input["table"] = {counts[0], counts[1], counts[2], counts[3]};
        input["estimator"] = estimator;
        input["alpha"] = alpha;

        ldc_estimator_spec spec{};
        if (estimator == "ne") spec.family = LDC_EST_NAIVE;
        else if (estimator == "sne") spec.family = LDC_EST_SEMI_NAIVE;
        else if (estimator == "be") spec.family = LDC_EST_BAYES;
        else if (estimator == "ve") spec.family = LDC_EST_VOLUME;
        else die(kExitFlags, "unknown estimator: " + estimator);
        for (double& a : spec.alpha) a = alpha;
        spec.mc_samples = mc_samples;
        spec.seed = seed;
        spec.volume_budget = volume_budget;

        for (const auto& req : requests) {
            measure_outcome out;
            out.token = req.token;
            ldc_estimate_result res{};
            const ldc_calibration* cal =
                req.id == LDC_MEASURE_ETA && spec.family != LDC_EST_VOLUME
                    ? cal_for(req.eta_alpha)
                    : nullptr;
            // the volume family pins its own prior to the measure alpha
            ldc_estimator_spec s = spec;
            if (req.id == LDC_MEASURE_ETA && spec.family == LDC_EST_VOLUME)
                for (double& a : s.alpha) a = req.eta_alpha;
            check(ldc_estimate(counts, req.id, &s, cal, &res),
                  "estimating " + req.token);
            out.defined = res.defined != 0;
            out.inflated = res.inflated != 0;
            if (out.defined) out.value = res.value;
            outcomes.push_back(out);
        }
    }

    if (format == "json") {
        std::string o = "{\n  \"input\": " + input.dump() + ",\n  \"measures\": {\n";
        for (size_t i = 0; i < outcomes.size(); ++i) {
            const auto& m = outcomes[i];
            o += "    \"" + m.token + "\": {\"value\": " +
                 (m.value ? g17(*m.value) : std::string("null")) +
                 ", \"defined\": " + (m.defined ? "true" : "false") +
                 ", \"inflated\": " + (m.inflated ? "true" : "false") + "}";
            o += i + 1 < outcomes.size() ? ",\n" : "\n";
        }
        o += "  }\n}\n";
        std::cout << o;
    } else if (format == "csv") {
        std::cout << "measure,value,defined,inflated\n";
        for (const auto& m : outcomes)
            std::cout << m.token << ',' << (m.value ? g17(*m.value) : std::string())
                      << ',' << (m.defined ? 1 : 0) << ',' << (m.inflated ? 1 : 0)
                      << '\n';
    } else {
        die(kExitFlags, "unknown format: " + format);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pairwise command

struct haplotype_matrix {
    std::vector<std::string> markers;
    // rows[h][m] in {0, 1, -1 (missing)}
    std::vector<std::vector<int8_t>> rows;
};

haplotype_matrix parse_haplotype_tsv(const std::string& text) {
    haplotype_matrix hm;
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) die(kExitInput, "empty haplotype file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    hm.markers = split(line, '\t');
    if (hm.markers.empty()) die(kExitInput, "haplotype file has no markers");
    std::map<std::string, int> seen;
    for (const auto& m : hm.markers)
        if (++seen[m] > 1) die(kExitInput, "duplicate marker id: " + m);
    size_t lineno = 1;
    while (std::getline(ss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, '\t');
        if (cells.size() != hm.markers.size())
            die(kExitInput, "row " + std::to_string(lineno) + " has " +
                                std::to_string(cells.size()) + " cells, expected " +
                                std::to_string(hm.markers.size()));
        std::vector<int8_t> row(cells.size());
        for (size_t i = 0; i < cells.size(); ++i) {
            if (cells[i] == "0") row[i] = 0;
            else if (cells[i] == "1") row[i] = 1;
            else if (cells[i] == ".") row[i] = -1;
            else
                die(kExitInput, "row " + std::to_string(lineno) +
                                    ": cell must be 0, 1 or '.', got: " + cells[i]);
        }
        hm.rows.push_back(std::move(row));
    }
    if (hm.rows.empty()) die(kExitInput, "haplotype file has no data rows");
    return hm;
}

struct pair_result {
    uint32_t i = 0, j = 0;
    uint32_t n_complete = 0;
    std::optional<double> estimate;
};

int cmd_pairwise(const std::string& input_path, const std::string& out_path,
                 const std::string& measure_tok, const std::string& estimator,
                 double alpha, uint64_t mc_samples, uint64_t seed,
                 double min_maf, uint32_t min_n, uint64_t max_pairs,
                 const std::string& calibration_file, uint32_t volume_budget,
                 const std::string& format, int threads) {
    const std::string text = read_file(input_path);
    const haplotype_matrix hm = parse_haplotype_tsv(text);
    const size_t m = hm.markers.size();

    const measure_request req = resolve_measure_token(measure_tok, alpha);
    calibration_handle cal;
    if (req.id == LDC_MEASURE_ETA) {
        if (!calibration_file.empty()) {
            ldc_calibration* p = nullptr;
            check(ldc_calibration_load(calibration_file.c_str(), &p),
                  "loading calibration");
            cal = calibration_handle(p);
        } else {
            cal = default_calibration(req.eta_alpha);
        }
    }

    ldc_estimator_spec spec{};
    if (estimator == "ne") spec.family = LDC_EST_NAIVE;
    else if (estimator == "sne") spec.family = LDC_EST_SEMI_NAIVE;
    else if (estimator == "be") spec.family = LDC_EST_BAYES;
    else if (estimator == "ve") spec.family = LDC_EST_VOLUME;
    else die(kExitFlags, "unknown estimator: " + estimator);
    const double est_alpha =
        req.id == LDC_MEASURE_ETA && spec.family == LDC_EST_VOLUME ? req.eta_alpha
                                                                   : alpha;
    for (double& a : spec.alpha) a = est_alpha;
    spec.mc_samples = mc_samples;
    spec.seed = seed;
    spec.volume_budget = volume_budget;

    // per-marker minor allele frequency over its non-missing entries
    std::vector<double> maf(m, 0.0);
    for (size_t c = 0; c < m; ++c) {
        uint64_t ones = 0, present = 0;
        for (const auto& row : hm.rows) {
            if (row[c] < 0) continue;
            ++present;
            ones += row[c];
        }
        const double f = present > 0 ? static_cast<double>(ones) / present : 0.0;
        maf[c] = std::min(f, 1.0 - f);
    }

    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    for (uint32_t i = 0; i < m; ++i)
        for (uint32_t j = i + 1; j < m; ++j) {
            if (min_maf > 0.0 && (maf[i] < min_maf || maf[j] < min_maf)) continue;
            pairs.emplace_back(i, j);
            if (max_pairs > 0 && pairs.size() >= max_pairs) goto pairs_done;
        }
pairs_done:

    std::vector<pair_result> results(pairs.size());
    const int workers = std::max(1, threads);
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            const size_t k = next.fetch_add(1);
            if (k >= pairs.size()) return;
            const auto [i, j] = pairs[k];
            uint32_t counts[4] = {0, 0, 0, 0};
            for (const auto& row : hm.rows) {
                const int8_t a = row[i], b = row[j];
                if (a < 0 || b < 0) continue; // complete cases only
                ++counts[(a << 1) | b];
            }
            pair_result& res = results[k];
            res.i = i;
            res.j = j;
            res.n_complete = counts[0] + counts[1] + counts[2] + counts[3];
            if (res.n_complete == 0 || res.n_complete < min_n) continue;
            ldc_estimate_result er{};
            const ldc_status st = ldc_estimate(counts, req.id, &spec, cal.ptr, &er);
            if (st == LDC_OK && er.defined) res.estimate = er.value;
        }
    };
    if (workers == 1) {
        work();
    } else {
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::ostringstream out;
    if (format == "csv") {
        out << "marker_i,marker_j,n_complete,estimate\n";
        for (const auto& r : results)
            out << hm.markers[r.i] << ',' << hm.markers[r.j] << ',' << r.n_complete
                << ',' << (r.estimate ? g17(*r.estimate) : std::string()) << '\n';
    } else if (format == "json") {
        out << "{\n  \"measure\": \"" << measure_tok << "\",\n  \"pairs\": [\n";
        for (size_t k = 0; k < results.size(); ++k) {
            const auto& r = results[k];
            out << "    {\"marker_i\": \"" << hm.markers[r.i] << "\", \"marker_j\": \""
                << hm.markers[r.j] << "\", \"n_complete\": " << r.n_complete
                << ", \"estimate\": " << (r.estimate ? g17(*r.estimate) : std::string("null"))
                << '}' << (k + 1 < results.size() ? "," : "") << '\n';
        }
        out << "  ]\n}\n";
    } else {
        die(kExitFlags, "unknown format: " + format);
    }

    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        write_file(out_path, out.str());
        nlohmann::ordered_json flags;
        flags["input"] = input_path;
        flags["out"] = out_path;
        flags["measure"] = measure_tok;
        flags["estimator"] = estimator;
        flags["alpha"] = alpha;
        flags["mc_samples"] = mc_samples;
        flags["min_maf"] = min_maf;
        flags["min_n"] = min_n;
        flags["max_pairs"] = max_pairs;
        flags["format"] = format;
        nlohmann::ordered_json digests;
        digests[input_path] = hex64(fnv1a64(text));
        write_manifest(out_path + ".manifest.json", "pairwise", flags, seed, digests);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate command

int cmd_calibrate(double alpha, const std::string& method, double tol,
                  uint64_t samples, uint64_t seed, const std::string& out_path,
                  bool check_analytic, bool report_q_gap) {
    calibration_handle cal = make_calibration(alpha, method, tol, samples, seed);

    if (check_analytic) {
        if (alpha != 1.0 && alpha != 0.5)
            die(kExitFlags, "--check-analytic applies to alpha 1 and 0.5 only");
        double max_dev = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double lam = std::pow(10.0, -4.0 + 8.0 * i / 49.0);
            double got = 0.0;
            check(ldc_calibration_eta_lambda(cal.ptr, lam, &got), "cdf evaluation");
            const double want = alpha == 1.0 ? ldc_eta1(lam) : ldc_eta_half(lam);
            max_dev = std::max(max_dev, std::fabs(got - want));
        }
        std::cout << "analytic_max_deviation," << g17(max_dev) << '\n';
    }
    if (report_q_gap) {
        double gap = 0.0;
        check(ldc_q_eta_gap(cal.ptr, 1e-6, 1e6, 10001, &gap), "q-eta gap");
        std::cout << "q_eta_gap," << g17(gap) << '\n';
    }
    if (!out_path.empty()) {
        check(ldc_calibration_save(cal.ptr, out_path.c_str()), "saving calibration");
        nlohmann::ordered_json flags;
        flags["alpha"] = alpha;
        flags["method"] = method;
        flags["tol"] = tol;
        flags["samples"] = samples;
        flags["out"] = out_path;
        write_manifest(out_path + ".manifest.json", "calibrate", flags, seed, {});
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// study command

uint64_t config_seed(const std::string& config_text) {
    std::stringstream ss(config_text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t\r") + 1);
        if (key == "seed") {
            try {
                return std::stoull(line.substr(eq + 1));
            } catch (const std::exception&) {
                return 0;
            }
        }
    }
    return 1; // study default
}

int cmd_study(const std::string& kind, const std::string& config_path,
              const std::string& replay_path, const std::string& out_dir,
              int threads) {
    std::string effective_kind = kind;
    std::string config_text;
    std::string config_origin;

    if (!replay_path.empty()) {
        if (!config_path.empty() || !kind.empty())
            die(kExitFlags, "--replay replaces the kind and --config arguments");
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(read_file(replay_path));
            effective_kind = manifest.at("kind").get<std::string>();
            config_text = manifest.at("config_text").get<std::string>();
        } catch (const cli_error&) {
            throw;
        } catch (const std::exception& e) {
            die(kExitInput, "cannot replay manifest: " + std::string(e.what()));
        }
        config_origin = replay_path;
    } else {
        if (kind.empty()) die(kExitFlags, "study kind is required (mse|kendall|distribution)");
        if (config_path.empty()) die(kExitFlags, "--config is required");
        config_text = read_file(config_path);
        config_origin = config_path;
    }
    if (out_dir.empty()) die(kExitFlags, "--out is required");

    const auto t0 = std::chrono::steady_clock::now();
    check(ldc_study_run_text(effective_kind.c_str(), config_text.c_str(),
                             out_dir.c_str(), threads),
          "study failed");
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::ordered_json flags;
    flags["config"] = config_origin;
    flags["out"] = out_dir;
    flags["threads"] = threads;
    nlohmann::ordered_json digests;
    digests[config_origin] = hex64(fnv1a64(config_text));
    nlohmann::ordered_json extra;
    extra["kind"] = effective_kind;
    extra["config_text"] = config_text;
    extra["wall_seconds"] = wall;
    write_manifest((std::filesystem::path(out_dir) / "manifest.json").string(),
                   "study", flags, config_seed(config_text), digests, extra);
    std::cout << "study " << effective_kind << " written to " << out_dir << '\n';
    return kExitOk;
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("LDCANON_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t > 0) return t;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical linkage-disequilibrium measures for 2x2 tables"};
    app.require_subcommand(1);

    // measure
    auto* measure = app.add_subcommand("measure", "evaluate measures on one table");
    std::string probs_arg, counts_arg;
    std::string measures_arg = "eta_half,eta1,dprime,r,q,lambda,mi";
    double alpha = 0.5;
    std::string estimator = "sne";
    uint64_t mc_samples = 20000;
    uint64_t seed = 1;
    std::string calibration_file;
    uint32_t volume_budget = 500;
    std::string format = "json";
    measure->add_option("--probs", probs_arg, "four cell probabilities p00,p01,p10,p11");
    measure->add_option("--counts", counts_arg, "four cell counts n00,n01,n10,n11");
    measure->add_option("--measures", measures_arg, "comma list of measures");
    measure->add_option("--alpha", alpha, "calibrating/estimator concentration");
    measure->add_option("--estimator", estimator, "ne|sne|be|ve (counts input)");
    measure->add_option("--mc-samples", mc_samples, "Bayes sample count");
    measure->add_option("--seed", seed, "random seed");
    measure->add_option("--calibration", calibration_file, "calibration file for eta");
    measure->add_option("--volume-budget", volume_budget, "volume estimator N cap");
    measure->add_option("--format", format, "json|csv");

    // pairwise
    auto* pairwise = app.add_subcommand("pairwise", "pairwise LD over a haplotype TSV");
    std::string pw_input, pw_out;
    std::string pw_measure = "eta_half";
    std::string pw_estimator = "sne";
    double pw_alpha = 0.5;
    uint64_t pw_mc = 20000, pw_seed = 1, pw_max_pairs = 0;
    double pw_min_maf = 0.0;
    uint32_t pw_min_n = 1, pw_budget = 500;
    std::string pw_cal, pw_format = "csv";
    int pw_threads = 0;
    pairwise->add_option("input", pw_input, "haplotype TSV file")->required();
    pairwise->add_option("--out", pw_out, "output file (default stdout)");
    pairwise->add_option("--measure", pw_measure, "measure to estimate");
    pairwise->add_option("--estimator", pw_estimator, "ne|sne|be|ve");
    pairwise->add_option("--alpha", pw_alpha, "estimator concentration");
    pairwise->add_option("--mc-samples", pw_mc, "Bayes sample count");
    pairwise->add_option("--seed", pw_seed, "random seed");
    pairwise->add_option("--min-maf", pw_min_maf, "skip markers below this MAF");
    pairwise->add_option("--min-n", pw_min_n, "null estimate below this complete-case N");
    pairwise->add_option("--max-pairs", pw_max_pairs, "emit at most this many pairs");
    pairwise->add_option("--calibration", pw_cal, "calibration file for eta");
    pairwise->add_option("--volume-budget", pw_budget, "volume estimator N cap");
    pairwise->add_option("--format", pw_format, "csv|json");
    pairwise->add_option("--threads", pw_threads, "worker threads");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "build an eta calibration");
    double cal_alpha = 0.5;
    std::string cal_method = "quadrature";
    double cal_tol = 1e-8;
    uint64_t cal_samples = 200000, cal_seed = 1;
    std::string cal_out;
    bool cal_check_analytic = false, cal_q_gap = false;
    calibrate->add_option("--alpha", cal_alpha, "symmetric concentration")->required();
    calibrate->add_option("--method", cal_method, "quadrature|mc|analytic");
    calibrate->add_option("--tol", cal_tol, "quadrature tolerance");
    calibrate->add_option("--samples", cal_samples, "Monte Carlo sample count");
    calibrate->add_option("--seed", cal_seed, "Monte Carlo seed");
    calibrate->add_option("--out", cal_out, "write calibration file");
    calibrate->add_flag("--check-analytic", cal_check_analytic,
                        "report max deviation from the analytic form");
    calibrate->add_flag("--report-q-gap", cal_q_gap,
                        "report max |Q - eta| over the standard grid");

    // study
    auto* study = app.add_subcommand("study", "run a simulation study");
    std::string st_kind, st_config, st_replay, st_out;
    int st_threads = 0;
    study->add_option("kind", st_kind, "mse|kendall|distribution");
    study->add_option("--config", st_config, "key=value config file");
    study->add_option("--replay", st_replay, "re-run a study from its manifest");
    study->add_option("--out", st_out, "output directory")->required();
    study->add_option("--threads", st_threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitInput;
    }

    try {
        if (measure->parsed())
            return cmd_measure(probs_arg, counts_arg, measures_arg, alpha, estimator,
                               mc_samples, seed, calibration_file, volume_budget,
                               format);
        if (pairwise->parsed())
            return cmd_pairwise(pw_input, pw_out, pw_measure, pw_estimator, pw_alpha,
                                pw_mc, pw_seed, pw_min_maf, pw_min_n, pw_max_pairs,
                                pw_cal, pw_budget, pw_format,
                                resolve_threads(pw_threads));
        if (calibrate->parsed())
            return cmd_calibrate(cal_alpha, cal_method, cal_tol, cal_samples,
                                 cal_seed, cal_out, cal_check_analytic, cal_q_gap);
        if (study->parsed())
            return cmd_study(st_kind, st_config, st_replay, st_out,
                             resolve_threads(st_threads));
        die(kExitFlags, "no subcommand given");
    } catch (const cli_error& e) {
        std::cerr << "error: " << e.message << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}

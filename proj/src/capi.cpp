#include "ldcanon.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "dilog.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "eta.hpp"
#include "measures.hpp"
#include "report_io.hpp"
#include "simulation.hpp"
#include "tables.hpp"

using namespace ldcanon;

struct ldc_calibration {
    eta_calibration impl;
};

namespace {

constexpr const char* kVersion = "1.0.0";

thread_local std::string tl_last_error;

ldc_status map_code(errc code) {
    switch (code) {
        case errc::invalid_argument: return LDC_ERR_INVALID_ARGUMENT;
        case errc::non_positive_entry: return LDC_ERR_NON_POSITIVE_ENTRY;
        case errc::not_normalized: return LDC_ERR_NOT_NORMALIZED;
        case errc::non_positive_scale: return LDC_ERR_NON_POSITIVE_SCALE;
        case errc::non_positive_lambda: return LDC_ERR_NON_POSITIVE_LAMBDA;
        case errc::quadrature_failure: return LDC_ERR_QUADRATURE_FAILURE;
        case errc::insufficient_samples: return LDC_ERR_INSUFFICIENT_SAMPLES;
        case errc::budget_exceeded: return LDC_ERR_BUDGET_EXCEEDED;
        case errc::degenerate_marginals: return LDC_ERR_DEGENERATE_MARGINALS;
        case errc::parse_error: return LDC_ERR_PARSE;
        case errc::io_error: return LDC_ERR_IO;
    }
    return LDC_ERR_INTERNAL;
}

template <class Fn>
ldc_status guarded(Fn&& fn) {
    try {
        fn();
        return LDC_OK;
    } catch (const error& e) {
        tl_last_error = e.what();
        return map_code(e.code());
    } catch (const std::bad_alloc&) {
        tl_last_error = "out of memory";
        return LDC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        tl_last_error = e.what();
        return LDC_ERR_INTERNAL;
    }
}

prob_table table_from(const double t[4]) {
    return prob_table(t[0], t[1], t[2], t[3]);
}

dirichlet_params params_from(const double a[4]) {
    return dirichlet_params(a[0], a[1], a[2], a[3]);
}

count_table counts_from(const uint32_t c[4]) {
    return count_table(c[0], c[1], c[2], c[3]);
}

void require(bool ok, const char* what) {
    if (!ok) fail(errc::invalid_argument, what);
}

} // namespace

extern "C" {

const char* ldc_version(void) { return kVersion; }

const char* ldc_status_message(ldc_status status) {
    switch (status) {
        case LDC_OK: return "ok";
        case LDC_ERR_INVALID_ARGUMENT: return "invalid argument";
        case LDC_ERR_NON_POSITIVE_ENTRY: return "non-positive table entry";
        case LDC_ERR_NOT_NORMALIZED: return "table entries do not sum to one";
        case LDC_ERR_NON_POSITIVE_SCALE: return "non-positive selection scale";
        case LDC_ERR_NON_POSITIVE_LAMBDA: return "non-positive odds ratio";
        case LDC_ERR_QUADRATURE_FAILURE: return "quadrature failure";
        case LDC_ERR_INSUFFICIENT_SAMPLES: return "insufficient samples";
        case LDC_ERR_BUDGET_EXCEEDED: return "computation budget exceeded";
        case LDC_ERR_DEGENERATE_MARGINALS: return "degenerate marginals";
        case LDC_ERR_PARSE: return "parse error";
        case LDC_ERR_IO: return "i/o error";
        case LDC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* ldc_last_error(void) { return tl_last_error.c_str(); }

ldc_status ldc_prob_table_make(const double raw[4], double out[4]) {
    return guarded([&] {
        require(raw != nullptr && out != nullptr, "null pointer");
        const prob_table t = prob_table::from_raw(raw[0], raw[1], raw[2], raw[3]);
        for (int i = 0; i < 4; ++i) out[i] = t[i];
    });
}

ldc_status ldc_marginals(const double table[4], double out[4]) {
    return guarded([&] {
        require(table != nullptr && out != nullptr, "null pointer");
        const auto m = marginals(table_from(table));
        out[0] = m.row0;
        out[1] = m.row1;
        out[2] = m.col0;
        out[3] = m.col1;
    });
}

ldc_status ldc_selection_act(const double table[4], double mu, double nu,
                             double out[4]) {
    return guarded([&] {
        require(table != nullptr && out != nullptr, "null pointer");
        const prob_table t = selection_act(table_from(table), mu, nu);
        for (int i = 0; i < 4; ++i) out[i] = t[i];
    });
}

ldc_status ldc_apply_symmetry(const double table[4], ldc_symmetry s,
                              double out[4]) {
    return guarded([&] {
        require(table != nullptr && out != nullptr, "null pointer");
        require(s >= 0 && s < 8, "symmetry element out of range");
        const prob_table t =
            apply_symmetry(table_from(table), static_cast<symmetry_element>(s));
        for (int i = 0; i < 4; ++i) out[i] = t[i];
    });
}

int ldc_symmetry_sign(ldc_symmetry s) {
    return symmetry_sign(static_cast<symmetry_element>(s));
}

ldc_symmetry ldc_symmetry_compose(ldc_symmetry a, ldc_symmetry b) {
    return static_cast<ldc_symmetry>(symmetry_compose(
        static_cast<symmetry_element>(a), static_cast<symmetry_element>(b)));
}

ldc_status ldc_odds_ratio(const double table[4], double* out) {
    return guarded([&] {
        require(table != nullptr && out != nullptr, "null pointer");
        *out = odds_ratio(table_from(table));
    });
}

ldc_status ldc_canonical_representative(double lambda, double out[4]) {
    return guarded([&] {
        require(out != nullptr, "null pointer");
        const prob_table t = canonical_representative(lambda);
        for (int i = 0; i < 4; ++i) out[i] = t[i];
    });
}

ldc_status ldc_count_odds_ratio(const uint32_t counts[4], const double alpha[4],
                                double* out) {
    return guarded([&] {
        require(counts != nullptr && alpha != nullptr && out != nullptr,
                "null pointer");
        *out = count_odds_ratio_hat(counts_from(counts), params_from(alpha));
    });
}

ldc_status ldc_measure_prob(const double table[4], ldc_measure m, double* value) {
    return guarded([&] {
        require(table != nullptr && value != nullptr, "null pointer");
        const prob_table t = table_from(table);
        switch (m) {
            case LDC_MEASURE_D: *value = d_coeff(t); return;
            case LDC_MEASURE_DPRIME: *value = d_prime(t); return;
            case LDC_MEASURE_R: *value = correlation_r(t); return;
            case LDC_MEASURE_LAMBDA: *value = odds_ratio(t); return;
            case LDC_MEASURE_Q: *value = yules_q(t); return;
            case LDC_MEASURE_MI: *value = mutual_information(t); return;
            case LDC_MEASURE_ETA:
                fail(errc::invalid_argument,
                     "eta needs a calibration; use ldc_calibration_eta_table");
        }
        fail(errc::invalid_argument, "unknown measure");
    });
}

double ldc_dilog(double x) { return dilog(x); }
double ldc_eta1(double lambda) { return eta1(lambda); }
double ldc_eta_half(double lambda) { return eta_half(lambda); }

ldc_status ldc_lambda_density(double lambda, const double alpha[4],
                              double abs_tol, double* out) {
    return guarded([&] {
        require(alpha != nullptr && out != nullptr, "null pointer");
        *out = lambda_density(lambda, params_from(alpha), abs_tol);
    });
}

double ldc_lambda_density_uniform(double lambda) {
    return lambda_density_alpha1(lambda);
}

ldc_status ldc_calibrate(double alpha, ldc_calib_method method, double quad_tol,
                         uint64_t mc_samples, uint64_t seed,
                         ldc_calibration** out) {
    return guarded([&] {
        require(out != nullptr, "null pointer");
        *out = nullptr;
        eta_calibration cal = [&] {
            switch (method) {
                case LDC_CALIB_ANALYTIC_1:
                    require(alpha == 1.0, "analytic_1 requires alpha = 1");
                    return eta_calibration::analytic(1.0);
                case LDC_CALIB_ANALYTIC_HALF:
                    require(alpha == 0.5, "analytic_half requires alpha = 1/2");
                    return eta_calibration::analytic(0.5);
                case LDC_CALIB_QUADRATURE:
                    return eta_calibration::by_quadrature(
                        alpha, quad_tol > 0.0 ? quad_tol : 1e-8);
                case LDC_CALIB_MONTE_CARLO:
                    return eta_calibration::by_monte_carlo(
                        alpha, mc_samples > 0 ? mc_samples : 200000, seed);
            }
            fail(errc::invalid_argument, "unknown calibration method");
        }();
        *out = new ldc_calibration{std::move(cal)};
    });
}

ldc_status ldc_calibration_cdf(const ldc_calibration* cal, double lambda,
                               double* out) {
    return guarded([&] {
        require(cal != nullptr && out != nullptr, "null pointer");
        *out = cal->impl.cdf(lambda);
    });
}

ldc_status ldc_calibration_eta_lambda(const ldc_calibration* cal, double lambda,
                                      double* out) {
    return guarded([&] {
        require(cal != nullptr && out != nullptr, "null pointer");
        *out = cal->impl.eta_lambda(lambda);
    });
}

ldc_status ldc_calibration_eta_table(const ldc_calibration* cal,
                                     const double table[4], double* out) {
    return guarded([&] {
        require(cal != nullptr && table != nullptr && out != nullptr,
                "null pointer");
        *out = cal->impl.eta(table_from(table));
    });
}

double ldc_calibration_alpha(const ldc_calibration* cal) {
    return cal != nullptr ? cal->impl.alpha() : 0.0;
}

ldc_calib_method ldc_calibration_method(const ldc_calibration* cal) {
    if (cal == nullptr) return LDC_CALIB_ANALYTIC_1;
    return static_cast<ldc_calib_method>(cal->impl.method());
}

ldc_status ldc_calibration_save(const ldc_calibration* cal, const char* path) {
    return guarded([&] {
        require(cal != nullptr && path != nullptr, "null pointer");
        cal->impl.save_file(path);
    });
}

ldc_status ldc_calibration_load(const char* path, ldc_calibration** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null pointer");
        *out = new ldc_calibration{eta_calibration::load_file(path)};
    });
}

ldc_status ldc_q_eta_gap(const ldc_calibration* cal, double lambda_min,
                         double lambda_max, uint32_t grid_points, double* out) {
    return guarded([&] {
        require(cal != nullptr && out != nullptr, "null pointer");
        *out = q_eta_gap(cal->impl, lambda_min, lambda_max,
                         static_cast<int>(grid_points));
    });
}

void ldc_calibration_free(ldc_calibration* cal) { delete cal; }

ldc_status ldc_estimate(const uint32_t counts[4], ldc_measure m,
                        const ldc_estimator_spec* spec,
                        const ldc_calibration* cal, ldc_estimate_result* out) {
    return guarded([&] {
        require(counts != nullptr && spec != nullptr && out != nullptr,
                "null pointer");
        const count_table tn = counts_from(counts);
        const eta_calibration* calib = cal != nullptr ? &cal->impl : nullptr;
        const measure_id mid = static_cast<measure_id>(m);
        estimate_result res;
        switch (spec->family) {
            case LDC_EST_NAIVE:
                res = naive_estimate(tn, mid, calib);
                break;
            case LDC_EST_SEMI_NAIVE:
                res = semi_naive_estimate(tn, mid, params_from(spec->alpha), calib);
                break;
            case LDC_EST_BAYES:
                res = bayes_estimate(tn, mid, params_from(spec->alpha),
                                     spec->mc_samples > 0 ? spec->mc_samples : 20000,
                                     spec->seed, calib);
                break;
            case LDC_EST_VOLUME:
                if (mid == measure_id::eta)
                    res = volume_eta_estimate(tn, params_from(spec->alpha),
                                              spec->volume_budget);
                else if (mid == measure_id::dprime)
                    res = volume_dprime_estimate(tn);
                else
                    fail(errc::invalid_argument,
                         "volume estimation applies to eta and dprime only");
                break;
            default:
                fail(errc::invalid_argument, "unknown estimator family");
        }
        out->value = res.value;
        out->defined = res.defined ? 1 : 0;
        out->inflated = res.inflated ? 1 : 0;
        out->std_error = res.std_error;
    });
}

ldc_status ldc_table_probability(const uint32_t counts[4], const double alpha[4],
                                 double* out) {
    return guarded([&] {
        require(counts != nullptr && alpha != nullptr && out != nullptr,
                "null pointer");
        *out = table_probability(counts_from(counts), params_from(alpha));
    });
}

ldc_status ldc_study_run_text(const char* kind, const char* config_text,
                              const char* out_dir, int threads) {
    return guarded([&] {
        require(kind != nullptr && config_text != nullptr && out_dir != nullptr,
                "null pointer");
        run_study(kind, config_text, out_dir, threads);
    });
}

ldc_status ldc_study_run(const char* kind, const char* config_path,
                         const char* out_dir, int threads) {
    return guarded([&] {
        require(kind != nullptr && config_path != nullptr && out_dir != nullptr,
                "null pointer");
        std::ifstream in(config_path, std::ios::binary);
        if (!in) fail(errc::io_error, std::string("cannot open config file: ") + config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        run_study(kind, ss.str(), out_dir, threads);
    });
}

} // extern "C"

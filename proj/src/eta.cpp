#include "eta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "dilog.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace ldcanon {

namespace {

constexpr double kPi2 = 9.869604401089358618834490999876;
constexpr double kTaylorWindow = 1e-4;
// largest value strictly below 1; eta stays inside the open interval
const double kEtaCap = std::nextafter(1.0, 0.0);

double log_gamma(double x) {
    int sign = 0;
    return lgamma_r(x, &sign);
}

void require_positive_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        fail(errc::non_positive_lambda, "odds ratio must be positive and finite");
}

// eta1 on lambda >= 1. Moderate arguments use a regrouped closed form whose
// cancellation stays at the scale of eps^3; huge arguments switch to the
// reciprocal form so no power of lambda can overflow.
double eta1_pos_log(double u) {
    const double eps = std::expm1(u);
    if (eps < kTaylorWindow) return (2.0 - eps) * eps / 6.0;
    if (eps < 1e10) {
        const double num =
            eps * (eps + 2.0) - 2.0 * (1.0 + eps) * std::log1p(eps);
        return std::min(num / (eps * eps), kEtaCap);
    }
    const double m = std::exp(-u);
    const double val = 1.0 - m * (2.0 * u - 2.0 + 2.0 * m) / ((1.0 - m) * (1.0 - m));
    return std::min(val, kEtaCap);
}

double eta_half_pos_log(double u) {
    const double eps = std::expm1(u);
    if (eps < kTaylorWindow) return (2.0 - eps) * eps / kPi2;
    const double x = std::exp(-0.5 * u); // 1/sqrt(lambda) in (0, 1)
    const double log_ratio = std::log1p(-x) - std::log1p(x);
    const double val = (4.0 / kPi2) * (0.5 * u * log_ratio + 0.5 * kPi2 -
                                       dilog(x) + dilog(-x)) - 1.0;
    return std::min(std::max(val, 0.0), kEtaCap);
}

} // namespace

double eta1(double lambda) {
    require_positive_lambda(lambda);
    const double u = std::log(lambda);
    return u >= 0.0 ? eta1_pos_log(u) : -eta1_pos_log(-u);
}

double eta_half(double lambda) {
    require_positive_lambda(lambda);
    const double u = std::log(lambda);
    return u >= 0.0 ? eta_half_pos_log(u) : -eta_half_pos_log(-u);
}

namespace detail {

double eta1_closed(double lambda) {
    if (lambda > 1e10) {
        const double u = std::log(lambda);
        const double m = 1.0 / lambda;
        return 1.0 - m * (2.0 * u - 2.0 + 2.0 * m) / ((1.0 - m) * (1.0 - m));
    }
    // lambda^2 - 2 lambda ln lambda - 1 over (lambda - 1)^2, grouped through
    // eps = lambda - 1 to keep the cancellation at the eps^3 scale
    const double eps = lambda - 1.0;
    const double num = eps * (eps + 2.0) - 2.0 * lambda * std::log1p(eps);
    return num / (eps * eps);
}

double eta1_taylor(double lambda) {
    const double eps = lambda - 1.0;
    return (2.0 - eps) * eps / 6.0;
}

double eta_half_closed(double lambda) {
    const double s = std::sqrt(lambda);
    return (4.0 / kPi2) * (std::log(s) * std::log(std::fabs((s - 1.0) / (s + 1.0))) +
                           dilog(s) - dilog(-s)) - 1.0;
}

double eta_half_taylor(double lambda) {
    const double eps = lambda - 1.0;
    return (2.0 - eps) * eps / kPi2;
}

double lambda_cdf_alpha1(double lambda) {
    return 0.5 * (1.0 + (lambda >= 1.0 ? eta1_pos_log(std::log(lambda))
                                       : -eta1_pos_log(-std::log(lambda))));
}

} // namespace detail

double lambda_density_alpha1(double lambda) {
    require_positive_lambda(lambda);
    const double eps = lambda - 1.0;
    if (std::fabs(eps) < kTaylorWindow)
        return (1.0 - eps) / 6.0 + 0.15 * eps * eps;
    const double u = std::log(lambda);
    if (lambda > 1e8) {
        const double m = 1.0 / lambda;
        const double omm = 1.0 - m;
        return m * m * ((u - 2.0) + m * (u + 2.0)) / (omm * omm * omm);
    }
    const double d = lambda - 1.0;
    return (2.0 - 2.0 * lambda + u + lambda * u) / (d * d * d);
}

double lambda_density(double lambda, const dirichlet_params& alpha,
                      double abs_tol) {
    require_positive_lambda(lambda);
    if (!(abs_tol > 0.0))
        fail(errc::invalid_argument, "quadrature tolerance must be positive");

    // exponents after transforming (p00, p01, p10) -> (p00, p01, lambda)
    const double c00 = alpha.a00() + alpha.a10() - 1.0;
    const double c01 = alpha.a01() + alpha.a11() - 1.0;
    const double c1m = alpha.a10() + alpha.a11() - 1.0;
    const double dpow = alpha.a10() + alpha.a11();
    const double log_beta = log_gamma(alpha.a00()) + log_gamma(alpha.a01()) +
                            log_gamma(alpha.a10()) + log_gamma(alpha.a11()) -
                            log_gamma(alpha.sum());
    const double log_lambda = std::log(lambda);
    const double log_pref = (alpha.a11() - 1.0) * log_lambda - log_beta;

    const double tol_inner = abs_tol * 0.02;
    const double tol_outer = abs_tol * 0.3;

    // Everything is assembled in log space per node; the inner integral over
    // p01 = (1 - p00) v is split at the denominator kink v* = p00 / (lambda
    // (1 - p00)) so that both pieces stay cheap for the double-exponential
    // rule at extreme nodes.
    bool inner_ok = true;
    auto outer = [&](double p00, double omp00) {
        const double log_p00 = std::log(p00);
        const double log_omp = std::log(omp00);
        const double node_log =
            log_pref + c00 * log_p00 + (c01 + c1m + 1.0) * log_omp;
        const double log_scale = log_lambda + log_omp; // lambda * (1 - p00)
        const double scale = lambda * omp00;
        const double vstar = p00 / scale;

        double value = 0.0, err = 0.0;
        bool conv = true;
        if (vstar >= 1.0) {
            // denominator stays within a factor of two of p00
            auto f = [&](double x, double omx) {
                return std::exp(node_log + c01 * std::log(x) +
                                c1m * std::log(omx) -
                                dpow * std::log(scale * x + p00));
            };
            auto r = tanh_sinh_01(f, tol_inner, 1e-11, 10);
            value = r.value;
            err = r.abs_error;
            conv = r.converged;
        } else {
            const double log_vstar = log_p00 - log_scale;
            const double omvstar = (scale - p00) / scale;
            // v in (0, v*): v = v* x, denominator p00 (1 + x)
            auto lo = [&](double x, double omx) {
                return std::exp(node_log + log_vstar +
                                c01 * (log_vstar + std::log(x)) +
                                c1m * std::log(omvstar + vstar * omx) -
                                dpow * (log_p00 + std::log1p(x)));
            };
            // v in (v*, 1): v = exp(-L (1 - x)), 1 - v = -expm1(-L (1 - x))
            const double big = log_scale - log_p00; // L = -log v*
            auto hi = [&](double x, double omx) {
                const double log_v = -big * omx;
                const double one_minus_v = -std::expm1(log_v);
                const double lx = big * x;
                const double softplus = lx + std::log1p(std::exp(-lx));
                return std::exp(node_log + std::log(big) +
                                (c01 + 1.0) * log_v +
                                c1m * std::log(one_minus_v) -
                                dpow * (log_p00 + softplus));
            };
            auto rlo = tanh_sinh_01(lo, tol_inner * 0.5, 1e-11, 10);
            auto rhi = tanh_sinh_01(hi, tol_inner * 0.5, 1e-11, 10);
            value = rlo.value + rhi.value;
            err = rlo.abs_error + rhi.abs_error;
            conv = rlo.converged && rhi.converged;
        }
        (void)conv;
        if (err > tol_inner) inner_ok = false;
        return value;
    };
    auto r = tanh_sinh_01(outer, tol_outer, 1e-12, 10);
    // the tolerance contract is absolute; relative stagnation is a failure
    if (r.abs_error > 0.6 * abs_tol || !inner_ok)
        fail(errc::quadrature_failure,
             "odds-ratio density quadrature did not reach the requested tolerance");
    return r.value < 0.0 ? 0.0 : r.value;
}

// ---------------------------------------------------------------------------
// calibration

namespace {

// PCHIP-style slope limiting: harmonic-mean interior slopes, one-sided ends.
std::vector<double> monotone_slopes(const std::vector<double>& u,
                                    const std::vector<double>& f) {
    const size_t n = u.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    std::vector<double> h(n - 1), delta(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = u[i + 1] - u[i];
        delta[i] = (f[i + 1] - f[i]) / h[i];
    }
    for (size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    return d;
}

// keep exact derivatives inside the monotone region of the segment cubic
void clamp_slopes(const std::vector<double>& u, const std::vector<double>& f,
                  std::vector<double>& d) {
    const size_t n = u.size();
    for (size_t i = 0; i + 1 < n; ++i) {
        const double delta = (f[i + 1] - f[i]) / (u[i + 1] - u[i]);
        if (delta <= 0.0) continue;
        d[i] = std::min(d[i], 3.0 * delta);
        d[i + 1] = std::min(d[i + 1], 3.0 * delta);
    }
    for (auto& s : d) s = std::max(s, 0.0);
}

double hermite_eval(const std::vector<double>& xs, const std::vector<double>& fs,
                    const std::vector<double>& ds, double x) {
    const size_t n = xs.size();
    if (x <= xs.front()) return fs.front();
    if (x >= xs.back()) return fs.back();
    size_t hi = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    size_t lo = hi - 1;
    const double h = xs[hi] - xs[lo];
    const double t = (x - xs[lo]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * fs[lo] + h * h10 * ds[lo] + h01 * fs[hi] + h * h11 * ds[hi];
}

const char* method_token(calib_method m) {
    switch (m) {
        case calib_method::analytic_1: return "analytic_1";
        case calib_method::analytic_half: return "analytic_half";
        case calib_method::quadrature: return "quadrature";
        case calib_method::monte_carlo: return "monte_carlo";
    }
    return "?";
}

} // namespace

eta_calibration eta_calibration::analytic(double alpha) {
    if (alpha != 1.0 && alpha != 0.5)
        fail(errc::invalid_argument,
             "analytic calibrations exist only for alpha = 1 and alpha = 1/2");
    eta_calibration cal;
    cal.alpha_ = alpha;
    cal.method_ = alpha == 1.0 ? calib_method::analytic_1
                               : calib_method::analytic_half;
    return cal;
}

eta_calibration eta_calibration::by_quadrature(double alpha, double abs_tol) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        fail(errc::invalid_argument, "calibration alpha must be positive");
    if (!(abs_tol > 0.0))
        fail(errc::invalid_argument, "quadrature tolerance must be positive");

    eta_calibration cal;
    cal.alpha_ = alpha;
    cal.method_ = calib_method::quadrature;
    cal.quad_tol_ = abs_tol;

    const dirichlet_params ap = dirichlet_params::symmetric(alpha);
    auto mass_integrand = [&](double u) {
        const double lam = std::exp(u);
        const double tol_l = std::max(abs_tol * 1e-2 / std::max(1.0, lam), 1e-300);
        return lam * lambda_density(lam, ap, tol_l);
    };
    auto slope_at = [&](double u) {
        const double lam = std::exp(u);
        const double tol_l = std::max(abs_tol * 1e-2 / std::max(1.0, lam), 1e-300);
        return lam * lambda_density(lam, ap, tol_l);
    };

    // march outward from log lambda = 0 where the CDF is exactly 1/2
    std::vector<double> us{0.0}, fs{0.5}, ds{slope_at(0.0)};
    const double seg_tol = abs_tol / 800.0;
    double f = 0.5;
    double u = 0.0;
    const double fine_step = 1.0 / 16.0;
    const double coarse_step = 0.5;
    const double u_fine_end = 20.0;
    const double u_max = 90.0;
    int quiet = 0;
    while (u < u_max) {
        const double step = u < u_fine_end ? fine_step : coarse_step;
        const double next = u + step;
        auto seg = gk15_adaptive(mass_integrand, u, next, seg_tol, 1e-13, 64);
        if (!seg.converged)
            fail(errc::quadrature_failure,
                 "odds-ratio CDF segment did not reach the requested tolerance");
        const double nf = f + seg.value;
        if (!(nf > f) || nf >= 1.0) break; // below resolution, stop the grid
        u = next;
        f = nf;
        us.push_back(u);
        fs.push_back(f);
        ds.push_back(slope_at(u));
        if (seg.value < abs_tol * 1e-3) {
            if (++quiet >= 2 && u >= u_fine_end) break;
        } else {
            quiet = 0;
        }
    }
    cal.set_knots(std::move(us), std::move(fs), std::move(ds));
    return cal;
}

eta_calibration eta_calibration::by_monte_carlo(double alpha, uint64_t samples,
                                                uint64_t seed) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        fail(errc::invalid_argument, "calibration alpha must be positive");
    if (samples < 10000)
        fail(errc::insufficient_samples,
             "Monte Carlo calibration needs at least 10000 samples");

    eta_calibration cal;
    cal.alpha_ = alpha;
    cal.method_ = calib_method::monte_carlo;
    cal.mc_samples_ = samples;
    cal.mc_seed_ = seed;

    const dirichlet_params ap = dirichlet_params::symmetric(alpha);
    std::vector<double> us;
    us.reserve(2 * samples);
    constexpr uint64_t kChunk = 4096;
    for (uint64_t base = 0; base < samples; base += kChunk) {
        rng_stream rng(seed, base / kChunk);
        const uint64_t hi = std::min(samples, base + kChunk);
        for (uint64_t i = base; i < hi; ++i) {
            const prob_table t = rng.next_dirichlet(ap);
            const double u = std::log(t.p00()) + std::log(t.p11()) -
                             std::log(t.p01()) - std::log(t.p10());
            // the symmetric prior makes log lambda an even variable; storing
            // both signs enforces cdf(1) = 1/2 exactly
            us.push_back(u);
            us.push_back(-u);
        }
    }
    std::sort(us.begin(), us.end());

    const size_t total = us.size();
    const double u_hi = std::max(us[static_cast<size_t>(0.99995 * (total - 1))] * 1.05, 1.0);
    const int half_knots = 256;
    std::vector<double> ku, kf;
    ku.reserve(half_knots + 1);
    kf.reserve(half_knots + 1);
    ku.push_back(0.0);
    kf.push_back(0.5);
    for (int k = 1; k <= half_knots; ++k) {
        const double uk = u_hi * k / half_knots;
        const size_t below = std::upper_bound(us.begin(), us.end(), uk) - us.begin();
        const double fk = static_cast<double>(below) / total;
        if (fk <= kf.back() || fk >= 1.0) break; // empirical tail exhausted
        ku.push_back(uk);
        kf.push_back(fk);
    }
    cal.set_knots(std::move(ku), std::move(kf), {});
    return cal;
}

void eta_calibration::set_knots(std::vector<double> u, std::vector<double> f,
                                std::vector<double> deriv) {
    if (u.size() < 2 || u.size() != f.size())
        fail(errc::quadrature_failure, "calibration produced too few CDF knots");
    for (size_t i = 1; i < u.size(); ++i)
        if (!(u[i] > u[i - 1]) || !(f[i] > f[i - 1]))
            fail(errc::invalid_argument, "calibration knots must increase strictly");
    knot_u_ = std::move(u);
    knot_f_ = std::move(f);
    if (deriv.size() == knot_u_.size()) {
        knot_d_ = std::move(deriv);
        clamp_slopes(knot_u_, knot_f_, knot_d_);
    } else {
        knot_d_ = monotone_slopes(knot_u_, knot_f_);
    }
}

double eta_calibration::eta_pos_log(double u) const {
    switch (method_) {
        case calib_method::analytic_1: return eta1_pos_log(u);
        case calib_method::analytic_half: return eta_half_pos_log(u);
        default: break;
    }
    const double f = hermite_eval(knot_u_, knot_f_, knot_d_, u);
    const double val = 2.0 * f - 1.0;
    return std::min(std::max(val, 0.0), kEtaCap);
}

double eta_calibration::eta_lambda(double lambda) const {
    require_positive_lambda(lambda);
    const double u = std::log(lambda);
    return u >= 0.0 ? eta_pos_log(u) : -eta_pos_log(-u);
}

double eta_calibration::eta_ratio(double num, double den) const {
    if (!(num > 0.0) || !(den > 0.0))
        fail(errc::non_positive_lambda, "odds ratio components must be positive");
    return num >= den ? eta_pos_log(std::log(num / den))
                      : -eta_pos_log(std::log(den / num));
}

double eta_calibration::eta(const prob_table& t) const {
    const auto& p = t.entries();
    if (std::min(std::min(p[0], p[1]), std::min(p[2], p[3])) < 1e-12) {
        // log-space odds ratio avoids under/overflow of the cell products
        const double u = std::log(p[0]) + std::log(p[3]) - std::log(p[1]) -
                         std::log(p[2]);
        return u >= 0.0 ? eta_pos_log(u) : -eta_pos_log(-u);
    }
    return eta_ratio(p[0] * p[3], p[1] * p[2]);
}

double eta_calibration::cdf(double lambda) const {
    const double c = 0.5 * (1.0 + eta_lambda(lambda));
    const double lo = std::numeric_limits<double>::min();
    return std::min(std::max(c, lo), kEtaCap);
}

void eta_calibration::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open calibration file for writing: " + path);
    char line[128];
    out << "ldcanon-calibration v1\n";
    std::snprintf(line, sizeof line,
                  "alpha=%.17g method=%s tol=%.17g samples=%llu seed=%llu\n",
                  alpha_, method_token(method_), quad_tol_,
                  static_cast<unsigned long long>(mc_samples_),
                  static_cast<unsigned long long>(mc_seed_));
    out << line;
    out << "log_lambda,cdf\n";
    // mirrored negative side first so the file lists a full monotone table
    for (size_t i = knot_u_.size(); i-- > 1;) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", -knot_u_[i],
                      1.0 - knot_f_[i]);
        out << line;
    }
    for (size_t i = 0; i < knot_u_.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", knot_u_[i], knot_f_[i]);
        out << line;
    }
    if (!out) fail(errc::io_error, "failed writing calibration file: " + path);
}

eta_calibration eta_calibration::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open calibration file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "ldcanon-calibration v1")
        fail(errc::parse_error, "unrecognized calibration file header");
    if (!std::getline(in, line))
        fail(errc::parse_error, "calibration file missing parameter line");

    eta_calibration cal;
    {
        double alpha = 0.0, tol = 0.0;
        unsigned long long samples = 0, seed = 0;
        char method[32] = {0};
        if (std::sscanf(line.c_str(),
                        "alpha=%lg method=%31s tol=%lg samples=%llu seed=%llu",
                        &alpha, method, &tol, &samples, &seed) != 5)
            fail(errc::parse_error, "malformed calibration parameter line");
        cal.alpha_ = alpha;
        cal.quad_tol_ = tol;
        cal.mc_samples_ = samples;
        cal.mc_seed_ = seed;
        if (std::strcmp(method, "analytic_1") == 0) cal.method_ = calib_method::analytic_1;
        else if (std::strcmp(method, "analytic_half") == 0) cal.method_ = calib_method::analytic_half;
        else if (std::strcmp(method, "quadrature") == 0) cal.method_ = calib_method::quadrature;
        else if (std::strcmp(method, "monte_carlo") == 0) cal.method_ = calib_method::monte_carlo;
        else fail(errc::parse_error, "unknown calibration method token");
    }
    if (!std::getline(in, line) || line != "log_lambda,cdf")
        fail(errc::parse_error, "calibration file missing knot header");

    std::vector<double> u, f;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double uu = 0.0, ff = 0.0;
        if (std::sscanf(line.c_str(), "%lg,%lg", &uu, &ff) != 2)
            fail(errc::parse_error, "malformed calibration knot row");
        if (!u.empty() && !(uu > u.back() && ff > f.back()))
            fail(errc::parse_error, "calibration knots must increase strictly");
        u.push_back(uu);
        f.push_back(ff);
    }
    if (cal.method_ == calib_method::analytic_1 ||
        cal.method_ == calib_method::analytic_half) {
        if (cal.alpha_ != 1.0 && cal.alpha_ != 0.5)
            fail(errc::parse_error, "analytic calibration with non-analytic alpha");
        return cal;
    }
    // keep the non-negative half; the mirror is implied
    std::vector<double> pu, pf;
    for (size_t i = 0; i < u.size(); ++i)
        if (u[i] >= 0.0) {
            pu.push_back(u[i]);
            pf.push_back(f[i]);
        }
    cal.set_knots(std::move(pu), std::move(pf), {});
    return cal;
}

double q_eta_gap(const eta_calibration& cal, double lambda_min,
                 double lambda_max, int grid_points) {
    if (!(lambda_min > 0.0) || !(lambda_max > lambda_min) || grid_points < 2)
        fail(errc::invalid_argument, "bad q-eta gap grid");
    if (lambda_min > 1e-6 || lambda_max < 1e6)
        fail(errc::invalid_argument, "gap grid must span at least [1e-6, 1e6]");
    const double u0 = std::log(lambda_min);
    const double u1 = std::log(lambda_max);
    double gap = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double u = u0 + (u1 - u0) * i / (grid_points - 1);
        const double lam = std::exp(u);
        const double q = (lam - 1.0) / (lam + 1.0);
        gap = std::max(gap, std::fabs(q - cal.eta_lambda(lam)));
    }
    return gap;
}

} // namespace ldcanon

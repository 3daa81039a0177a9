#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tables.hpp"

namespace ldcanon {

// Canonical LD measure calibrated by the uniform Dirichlet (alpha = 1).
double eta1(double lambda);
// Canonical LD measure calibrated by Jeffreys' prior (alpha = 1/2).
double eta_half(double lambda);

// Density of the odds ratio under Dirichlet(alpha), evaluated by nested
// double-exponential quadrature of the defining double integral.
double lambda_density(double lambda, const dirichlet_params& alpha,
                      double abs_tol);

// Closed form of the density for the uniform Dirichlet.
double lambda_density_alpha1(double lambda);

namespace detail {
// Analytic expressions with no series guard, for seam verification.
double eta1_closed(double lambda);
double eta1_taylor(double lambda);
double eta_half_closed(double lambda);
double eta_half_taylor(double lambda);
// CDF of the odds ratio under the uniform Dirichlet, closed form.
double lambda_cdf_alpha1(double lambda);
} // namespace detail

enum class calib_method : int {
    analytic_1 = 0,
    analytic_half = 1,
    quadrature = 2,
    monte_carlo = 3,
};

// Immutable calibration of the odds-ratio CDF for a symmetric Dirichlet
// concentration. Quadrature calibrations integrate lambda_density into a
// monotone log-lambda knot table; Monte Carlo calibrations interpolate a
// symmetrized empirical CDF. Safe to share between threads.
class eta_calibration {
public:
    static eta_calibration analytic(double alpha);
    static eta_calibration by_quadrature(double alpha, double abs_tol = 1e-8);
    static eta_calibration by_monte_carlo(double alpha, uint64_t samples,
                                          uint64_t seed);
    static eta_calibration load_file(const std::string& path);
    void save_file(const std::string& path) const;

    double cdf(double lambda) const;
    double eta_lambda(double lambda) const;
    // eta of the odds ratio num/den; exactly antisymmetric in (num, den)
    double eta_ratio(double num, double den) const;
    double eta(const prob_table& t) const;

    double alpha() const { return alpha_; }
    calib_method method() const { return method_; }
    double quad_tol() const { return quad_tol_; }
    uint64_t mc_samples() const { return mc_samples_; }
    uint64_t mc_seed() const { return mc_seed_; }

    // Interpolation knots on the non-negative log-lambda axis (empty for
    // the analytic methods); the negative side is the mirror image.
    const std::vector<double>& knot_log_lambda() const { return knot_u_; }
    const std::vector<double>& knot_cdf() const { return knot_f_; }

private:
    eta_calibration() = default;
    void set_knots(std::vector<double> u, std::vector<double> f,
                   std::vector<double> deriv);
    // eta restricted to log lambda >= 0, in [0, 1)
    double eta_pos_log(double u) const;

    double alpha_ = 0.0;
    calib_method method_ = calib_method::analytic_1;
    double quad_tol_ = 0.0;
    uint64_t mc_samples_ = 0;
    uint64_t mc_seed_ = 0;
    std::vector<double> knot_u_;
    std::vector<double> knot_f_;
    std::vector<double> knot_d_;
};

// Largest deviation between Yule's Q and the calibrated eta over a
// log-spaced odds ratio grid; the grid must span at least [1e-6, 1e6].
double q_eta_gap(const eta_calibration& cal, double lambda_min,
                 double lambda_max, int grid_points);

} // namespace ldcanon

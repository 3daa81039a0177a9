#include "dilog.hpp"

#include <cmath>

namespace ldcanon {

namespace {

constexpr double kPi2 = 9.869604401089358618834490999876; // pi^2

// Power series, valid for |x| <= 1/2 (64 terms reach full precision).
double dilog_series(double x) {
    double sum = 0.0;
    double pw = x;
    for (int k = 1; k < 80; ++k) {
        const double term = pw / (static_cast<double>(k) * k);
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
        pw *= x;
    }
    return sum;
}

} // namespace

double dilog(double x) {
    if (x == 0.0) return 0.0;
    if (x == 1.0) return kPi2 / 6.0;
    if (x == -1.0) return -kPi2 / 12.0;
    if (x < -1.0) {
        // inversion: dilog(x) + dilog(1/x) = -pi^2/6 - ln^2(-x)/2
        const double lg = std::log(-x);
        return -kPi2 / 6.0 - 0.5 * lg * lg - dilog(1.0 / x);
    }
    if (x < -0.5) {
        // Landen: dilog(x) + dilog(x/(x-1)) = -ln^2(1-x)/2, argument in (1/3, 1/2]
        const double lg = std::log1p(-x);
        return -0.5 * lg * lg - dilog(x / (x - 1.0));
    }
    if (x <= 0.5) return dilog_series(x);
    if (x < 1.0) {
        // reflection: dilog(x) + dilog(1-x) = pi^2/6 - ln(x) ln(1-x)
        const double omx = 1.0 - x;
        return kPi2 / 6.0 - std::log(x) * std::log(omx) - dilog_series(omx);
    }
    // x > 1: the real part picked out by |1-y| obeys
    // dilog(x) = pi^2/3 - ln^2(x)/2 - dilog(1/x)
    const double lg = std::log(x);
    return kPi2 / 3.0 - 0.5 * lg * lg - dilog(1.0 / x);
}

} // namespace ldcanon

#include "quadrature.hpp"

#include <mutex>

namespace ldcanon::quad_detail {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTmax = 6.0;
constexpr int kMaxLevel = 12;

ts_node make_node(double t) {
    const double u = 0.5 * kPi * std::sinh(t);
    const double e = std::exp(-2.0 * u); // in (0,1] for t >= 0
    const double den = 1.0 + e;
    ts_node n;
    n.x = 1.0 / den;
    n.omx = e / den;
    n.w = kPi * std::cosh(t) * e / (den * den);
    return n;
}

std::vector<std::vector<ts_node>> build_levels() {
    std::vector<std::vector<ts_node>> levels(kMaxLevel + 1);
    for (int t = 0; t <= static_cast<int>(kTmax); ++t)
        levels[0].push_back(make_node(static_cast<double>(t)));
    double h = 1.0;
    for (int level = 1; level <= kMaxLevel; ++level) {
        h *= 0.5;
        for (double t = h; t <= kTmax; t += 2.0 * h)
            levels[level].push_back(make_node(t));
    }
    return levels;
}

} // namespace

const std::vector<std::vector<ts_node>>& ts_levels() {
    static const std::vector<std::vector<ts_node>> levels = build_levels();
    return levels;
}

// 15-point Kronrod extension of 7-point Gauss (positive abscissae).
const double gk15_tables::xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

const double gk15_tables::wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

const double gk15_tables::wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

} // namespace ldcanon::quad_detail

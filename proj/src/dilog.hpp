#pragma once

namespace ldcanon {

// Real dilogarithm -int_0^x ln|1-y|/y dy, defined for every real x. For
// x <= 1 this is the classical series value; for x > 1 the absolute value
// under the logarithm keeps the integral real.
double dilog(double x);

} // namespace ldcanon

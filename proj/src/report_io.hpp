#pragma once

#include <string>

#include "simulation.hpp"

namespace ldcanon {

// Deterministic renderings: fixed row order, 17-significant-digit floats,
// LF line endings, no volatile metadata. Byte-identical for identical
// configs regardless of worker count.
std::string to_csv(const mse_report& report);
std::string to_json(const mse_report& report);
std::string to_csv(const kendall_report& report);
std::string to_json(const kendall_report& report);
std::string to_json(const distribution_report& report);
std::string histogram_csv(const distribution_report& report);
std::string scatter_csv(const distribution_report& report);
std::string log_lambda_csv(const distribution_report& report);

// Parse the config, run the named study and write its report files into
// out_dir. Returns the wall time in seconds.
double run_study(const std::string& kind, const std::string& config_text,
                 const std::string& out_dir, int threads);

} // namespace ldcanon

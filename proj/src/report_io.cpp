#include "report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace ldcanon {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string config_json(const study_config& cfg) {
    std::ostringstream o;
    o << "{\"seed\": " << cfg.seed << ", \"replicates\": " << cfg.replicates
      << ", \"draws\": " << cfg.draws << ", \"mc_samples\": " << cfg.mc_samples
      << ", \"text\": \"" << json_escape(cfg.canonical_text()) << "\"}";
    return o.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open for writing: " + path);
    out << content;
    if (!out) fail(errc::io_error, "failed writing: " + path);
}

} // namespace

std::string to_csv(const mse_report& report) {
    std::ostringstream o;
    o << "measure,estimator,estimator_alpha,prior_alpha,sample_size,replicates,"
         "mse,mc_se,mse_excl,mc_se_excl,n_undefined,n_boundary\n";
    for (const auto& r : report.rows) {
        o << r.measure << ',' << r.estimator << ','
          << (r.est_alpha ? g17(*r.est_alpha) : std::string()) << ','
          << g17(r.prior_alpha) << ',' << r.sample_size << ',' << r.replicates
          << ',' << g17(r.mse) << ',' << g17(r.mc_se) << ',' << g17(r.mse_excl)
          << ',' << g17(r.mc_se_excl) << ',' << r.n_undefined << ','
          << r.n_boundary << '\n';
    }
    return o.str();
}

std::string to_json(const mse_report& report) {
    std::ostringstream o;
    o << "{\n  \"kind\": \"mse\",\n  \"config\": " << config_json(report.config)
      << ",\n  \"rows\": [\n";
    for (size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        o << "    {\"measure\": \"" << r.measure << "\", \"estimator\": \""
          << r.estimator << "\", \"estimator_alpha\": "
          << (r.est_alpha ? g17(*r.est_alpha) : std::string("null"))
          << ", \"prior_alpha\": " << g17(r.prior_alpha)
          << ", \"sample_size\": " << r.sample_size
          << ", \"replicates\": " << r.replicates << ", \"mse\": " << g17(r.mse)
          << ", \"mc_se\": " << g17(r.mc_se)
          << ", \"mse_excl\": " << g17(r.mse_excl)
          << ", \"mc_se_excl\": " << g17(r.mc_se_excl)
          << ", \"n_undefined\": " << r.n_undefined
          << ", \"n_boundary\": " << r.n_boundary << '}'
          << (i + 1 < report.rows.size() ? "," : "") << '\n';
    }
    o << "  ]\n}\n";
    return o.str();
}

std::string to_csv(const kendall_report& report) {
    std::ostringstream o;
    o << "bin_lo,bin_hi,count,tau\n";
    for (const auto& b : report.bins)
        o << g17(b.lo) << ',' << g17(b.hi) << ',' << b.count << ',' << g17(b.tau)
          << '\n';
    return o.str();
}

std::string to_json(const kendall_report& report) {
    std::ostringstream o;
    o << "{\n  \"kind\": \"kendall\",\n  \"config\": "
      << config_json(report.config) << ",\n  \"bins\": [\n";
    for (size_t i = 0; i < report.bins.size(); ++i) {
        const auto& b = report.bins[i];
        o << "    {\"lo\": " << g17(b.lo) << ", \"hi\": " << g17(b.hi)
          << ", \"count\": " << b.count << ", \"tau\": " << g17(b.tau) << '}'
          << (i + 1 < report.bins.size() ? "," : "") << '\n';
    }
    o << "  ]\n}\n";
    return o.str();
}

std::string to_json(const distribution_report& report) {
    std::ostringstream o;
    o << "{\n  \"kind\": \"distribution\",\n  \"config\": "
      << config_json(report.config) << ",\n  \"measures\": [\n";
    for (size_t i = 0; i < report.hists.size(); ++i) {
        const auto& h = report.hists[i];
        o << "    {\"measure\": \"" << h.measure
          << "\", \"ks_uniform\": " << g17(h.ks_uniform) << '}'
          << (i + 1 < report.hists.size() ? "," : "") << '\n';
    }
    o << "  ]\n}\n";
    return o.str();
}

std::string histogram_csv(const distribution_report& report) {
    std::ostringstream o;
    o << "measure,bin_lo,bin_hi,count\n";
    for (const auto& h : report.hists)
        for (int b = 0; b < 64; ++b)
            o << h.measure << ',' << g17(-1.0 + b / 32.0) << ','
              << g17(-1.0 + (b + 1) / 32.0) << ',' << h.bins[b] << '\n';
    return o.str();
}

std::string scatter_csv(const distribution_report& report) {
    std::ostringstream o;
    for (size_t i = 0; i < report.scatter_columns.size(); ++i)
        o << (i ? "," : "") << report.scatter_columns[i];
    o << '\n';
    for (const auto& row : report.scatter) {
        for (size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << g17(row[i]);
        o << '\n';
    }
    return o.str();
}

std::string log_lambda_csv(const distribution_report& report) {
    std::ostringstream o;
    o << "log_lambda_lo,log_lambda_hi,count\n";
    const double span = report.log_lambda_hi - report.log_lambda_lo;
    for (int b = 0; b < 64; ++b)
        o << g17(report.log_lambda_lo + span * b / 64.0) << ','
          << g17(report.log_lambda_lo + span * (b + 1) / 64.0) << ','
          << report.log_lambda_hist[b] << '\n';
    return o.str();
}

double run_study(const std::string& kind, const std::string& config_text,
                 const std::string& out_dir, int threads) {
    const study_config cfg = study_config::parse(config_text);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(errc::io_error, "cannot create output directory: " + out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    try {
        if (kind == "mse") {
            const mse_report report = run_mse_study(cfg, threads);
            write_file(path("mse_report.csv"), to_csv(report));
            write_file(path("mse_report.json"), to_json(report));
            return report.wall_seconds;
        }
        if (kind == "kendall") {
            const kendall_report report = run_kendall_study(cfg, threads);
            write_file(path("kendall_report.csv"), to_csv(report));
            write_file(path("kendall_report.json"), to_json(report));
            return report.wall_seconds;
        }
        if (kind == "distribution") {
            const distribution_report report = run_distribution_study(cfg, threads);
            write_file(path("distribution_report.json"), to_json(report));
            write_file(path("distribution_hist.csv"), histogram_csv(report));
            write_file(path("distribution_scatter.csv"), scatter_csv(report));
            write_file(path("distribution_loglambda_hist.csv"), log_lambda_csv(report));
            return report.wall_seconds;
        }
        fail(errc::invalid_argument, "unknown study kind: " + kind);
    } catch (const std::exception& e) {
        // leave a marker so partial output directories are recognizable
        std::ofstream marker(path("FAILED"), std::ios::binary);
        marker << e.what() << '\n';
        throw;
    }
}

} // namespace ldcanon

#pragma once

#include <stdexcept>
#include <string>

namespace ldcanon {

enum class errc {
    invalid_argument,
    non_positive_entry,
    not_normalized,
    non_positive_scale,
    non_positive_lambda,
    quadrature_failure,
    insufficient_samples,
    budget_exceeded,
    degenerate_marginals,
    parse_error,
    io_error,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw error(code, what);
}

} // namespace ldcanon

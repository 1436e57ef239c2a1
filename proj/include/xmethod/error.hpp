#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xmethod {

enum class Errc {
    unbalanced_braces,
    empty_body,
    line_not_in_body,
    invalid_range,
    endpoint_unreachable,
    missing_fixture,
    plan_infeasible,
    stale_source,
    reparse_failure,
    corpus_mismatch,
    index_out_of_range,
    io_failure,
    bad_input,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for every recoverable failure in the library.
/// Callers that need to branch do so on code().
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace xmethod

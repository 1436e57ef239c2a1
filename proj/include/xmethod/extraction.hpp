#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xmethod/method_model.hpp"
#include "xmethod/suggestion.hpp"

namespace xmethod {

struct PlanParameter {
    std::string name;
    std::string type_text;
};

struct PlanOptions {
    bool allow_var_fallback = false;  // emit `var`-typed parameters instead of failing
};

struct ExtractionPlan {
    std::string new_method_name;
    std::vector<PlanParameter> parameters;
    std::optional<std::string> return_variable;
    std::string return_type;
    LineRange host;
    LineRange fragment;
    std::string fragment_text;
    std::string call_site_text;
    std::string method_text;  // the new method, lines joined with '\n', trailing newline
    int insertion_line = 0;   // line after the host method
    std::string source_sha256;

    std::string signature() const;
};

/// Throws Error(plan_infeasible) when a parameter or return type cannot be
/// recovered from the source text, or the fragment is not applicable.
ExtractionPlan plan_extraction(const LongMethod& method, const ExtractSuggestion& s,
                               std::string_view source, PlanOptions options = {});

/// Rewrites `source`. Throws Error(stale_source) when the text no longer
/// matches the plan and Error(reparse_failure) when the result does not
/// re-parse cleanly; the input is never modified.
std::string apply(std::string_view source, const ExtractionPlan& plan);

}  // namespace xmethod

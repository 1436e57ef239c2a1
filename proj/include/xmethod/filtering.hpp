#pragma once

#include <vector>

#include "xmethod/method_model.hpp"
#include "xmethod/suggestion.hpp"

namespace xmethod {

struct FilterConfig {
    double max_coverage_fraction = 0.88;
    int min_statements = 2;

    /// Throws Error(bad_input) when a field is out of range.
    void validate() const;
};

/// Expects a normalized suggestion. Checks scope balance, control-flow exits,
/// variable visibility and the single-return rule, in that order.
Verdict check_validity(const LongMethod& method, const ExtractSuggestion& s);

/// Expects a valid suggestion. Rejects whole-body and single-statement fragments.
Verdict check_usefulness(const LongMethod& method, const ExtractSuggestion& s, const FilterConfig& cfg);

/// check_validity then, when valid, check_usefulness.
Verdict classify(const LongMethod& method, const ExtractSuggestion& s, const FilterConfig& cfg);

/// Countable statements covered by `range`.
int fragment_statements(const LongMethod& method, LineRange range);

struct Triage {
    std::vector<Verdict> verdicts;  // one per input entry, input order

    std::vector<const Verdict*> of(VerdictClass c) const;
    std::size_t count(VerdictClass c) const;
};

/// normalize_scope, check_validity, check_usefulness for every entry.
Triage triage(const LongMethod& method, const SuggestionSet& set, const FilterConfig& cfg);
Triage triage(const LongMethod& method, const std::vector<ExtractSuggestion>& entries, const FilterConfig& cfg);

}  // namespace xmethod

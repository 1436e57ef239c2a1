#pragma once

#include <vector>

#include "xmethod/filtering.hpp"

namespace xmethod {

/// Pulls declarations sitting directly above the fragment into it while each
/// step keeps the fragment applicable and does not add parameters.
ExtractSuggestion extend_for_declaration(const LongMethod& method, const ExtractSuggestion& s,
                                         const FilterConfig& cfg = {});

/// When the fragment is exactly a braced `if` without else, keeps only the
/// then-block. Reverted if the smaller fragment is not applicable.
ExtractSuggestion shrink_control_header(const LongMethod& method, const ExtractSuggestion& s,
                                        const FilterConfig& cfg = {});

/// extend then shrink. The result is applicable whenever the input was.
ExtractSuggestion enhance(const LongMethod& method, const ExtractSuggestion& s, const FilterConfig& cfg = {});

/// Enhances every applicable verdict of a triage and merges range collisions
/// by summing counts. Output is sorted by range.
std::vector<ExtractSuggestion> enhance_applicable(const LongMethod& method, const Triage& triaged,
                                                  const FilterConfig& cfg, bool enabled = true);

}  // namespace xmethod

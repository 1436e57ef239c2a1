#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xmethod/method_model.hpp"

namespace xmethod {

enum class Provenance { raw, normalized, enhanced };

std::string_view to_string(Provenance p) noexcept;

struct ExtractSuggestion {
    std::string name;
    int start_line = 0;
    int end_line = 0;
    int count = 1;
    Provenance provenance = Provenance::raw;

    LineRange range() const { return {start_line, end_line}; }
    int line_count() const { return end_line - start_line + 1; }
};

/// Strips characters that cannot appear in a Java identifier; `extracted`
/// when nothing usable remains.
std::string sanitize_name(std::string_view raw);

/// Raw suggestions keyed by line range. Adding an existing range bumps its
/// count; the reported name is the most frequent one, ties going to the
/// lexicographically smallest.
class SuggestionSet {
public:
    void add(std::string_view name, LineRange range, int count = 1);
    void merge(const SuggestionSet& other);

    std::vector<ExtractSuggestion> entries() const;  // sorted by range
    std::size_t size() const { return votes_.size(); }
    bool empty() const { return votes_.empty(); }
    int total_count() const;

private:
    std::map<LineRange, std::map<std::string, int>> votes_;
};

enum class VerdictClass { invalid, not_useful, applicable };
enum class Reason { scope_unbalanced, multiple_returns, control_flow_escape, variable_inaccessible, whole_method, one_liner, ok };

std::string_view to_string(VerdictClass c) noexcept;
std::string_view to_string(Reason r) noexcept;

struct Verdict {
    ExtractSuggestion suggestion;  // after normalization (and enhancement, when applied)
    ExtractSuggestion original;    // as produced by the model
    VerdictClass verdict_class = VerdictClass::invalid;
    Reason reason = Reason::scope_unbalanced;
    std::string detail;

    bool applicable() const { return verdict_class == VerdictClass::applicable; }
};

struct Normalized {
    ExtractSuggestion suggestion;
    bool salvageable = true;
    std::string detail;  // why it is not salvageable
};

/// Widens the range until both ends sit at the same nesting level and no
/// else/catch/finally/do-while tail is split off. Never shrinks the range.
Normalized normalize_scope(const LongMethod& method, const ExtractSuggestion& s);

nlohmann::json to_json(const ExtractSuggestion& s);
nlohmann::json to_json(const Verdict& v);

}  // namespace xmethod

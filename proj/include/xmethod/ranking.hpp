#pragma once

#include <string_view>
#include <vector>

#include "xmethod/suggestion.hpp"

namespace xmethod {

/// F(line): how many applicable suggestions cover each line of the host.
class HeatMap {
public:
    HeatMap() = default;
    HeatMap(int first_line, int last_line);

    void cover(LineRange r);
    int at(int line) const;  // 0 outside the map
    int heat(LineRange r) const;
    int total() const;
    int first_line() const { return first_; }
    int last_line() const { return first_ + static_cast<int>(freq_.size()) - 1; }

private:
    int first_ = 0;
    std::vector<int> freq_;
};

HeatMap build_heatmap(const LongMethod& host, const std::vector<ExtractSuggestion>& applicable);

enum class RankStrategy { heat, popularity, combined };

std::string_view to_string(RankStrategy s) noexcept;
RankStrategy parse_rank_strategy(std::string_view text);  // throws Error(bad_input)

struct RankScore {
    long long heat = 0;
    long long popularity = 0;
    long long combined = 0;
};

struct Ranked {
    ExtractSuggestion suggestion;
    RankScore score;
};

/// Descending by the chosen score; ties go to higher popularity, then the
/// longer fragment, then the smaller start line.
std::vector<Ranked> score(const std::vector<ExtractSuggestion>& applicable, const HeatMap& heatmap,
                          RankStrategy strategy = RankStrategy::combined);

std::vector<Ranked> top_n(const std::vector<Ranked>& ordered, int n = 5);

}  // namespace xmethod

#include "xmethod/ranking.hpp"

#include <algorithm>
#include <numeric>

namespace xmethod {

HeatMap::HeatMap(int first_line, int last_line)
    : first_(first_line), freq_(static_cast<std::size_t>(std::max(0, last_line - first_line + 1)), 0) {}

void HeatMap::cover(LineRange r) {
    for (int l = std::max(r.start, first_); l <= std::min(r.end, last_line()); ++l) {
        ++freq_[static_cast<std::size_t>(l - first_)];
    }
}

int HeatMap::at(int line) const {
    if (line < first_ || line > last_line()) return 0;
    return freq_[static_cast<std::size_t>(line - first_)];
}

int HeatMap::heat(LineRange r) const {
    int h = 0;
    for (int l = r.start; l <= r.end; ++l) h += at(l);
    return h;
}

int HeatMap::total() const { return std::accumulate(freq_.begin(), freq_.end(), 0); }

HeatMap build_heatmap(const LongMethod& host, const std::vector<ExtractSuggestion>& applicable) {
    HeatMap map(host.start_line, host.end_line);
    for (const auto& s : applicable) map.cover(s.range());
    return map;
}

std::string_view to_string(RankStrategy s) noexcept {
    switch (s) {
        case RankStrategy::heat: return "heat";
        case RankStrategy::popularity: return "popularity";
        case RankStrategy::combined: return "combined";
    }
    return "combined";
}

RankStrategy parse_rank_strategy(std::string_view text) {
    if (text == "heat") return RankStrategy::heat;
    if (text == "popularity") return RankStrategy::popularity;
    if (text == "combined") return RankStrategy::combined;
    throw Error(Errc::bad_input, "unknown rank strategy '" + std::string(text) + "'");
}

std::vector<Ranked> score(const std::vector<ExtractSuggestion>& applicable, const HeatMap& heatmap,
                          RankStrategy strategy) {
    std::vector<Ranked> out;
    out.reserve(applicable.size());
    for (const auto& s : applicable) {
        RankScore r;
        r.heat = heatmap.heat(s.range());
        r.popularity = s.count;
        r.combined = r.heat * r.popularity;
        out.push_back({s, r});
    }
    auto key = [strategy](const RankScore& r) {
        switch (strategy) {
            case RankStrategy::heat: return r.heat;
            case RankStrategy::popularity: return r.popularity;
            case RankStrategy::combined: return r.combined;
        }
        return r.combined;
    };
    std::sort(out.begin(), out.end(), [&](const Ranked& x, const Ranked& y) {
        if (key(x.score) != key(y.score)) return key(x.score) > key(y.score);
        if (x.score.popularity != y.score.popularity) return x.score.popularity > y.score.popularity;
        if (x.suggestion.line_count() != y.suggestion.line_count()) {
            return x.suggestion.line_count() > y.suggestion.line_count();
        }
        if (x.suggestion.start_line != y.suggestion.start_line) return x.suggestion.start_line < y.suggestion.start_line;
        return x.suggestion.name < y.suggestion.name;
    });
    return out;
}

std::vector<Ranked> top_n(const std::vector<Ranked>& ordered, int n) {
    if (n < 1) throw Error(Errc::bad_input, "top-n must be at least 1");
    const auto k = std::min(ordered.size(), static_cast<std::size_t>(n));
    return {ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(k)};
}

}  // namespace xmethod

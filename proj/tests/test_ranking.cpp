#include <catch_amalgamated.hpp>

#include "support/criteria.hpp"
#include "xmethod/pipeline.hpp"
#include "xmethod/ranking.hpp"

using namespace xmethod;

TEST_CASE("heat is the sum of line frequencies and combined is heat times popularity") {
    HeatMap map(10, 20);
    map.cover({11, 13});
    map.cover({12, 14});
    map.cover({12, 12});
    CHECK(map.at(11) == 1);
    CHECK(map.at(12) == 3);
    CHECK(map.at(9) == 0);
    CHECK(map.heat({11, 12}) == 4);
    CHECK(map.total() == 7);

    HeatMap flat(1, 10);
    flat.cover({1, 5});
    const auto ranked = score({{"f", 1, 5, 4}}, flat);
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].score.heat == 5);
    CHECK(ranked[0].score.popularity == 4);
    CHECK(ranked[0].score.combined == 20);
}

TEST_CASE("ties fall back to popularity, then length, then start line") {
    HeatMap map(1, 30);
    map.cover({1, 30});
    // heat*count: 2*3=6, 3*2=6, 6*1=6, 6*1=6
    const std::vector<ExtractSuggestion> in{{"a", 1, 2, 3}, {"b", 5, 7, 2}, {"c", 20, 25, 1}, {"d", 10, 15, 1}};
    const auto out = score(in, map);
    REQUIRE(out.size() == 4);
    CHECK(out[0].suggestion.name == "a");
    CHECK(out[1].suggestion.name == "b");
    CHECK(out[2].suggestion.name == "d");
    CHECK(out[3].suggestion.name == "c");
}

TEST_CASE("strategies order by their own key") {
    HeatMap map(1, 20);
    map.cover({1, 10});
    const std::vector<ExtractSuggestion> in{{"wide", 1, 10, 1}, {"hot", 2, 3, 4}};
    CHECK(score(in, map, RankStrategy::heat)[0].suggestion.name == "wide");
    CHECK(score(in, map, RankStrategy::popularity)[0].suggestion.name == "hot");
    CHECK(score(in, map, RankStrategy::combined)[0].suggestion.name == "wide");
    CHECK(parse_rank_strategy("heat") == RankStrategy::heat);
    CHECK_THROWS_AS(parse_rank_strategy("hotness"), Error);
}

TEST_CASE("top_n truncates without reordering") {
    HeatMap map(1, 20);
    map.cover({1, 20});
    std::vector<ExtractSuggestion> in;
    for (int i = 0; i < 8; ++i) in.push_back({"s" + std::to_string(i), i + 1, i + 2, i + 1});
    const auto all = score(in, map);
    const auto top = top_n(all, 5);
    REQUIRE(top.size() == 5);
    for (std::size_t i = 0; i < top.size(); ++i) CHECK(top[i].suggestion.name == all[i].suggestion.name);
    CHECK(top_n(all, 20).size() == 8);
}

TEST_CASE("motivating example scores") {
    const auto m = testsupport::motivating_method();
    const auto r = run_pipeline(m, testsupport::replay_config(testsupport::fixture("motivating/cache")));
    REQUIRE(r.ranked.size() == 3);
    CHECK(r.ranked[0].suggestion.range() == LineRange{160, 163});
    CHECK(r.ranked[0].score.combined == 16);
    CHECK(r.ranked[1].suggestion.range() == LineRange{157, 158});
    CHECK(r.ranked[1].score.combined == 10);
    CHECK(r.ranked[2].suggestion.range() == LineRange{152, 155});
    CHECK(r.ranked[2].score.combined == 8);
}

TEST_CASE("ranking identities hold on random suggestion sets") {
    const auto r = testsupport::check_ranking_identities(200, 5);
    INFO(r.detail);
    CHECK(r.passed);
}

#include <fstream>

#include "doctest.h"
#include "opsched/config.hpp"
#include "support.hpp"

using namespace opsched;

TEST_CASE("presets") {
    const auto c1 = preset(IterationTag::Iter1);
    CHECK(c1.fish_mode == FishMode::GrowthStages);
    CHECK(c1.fish_pool_size == 6);
    CHECK(c1.growth_stages_per_fish == 4);
    CHECK(c1.points_per_completion == 200);

    const auto c2 = preset(IterationTag::Iter2);
    CHECK(c2.fish_pool_size == 25);
    CHECK(c2.gap_after_fish_counts == std::vector<int>{4, 9, 13, 17, 21});
    CHECK(c2.level2_threshold_days == 15);
    CHECK(c2.sea_fish_start_index == 13);
    CHECK(c2.money_mode == MoneyMode::None);

    const auto c3 = preset(IterationTag::Iter3);
    CHECK(c3.money_mode == MoneyMode::Milestones);
    CHECK(c3.milestone_table == std::vector<Milestone>{{3, 25}, {6, 50}, {12, 100}, {18, 200}, {30, 300}});
    CHECK(c3.meme_prob == 0.0);

    const auto c4 = preset(IterationTag::Iter4);
    CHECK(c4.meme_prob == 0.5);
    CHECK(c4.insight_prob == 0.5);
    CHECK(c4.meme_pool_size == 120);
    CHECK(c4.insight_kind_count == 7);

    const auto c5 = preset(IterationTag::Iter5);
    CHECK(c5.money_mode == MoneyMode::FlatPerStreak);
    CHECK(c5.flat_streak_len == 3);
    CHECK(c5.flat_streak_cents == 100);
    CHECK(c5.front_load_day1_cents == 100);
    CHECK(c5.double_fish_days == 2);
    CHECK(c5.contact_policy == ContactPolicy{true, 2, 3, 21});

    for (int t = 0; t < 5; ++t) CHECK_NOTHROW(validate(preset(static_cast<IterationTag>(t))));
}

TEST_CASE("validation names the invariant") {
    auto c = preset(IterationTag::Iter4);
    c.meme_prob = 1.5;
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("meme_prob"), ConfigError);

    c = preset(IterationTag::Iter3);
    c.milestone_table = {{3, 25}, {31, 300}};
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("horizon"), ConfigError);

    c = preset(IterationTag::Iter2);
    c.gap_after_fish_counts = {4, 4};
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("strictly increasing"), ConfigError);
    c.gap_after_fish_counts = {4, 25};
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("fish_pool_size"), ConfigError);

    c = preset(IterationTag::Iter2);
    c.sea_fish_start_index = 26;
    CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("sea_fish_start_index"), ConfigError);

    c = preset(IterationTag::Iter5);
    c.flat_streak_cents = -1;
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("fingerprint tracks content") {
    const auto a = preset(IterationTag::Iter4);
    auto b = a;
    CHECK(fingerprint(a) == fingerprint(b));
    CHECK(fingerprint(a).size() == 64);
    b.meme_prob = 0.4;
    CHECK(fingerprint(a) != fingerprint(b));
    CHECK(fingerprint(preset(IterationTag::Iter3)) != fingerprint(preset(IterationTag::Iter4)));
}

TEST_CASE("YAML blocks override presets") {
    const auto c = parse_schedule_config(R"(
use: Iter5
Iter3:
  horizon_days: 18
  milestone_table: {3: 25, 6: 50, 12: 100, 18: 200}
Iter5:
  meme_prob: 0.25
  contact_policy:
    repeat_every: 4
)");
    auto expected = preset(IterationTag::Iter5);
    expected.meme_prob = 0.25;
    expected.contact_policy.repeat_every = 4;
    CHECK(c == expected);

    CHECK(parse_schedule_config("Iter2:\n") == preset(IterationTag::Iter2));
    CHECK(parse_schedule_config("use: Iter1\n") == preset(IterationTag::Iter1));
}

TEST_CASE("YAML errors") {
    CHECK_THROWS_WITH_AS(parse_schedule_config("Iter2:\n  fish_count: 3\n"), doctest::Contains("fish_count"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_schedule_config("Iter9:\n"), doctest::Contains("Iter9"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_schedule_config("Iter2:\n  contact_policy: {every: 3}\n"),
                         doctest::Contains("contact_policy.every"), ConfigError);
    CHECK_THROWS_AS(parse_schedule_config("Iter2: {}\nIter3: {}\n"), ConfigError);
    CHECK_THROWS_AS(parse_schedule_config("Iter2:\n  fish_pool_size: many\n"), ConfigError);
    CHECK_THROWS_AS(parse_schedule_config("[1, 2"), ConfigError);
    // an unselected block must still be valid
    CHECK_THROWS_WITH_AS(parse_schedule_config("use: Iter2\nIter3:\n  milestone_table: {6: 50, 3: 25}\n"),
                         doctest::Contains("non-increasing milestones"), ConfigError);
    CHECK_THROWS_AS(load_schedule_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("dump and parse round trip") {
    Stream rng(31);
    for (int i = 0; i < 200; ++i) {
        const auto c = testing_support::random_config(rng);
        const auto text = dump_schedule_config(c);
        CHECK(parse_schedule_config(text) == c);
    }
}

TEST_CASE("shipped presets file") {
    const std::string path = std::string(OPSCHED_SOURCE_DIR) + "/configs/presets.yaml";
    std::ifstream in(path);
    REQUIRE(in.good());
    const auto text = std::string(std::istreambuf_iterator<char>(in), {});
    // The file selects Iter5; every block equals its preset.
    CHECK(parse_schedule_config(text) == preset(IterationTag::Iter5));
    for (int t = 0; t < 5; ++t) {
        const auto tag = static_cast<IterationTag>(t);
        const auto selected = std::string("use: ") + std::string(to_string(tag)) + "\n";
        auto body = text.substr(text.find('\n', text.find("use:")) + 1);
        CHECK(parse_schedule_config(selected + body) == preset(tag));
    }
}

#include <set>

#include "doctest.h"
#include "opsched/assessments.hpp"

using namespace opsched;

TEST_CASE("spatial sequences stay in range") {
    Stream rng(1);
    for (int i = 0; i < 100000; ++i) {
        const auto task = gen_spatial(rng);
        CHECK(task.target.size() == 5);
        for (const int cell : task.target) {
            CHECK(cell >= 1);
            CHECK(cell <= 9);
        }
    }
}

TEST_CASE("spatial generation is deterministic per stream state") {
    Stream a(99);
    Stream b = a;
    CHECK(gen_spatial(a).target == gen_spatial(b).target);
}

TEST_CASE("spatial first position is uniform") {
    Stream rng(2);
    std::array<int, 10> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(gen_spatial(rng).target[0])];
    for (int cell = 1; cell <= 9; ++cell) {
        const double f = counts[static_cast<std::size_t>(cell)] / static_cast<double>(n);
        CHECK(f >= 0.08);
        CHECK(f <= 0.14);
    }
}

TEST_CASE("distinct-cell flag") {
    Stream rng(3);
    for (int i = 0; i < 1000; ++i) {
        const auto task = gen_spatial(rng, true);
        CHECK(std::set<int>(task.target.begin(), task.target.end()).size() == 5);
    }
}

TEST_CASE("spatial scoring") {
    Stream rng(4);
    for (int i = 0; i < 1000; ++i) {
        auto task = gen_spatial(rng);
        task.duration_seconds = 7.5;
        task.attempt = std::vector<int>(task.target.begin(), task.target.end());
        const auto ok = score_spatial(task);
        CHECK(ok.correct);
        CHECK(ok.seconds == 7.5);

        const auto pos = rng.below(5);
        auto wrong = *task.attempt;
        wrong[pos] = wrong[pos] % 9 + 1;
        task.attempt = wrong;
        CHECK_FALSE(score_spatial(task).correct);

        task.attempt = std::vector<int>(task.target.begin(), task.target.begin() + 4);
        CHECK_FALSE(score_spatial(task).correct);
    }
    SpatialTask empty;
    CHECK_THROWS_AS(score_spatial(empty), ScoringError);
}

TEST_CASE("survey forms") {
    CHECK(survey_form_for(7, 30).size() == kBaseItemCount + 14);
    CHECK(survey_form_for(8, 30).size() == kBaseItemCount);
    CHECK(survey_form_for(28, 30).size() == kBaseItemCount + 14);
    CHECK(survey_form_for(1, 30).size() == 7);
    CHECK_THROWS(survey_form_for(0, 30));
    CHECK_THROWS(survey_form_for(31, 30));

    for (const int horizon : {1, 6, 7, 13, 14, 30, 60}) {
        int weekly = 0;
        for (int d = 1; d <= horizon; ++d) weekly += survey_form_for(d, horizon).size() > kBaseItemCount ? 1 : 0;
        CHECK(weekly == horizon / 7);
    }
}

TEST_CASE("schema export") {
    const auto schema = survey_schema();
    const auto& items = schema.at("items");
    CHECK(items.size() == kBaseItemCount + kWeeklyItemCount);
    std::set<std::string> ids;
    int weekly = 0;
    for (const auto& item : items) {
        ids.insert(item.at("id").get<std::string>());
        CHECK(item.at("scale_min").get<double>() < item.at("scale_max").get<double>());
        weekly += item.at("weekly").get<bool>() ? 1 : 0;
    }
    CHECK(ids.size() == items.size());
    CHECK(weekly == 14);
    CHECK(ids.count("stress") == 1);
    CHECK(ids.count("free_hours") == 1);
}

TEST_CASE("response validation") {
    SurveyResponse r;
    r.day = 3;
    r.free_hours = 4;
    CHECK(is_valid(r));
    r.stress = 6;
    CHECK_FALSE(is_valid(r));
    r.stress = 2;
    r.free_hours = 25;
    CHECK_FALSE(is_valid(r));
    r.free_hours = 1;
    r.day = 7;
    CHECK_FALSE(is_valid(r));
    r.weekly_battery.emplace().fill(3);
    CHECK(is_valid(r));
    (*r.weekly_battery)[13] = 0;
    CHECK_FALSE(is_valid(r));
}

TEST_CASE("response JSON round trip") {
    SurveyResponse r{14, 2, 3, 4, 5, 1, 2, 3.5, std::array<int, 14>{1, 2, 3, 4, 5, 1, 2, 3, 4, 5, 1, 2, 3, 4}};
    CHECK(survey_from_json(to_json(r)) == r);
    r.day = 3;
    r.weekly_battery.reset();
    CHECK(survey_from_json(to_json(r)) == r);
    const ActiveTaskResult t{58, true, 9.3};
    CHECK(task_result_from_json(to_json(t)) == t);
}

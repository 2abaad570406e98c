#include <cmath>

#include "behavior_support.hpp"
#include "doctest.h"

using namespace opsched;
using namespace testing_support;

namespace {

constexpr std::array<Reinforcer, 5> kAll{Reinforcer::Points, Reinforcer::Fish, Reinforcer::MoneyCent,
                                         Reinforcer::Meme, Reinforcer::Insight};

RewardEvent event_for(Reinforcer k) {
    switch (k) {
    case Reinforcer::Points: return {1, reward::Points{200}, std::nullopt};
    case Reinforcer::Fish: return {1, reward::Fish{1, Environment::Aquarium}, std::nullopt};
    case Reinforcer::MoneyCent: return {1, reward::Money{100, reward::FlatStreak{}}, std::nullopt};
    case Reinforcer::Meme: return {1, reward::Meme{1, MemeCategory::Funny}, Randomization{0.5, 0.1}};
    case Reinforcer::Insight: return {1, reward::LifeInsight{InsightKind::Fun}, Randomization{0.5, 0.1}};
    }
    return {};
}

}  // namespace

TEST_CASE("perceived value") {
    const AgentParams p;
    const AgentState fresh;
    for (const auto k : kAll) CHECK(perceived_value(k, fresh, p) == p.value_weight[static_cast<std::size_t>(k)]);
    CHECK(perceived_value("fish", fresh, p) == p.value_weight[1]);
    CHECK_THROWS_AS(perceived_value("badge", fresh, p), ParameterError);

    AgentParams zero = p;
    zero.value_weight.fill(0.0);
    AgentState busy;
    for (int i = 0; i < 5; ++i) observe(busy, std::vector<RewardEvent>{event_for(Reinforcer::Fish)}, zero);
    for (const auto k : kAll) CHECK(perceived_value(k, busy, zero) == 0.0);

    AgentState s;
    double last = perceived_value(Reinforcer::Fish, s, p);
    for (int i = 0; i < 20; ++i) {
        observe(s, std::vector<RewardEvent>{event_for(Reinforcer::Fish)}, p);
        CHECK(s.sensitivity[1] < 1.0);
        const double v = p.value_weight[1] * s.sensitivity[1];
        CHECK(v < last);
        last = v;
    }
}

TEST_CASE("satiation window") {
    AgentParams p;
    p.satiation_window = 3;
    p.satiation_penalty = 0.5;
    AgentState s;
    const std::vector<RewardEvent> two{event_for(Reinforcer::Points), event_for(Reinforcer::Fish)};
    for (int i = 0; i < 6; ++i) {
        observe(s, two, p);
        CHECK(static_cast<int>(s.recent_rewards.size()) <= 3);
    }
    CHECK(satiation_factor(s, p) == doctest::Approx(1.0 / (1.0 + 0.5 * 6)));
    // LevelUp and Contact are not reinforcer deliveries
    AgentState q;
    observe(q, std::vector<RewardEvent>{{1, reward::LevelUp{2}, std::nullopt}, {1, reward::Contact{1}, std::nullopt}}, p);
    CHECK(q.recent_rewards.back() == 0);
}

TEST_CASE("sensitivity stays in the unit interval") {
    Stream rng(8);
    for (int iter = 0; iter < 500; ++iter) {
        auto p = random_params(rng);
        for (auto& h : p.habituation) h = rng.uniform();
        AgentState s;
        for (int d = 0; d < 60; ++d) {
            std::vector<RewardEvent> events;
            for (const auto k : kAll) {
                const int n = rng.uniform_int(0, 3);
                for (int i = 0; i < n; ++i) events.push_back(event_for(k));
            }
            observe(s, events, p);
            for (const double x : s.sensitivity) {
                CHECK(x >= 0.0);
                CHECK(x <= 1.0);
            }
        }
    }
}

TEST_CASE("no habituation keeps sensitivity at one; full recovery takes one day") {
    AgentParams p;
    p.habituation.fill(0.0);
    AgentState s;
    for (int d = 0; d < 10; ++d) observe(s, std::vector<RewardEvent>{event_for(Reinforcer::Meme)}, p);
    CHECK(s.sensitivity[3] == 1.0);

    p.habituation.fill(0.4);
    p.resensitization = 1.0;
    for (int d = 0; d < 5; ++d) observe(s, std::vector<RewardEvent>{event_for(Reinforcer::Meme)}, p);
    CHECK(s.sensitivity[3] < 1.0);
    observe(s, std::vector<RewardEvent>{}, p);
    CHECK(s.sensitivity[3] == 1.0);
}

TEST_CASE("discounted milestone") {
    auto c = preset(IterationTag::Iter5);
    c.front_load_day1_cents = 0;
    auto ps = new_participant(c, 1);
    AgentParams p;
    p.discount = 0.5;
    AgentState a;
    AgentParams no_money = p;
    no_money.value_weight[2] = 0.0;
    // the next $1 flat payout is two days after today
    const double money_part = anticipated_reinforcement(ps, c, a, p) - anticipated_reinforcement(ps, c, a, no_money);
    CHECK(money_part == doctest::Approx(0.25 * p.value_weight[2] * 100));

    p.discount = 1.0;
    auto c3 = preset(IterationTag::Iter3);
    auto ps3 = new_participant(c3, 1);
    // survey and task milestones of 25 cents, each 2 days ahead, count fully
    no_money.discount = 1.0;
    const double undiscounted = anticipated_reinforcement(ps3, c3, a, p) - anticipated_reinforcement(ps3, c3, a, no_money);
    CHECK(undiscounted == doctest::Approx(2 * 25 * p.value_weight[2]));
}

TEST_CASE("anticipation matches forward simulation") {
    Stream rng(12);
    for (int iter = 0; iter < 2000; ++iter) {
        const auto params = random_params(rng);
        const auto config = random_config(rng);
        const auto s = random_situation(rng, config, params, 30);
        CHECK(anticipated_reinforcement(s.participant, s.config, s.agent, params) ==
              doctest::Approx(oracle::anticipation(s.participant, s.config, s.agent, params)).epsilon(1e-12));
    }
}

TEST_CASE("richer schedules anticipate no less") {
    Stream rng(13);
    for (int iter = 0; iter < 500; ++iter) {
        const auto params = random_params(rng);
        auto c2 = preset(IterationTag::Iter2);
        auto c4 = preset(IterationTag::Iter4);
        const auto s = random_situation(rng, c2, params, 29);
        // Same trace under Iter4 with randomized kinds switched off so the
        // engine states line up; add them back for the comparison.
        auto c4_quiet = c4;
        c4_quiet.meme_prob = c4_quiet.insight_prob = 0.0;
        c4_quiet.money_mode = MoneyMode::None;
        CHECK(anticipated_reinforcement(s.participant, c4, s.agent, params) >=
              anticipated_reinforcement(s.participant, c2, s.agent, params));
        CHECK(anticipated_reinforcement(s.participant, c4_quiet, s.agent, params) ==
              doctest::Approx(anticipated_reinforcement(s.participant, c2, s.agent, params)));
    }
}

TEST_CASE("completion probability") {
    const auto c = preset(IterationTag::Iter2);
    const auto ps = new_participant(c, 1);
    AgentParams p;
    p.value_weight.fill(0.0);
    p.text_boost = 0.0;
    AgentState a;
    a.day_index = 12;
    CHECK(completion_probability(ps, c, a, p, false) == doctest::Approx(sigmoid(p.base_logit - p.burden_slope * 12)));
    p.base_logit = 0.0;
    p.burden_slope = 0.0;
    CHECK(completion_probability(ps, c, a, p, true) == 0.5);
    p.text_boost = 1.0;
    CHECK(completion_probability(ps, c, a, p, true) > completion_probability(ps, c, a, p, false));

    p.base_logit = -800.0;
    const double tiny = completion_probability(ps, c, a, p, false);
    CHECK(tiny > 0.0);
    CHECK(std::isfinite(tiny));
    CHECK(sigmoid(40.0) < 1.0);
    CHECK(sigmoid(1e6) < 1.0);
    CHECK(sigmoid(-1e6) > 0.0);
    CHECK(sigmoid(-40.0) > 0.0);
}

TEST_CASE("completion probability is monotone in value weights and text boost") {
    Stream rng(14);
    const double eps = 1e-3;
    for (int iter = 0; iter < 500; ++iter) {
        const auto params = random_params(rng);
        const auto config = preset(static_cast<IterationTag>(rng.uniform_int(0, 4)));
        const auto s = random_situation(rng, config, params, 29);
        const bool contact = rng.bernoulli(0.5);
        const double base = completion_probability(s.participant, config, s.agent, params, contact);
        for (std::size_t k = 0; k < kReinforcerCount; ++k) {
            auto q = params;
            q.value_weight[k] += eps;
            CHECK(completion_probability(s.participant, config, s.agent, q, contact) >= base);
        }
        auto q = params;
        q.text_boost += eps;
        CHECK(completion_probability(s.participant, config, s.agent, q, contact) >= base);
    }
}

TEST_CASE("sample_outcome") {
    AgentParams p;
    p.p_partial = 0.0;
    Stream rng(15);
    for (int d = 1; d <= 30; ++d) {
        const auto full = sample_outcome(d, 1.0, p, rng);
        CHECK(full.survey_done);
        CHECK(full.tasks_done);
        CHECK(is_valid(*full.survey_response));
        CHECK(full.task_results->tap_count >= 0);
        const auto none = sample_outcome(d, 0.0, p, rng);
        CHECK_FALSE(none.survey_done);
        CHECK_FALSE(none.tasks_done);
        CHECK_FALSE(none.survey_response.has_value());
    }

    int done = 0;
    int partial = 0;
    p.p_partial = 0.2;
    for (int i = 0; i < 10000; ++i) {
        const auto o = sample_outcome(1, 0.7, p, rng);
        done += o.survey_done ? 1 : 0;
        partial += (o.survey_done && !o.tasks_done) ? 1 : 0;
        CHECK(o.survey_response.has_value() == o.survey_done);
        CHECK(o.task_results.has_value() == o.tasks_done);
    }
    CHECK(done / 10000.0 >= 0.68);
    CHECK(done / 10000.0 <= 0.72);
    CHECK(partial / static_cast<double>(done) == doctest::Approx(0.2).epsilon(0.15));
}

TEST_CASE("sample_day is deterministic and tracks the probability") {
    const auto c = preset(IterationTag::Iter4);
    const auto ps = new_participant(c, 3);
    AgentParams p;
    p.p_partial = 0.0;
    Stream rng(16);
    const auto a = new_agent(p, rng);
    Stream x(17);
    Stream y(17);
    CHECK(sample_day(ps, c, a, p, x, false) == sample_day(ps, c, a, p, y, false));

    const double prob = completion_probability(ps, c, a, p, false);
    int done = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) done += sample_day(ps, c, a, p, x, false).fully_completed() ? 1 : 0;
    CHECK(std::abs(done / static_cast<double>(n) - prob) < 4.0 * std::sqrt(prob * (1 - prob) / n));
}

TEST_CASE("parameter validation and names") {
    AgentParams p;
    CHECK_NOTHROW(validate(p));
    p.discount = 0.0;
    CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("discount"), ParameterError);
    p = {};
    p.habituation[2] = 1.5;
    CHECK_THROWS_AS(validate(p), ParameterError);
    p = {};
    p.value_weight[0] = -1;
    CHECK_THROWS_AS(validate(p), ParameterError);
    p = {};
    p.satiation_window = 0;
    CHECK_THROWS_AS(validate(p), ParameterError);

    p = {};
    set_param(p, "value_weight.money_cent", 0.02);
    CHECK(p.value_weight[2] == 0.02);
    set_param(p, "satiation_window", 4);
    CHECK(p.satiation_window == 4);
    CHECK(get_param(p, "habituation.meme") == p.habituation[3]);
    CHECK_THROWS_AS(set_param(p, "charisma", 1), ParameterError);
    CHECK_THROWS_AS(get_param(p, "value_weight.badge"), ParameterError);
}

TEST_CASE("params YAML round trip") {
    Stream rng(18);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_params(rng);
        CHECK(parse_agent_params(dump_agent_params(p)) == p);
    }
    const auto partial = parse_agent_params("agent:\n  base_logit: 0.5\n  value_weight:\n    fish: 0.4\n");
    CHECK(partial.base_logit == 0.5);
    CHECK(partial.value_weight[1] == 0.4);
    CHECK(partial.burden_slope == AgentParams{}.burden_slope);
    CHECK_THROWS_AS(parse_agent_params("agent:\n  mood: 1\n"), ParameterError);
    CHECK_THROWS_AS(parse_agent_params("model:\n  base_logit: 1\n"), ParameterError);
    CHECK_THROWS_AS(parse_agent_params("agent:\n  discount: 2\n"), ParameterError);
}

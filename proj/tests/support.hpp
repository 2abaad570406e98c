#pragma once

#include <string>
#include <vector>

#include "opsched/engine.hpp"
#include "opsched/rng.hpp"
#include "oracle.hpp"

namespace testing_support {

inline opsched::ScheduleConfig random_config(opsched::Stream& rng) {
    using namespace opsched;
    ScheduleConfig c = preset(static_cast<IterationTag>(rng.uniform_int(0, 4)));
    c.horizon_days = rng.uniform_int(1, 30);
    c.fish_mode = rng.bernoulli(0.8) ? FishMode::OnePerDayWithGaps : FishMode::None;
    c.fish_pool_size = rng.uniform_int(1, 30);
    c.gap_after_fish_counts.clear();
    for (int g = 0; g < c.fish_pool_size; ++g) {
        if (rng.bernoulli(0.25)) c.gap_after_fish_counts.push_back(g);
    }
    c.levels_enabled = rng.bernoulli(0.7);
    c.level2_threshold_days = rng.uniform_int(1, c.horizon_days);
    c.sea_fish_start_index = rng.uniform_int(1, c.fish_pool_size);
    c.double_fish_days = rng.uniform_int(0, 3);

    c.money_mode = static_cast<MoneyMode>(rng.uniform_int(0, 2));
    c.milestone_table.clear();
    for (int len = 1; len <= c.horizon_days; ++len) {
        if (rng.bernoulli(0.2)) c.milestone_table.push_back({len, rng.uniform_int(0, 300)});
    }
    c.flat_streak_len = rng.uniform_int(1, 5);
    c.flat_streak_cents = rng.uniform_int(0, 200);
    c.front_load_day1_cents = rng.bernoulli(0.5) ? 100 : 0;

    c.meme_prob = rng.uniform();
    c.insight_prob = rng.uniform();
    c.meme_pool_size = rng.uniform_int(1, 130);
    c.insight_kind_count = rng.uniform_int(1, 7);

    c.contact_policy.enabled = rng.bernoulli(0.7);
    c.contact_policy.first_after_missed = rng.uniform_int(1, 4);
    c.contact_policy.repeat_every = rng.uniform_int(1, 4);
    c.contact_policy.stop_after_silent = rng.uniform_int(0, 25);
    return c;
}

inline oracle::Trace random_trace(opsched::Stream& rng, int days) {
    // Mix of engaged stretches and silences so long runs occur.
    oracle::Trace t;
    const double p_full = rng.uniform(0.2, 1.0);
    for (int d = 0; d < days; ++d) {
        oracle::Day day;
        if (rng.bernoulli(p_full)) {
            day = {true, true};
        } else {
            day = {rng.bernoulli(0.3), rng.bernoulli(0.3)};
        }
        t.push_back(day);
    }
    return t;
}

struct Run {
    opsched::ParticipantState state;
    std::vector<opsched::StepResult> days;
};

inline Run run_trace(const opsched::ScheduleConfig& c, const oracle::Trace& t, std::uint64_t seed = 1) {
    Run r{opsched::new_participant(c, seed), {}};
    for (std::size_t i = 0; i < t.size(); ++i) {
        r.days.push_back(opsched::step_day(r.state, opsched::make_outcome(static_cast<int>(i) + 1, t[i].survey, t[i].tasks), c));
    }
    return r;
}

inline oracle::Trace perfect(int days) { return oracle::Trace(static_cast<std::size_t>(days), {true, true}); }
inline oracle::Trace silent(int days) { return oracle::Trace(static_cast<std::size_t>(days), {false, false}); }

template <typename T>
int count_kind(const std::vector<opsched::RewardEvent>& events) {
    int n = 0;
    for (const auto& e : events) n += e.is<T>() ? 1 : 0;
    return n;
}

}  // namespace testing_support

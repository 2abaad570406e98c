#include "opsched/engine.hpp"

#include <algorithm>
#include <numeric>

namespace opsched {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

constexpr std::array<std::string_view, 7> kInsightNames{
    "stress", "loneliness", "fun", "novelty", "free_hours", "tap_count", "spatial_seconds"};

RewardEvent make(int day, reward::Kind kind) { return {day, std::move(kind), std::nullopt}; }

void validate_outcome(const ParticipantState& state, const DayOutcome& o, const ScheduleConfig& config) {
    if (o.day != state.day + 1) {
        throw SequencingError("expected outcome for day " + std::to_string(state.day + 1) + ", got day " +
                              std::to_string(o.day));
    }
    if (o.day > config.horizon_days) {
        throw HorizonError("day " + std::to_string(o.day) + " is past the study horizon of " +
                           std::to_string(config.horizon_days) + " days");
    }
    if (o.survey_response.has_value() != o.survey_done) {
        throw SequencingError("survey_response must be present iff survey_done (day " + std::to_string(o.day) + ")");
    }
    if (o.task_results.has_value() != o.tasks_done) {
        throw SequencingError("task_results must be present iff tasks_done (day " + std::to_string(o.day) + ")");
    }
}

std::vector<int>& paid_for(ParticipantState& s, Tracker t) {
    return t == Tracker::Survey ? s.survey_milestones_paid : s.task_milestones_paid;
}

}  // namespace

DayOutcome make_outcome(int day, bool survey_done, bool tasks_done) {
    DayOutcome o{day, survey_done, tasks_done, std::nullopt, std::nullopt};
    if (survey_done) {
        SurveyResponse r;
        r.day = day;
        if (is_weekly_day(day)) r.weekly_battery.emplace().fill(1);
        o.survey_response = r;
    }
    if (tasks_done) o.task_results = ActiveTaskResult{};
    return o;
}

std::string_view to_string(Tracker t) { return t == Tracker::Survey ? "survey" : "tasks"; }

std::string_view to_string(InsightKind k) { return kInsightNames[static_cast<std::size_t>(k)]; }

InsightKind parse_insight_kind(std::string_view s) {
    for (std::size_t i = 0; i < kInsightNames.size(); ++i) {
        if (kInsightNames[i] == s) return kInsightKinds[i];
    }
    throw std::invalid_argument("unknown insight kind '" + std::string(s) + "'");
}

Environment environment_for(int fish_index, const ScheduleConfig& config) {
    return config.levels_enabled && fish_index >= config.sea_fish_start_index ? Environment::Sea
                                                                              : Environment::Aquarium;
}

MemeCategory meme_category(int meme_id, const ScheduleConfig& config) {
    return meme_id <= (config.meme_pool_size + 1) / 2 ? MemeCategory::Funny : MemeCategory::Inspirational;
}

ParticipantState new_participant(const ScheduleConfig& config, std::uint64_t seed) {
    validate(config);
    ParticipantState s;
    s.stream = Stream(seed);
    s.memes_remaining.resize(static_cast<std::size_t>(config.meme_pool_size));
    std::iota(s.memes_remaining.begin(), s.memes_remaining.end(), 1);
    return s;
}

std::vector<RewardEvent> fish_award(ParticipantState& s, const ScheduleConfig& config) {
    std::vector<RewardEvent> events;
    const auto& gaps = config.gap_after_fish_counts;
    const auto awarded = static_cast<int>(s.fish_awarded.size());
    if (s.gaps_consumed < gaps.size() && awarded >= gaps[s.gaps_consumed]) {
        ++s.gaps_consumed;
        return events;
    }
    const int count = s.day <= config.double_fish_days ? 2 : 1;
    for (int i = 0; i < count && static_cast<int>(s.fish_awarded.size()) < config.fish_pool_size; ++i) {
        const int index = static_cast<int>(s.fish_awarded.size()) + 1;
        s.fish_awarded.push_back(index);
        events.push_back(make(s.day, reward::Fish{index, environment_for(index, config)}));
    }
    return events;
}

std::vector<RewardEvent> growth_stage_advance(ParticipantState& s, const ScheduleConfig& config) {
    std::vector<RewardEvent> events;
    if (static_cast<int>(s.fish_awarded.size()) >= config.fish_pool_size) return events;
    auto& g = s.growth_progress;
    ++g.stage;
    events.push_back(make(s.day, reward::GrowthStage{g.fish_index, g.stage}));
    if (g.stage >= config.growth_stages_per_fish) {
        s.fish_awarded.push_back(g.fish_index);
        events.push_back(make(s.day, reward::Fish{g.fish_index, environment_for(g.fish_index, config)}));
        ++g.fish_index;
        g.stage = 0;
    }
    return events;
}

std::vector<RewardEvent> milestone_money(ParticipantState& s, const ScheduleConfig& config) {
    std::vector<RewardEvent> events;
    for (const Tracker tracker : {Tracker::Survey, Tracker::Tasks}) {
        const int streak = tracker == Tracker::Survey ? s.survey_streak : s.task_streak;
        auto& paid = paid_for(s, tracker);
        for (const auto& m : config.milestone_table) {
            if (m.streak_days != streak) continue;
            if (std::find(paid.begin(), paid.end(), m.streak_days) != paid.end()) continue;
            paid.push_back(m.streak_days);
            s.money_cents += m.cents;
            events.push_back(make(s.day, reward::Money{m.cents, reward::Milestone{tracker, m.streak_days}}));
        }
    }
    return events;
}

std::optional<RewardEvent> flat_money(ParticipantState& s, const ScheduleConfig& config, bool completed) {
    if (!completed) {
        s.flat_streak_counter = 0;
        return std::nullopt;
    }
    if (++s.flat_streak_counter < config.flat_streak_len) return std::nullopt;
    s.flat_streak_counter = 0;
    s.money_cents += config.flat_streak_cents;
    return make(s.day, reward::Money{config.flat_streak_cents, reward::FlatStreak{}});
}

std::optional<RewardEvent> meme_draw(ParticipantState& s, const ScheduleConfig& config, bool survey_done) {
    if (!survey_done || config.meme_prob <= 0.0) return std::nullopt;
    const double draw = s.stream.uniform();
    if (!(draw < config.meme_prob)) return std::nullopt;
    if (s.memes_remaining.empty()) {
        s.memes_remaining.resize(static_cast<std::size_t>(config.meme_pool_size));
        std::iota(s.memes_remaining.begin(), s.memes_remaining.end(), 1);
    }
    const auto pick = static_cast<std::ptrdiff_t>(s.stream.below(s.memes_remaining.size()));
    const int id = s.memes_remaining[static_cast<std::size_t>(pick)];
    s.memes_remaining.erase(s.memes_remaining.begin() + pick);
    return RewardEvent{s.day, reward::Meme{id, meme_category(id, config)}, Randomization{config.meme_prob, draw}};
}

std::optional<RewardEvent> insight_draw(ParticipantState& s, const ScheduleConfig& config, bool tasks_done) {
    if (!tasks_done || config.insight_prob <= 0.0) return std::nullopt;
    const double draw = s.stream.uniform();
    if (!(draw < config.insight_prob)) return std::nullopt;
    const auto kind = kInsightKinds[static_cast<std::size_t>(s.insights_rotation)];
    s.insights_rotation = (s.insights_rotation + 1) % config.insight_kind_count;
    return RewardEvent{s.day, reward::LifeInsight{kind}, Randomization{config.insight_prob, draw}};
}

std::optional<RewardEvent> contact_update(ParticipantState& s, const ScheduleConfig& config) {
    const auto& cp = config.contact_policy;
    if (!cp.enabled) return std::nullopt;
    const int run = s.missed_run;
    if (run >= cp.stop_after_silent) return std::nullopt;
    const bool due = run == cp.first_after_missed ||
                     (run > cp.first_after_missed && (run - cp.first_after_missed) % cp.repeat_every == 0);
    if (!due) return std::nullopt;
    const int ordinal = ++s.episode_contacts;
    s.contacts_sent.push_back({s.day, ordinal});
    return make(s.day, reward::Contact{ordinal});
}

StepResult step_day(ParticipantState& state, const DayOutcome& outcome, const ScheduleConfig& config) {
    validate_outcome(state, outcome, config);

    // Work on a copy so a throw below leaves the caller's state intact.
    ParticipantState s = state;
    StepResult result;
    auto& events = result.events;
    const auto append = [&events](std::vector<RewardEvent> more) {
        events.insert(events.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    };

    s.day = outcome.day;
    const bool full = outcome.fully_completed();

    s.survey_streak = outcome.survey_done ? s.survey_streak + 1 : 0;
    s.task_streak = outcome.tasks_done ? s.task_streak + 1 : 0;
    s.combined_streak = full ? s.combined_streak + 1 : 0;
    if (s.survey_streak == 0) s.survey_milestones_paid.clear();
    if (s.task_streak == 0) s.task_milestones_paid.clear();
    if (full) {
        s.completed_days.push_back(s.day);
        s.missed_run = 0;
        s.episode_contacts = 0;
    } else {
        ++s.missed_run;
    }
    s.disengaged = s.missed_run >= config.contact_policy.stop_after_silent;

    if (full) {
        s.points_total += config.points_per_completion;
        events.push_back(make(s.day, reward::Points{config.points_per_completion}));

        const auto before = s.fish_awarded.size();
        if (config.fish_mode == FishMode::OnePerDayWithGaps) {
            const bool exhausted = static_cast<int>(before) >= config.fish_pool_size;
            append(fish_award(s, config));
            if (exhausted) result.notices.emplace_back("fish_pool_exhausted");
        } else if (config.fish_mode == FishMode::GrowthStages) {
            if (static_cast<int>(before) >= config.fish_pool_size) result.notices.emplace_back("fish_pool_exhausted");
            append(growth_stage_advance(s, config));
        }

        if (config.levels_enabled && s.level == 1 &&
            static_cast<int>(s.completed_days.size()) >= config.level2_threshold_days) {
            s.level = 2;
            events.push_back(make(s.day, reward::LevelUp{2}));
        }

        if (s.day == 1 && config.front_load_day1_cents > 0) {
            s.money_cents += config.front_load_day1_cents;
            events.push_back(make(s.day, reward::Money{config.front_load_day1_cents, reward::FrontLoad{}}));
        }
    }

    if (config.money_mode == MoneyMode::Milestones) {
        append(milestone_money(s, config));
    } else if (config.money_mode == MoneyMode::FlatPerStreak) {
        if (auto e = flat_money(s, config, full)) events.push_back(std::move(*e));
    }

    if (auto e = meme_draw(s, config, outcome.survey_done)) events.push_back(std::move(*e));
    if (auto e = insight_draw(s, config, outcome.tasks_done)) events.push_back(std::move(*e));
    if (auto e = contact_update(s, config)) events.push_back(std::move(*e));

    state = std::move(s);
    return result;
}

std::int64_t max_earnings(const ScheduleConfig& config, int horizon) {
    if (horizon <= 0) return 0;
    std::int64_t cents = config.front_load_day1_cents;
    switch (config.money_mode) {
    case MoneyMode::None:
        return cents;
    case MoneyMode::Milestones:
        for (const auto& m : config.milestone_table) {
            if (m.streak_days <= horizon) cents += 2 * m.cents;  // survey + tasks trackers
        }
        return cents;
    case MoneyMode::FlatPerStreak:
        return cents + static_cast<std::int64_t>(horizon / config.flat_streak_len) * config.flat_streak_cents;
    }
    return cents;
}

// --- JSON ------------------------------------------------------------------

std::string_view kind_name(const RewardEvent& e) {
    return std::visit(overloaded{
                          [](const reward::Points&) { return std::string_view("Points"); },
                          [](const reward::Fish&) { return std::string_view("Fish"); },
                          [](const reward::GrowthStage&) { return std::string_view("GrowthStage"); },
                          [](const reward::LevelUp&) { return std::string_view("LevelUp"); },
                          [](const reward::Money&) { return std::string_view("Money"); },
                          [](const reward::Meme&) { return std::string_view("Meme"); },
                          [](const reward::LifeInsight&) { return std::string_view("LifeInsight"); },
                          [](const reward::Contact&) { return std::string_view("Contact"); },
                      },
                      e.kind);
}

nlohmann::json payload_json(const RewardEvent& e) {
    using nlohmann::json;
    return std::visit(
        overloaded{
            [](const reward::Points& p) { return json{{"amount", p.amount}}; },
            [](const reward::Fish& f) {
                return json{{"index", f.index}, {"level_tag", f.environment == Environment::Sea ? "sea" : "aquarium"}};
            },
            [](const reward::GrowthStage& g) { return json{{"fish", g.fish}, {"stage", g.stage}}; },
            [](const reward::LevelUp& l) { return json{{"level", l.level}}; },
            [](const reward::Money& m) {
                json j{{"cents", m.cents}};
                std::visit(overloaded{
                               [&j](const reward::Milestone& ms) {
                                   j["reason"] = "milestone";
                                   j["tracker"] = to_string(ms.tracker);
                                   j["streak_days"] = ms.streak_days;
                               },
                               [&j](const reward::FlatStreak&) { j["reason"] = "flat_streak"; },
                               [&j](const reward::FrontLoad&) { j["reason"] = "front_load"; },
                           },
                           m.reason);
                return j;
            },
            [](const reward::Meme& m) {
                return json{{"id", m.id}, {"category", m.category == MemeCategory::Funny ? "funny" : "inspirational"}};
            },
            [](const reward::LifeInsight& l) { return json{{"kind", to_string(l.kind)}}; },
            [](const reward::Contact& c) { return json{{"ordinal", c.ordinal}}; },
        },
        e.kind);
}

nlohmann::json to_json(const RewardEvent& e) {
    nlohmann::json j{{"day", e.day}, {"kind", kind_name(e)}, {"payload", payload_json(e)}};
    if (e.randomization) {
        j["randomization"] = {{"probability", e.randomization->probability}, {"draw", e.randomization->draw}};
    } else {
        j["randomization"] = nullptr;
    }
    return j;
}

RewardEvent event_from_json(const nlohmann::json& j) {
    RewardEvent e;
    e.day = j.at("day").get<int>();
    const auto kind = j.at("kind").get<std::string>();
    const auto& p = j.at("payload");
    if (kind == "Points") {
        e.kind = reward::Points{p.at("amount").get<std::int64_t>()};
    } else if (kind == "Fish") {
        e.kind = reward::Fish{p.at("index").get<int>(),
                              p.at("level_tag").get<std::string>() == "sea" ? Environment::Sea : Environment::Aquarium};
    } else if (kind == "GrowthStage") {
        e.kind = reward::GrowthStage{p.at("fish").get<int>(), p.at("stage").get<int>()};
    } else if (kind == "LevelUp") {
        e.kind = reward::LevelUp{p.at("level").get<int>()};
    } else if (kind == "Money") {
        reward::Money m{p.at("cents").get<std::int64_t>(), reward::FrontLoad{}};
        const auto reason = p.at("reason").get<std::string>();
        if (reason == "milestone") {
            const auto tracker = p.at("tracker").get<std::string>() == "survey" ? Tracker::Survey : Tracker::Tasks;
            m.reason = reward::Milestone{tracker, p.at("streak_days").get<int>()};
        } else if (reason == "flat_streak") {
            m.reason = reward::FlatStreak{};
        } else if (reason != "front_load") {
            throw std::invalid_argument("unknown money reason '" + reason + "'");
        }
        e.kind = m;
    } else if (kind == "Meme") {
        e.kind = reward::Meme{p.at("id").get<int>(), p.at("category").get<std::string>() == "funny"
                                                         ? MemeCategory::Funny
                                                         : MemeCategory::Inspirational};
    } else if (kind == "LifeInsight") {
        e.kind = reward::LifeInsight{parse_insight_kind(p.at("kind").get<std::string>())};
    } else if (kind == "Contact") {
        e.kind = reward::Contact{p.at("ordinal").get<int>()};
    } else {
        throw std::invalid_argument("unknown event kind '" + kind + "'");
    }
    if (j.contains("randomization") && !j.at("randomization").is_null()) {
        const auto& r = j.at("randomization");
        e.randomization = Randomization{r.at("probability").get<double>(), r.at("draw").get<double>()};
    }
    return e;
}

nlohmann::json to_json(const DayOutcome& o) {
    nlohmann::json j{{"day", o.day}, {"survey_done", o.survey_done}, {"tasks_done", o.tasks_done}};
    j["survey_response"] = o.survey_response ? to_json(*o.survey_response) : nlohmann::json(nullptr);
    j["task_results"] = o.task_results ? to_json(*o.task_results) : nlohmann::json(nullptr);
    return j;
}

DayOutcome outcome_from_json(const nlohmann::json& j) {
    DayOutcome o;
    o.day = j.at("day").get<int>();
    o.survey_done = j.at("survey_done").get<bool>();
    o.tasks_done = j.at("tasks_done").get<bool>();
    if (j.contains("survey_response") && !j.at("survey_response").is_null()) {
        o.survey_response = survey_from_json(j.at("survey_response"));
    }
    if (j.contains("task_results") && !j.at("task_results").is_null()) {
        o.task_results = task_result_from_json(j.at("task_results"));
    }
    return o;
}

}  // namespace opsched

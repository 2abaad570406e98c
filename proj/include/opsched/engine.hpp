#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "opsched/assessments.hpp"
#include "opsched/config.hpp"
#include "opsched/rng.hpp"

namespace opsched {

class SequencingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class HorizonError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct DayOutcome {
    int day = 0;
    bool survey_done = false;
    bool tasks_done = false;
    std::optional<SurveyResponse> survey_response;
    std::optional<ActiveTaskResult> task_results;

    bool fully_completed() const { return survey_done && tasks_done; }
    bool operator==(const DayOutcome&) const = default;
};

/// Outcome with placeholder payloads, for drivers that only care about flags.
DayOutcome make_outcome(int day, bool survey_done, bool tasks_done);

enum class Tracker { Survey, Tasks };
enum class Environment { Aquarium, Sea };
enum class MemeCategory { Funny, Inspirational };
enum class InsightKind { Stress, Loneliness, Fun, Novelty, FreeHours, TapCount, SpatialSeconds };

inline constexpr std::array<InsightKind, 7> kInsightKinds{
    InsightKind::Stress,    InsightKind::Loneliness, InsightKind::Fun,           InsightKind::Novelty,
    InsightKind::FreeHours, InsightKind::TapCount,   InsightKind::SpatialSeconds};

std::string_view to_string(Tracker t);
std::string_view to_string(InsightKind k);
InsightKind parse_insight_kind(std::string_view s);

namespace reward {

struct Points {
    std::int64_t amount = 0;
    bool operator==(const Points&) const = default;
};
struct Fish {
    int index = 0;
    Environment environment = Environment::Aquarium;
    bool operator==(const Fish&) const = default;
};
struct GrowthStage {
    int fish = 0;
    int stage = 0;
    bool operator==(const GrowthStage&) const = default;
};
struct LevelUp {
    int level = 2;
    bool operator==(const LevelUp&) const = default;
};
struct Milestone {
    Tracker tracker = Tracker::Survey;
    int streak_days = 0;
    bool operator==(const Milestone&) const = default;
};
struct FlatStreak {
    bool operator==(const FlatStreak&) const = default;
};
struct FrontLoad {
    bool operator==(const FrontLoad&) const = default;
};
using MoneyReason = std::variant<Milestone, FlatStreak, FrontLoad>;
struct Money {
    std::int64_t cents = 0;
    MoneyReason reason;
    bool operator==(const Money&) const = default;
};
struct Meme {
    int id = 0;
    MemeCategory category = MemeCategory::Funny;
    bool operator==(const Meme&) const = default;
};
struct LifeInsight {
    InsightKind kind = InsightKind::Stress;
    bool operator==(const LifeInsight&) const = default;
};
struct Contact {
    int ordinal = 0;
    bool operator==(const Contact&) const = default;
};

using Kind = std::variant<Points, Fish, GrowthStage, LevelUp, Money, Meme, LifeInsight, Contact>;

}  // namespace reward

/// Provenance of a micro-randomized delivery.
struct Randomization {
    double probability = 0.0;
    double draw = 0.0;
    bool operator==(const Randomization&) const = default;
};

struct RewardEvent {
    int day = 0;
    reward::Kind kind;
    std::optional<Randomization> randomization;

    template <typename T>
    bool is() const { return std::holds_alternative<T>(kind); }
    template <typename T>
    const T& as() const { return std::get<T>(kind); }

    bool operator==(const RewardEvent&) const = default;
};

std::string_view kind_name(const RewardEvent& e);
nlohmann::json payload_json(const RewardEvent& e);
/// Record without participant id: {day, kind, payload, randomization}.
nlohmann::json to_json(const RewardEvent& e);
RewardEvent event_from_json(const nlohmann::json& j);

struct ContactRecord {
    int day = 0;
    int ordinal = 0;
    bool operator==(const ContactRecord&) const = default;
};

struct GrowthProgress {
    int fish_index = 1;
    int stage = 0;
    bool operator==(const GrowthProgress&) const = default;
};

struct ParticipantState {
    int day = 0;
    std::vector<int> completed_days;
    int survey_streak = 0;
    int task_streak = 0;
    int combined_streak = 0;
    int flat_streak_counter = 0;
    std::int64_t points_total = 0;
    std::vector<int> fish_awarded;
    std::size_t gaps_consumed = 0;
    GrowthProgress growth_progress;
    int level = 1;
    std::int64_t money_cents = 0;
    // Milestone lengths already paid in the current unbroken streak, per tracker.
    std::vector<int> survey_milestones_paid;
    std::vector<int> task_milestones_paid;
    std::vector<int> memes_remaining;
    int insights_rotation = 0;
    int missed_run = 0;
    int episode_contacts = 0;
    std::vector<ContactRecord> contacts_sent;
    bool disengaged = false;
    Stream stream;

    bool operator==(const ParticipantState&) const = default;
};

struct StepResult {
    std::vector<RewardEvent> events;
    // Conditions worth logging that are not reinforcements.
    std::vector<std::string> notices;
};

/// Throws ConfigError if the config is invalid.
ParticipantState new_participant(const ScheduleConfig& config, std::uint64_t seed);

/// Advances one day. Events come out in a fixed order: Points, Fish /
/// GrowthStage, LevelUp, front-load Money, streak Money, Meme, LifeInsight,
/// Contact. The state is untouched if the outcome is rejected.
StepResult step_day(ParticipantState& state, const DayOutcome& outcome, const ScheduleConfig& config);

// Per-rule pieces of step_day. Each assumes `state.day` has already been
// advanced to the current day and the streak/missed-run counters updated.

/// Fish for a completed day under the one-per-day schedule. Empty on a gap
/// day or when the pool is exhausted.
std::vector<RewardEvent> fish_award(ParticipantState& state, const ScheduleConfig& config);

/// Advances the growing fish by one stage; emits GrowthStage and, once the
/// fish is fully grown, the Fish itself. Nothing after the pool is grown.
std::vector<RewardEvent> growth_stage_advance(ParticipantState& state, const ScheduleConfig& config);

std::vector<RewardEvent> milestone_money(ParticipantState& state, const ScheduleConfig& config);

/// Counts a completed (or missed) day towards the flat streak and pays when
/// the counter reaches flat_streak_len.
std::optional<RewardEvent> flat_money(ParticipantState& state, const ScheduleConfig& config, bool completed);

std::optional<RewardEvent> meme_draw(ParticipantState& state, const ScheduleConfig& config, bool survey_done);
std::optional<RewardEvent> insight_draw(ParticipantState& state, const ScheduleConfig& config, bool tasks_done);
std::optional<RewardEvent> contact_update(ParticipantState& state, const ScheduleConfig& config);

/// Cents earned under perfect adherence for `horizon` days.
std::int64_t max_earnings(const ScheduleConfig& config, int horizon);

Environment environment_for(int fish_index, const ScheduleConfig& config);
MemeCategory meme_category(int meme_id, const ScheduleConfig& config);

nlohmann::json to_json(const DayOutcome& o);
DayOutcome outcome_from_json(const nlohmann::json& j);

}  // namespace opsched

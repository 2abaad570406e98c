#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace opsched {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class IterationTag { Iter1, Iter2, Iter3, Iter4, Iter5 };
enum class FishMode { GrowthStages, OnePerDayWithGaps, None };
enum class MoneyMode { None, Milestones, FlatPerStreak };

std::string_view to_string(IterationTag tag);
std::string_view to_string(FishMode mode);
std::string_view to_string(MoneyMode mode);
IterationTag parse_iteration_tag(std::string_view s);
FishMode parse_fish_mode(std::string_view s);
MoneyMode parse_money_mode(std::string_view s);

struct Milestone {
    int streak_days = 0;
    std::int64_t cents = 0;

    bool operator==(const Milestone&) const = default;
};

struct ContactPolicy {
    bool enabled = false;
    int first_after_missed = 2;
    int repeat_every = 3;
    int stop_after_silent = 21;

    bool operator==(const ContactPolicy&) const = default;
};

/// Full parameterization of one incentive design. Presets fill every knob;
/// any knob can be overridden afterwards.
struct ScheduleConfig {
    IterationTag iteration_tag = IterationTag::Iter2;

    FishMode fish_mode = FishMode::OnePerDayWithGaps;
    int fish_pool_size = 25;
    int growth_stages_per_fish = 4;
    std::vector<int> gap_after_fish_counts{4, 9, 13, 17, 21};

    // Levels were introduced with the 25-fish schedule; the growth-stage
    // design has a single environment.
    bool levels_enabled = true;
    int level2_threshold_days = 15;
    int sea_fish_start_index = 13;

    std::int64_t points_per_completion = 200;

    MoneyMode money_mode = MoneyMode::None;
    std::vector<Milestone> milestone_table{{3, 25}, {6, 50}, {12, 100}, {18, 200}, {30, 300}};
    int flat_streak_len = 3;
    std::int64_t flat_streak_cents = 100;
    std::int64_t front_load_day1_cents = 0;
    int double_fish_days = 0;

    double meme_prob = 0.0;
    double insight_prob = 0.0;
    int meme_pool_size = 120;
    int insight_kind_count = 7;

    ContactPolicy contact_policy{};

    int horizon_days = 30;
    std::string report_window = "18:00-24:00";

    bool operator==(const ScheduleConfig&) const = default;
};

ScheduleConfig preset(IterationTag tag);

/// Throws ConfigError naming the first violated invariant.
void validate(const ScheduleConfig& config);

nlohmann::json to_json(const ScheduleConfig& config);

/// Hex SHA-256 of the canonical JSON form.
std::string fingerprint(const ScheduleConfig& config);

// Config files are YAML. Each top-level key is an iteration tag naming a
// block; a block starts from that tag's preset and overrides the listed
// keys. `use: <tag>` selects the active block when several are present.
// Unknown keys are rejected.
ScheduleConfig parse_schedule_config(std::string_view yaml_text);
ScheduleConfig load_schedule_config(const std::string& path);
std::string dump_schedule_config(const ScheduleConfig& config);

}  // namespace opsched

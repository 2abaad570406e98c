#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "opsched/rng.hpp"

namespace opsched {

class ScoringError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kWeeklyItemCount = 14;
inline constexpr int kBaseItemCount = 7;
inline constexpr int kSpatialLength = 5;
inline constexpr int kSpatialCells = 9;

/// One daily survey. Ordinals are 1..5; the weekly block holds 14 extra
/// ordinal items (substance-use frequency/motives placeholders).
struct SurveyResponse {
    int day = 0;
    int stress = 1;
    int loneliness = 1;
    int fun = 1;
    int novelty = 1;
    int mood = 1;
    int hopefulness = 1;
    double free_hours = 0.0;
    std::optional<std::array<int, kWeeklyItemCount>> weekly_battery;

    bool operator==(const SurveyResponse&) const = default;
};

struct SpatialTask {
    std::array<int, kSpatialLength> target{};
    std::optional<std::vector<int>> attempt;
    double duration_seconds = 0.0;
};

struct SpatialScore {
    bool correct = false;
    double seconds = 0.0;
};

struct ActiveTaskResult {
    int tap_count = 0;
    bool spatial_correct = false;
    double spatial_seconds = 0.0;

    bool operator==(const ActiveTaskResult&) const = default;
};

struct SurveyItem {
    std::string id;
    std::string text;
    double scale_min = 1;
    double scale_max = 5;
    bool weekly = false;
};

/// Simulated "Sundays": every day divisible by 7.
constexpr bool is_weekly_day(int day) { return day > 0 && day % 7 == 0; }

/// Random 5-cell sequence over the 3x3 grid (cells 1..9). Repeats are
/// allowed unless `distinct_cells` is set.
SpatialTask gen_spatial(Stream& stream, bool distinct_cells = false);

/// Throws ScoringError when no attempt was recorded.
SpatialScore score_spatial(const SpatialTask& task);

/// Items for `day` (1-based) of a study lasting `horizon` days.
std::vector<SurveyItem> survey_form_for(int day, int horizon);

/// Schema export: one entry per distinct item (id, scale range, weekly flag).
nlohmann::json survey_schema();

/// Checks ranges and the weekly-battery-iff-weekly-day rule.
bool is_valid(const SurveyResponse& response);

nlohmann::json to_json(const SurveyResponse& r);
SurveyResponse survey_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ActiveTaskResult& r);
ActiveTaskResult task_result_from_json(const nlohmann::json& j);

}  // namespace opsched

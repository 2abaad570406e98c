#include "opsched/assessments.hpp"

#include <algorithm>

namespace opsched {

SpatialTask gen_spatial(Stream& stream, bool distinct_cells) {
    SpatialTask task;
    if (distinct_cells) {
        std::array<int, kSpatialCells> cells{1, 2, 3, 4, 5, 6, 7, 8, 9};
        // Partial Fisher-Yates over the first five positions.
        for (int i = 0; i < kSpatialLength; ++i) {
            const auto j = i + static_cast<int>(stream.below(kSpatialCells - i));
            std::swap(cells[i], cells[j]);
            task.target[i] = cells[i];
        }
    } else {
        for (auto& cell : task.target) cell = stream.uniform_int(1, kSpatialCells);
    }
    return task;
}

SpatialScore score_spatial(const SpatialTask& task) {
    if (!task.attempt) throw ScoringError("spatial task has no recorded attempt");
    const auto& attempt = *task.attempt;
    const bool correct = std::equal(attempt.begin(), attempt.end(), task.target.begin(), task.target.end());
    return {correct, task.duration_seconds};
}

namespace {

std::vector<SurveyItem> base_items() {
    return {
        {"stress", "How stressed did you feel today?", 1, 5, false},
        {"loneliness", "How lonely did you feel today?", 1, 5, false},
        {"fun", "How much fun did you have today?", 1, 5, false},
        {"novelty", "How new and exciting was today?", 1, 5, false},
        {"mood", "How would you rate your mood today?", 1, 5, false},
        {"hopefulness", "How hopeful do you feel?", 1, 5, false},
        {"free_hours", "How many hours of free time did you have today?", 0, 24, false},
    };
}

std::vector<SurveyItem> weekly_items() {
    std::vector<SurveyItem> items;
    for (int i = 1; i <= kWeeklyItemCount; ++i) {
        items.push_back({"weekly_" + std::to_string(i), "Weekly item " + std::to_string(i), 1, 5, true});
    }
    return items;
}

bool ordinal(int v) { return v >= 1 && v <= 5; }

}  // namespace

std::vector<SurveyItem> survey_form_for(int day, int horizon) {
    if (day < 1 || day > horizon) {
        throw std::out_of_range("survey day " + std::to_string(day) + " outside 1.." + std::to_string(horizon));
    }
    auto items = base_items();
    if (is_weekly_day(day)) {
        auto weekly = weekly_items();
        items.insert(items.end(), weekly.begin(), weekly.end());
    }
    return items;
}

nlohmann::json survey_schema() {
    nlohmann::json items = nlohmann::json::array();
    auto all = base_items();
    auto weekly = weekly_items();
    all.insert(all.end(), weekly.begin(), weekly.end());
    for (const auto& item : all) {
        items.push_back({{"id", item.id},
                         {"text", item.text},
                         {"scale_min", item.scale_min},
                         {"scale_max", item.scale_max},
                         {"weekly", item.weekly}});
    }
    return {{"weekly_rule", "day % 7 == 0"}, {"items", items}};
}

bool is_valid(const SurveyResponse& r) {
    if (!ordinal(r.stress) || !ordinal(r.loneliness) || !ordinal(r.fun) || !ordinal(r.novelty) ||
        !ordinal(r.mood) || !ordinal(r.hopefulness)) {
        return false;
    }
    if (r.free_hours < 0.0 || r.free_hours > 24.0) return false;
    if (r.weekly_battery.has_value() != is_weekly_day(r.day)) return false;
    if (r.weekly_battery) {
        return std::all_of(r.weekly_battery->begin(), r.weekly_battery->end(), ordinal);
    }
    return true;
}

nlohmann::json to_json(const SurveyResponse& r) {
    nlohmann::json j{{"day", r.day},          {"stress", r.stress}, {"loneliness", r.loneliness},
                     {"fun", r.fun},          {"novelty", r.novelty}, {"mood", r.mood},
                     {"hopefulness", r.hopefulness}, {"free_hours", r.free_hours}};
    if (r.weekly_battery) j["weekly_battery"] = *r.weekly_battery;
    return j;
}

SurveyResponse survey_from_json(const nlohmann::json& j) {
    SurveyResponse r;
    r.day = j.at("day").get<int>();
    r.stress = j.at("stress").get<int>();
    r.loneliness = j.at("loneliness").get<int>();
    r.fun = j.at("fun").get<int>();
    r.novelty = j.at("novelty").get<int>();
    r.mood = j.at("mood").get<int>();
    r.hopefulness = j.at("hopefulness").get<int>();
    r.free_hours = j.at("free_hours").get<double>();
    if (j.contains("weekly_battery")) {
        r.weekly_battery = j.at("weekly_battery").get<std::array<int, kWeeklyItemCount>>();
    }
    return r;
}

nlohmann::json to_json(const ActiveTaskResult& r) {
    return {{"tap_count", r.tap_count}, {"spatial_correct", r.spatial_correct}, {"spatial_seconds", r.spatial_seconds}};
}

ActiveTaskResult task_result_from_json(const nlohmann::json& j) {
    return {j.at("tap_count").get<int>(), j.at("spatial_correct").get<bool>(), j.at("spatial_seconds").get<double>()};
}

}  // namespace opsched

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opsched/behavior.hpp"
#include "opsched/config.hpp"
#include "opsched/trial.hpp"

namespace opsched {

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CalibrationTargets {
    int window_len = 10;
    std::vector<double> window_fractions;
    std::optional<double> contact_response;
    std::optional<std::array<double, 4>> gap_fractions;
};

/// 10-day window adherence plus the same-day-after-text rate.
CalibrationTargets study4_targets();
/// 10-day window adherence plus the pooled gap distribution.
CalibrationTargets study3_targets();

struct GridAxis {
    std::string name;
    std::vector<double> values;
};

/// Cartesian product of axes applied on top of `base`. Point 0 takes the
/// first value of every axis; the last axis varies fastest.
struct ParamGrid {
    AgentParams base;
    std::vector<GridAxis> axes;

    std::size_t size() const;
    AgentParams point(std::size_t index) const;
};

/// Grid shipped for fitting the Iteration-5 schedule.
ParamGrid default_grid();

/// YAML: optional `agent:` block for the base point and a `grid:` mapping of
/// parameter name -> list of values.
ParamGrid parse_grid(std::string_view yaml_text);
ParamGrid load_grid(const std::string& path);

struct CohortStats {
    std::vector<double> windows;
    double contact_response = 0.0;
    std::int64_t contacts = 0;
    std::array<double, 4> gap_fractions{};
};

CohortStats cohort_stats(std::span<const TrialLog> logs, int window_len);

/// Mean squared error over every target component that is present.
double calibration_error(const CohortStats& achieved, const CalibrationTargets& targets);

struct CalibrationOptions {
    ScheduleConfig config = preset(IterationTag::Iter5);
    int cohort_size = 400;
    std::uint64_t seed = 20240601;
};

struct CalibrationResult {
    AgentParams params;
    double error = 0.0;
    std::size_t best_index = 0;
    CohortStats achieved;
    CalibrationTargets targets;
    std::vector<double> errors;  // one per grid point
};

/// Deterministic grid search: every point is simulated on the same cohort
/// seeds; ties go to the lowest grid index.
CalibrationResult calibrate(const ParamGrid& grid, const CalibrationTargets& targets,
                            const CalibrationOptions& options = {});

std::string fit_report(const CalibrationResult& result, const ParamGrid& grid);

}  // namespace opsched

#include "opsched/calibration.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "opsched/analytics.hpp"
#include "opsched/format.hpp"
#include "opsched/parallel.hpp"

namespace opsched {

CalibrationTargets study4_targets() {
    CalibrationTargets t;
    t.window_fractions = {0.717, 0.644, 0.508};
    t.contact_response = 0.47;
    return t;
}

CalibrationTargets study3_targets() {
    CalibrationTargets t;
    t.window_fractions = {0.638, 0.492, 0.346};
    t.gap_fractions = std::array<double, 4>{0.782, 0.139, 0.0391, 0.0391};
    return t;
}

std::size_t ParamGrid::size() const {
    std::size_t n = 1;
    for (const auto& axis : axes) n *= axis.values.size();
    return n;
}

AgentParams ParamGrid::point(std::size_t index) const {
    if (index >= size()) throw CalibrationError("grid index out of range");
    AgentParams p = base;
    for (auto axis = axes.rbegin(); axis != axes.rend(); ++axis) {
        const auto n = axis->values.size();
        set_param(p, axis->name, axis->values[index % n]);
        index /= n;
    }
    return p;
}

ParamGrid default_grid() {
    ParamGrid g;
    g.axes = {
        {"base_logit", {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0}},
        {"burden_slope", {0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08}},
        {"text_boost", {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}},
        {"heterogeneity_sd", {0.5, 0.75, 1.0, 1.25}},
    };
    return g;
}

ParamGrid parse_grid(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw CalibrationError(std::string("malformed grid: ") + e.what());
    }
    if (!root.IsMap()) throw CalibrationError("grid file must be a mapping");
    ParamGrid g;
    for (const auto& top : root) {
        const auto key = top.first.as<std::string>();
        if (key == "agent") {
            YAML::Emitter e;
            e << YAML::BeginMap << YAML::Key << "agent" << YAML::Value << top.second << YAML::EndMap;
            g.base = parse_agent_params(e.c_str());
        } else if (key == "grid") {
            if (!top.second.IsMap()) throw CalibrationError("'grid' must map parameter names to value lists");
            for (const auto& kv : top.second) {
                GridAxis axis{kv.first.as<std::string>(), {}};
                if (!kv.second.IsSequence()) throw CalibrationError("grid axis '" + axis.name + "' must be a list");
                for (const auto& v : kv.second) axis.values.push_back(parse_double(v.as<std::string>()));
                get_param(g.base, axis.name);  // throws on unknown names
                g.axes.push_back(std::move(axis));
            }
        } else {
            throw CalibrationError("unknown top-level key '" + key + "' in grid file");
        }
    }
    return g;
}

ParamGrid load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CalibrationError("cannot open grid file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grid(ss.str());
}

CohortStats cohort_stats(std::span<const TrialLog> logs, int window_len) {
    CohortStats s;
    s.windows = adherence_by_window(logs, window_len).windows;
    const auto contacts = contact_response_rate(logs);
    s.contact_response = contacts.rate;
    s.contacts = contacts.contacts;
    s.gap_fractions = gap_distribution(logs).fractions;
    return s;
}

double calibration_error(const CohortStats& achieved, const CalibrationTargets& targets) {
    if (achieved.windows.size() != targets.window_fractions.size()) {
        throw CalibrationError("target and simulated window counts differ");
    }
    double sum = 0.0;
    int terms = 0;
    const auto add = [&](double a, double b) {
        sum += (a - b) * (a - b);
        ++terms;
    };
    for (std::size_t i = 0; i < achieved.windows.size(); ++i) add(achieved.windows[i], targets.window_fractions[i]);
    if (targets.contact_response) add(achieved.contact_response, *targets.contact_response);
    if (targets.gap_fractions) {
        for (std::size_t b = 0; b < 4; ++b) add(achieved.gap_fractions[b], (*targets.gap_fractions)[b]);
    }
    return terms > 0 ? sum / terms : 0.0;
}

CalibrationResult calibrate(const ParamGrid& grid, const CalibrationTargets& targets,
                            const CalibrationOptions& options) {
    const std::size_t n = grid.size();
    if (grid.axes.empty() || n == 0) throw CalibrationError("empty parameter grid");
    if (targets.window_fractions.empty()) throw CalibrationError("no adherence targets");
    if (options.cohort_size < 1) throw CalibrationError("cohort_size must be >= 1");
    validate(options.config);
    if (options.config.horizon_days != targets.window_len * static_cast<int>(targets.window_fractions.size())) {
        throw CalibrationError("targets do not cover the configured horizon");
    }

    std::vector<double> errors(n);
    std::vector<CohortStats> stats(n);
    parallel_for(static_cast<int>(n), [&](int i) {
        const auto params = grid.point(static_cast<std::size_t>(i));
        const auto logs = run_cohort_serial(options.config, params, options.cohort_size, options.seed);
        stats[static_cast<std::size_t>(i)] = cohort_stats(logs, targets.window_len);
        errors[static_cast<std::size_t>(i)] = calibration_error(stats[static_cast<std::size_t>(i)], targets);
    });

    CalibrationResult r;
    r.best_index = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (errors[i] < errors[r.best_index]) r.best_index = i;
    }
    r.params = grid.point(r.best_index);
    r.error = errors[r.best_index];
    r.achieved = stats[r.best_index];
    r.targets = targets;
    r.errors = std::move(errors);
    return r;
}

std::string fit_report(const CalibrationResult& r, const ParamGrid& grid) {
    std::ostringstream out;
    char buf[160];
    out << "Grid search over " << grid.size() << " points\n";
    for (const auto& axis : grid.axes) {
        out << "  " << axis.name << ":";
        for (const double v : axis.values) out << ' ' << shortest(v);
        out << '\n';
    }
    std::snprintf(buf, sizeof(buf), "\nBest point #%zu, mean squared error %.6g\n", r.best_index, r.error);
    out << buf;
    for (const auto& axis : grid.axes) {
        out << "  " << axis.name << " = " << shortest(get_param(r.params, axis.name)) << '\n';
    }
    out << "\nstatistic                 target   achieved   delta (pp)\n";
    for (std::size_t i = 0; i < r.targets.window_fractions.size(); ++i) {
        const int first = static_cast<int>(i) * r.targets.window_len + 1;
        const std::string label = "adherence days " + std::to_string(first) + "-" +
                                  std::to_string(first + r.targets.window_len - 1);
        std::snprintf(buf, sizeof(buf), "%-24s %7.1f%% %9.1f%% %+10.1f\n", label.c_str(),
                      100 * r.targets.window_fractions[i], 100 * r.achieved.windows[i],
                      100 * (r.achieved.windows[i] - r.targets.window_fractions[i]));
        out << buf;
    }
    if (r.targets.contact_response) {
        std::snprintf(buf, sizeof(buf), "%-24s %7.1f%% %9.1f%% %+10.1f\n", "completed after contact",
                      100 * *r.targets.contact_response, 100 * r.achieved.contact_response,
                      100 * (r.achieved.contact_response - *r.targets.contact_response));
        out << buf;
    }
    if (r.targets.gap_fractions) {
        static constexpr std::array<const char*, 4> labels{"gap 1 day", "gap 2 days", "gap 3 days", "gap >=4 days"};
        for (std::size_t b = 0; b < 4; ++b) {
            std::snprintf(buf, sizeof(buf), "%-24s %7.1f%% %9.1f%% %+10.1f\n", labels[b],
                          100 * (*r.targets.gap_fractions)[b], 100 * r.achieved.gap_fractions[b],
                          100 * (r.achieved.gap_fractions[b] - (*r.targets.gap_fractions)[b]));
            out << buf;
        }
    }
    out << "\nFitted parameters\n" << dump_agent_params(r.params);
    return out.str();
}

}  // namespace opsched

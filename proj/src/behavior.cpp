#include "opsched/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "opsched/format.hpp"

namespace opsched {

namespace {

constexpr std::array<std::string_view, kReinforcerCount> kReinforcerNames{"points", "fish", "money_cent", "meme",
                                                                          "insight"};

constexpr std::array<std::string_view, 12> kScalarNames{
    "base_logit",        "burden_slope", "discount",  "resensitization", "satiation_window", "satiation_penalty",
    "text_boost", "heterogeneity_sd", "p_partial", "spatial_accuracy", "tap_mean",         "tap_sd"};

std::size_t idx(Reinforcer r) { return static_cast<std::size_t>(r); }

std::optional<Reinforcer> reinforcer_of(const RewardEvent& e) {
    if (e.is<reward::Points>()) return Reinforcer::Points;
    if (e.is<reward::Fish>() || e.is<reward::GrowthStage>()) return Reinforcer::Fish;
    if (e.is<reward::Money>()) return Reinforcer::MoneyCent;
    if (e.is<reward::Meme>()) return Reinforcer::Meme;
    if (e.is<reward::LifeInsight>()) return Reinforcer::Insight;
    return std::nullopt;
}

double* field(AgentParams& p, std::string_view name) {
    if (name == "base_logit") return &p.base_logit;
    if (name == "burden_slope") return &p.burden_slope;
    if (name == "discount") return &p.discount;
    if (name == "resensitization") return &p.resensitization;
    if (name == "satiation_penalty") return &p.satiation_penalty;
    if (name == "text_boost") return &p.text_boost;
    if (name == "heterogeneity_sd") return &p.heterogeneity_sd;
    if (name == "p_partial") return &p.p_partial;
    if (name == "spatial_accuracy") return &p.spatial_accuracy;
    if (name == "tap_mean") return &p.tap_mean;
    if (name == "tap_sd") return &p.tap_sd;
    for (const auto& [prefix, array] : {std::pair<std::string_view, PerReinforcer*>{"value_weight.", &p.value_weight},
                                        std::pair<std::string_view, PerReinforcer*>{"habituation.", &p.habituation}}) {
        if (name.starts_with(prefix)) return &(*array)[idx(parse_reinforcer(name.substr(prefix.size())))];
    }
    return nullptr;
}

}  // namespace

std::string_view to_string(Reinforcer r) { return kReinforcerNames[idx(r)]; }

Reinforcer parse_reinforcer(std::string_view s) {
    for (std::size_t i = 0; i < kReinforcerNames.size(); ++i) {
        if (kReinforcerNames[i] == s) return static_cast<Reinforcer>(i);
    }
    throw ParameterError("unknown reinforcer kind '" + std::string(s) + "'");
}

void validate(const AgentParams& p) {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw ParameterError(std::string("invalid agent params: ") + what);
    };
    require(p.discount > 0.0 && p.discount <= 1.0, "discount must lie in (0,1]");
    for (std::size_t k = 0; k < kReinforcerCount; ++k) {
        require(p.value_weight[k] >= 0.0, "value weights must be >= 0");
        require(p.habituation[k] >= 0.0 && p.habituation[k] <= 1.0, "habituation rates must lie in [0,1]");
    }
    require(p.resensitization >= 0.0 && p.resensitization <= 1.0, "resensitization must lie in [0,1]");
    require(p.satiation_window >= 1, "satiation_window must be >= 1");
    require(p.satiation_penalty >= 0.0, "satiation_penalty must be >= 0");
    require(p.heterogeneity_sd >= 0.0, "heterogeneity_sd must be >= 0");
    require(p.p_partial >= 0.0 && p.p_partial <= 1.0, "p_partial must lie in [0,1]");
    require(p.spatial_accuracy >= 0.0 && p.spatial_accuracy <= 1.0, "spatial_accuracy must lie in [0,1]");
    require(p.tap_sd >= 0.0, "tap_sd must be >= 0");
}

void set_param(AgentParams& p, std::string_view name, double value) {
    if (name == "satiation_window") {
        p.satiation_window = static_cast<int>(std::lround(value));
        return;
    }
    double* f = field(p, name);
    if (!f) throw ParameterError("unknown agent parameter '" + std::string(name) + "'");
    *f = value;
}

double get_param(const AgentParams& p, std::string_view name) {
    if (name == "satiation_window") return p.satiation_window;
    double* f = field(const_cast<AgentParams&>(p), name);
    if (!f) throw ParameterError("unknown agent parameter '" + std::string(name) + "'");
    return *f;
}

AgentState new_agent(const AgentParams& params, Stream& stream) {
    validate(params);
    AgentState s;
    s.logit_offset = params.heterogeneity_sd * stream.normal();
    return s;
}

double satiation_factor(const AgentState& state, const AgentParams& params) {
    const int recent = std::accumulate(state.recent_rewards.begin(), state.recent_rewards.end(), 0);
    return 1.0 / (1.0 + params.satiation_penalty * recent);
}

double perceived_value(Reinforcer kind, const AgentState& state, const AgentParams& params) {
    const auto k = idx(kind);
    return params.value_weight[k] * state.sensitivity[k] * satiation_factor(state, params);
}

double perceived_value(std::string_view kind, const AgentState& state, const AgentParams& params) {
    return perceived_value(parse_reinforcer(kind), state, params);
}

double anticipated_reinforcement(const ParticipantState& ps, const ScheduleConfig& config, const AgentState& agent,
                                 const AgentParams& params) {
    const int today = ps.day + 1;
    const auto value = [&](Reinforcer r) { return perceived_value(r, agent, params); };
    const auto reachable = [&](int days_ahead) { return today + days_ahead <= config.horizon_days; };
    double total = 0.0;

    if (config.points_per_completion > 0) total += value(Reinforcer::Points);

    const auto awarded = static_cast<int>(ps.fish_awarded.size());
    if (config.fish_mode == FishMode::OnePerDayWithGaps) {
        const auto& gaps = config.gap_after_fish_counts;
        const bool gap_pending = ps.gaps_consumed < gaps.size() && awarded >= gaps[ps.gaps_consumed];
        if (!gap_pending) {
            const int want = today <= config.double_fish_days ? 2 : 1;
            total += std::min(want, config.fish_pool_size - awarded) * value(Reinforcer::Fish);
        }
    } else if (config.fish_mode == FishMode::GrowthStages && awarded < config.fish_pool_size) {
        total += value(Reinforcer::Fish);
    }

    const double cent = value(Reinforcer::MoneyCent);
    if (today == 1 && config.front_load_day1_cents > 0) total += config.front_load_day1_cents * cent;

    if (config.money_mode == MoneyMode::Milestones) {
        for (const int streak : {ps.survey_streak, ps.task_streak}) {
            const auto next = std::find_if(config.milestone_table.begin(), config.milestone_table.end(),
                                           [streak](const Milestone& m) { return m.streak_days > streak; });
            if (next == config.milestone_table.end()) continue;
            const int ahead = next->streak_days - (streak + 1);
            if (reachable(ahead)) total += next->cents * cent * std::pow(params.discount, ahead);
        }
    } else if (config.money_mode == MoneyMode::FlatPerStreak) {
        const int ahead = config.flat_streak_len - (ps.flat_streak_counter + 1);
        if (reachable(ahead)) total += config.flat_streak_cents * cent * std::pow(params.discount, ahead);
    }

    total += config.meme_prob * value(Reinforcer::Meme);
    total += config.insight_prob * value(Reinforcer::Insight);
    return total;
}

double sigmoid(double x) {
    // Kept strictly inside (0,1) even where the exact value rounds to 0 or 1.
    static constexpr double lo = std::numeric_limits<double>::min();
    static constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    double y;
    if (x >= 0.0) {
        y = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        y = e / (1.0 + e);
    }
    return std::clamp(y, lo, hi);
}

double completion_probability(const ParticipantState& ps, const ScheduleConfig& config, const AgentState& agent,
                              const AgentParams& params, bool contact_today) {
    const double logit = params.base_logit + agent.logit_offset +
                         anticipated_reinforcement(ps, config, agent, params) -
                         params.burden_slope * agent.day_index + (contact_today ? params.text_boost : 0.0);
    return sigmoid(logit);
}

DayOutcome sample_outcome(int day, double probability, const AgentParams& params, Stream& stream) {
    DayOutcome o;
    o.day = day;
    if (!stream.bernoulli(probability)) return o;

    o.survey_done = true;
    o.tasks_done = !stream.bernoulli(params.p_partial);

    SurveyResponse r;
    r.day = day;
    r.stress = stream.uniform_int(1, 5);
    r.loneliness = stream.uniform_int(1, 5);
    r.fun = stream.uniform_int(1, 5);
    r.novelty = stream.uniform_int(1, 5);
    r.mood = stream.uniform_int(1, 5);
    r.hopefulness = stream.uniform_int(1, 5);
    r.free_hours = stream.uniform_int(0, 48) * 0.5;
    if (is_weekly_day(day)) {
        auto& battery = r.weekly_battery.emplace();
        for (auto& item : battery) item = stream.uniform_int(1, 5);
    }
    o.survey_response = r;

    if (o.tasks_done) {
        auto task = gen_spatial(stream);
        std::vector<int> attempt(task.target.begin(), task.target.end());
        if (!stream.bernoulli(params.spatial_accuracy)) {
            const auto pos = stream.below(attempt.size());
            attempt[pos] = attempt[pos] % kSpatialCells + 1;
        }
        task.attempt = attempt;
        task.duration_seconds = std::round(stream.uniform(4.0, 20.0) * 10.0) / 10.0;
        const auto score = score_spatial(task);
        const double taps = std::round(params.tap_mean + params.tap_sd * stream.normal());
        o.task_results = ActiveTaskResult{static_cast<int>(std::max(0.0, taps)), score.correct, score.seconds};
    }
    return o;
}

DayOutcome sample_day(const ParticipantState& ps, const ScheduleConfig& config, const AgentState& agent,
                      const AgentParams& params, Stream& stream, bool contact_today) {
    const double p = completion_probability(ps, config, agent, params, contact_today);
    return sample_outcome(ps.day + 1, p, params, stream);
}

void observe(AgentState& state, std::span<const RewardEvent> events, const AgentParams& params) {
    PerReinforcer today{};
    int count = 0;
    for (const auto& e : events) {
        if (const auto r = reinforcer_of(e)) {
            today[idx(*r)] += 1.0;
            ++count;
        }
    }
    for (std::size_t k = 0; k < kReinforcerCount; ++k) {
        if (today[k] > 0.0) {
            state.exposures[k] += today[k];
            state.sensitivity[k] *= std::pow(1.0 - params.habituation[k], today[k]);
        } else {
            state.sensitivity[k] += params.resensitization * (1.0 - state.sensitivity[k]);
        }
        state.sensitivity[k] = std::clamp(state.sensitivity[k], 0.0, 1.0);
    }
    state.recent_rewards.push_back(count);
    while (static_cast<int>(state.recent_rewards.size()) > params.satiation_window) state.recent_rewards.pop_front();
    ++state.day_index;
}

// --- serialization -----------------------------------------------------------

nlohmann::json to_json(const AgentParams& p) {
    nlohmann::json j;
    for (const auto name : kScalarNames) j[std::string(name)] = get_param(p, name);
    for (std::size_t k = 0; k < kReinforcerCount; ++k) {
        j["value_weight"][std::string(kReinforcerNames[k])] = p.value_weight[k];
        j["habituation"][std::string(kReinforcerNames[k])] = p.habituation[k];
    }
    return j;
}

std::string dump_agent_params(const AgentParams& p) {
    YAML::Emitter out;
    out << YAML::BeginMap << YAML::Key << "agent" << YAML::Value << YAML::BeginMap;
    for (const auto name : kScalarNames) {
        out << YAML::Key << std::string(name) << YAML::Value;
        if (name == "satiation_window") out << p.satiation_window;
        else out << shortest(get_param(p, name));
    }
    for (const auto& [group, array] : {std::pair<const char*, const PerReinforcer*>{"value_weight", &p.value_weight},
                                       std::pair<const char*, const PerReinforcer*>{"habituation", &p.habituation}}) {
        out << YAML::Key << group << YAML::Value << YAML::BeginMap;
        for (std::size_t k = 0; k < kReinforcerCount; ++k) {
            out << YAML::Key << std::string(kReinforcerNames[k]) << YAML::Value << shortest((*array)[k]);
        }
        out << YAML::EndMap;
    }
    out << YAML::EndMap << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

AgentParams parse_agent_params(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ParameterError(std::string("malformed params: ") + e.what());
    }
    if (!root.IsMap()) throw ParameterError("params file must be a mapping with an 'agent' block");
    AgentParams p;
    for (const auto& top : root) {
        const auto key = top.first.as<std::string>();
        if (key != "agent") throw ParameterError("unknown top-level key '" + key + "'");
        if (!top.second.IsMap()) throw ParameterError("'agent' must be a mapping");
        for (const auto& kv : top.second) {
            const auto name = kv.first.as<std::string>();
            if (kv.second.IsMap()) {
                for (const auto& inner : kv.second) {
                    const auto full = name + "." + inner.first.as<std::string>();
                    set_param(p, full, parse_double(inner.second.as<std::string>()));
                }
            } else {
                set_param(p, name, parse_double(kv.second.as<std::string>()));
            }
        }
    }
    validate(p);
    return p;
}

AgentParams load_agent_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open params file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_agent_params(ss.str());
}

}  // namespace opsched

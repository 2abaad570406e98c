#pragma once

#include <array>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "opsched/config.hpp"
#include "opsched/engine.hpp"
#include "opsched/rng.hpp"

namespace opsched {

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Reinforcer classes the agent values separately. Money is valued per cent.
enum class Reinforcer { Points, Fish, MoneyCent, Meme, Insight };
inline constexpr std::size_t kReinforcerCount = 5;

std::string_view to_string(Reinforcer r);
Reinforcer parse_reinforcer(std::string_view s);

using PerReinforcer = std::array<double, kReinforcerCount>;

struct AgentParams {
    double base_logit = 1.2;
    double burden_slope = 0.04;
    // points per award, fish per fish, money per cent, meme and insight per delivery
    PerReinforcer value_weight{0.15, 0.25, 0.006, 0.2, 0.2};
    double discount = 0.85;
    PerReinforcer habituation{0.01, 0.03, 0.01, 0.03, 0.03};
    double resensitization = 0.1;
    int satiation_window = 3;
    double satiation_penalty = 0.05;
    double text_boost = 2.0;
    double heterogeneity_sd = 1.0;
    double p_partial = 0.05;

    // Synthetic assessment answers.
    double spatial_accuracy = 0.8;
    double tap_mean = 60.0;
    double tap_sd = 8.0;

    bool operator==(const AgentParams&) const = default;
};

/// Throws ParameterError naming the violated constraint.
void validate(const AgentParams& params);

/// Sets a scalar parameter by name ("base_logit", "value_weight.fish", ...).
void set_param(AgentParams& params, std::string_view name, double value);
double get_param(const AgentParams& params, std::string_view name);

struct AgentState {
    PerReinforcer exposures{};
    PerReinforcer sensitivity{1, 1, 1, 1, 1};
    std::deque<int> recent_rewards;
    double logit_offset = 0.0;
    int day_index = 0;

    bool operator==(const AgentState&) const = default;
};

/// Draws the per-agent logit offset from `stream`.
AgentState new_agent(const AgentParams& params, Stream& stream);

double satiation_factor(const AgentState& state, const AgentParams& params);

double perceived_value(Reinforcer kind, const AgentState& state, const AgentParams& params);
/// Name-based lookup; unknown names throw ParameterError.
double perceived_value(std::string_view kind, const AgentState& state, const AgentParams& params);

/// Discounted value of everything obtainable by completing the next day:
/// same-day rewards at full value, the next reachable money milestone (or
/// flat payout) d days ahead at discount^d. Kinds add up.
double anticipated_reinforcement(const ParticipantState& participant, const ScheduleConfig& config,
                                 const AgentState& agent, const AgentParams& params);

double sigmoid(double x);

double completion_probability(const ParticipantState& participant, const ScheduleConfig& config,
                              const AgentState& agent, const AgentParams& params, bool contact_today);

/// Outcome for `day` given an already computed completion probability.
DayOutcome sample_outcome(int day, double probability, const AgentParams& params, Stream& stream);

DayOutcome sample_day(const ParticipantState& participant, const ScheduleConfig& config, const AgentState& agent,
                      const AgentParams& params, Stream& stream, bool contact_today);

/// Folds one day's events into exposures, sensitivities and the satiation
/// window, then advances the agent's day index.
void observe(AgentState& state, std::span<const RewardEvent> events, const AgentParams& params);

nlohmann::json to_json(const AgentParams& params);
std::string dump_agent_params(const AgentParams& params);
/// YAML with a top-level `agent:` block. Unknown keys are errors.
AgentParams parse_agent_params(std::string_view yaml_text);
AgentParams load_agent_params(const std::string& path);

}  // namespace opsched

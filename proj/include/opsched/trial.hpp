#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "opsched/behavior.hpp"
#include "opsched/config.hpp"
#include "opsched/engine.hpp"

namespace opsched {

class LogFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DayRecord {
    DayOutcome outcome;
    std::vector<RewardEvent> events;
    std::vector<std::string> notices;

    bool operator==(const DayRecord&) const = default;
};

struct ParticipantSummary {
    int completed_days = 0;
    std::int64_t money_cents = 0;
    std::int64_t points_total = 0;
    int fish_count = 0;
    int level = 1;
    int contacts = 0;
    bool disengaged = false;

    bool operator==(const ParticipantSummary&) const = default;
};

ParticipantSummary summarize(const ParticipantState& state);

struct TrialLog {
    std::string participant_id;
    std::uint64_t seed = 0;
    std::string config_fingerprint;
    int horizon = 0;
    std::vector<DayRecord> days;
    ParticipantSummary summary;

    bool operator==(const TrialLog&) const = default;
};

/// Engine and agent streams of a participant are split from its seed.
std::uint64_t engine_seed(std::uint64_t participant_seed);
std::uint64_t agent_seed(std::uint64_t participant_seed);
std::uint64_t participant_seed(std::uint64_t base_seed, int index);
std::string participant_id(int index);

/// `horizon` overrides config.horizon_days (the result must still validate).
TrialLog run_participant(const ScheduleConfig& config, const AgentParams& params, std::uint64_t seed, int horizon,
                         const std::string& id = "P000");

/// Participant i runs with participant_seed(base_seed, i). The parallel and
/// serial versions return identical cohorts.
std::vector<TrialLog> run_cohort(const ScheduleConfig& config, const AgentParams& params, int n,
                                 std::uint64_t base_seed);
std::vector<TrialLog> run_cohort_serial(const ScheduleConfig& config, const AgentParams& params, int n,
                                        std::uint64_t base_seed);

struct EarningsSummary {
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    std::int64_t threshold_cents = 1000;
    std::int64_t exceed_count = 0;
    double p_exceed = 0.0;
    // Clopper-Pearson 95% interval for p_exceed.
    double ci_low = 0.0;
    double ci_high = 0.0;

    bool operator==(const EarningsSummary&) const = default;
};

struct EarningsDistribution {
    int n_sims = 0;
    std::vector<std::int64_t> samples;
    EarningsSummary summary;
};

EarningsSummary summarize_earnings(const std::vector<std::int64_t>& samples, std::int64_t threshold_cents);

struct MonteCarloOptions {
    std::int64_t threshold_cents = 1000;
    // Draw survey and tasks independently at adherence_p instead of jointly.
    bool independent_trackers = false;
};

/// I.i.d. Bernoulli(adherence_p) completion days pushed through the engine.
EarningsDistribution monte_carlo_earnings(const ScheduleConfig& config, double adherence_p, int n_sims,
                                          std::uint64_t seed, const MonteCarloOptions& options = {});
EarningsDistribution monte_carlo_earnings_serial(const ScheduleConfig& config, double adherence_p, int n_sims,
                                                 std::uint64_t seed, const MonteCarloOptions& options = {});

void write_earnings_csv(std::ostream& out, const EarningsDistribution& dist);

enum class ReplayStatus { Ok, FingerprintMismatch, Divergence };

struct ReplayResult {
    ReplayStatus status = ReplayStatus::Ok;
    int divergence_day = 0;
    std::vector<RewardEvent> logged;
    std::vector<RewardEvent> regenerated;
    std::string message;

    bool ok() const { return status == ReplayStatus::Ok; }
};

/// Re-runs the logged outcomes through a fresh engine and compares events,
/// notices and the final summary.
ReplayResult replay(const TrialLog& log, const ScheduleConfig& config);

/// JSON lines: a Header record, then per day an Outcome record followed by
/// its events and notices, then a Summary record. Every line carries
/// participant_id, day, kind, payload and randomization.
void write_trial_log(std::ostream& out, const TrialLog& log);
TrialLog read_trial_log(std::istream& in);
void write_trial_log_file(const std::string& path, const TrialLog& log);
TrialLog read_trial_log_file(const std::string& path);

}  // namespace opsched

#include "opsched/trial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include <boost/math/distributions/beta.hpp>

#include "opsched/format.hpp"
#include "opsched/parallel.hpp"

namespace opsched {

ParticipantSummary summarize(const ParticipantState& s) {
    return {static_cast<int>(s.completed_days.size()),
            s.money_cents,
            s.points_total,
            static_cast<int>(s.fish_awarded.size()),
            s.level,
            static_cast<int>(s.contacts_sent.size()),
            s.disengaged};
}

std::uint64_t engine_seed(std::uint64_t participant_seed) { return derive_seed(participant_seed, 0); }
std::uint64_t agent_seed(std::uint64_t participant_seed) { return derive_seed(participant_seed, 1); }

std::uint64_t participant_seed(std::uint64_t base_seed, int index) {
    return derive_seed(base_seed, static_cast<std::uint64_t>(index));
}

std::string participant_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%03d", index);
    return buf;
}

namespace {

ScheduleConfig with_horizon(const ScheduleConfig& config, int horizon) {
    ScheduleConfig c = config;
    c.horizon_days = horizon;
    validate(c);
    return c;
}

bool has_contact(const std::vector<RewardEvent>& events) {
    return std::any_of(events.begin(), events.end(), [](const RewardEvent& e) { return e.is<reward::Contact>(); });
}

}  // namespace

TrialLog run_participant(const ScheduleConfig& config, const AgentParams& params, std::uint64_t seed, int horizon,
                         const std::string& id) {
    const ScheduleConfig cfg = with_horizon(config, horizon);
    ParticipantState ps = new_participant(cfg, engine_seed(seed));
    Stream agent_stream(agent_seed(seed));
    AgentState agent = new_agent(params, agent_stream);

    TrialLog log;
    log.participant_id = id;
    log.seed = seed;
    log.config_fingerprint = fingerprint(cfg);
    log.horizon = cfg.horizon_days;
    log.days.reserve(static_cast<std::size_t>(cfg.horizon_days));

    // A contact sent at the end of day d influences the decision on day d+1.
    bool contact_pending = false;
    for (int day = 1; day <= cfg.horizon_days; ++day) {
        DayOutcome outcome = sample_day(ps, cfg, agent, params, agent_stream, contact_pending);
        StepResult step = step_day(ps, outcome, cfg);
        observe(agent, step.events, params);
        contact_pending = has_contact(step.events);
        log.days.push_back({std::move(outcome), std::move(step.events), std::move(step.notices)});
    }
    log.summary = summarize(ps);
    return log;
}

std::vector<TrialLog> run_cohort_serial(const ScheduleConfig& config, const AgentParams& params, int n,
                                        std::uint64_t base_seed) {
    if (n < 1) throw std::invalid_argument("cohort size must be >= 1");
    std::vector<TrialLog> logs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        logs[static_cast<std::size_t>(i)] =
            run_participant(config, params, participant_seed(base_seed, i), config.horizon_days, participant_id(i));
    }
    return logs;
}

std::vector<TrialLog> run_cohort(const ScheduleConfig& config, const AgentParams& params, int n,
                                 std::uint64_t base_seed) {
    if (n < 1) throw std::invalid_argument("cohort size must be >= 1");
    validate(config);
    validate(params);
    std::vector<TrialLog> logs(static_cast<std::size_t>(n));
    parallel_for(n, [&](int i) {
        logs[static_cast<std::size_t>(i)] =
            run_participant(config, params, participant_seed(base_seed, i), config.horizon_days, participant_id(i));
    });
    return logs;
}

// --- Monte Carlo earnings ------------------------------------------------------

EarningsSummary summarize_earnings(const std::vector<std::int64_t>& samples, std::int64_t threshold_cents) {
    EarningsSummary s;
    s.threshold_cents = threshold_cents;
    if (samples.empty()) return s;
    const auto n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (const auto v : samples) sum += static_cast<double>(v);
    s.mean = sum / n;
    double ss = 0.0;
    for (const auto v : samples) ss += (static_cast<double>(v) - s.mean) * (static_cast<double>(v) - s.mean);
    s.sd = std::sqrt(ss / n);

    auto sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    s.median = static_cast<double>(sorted[(sorted.size() - 1) / 2]);

    s.exceed_count = std::count_if(samples.begin(), samples.end(), [&](auto v) { return v > threshold_cents; });
    s.p_exceed = static_cast<double>(s.exceed_count) / n;

    const double k = static_cast<double>(s.exceed_count);
    const double alpha = 0.05;
    using boost::math::beta_distribution;
    using boost::math::quantile;
    s.ci_low = s.exceed_count == 0 ? 0.0 : quantile(beta_distribution<>(k, n - k + 1), alpha / 2);
    s.ci_high = s.exceed_count == static_cast<std::int64_t>(samples.size())
                    ? 1.0
                    : quantile(beta_distribution<>(k + 1, n - k), 1 - alpha / 2);
    return s;
}

namespace {

std::int64_t simulate_earnings(const ScheduleConfig& config, double p, std::uint64_t sim_seed, bool independent) {
    ParticipantState ps = new_participant(config, engine_seed(sim_seed));
    Stream draws(agent_seed(sim_seed));
    for (int day = 1; day <= config.horizon_days; ++day) {
        bool survey = draws.bernoulli(p);
        bool tasks = independent ? draws.bernoulli(p) : survey;
        step_day(ps, make_outcome(day, survey, tasks), config);
    }
    return ps.money_cents;
}

void check_mc_args(const ScheduleConfig& config, double p, int n_sims) {
    validate(config);
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("adherence_p must lie in [0,1]");
    if (n_sims < 1) throw std::invalid_argument("n_sims must be >= 1");
}

}  // namespace

EarningsDistribution monte_carlo_earnings_serial(const ScheduleConfig& config, double adherence_p, int n_sims,
                                                 std::uint64_t seed, const MonteCarloOptions& options) {
    check_mc_args(config, adherence_p, n_sims);
    EarningsDistribution dist;
    dist.n_sims = n_sims;
    dist.samples.resize(static_cast<std::size_t>(n_sims));
    for (int i = 0; i < n_sims; ++i) {
        dist.samples[static_cast<std::size_t>(i)] = simulate_earnings(
            config, adherence_p, derive_seed(seed, static_cast<std::uint64_t>(i)), options.independent_trackers);
    }
    dist.summary = summarize_earnings(dist.samples, options.threshold_cents);
    return dist;
}

EarningsDistribution monte_carlo_earnings(const ScheduleConfig& config, double adherence_p, int n_sims,
                                          std::uint64_t seed, const MonteCarloOptions& options) {
    check_mc_args(config, adherence_p, n_sims);
    EarningsDistribution dist;
    dist.n_sims = n_sims;
    dist.samples.resize(static_cast<std::size_t>(n_sims));
    parallel_for(n_sims, [&](int i) {
        dist.samples[static_cast<std::size_t>(i)] = simulate_earnings(
            config, adherence_p, derive_seed(seed, static_cast<std::uint64_t>(i)), options.independent_trackers);
    });
    dist.summary = summarize_earnings(dist.samples, options.threshold_cents);
    return dist;
}

void write_earnings_csv(std::ostream& out, const EarningsDistribution& dist) {
    out << "row,total_cents\n";
    for (std::size_t i = 0; i < dist.samples.size(); ++i) out << i << ',' << dist.samples[i] << '\n';
    const auto& s = dist.summary;
    out << "summary,n_sims=" << dist.n_sims << ";mean=" << shortest(s.mean) << ";sd=" << shortest(s.sd)
        << ";median=" << shortest(s.median) << ";threshold_cents=" << s.threshold_cents
        << ";p_exceed=" << shortest(s.p_exceed) << ";ci_low=" << shortest(s.ci_low)
        << ";ci_high=" << shortest(s.ci_high) << '\n';
}

// --- replay --------------------------------------------------------------------

ReplayResult replay(const TrialLog& log, const ScheduleConfig& config) {
    ReplayResult result;
    ScheduleConfig cfg = config;
    cfg.horizon_days = log.horizon;
    const auto fp = fingerprint(cfg);
    if (fp != log.config_fingerprint) {
        result.status = ReplayStatus::FingerprintMismatch;
        result.message = "config fingerprint mismatch: log has " + log.config_fingerprint + ", config gives " + fp;
        return result;
    }
    if (static_cast<int>(log.days.size()) != log.horizon) {
        result.status = ReplayStatus::Divergence;
        result.divergence_day = static_cast<int>(log.days.size()) + 1;
        result.message = "log has " + std::to_string(log.days.size()) + " days, expected " +
                         std::to_string(log.horizon);
        return result;
    }

    ParticipantState ps = new_participant(cfg, engine_seed(log.seed));
    for (const auto& record : log.days) {
        StepResult step;
        try {
            step = step_day(ps, record.outcome, cfg);
        } catch (const std::logic_error& e) {
            result.status = ReplayStatus::Divergence;
            result.divergence_day = record.outcome.day;
            result.message = e.what();
            return result;
        }
        if (step.events != record.events || step.notices != record.notices) {
            result.status = ReplayStatus::Divergence;
            result.divergence_day = record.outcome.day;
            result.logged = record.events;
            result.regenerated = std::move(step.events);
            result.message = "events diverge at day " + std::to_string(record.outcome.day);
            return result;
        }
    }
    if (summarize(ps) != log.summary) {
        result.status = ReplayStatus::Divergence;
        result.divergence_day = log.horizon;
        result.message = "final summary differs from replayed state";
    }
    return result;
}

// --- log files -----------------------------------------------------------------

namespace {

nlohmann::json record(const std::string& id, int day, std::string_view kind, nlohmann::json payload) {
    return {{"participant_id", id}, {"day", day}, {"kind", kind}, {"payload", std::move(payload)},
            {"randomization", nullptr}};
}

nlohmann::json summary_json(const ParticipantSummary& s) {
    return {{"completed_days", s.completed_days}, {"money_cents", s.money_cents}, {"points_total", s.points_total},
            {"fish_count", s.fish_count},         {"level", s.level},             {"contacts", s.contacts},
            {"disengaged", s.disengaged}};
}

ParticipantSummary summary_from_json(const nlohmann::json& j) {
    return {j.at("completed_days").get<int>(), j.at("money_cents").get<std::int64_t>(),
            j.at("points_total").get<std::int64_t>(), j.at("fish_count").get<int>(), j.at("level").get<int>(),
            j.at("contacts").get<int>(), j.at("disengaged").get<bool>()};
}

}  // namespace

void write_trial_log(std::ostream& out, const TrialLog& log) {
    const auto& id = log.participant_id;
    out << record(id, 0, "Header",
                  {{"seed", log.seed}, {"config_fingerprint", log.config_fingerprint}, {"horizon", log.horizon}})
               .dump()
        << '\n';
    for (const auto& day : log.days) {
        out << record(id, day.outcome.day, "Outcome", to_json(day.outcome)).dump() << '\n';
        for (const auto& e : day.events) {
            auto j = to_json(e);
            j["participant_id"] = id;
            out << j.dump() << '\n';
        }
        for (const auto& n : day.notices) {
            out << record(id, day.outcome.day, "Notice", {{"notice", n}}).dump() << '\n';
        }
    }
    out << record(id, log.horizon, "Summary", summary_json(log.summary)).dump() << '\n';
}

TrialLog read_trial_log(std::istream& in) {
    TrialLog log;
    std::string line;
    int line_no = 0;
    bool header = false;
    bool summary = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const auto kind = j.at("kind").get<std::string>();
            const auto id = j.at("participant_id").get<std::string>();
            if (!header) {
                if (kind != "Header") throw LogFormatError("first record must be a Header");
                const auto& p = j.at("payload");
                log.participant_id = id;
                log.seed = p.at("seed").get<std::uint64_t>();
                log.config_fingerprint = p.at("config_fingerprint").get<std::string>();
                log.horizon = p.at("horizon").get<int>();
                header = true;
                continue;
            }
            if (summary) throw LogFormatError("records after Summary");
            if (id != log.participant_id) throw LogFormatError("participant_id changes mid-log");
            if (kind == "Outcome") {
                log.days.push_back({outcome_from_json(j.at("payload")), {}, {}});
            } else if (kind == "Summary") {
                log.summary = summary_from_json(j.at("payload"));
                summary = true;
            } else {
                if (log.days.empty()) throw LogFormatError("event before first Outcome");
                auto& day = log.days.back();
                if (j.at("day").get<int>() != day.outcome.day) throw LogFormatError("event day mismatch");
                if (kind == "Notice") day.notices.push_back(j.at("payload").at("notice").get<std::string>());
                else day.events.push_back(event_from_json(j));
            }
        } catch (const std::exception& e) {
            throw LogFormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header) throw LogFormatError("empty log");
    if (!summary) throw LogFormatError("log has no Summary record");
    return log;
}

void write_trial_log_file(const std::string& path, const TrialLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_trial_log(out, log);
}

TrialLog read_trial_log_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LogFormatError("cannot read '" + path + "'");
    return read_trial_log(in);
}

}  // namespace opsched

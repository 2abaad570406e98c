#include "opsched/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "opsched/format.hpp"

namespace opsched {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in, const std::string& expected_header) {
    std::string line;
    if (!std::getline(in, line) || line != expected_header) {
        throw InputError("expected CSV header '" + expected_header + "'");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back(split(line));
    }
    return rows;
}

int common_horizon(std::span<const TrialLog> logs) {
    if (logs.empty()) throw InputError("no logs");
    const int horizon = logs.front().horizon;
    for (const auto& log : logs) {
        if (log.horizon != horizon) throw InputError("logs have mixed horizons");
    }
    return horizon;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
    return buf;
}

}  // namespace

std::string_view to_string(Cluster c) {
    switch (c) {
    case Cluster::Green: return "green";
    case Cluster::Blue: return "blue";
    case Cluster::Red: return "red";
    }
    return "?";
}

Cluster parse_cluster(std::string_view s) {
    if (s == "green") return Cluster::Green;
    if (s == "blue") return Cluster::Blue;
    if (s == "red") return Cluster::Red;
    throw InputError("unknown cluster label '" + std::string(s) + "'");
}

Cluster cluster_for(int completed_days) {
    if (completed_days > 20) return Cluster::Green;
    if (completed_days < 10) return Cluster::Red;
    return Cluster::Blue;
}

std::vector<bool> completion_flags(const TrialLog& log) {
    std::vector<bool> flags(static_cast<std::size_t>(log.horizon), false);
    for (const auto& day : log.days) {
        if (day.outcome.day >= 1 && day.outcome.day <= log.horizon) {
            flags[static_cast<std::size_t>(day.outcome.day - 1)] = day.outcome.fully_completed();
        }
    }
    return flags;
}

AdherenceSummary adherence_by_window(std::span<const TrialLog> logs, int window_len) {
    const int horizon = common_horizon(logs);
    if (window_len < 1 || horizon % window_len != 0) {
        throw InputError("horizon " + std::to_string(horizon) + " not divisible by window length " +
                         std::to_string(window_len));
    }
    AdherenceSummary s;
    s.window_len = window_len;
    s.participants = static_cast<int>(logs.size());
    const int n_windows = horizon / window_len;
    const int n_weeks = horizon / 7;
    std::vector<std::int64_t> window_hits(static_cast<std::size_t>(n_windows), 0);
    std::vector<std::int64_t> week_hits(static_cast<std::size_t>(n_weeks), 0);
    for (const auto& log : logs) {
        const auto flags = completion_flags(log);
        for (int d = 0; d < horizon; ++d) {
            if (!flags[static_cast<std::size_t>(d)]) continue;
            ++window_hits[static_cast<std::size_t>(d / window_len)];
            if (d / 7 < n_weeks) ++week_hits[static_cast<std::size_t>(d / 7)];
        }
    }
    const double n = static_cast<double>(logs.size());
    for (const auto hits : window_hits) s.windows.push_back(static_cast<double>(hits) / (n * window_len));
    for (const auto hits : week_hits) s.weeks.push_back(static_cast<double>(hits) / (n * 7));
    return s;
}

ClusterAssignment cluster_participants(std::span<const TrialLog> logs) {
    if (logs.empty()) throw InputError("no logs");
    ClusterAssignment out;
    out.reserve(logs.size());
    for (const auto& log : logs) {
        const auto flags = completion_flags(log);
        const int count = static_cast<int>(std::count(flags.begin(), flags.end(), true));
        out.push_back({log.participant_id, count, cluster_for(count)});
    }
    return out;
}

std::vector<int> gaps_of(const TrialLog& log) {
    // Gaps only exist between two completions, so a trailing silence (end of
    // study or disengagement) never contributes.
    std::vector<int> gaps;
    int last = 0;
    const auto flags = completion_flags(log);
    for (int d = 1; d <= log.horizon; ++d) {
        if (!flags[static_cast<std::size_t>(d - 1)]) continue;
        if (last > 0) gaps.push_back(d - last);
        last = d;
    }
    return gaps;
}

GapHistogram gap_distribution(std::span<const TrialLog> logs) {
    if (logs.empty()) throw InputError("no logs");
    GapHistogram h;
    for (const auto& log : logs) {
        for (const int gap : gaps_of(log)) {
            ++h.counts[static_cast<std::size_t>(std::min(gap, 4) - 1)];
            ++h.total;
        }
    }
    if (h.total > 0) {
        for (std::size_t b = 0; b < 4; ++b) h.fractions[b] = static_cast<double>(h.counts[b]) / h.total;
    }
    return h;
}

EarningsStats earnings_stats_from_cents(std::span<const std::int64_t> cents) {
    if (cents.empty()) throw InputError("no earnings");
    std::vector<double> dollars;
    dollars.reserve(cents.size());
    for (const auto c : cents) dollars.push_back(static_cast<double>(c) / 100.0);
    EarningsStats e;
    const double n = static_cast<double>(dollars.size());
    e.mean = std::accumulate(dollars.begin(), dollars.end(), 0.0) / n;
    double ss = 0.0;
    for (const double d : dollars) ss += (d - e.mean) * (d - e.mean);
    e.sd = std::sqrt(ss / n);
    std::sort(dollars.begin(), dollars.end());
    e.median = dollars[(dollars.size() - 1) / 2];
    return e;
}

EarningsStats earnings_stats(std::span<const TrialLog> logs) {
    if (logs.empty()) throw InputError("no logs");
    std::vector<std::int64_t> cents;
    cents.reserve(logs.size());
    for (const auto& log : logs) cents.push_back(log.summary.money_cents);
    return earnings_stats_from_cents(cents);
}

ContactResponse contact_response_rate(std::span<const TrialLog> logs) {
    ContactResponse r;
    for (const auto& log : logs) {
        const auto flags = completion_flags(log);
        for (const auto& day : log.days) {
            const int d = day.outcome.day;
            if (d >= log.horizon) continue;
            for (const auto& e : day.events) {
                if (!e.is<reward::Contact>()) continue;
                ++r.contacts;
                if (flags[static_cast<std::size_t>(d)]) ++r.responded;  // day d+1
            }
        }
    }
    r.rate = r.contacts > 0 ? static_cast<double>(r.responded) / static_cast<double>(r.contacts) : 0.0;
    return r;
}

std::array<std::optional<double>, 7> insight_series(const TrialLog& log, InsightKind kind, int ending_day) {
    if (ending_day < 1) throw InputError("ending_day must be >= 1");
    std::array<std::optional<double>, 7> series;
    for (int i = 0; i < 7; ++i) {
        const int day = ending_day - 6 + i;
        if (day < 1 || day > static_cast<int>(log.days.size())) continue;
        const auto& o = log.days[static_cast<std::size_t>(day - 1)].outcome;
        const auto& s = o.survey_response;
        const auto& t = o.task_results;
        switch (kind) {
        case InsightKind::Stress: if (s) series[i] = s->stress; break;
        case InsightKind::Loneliness: if (s) series[i] = s->loneliness; break;
        case InsightKind::Fun: if (s) series[i] = s->fun; break;
        case InsightKind::Novelty: if (s) series[i] = s->novelty; break;
        case InsightKind::FreeHours: if (s) series[i] = s->free_hours; break;
        case InsightKind::TapCount: if (t) series[i] = t->tap_count; break;
        case InsightKind::SpatialSeconds: if (t) series[i] = t->spatial_seconds; break;
        }
    }
    return series;
}

std::array<std::optional<double>, 7> insight_series(const TrialLog& log, std::string_view kind, int ending_day) {
    InsightKind k;
    try {
        k = parse_insight_kind(kind);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return insight_series(log, k, ending_day);
}

// --- CSV -----------------------------------------------------------------------

void write_adherence_csv(std::ostream& out, const AdherenceSummary& s) {
    out << "period,index,first_day,last_day,fraction,participants\n";
    for (std::size_t i = 0; i < s.windows.size(); ++i) {
        const auto first = static_cast<int>(i) * s.window_len + 1;
        out << "window," << i + 1 << ',' << first << ',' << first + s.window_len - 1 << ','
            << shortest(s.windows[i]) << ',' << s.participants << '\n';
    }
    for (std::size_t i = 0; i < s.weeks.size(); ++i) {
        const auto first = static_cast<int>(i) * 7 + 1;
        out << "week," << i + 1 << ',' << first << ',' << first + 6 << ',' << shortest(s.weeks[i]) << ','
            << s.participants << '\n';
    }
}

AdherenceSummary read_adherence_csv(std::istream& in) {
    AdherenceSummary s;
    for (const auto& row : read_rows(in, "period,index,first_day,last_day,fraction,participants")) {
        if (row.size() != 6) throw InputError("adherence.csv: bad row");
        const double fraction = parse_double(row[4]);
        s.participants = std::stoi(row[5]);
        if (row[0] == "window") {
            s.window_len = std::stoi(row[3]) - std::stoi(row[2]) + 1;
            s.windows.push_back(fraction);
        } else if (row[0] == "week") {
            s.weeks.push_back(fraction);
        } else {
            throw InputError("adherence.csv: unknown period '" + row[0] + "'");
        }
    }
    return s;
}

void write_clusters_csv(std::ostream& out, const ClusterAssignment& c) {
    out << "participant_id,completed_days,cluster\n";
    for (const auto& e : c) out << e.participant_id << ',' << e.completed_days << ',' << to_string(e.label) << '\n';
}

ClusterAssignment read_clusters_csv(std::istream& in) {
    ClusterAssignment c;
    for (const auto& row : read_rows(in, "participant_id,completed_days,cluster")) {
        if (row.size() != 3) throw InputError("clusters.csv: bad row");
        c.push_back({row[0], std::stoi(row[1]), parse_cluster(row[2])});
    }
    return c;
}

void write_gaps_csv(std::ostream& out, const GapHistogram& g) {
    static constexpr std::array<const char*, 4> labels{"1", "2", "3", ">=4"};
    out << "gap_days,count,fraction\n";
    for (std::size_t b = 0; b < 4; ++b) {
        out << labels[b] << ',' << g.counts[b] << ',' << shortest(g.fractions[b]) << '\n';
    }
}

GapHistogram read_gaps_csv(std::istream& in) {
    GapHistogram g;
    const auto rows = read_rows(in, "gap_days,count,fraction");
    if (rows.size() != 4) throw InputError("gaps.csv: expected 4 buckets");
    for (std::size_t b = 0; b < 4; ++b) {
        if (rows[b].size() != 3) throw InputError("gaps.csv: bad row");
        g.counts[b] = std::stoll(rows[b][1]);
        g.fractions[b] = parse_double(rows[b][2]);
        g.total += g.counts[b];
    }
    return g;
}

void write_earnings_stats_csv(std::ostream& out, const EarningsStats& e) {
    out << "mean_dollars,sd_dollars,median_dollars\n"
        << shortest(e.mean) << ',' << shortest(e.sd) << ',' << shortest(e.median) << '\n';
}

EarningsStats read_earnings_stats_csv(std::istream& in) {
    const auto rows = read_rows(in, "mean_dollars,sd_dollars,median_dollars");
    if (rows.size() != 1 || rows[0].size() != 3) throw InputError("earnings.csv: expected one row");
    return {parse_double(rows[0][0]), parse_double(rows[0][1]), parse_double(rows[0][2])};
}

ReferenceCurve read_reference_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw InputError("reference CSV is empty");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    ReferenceCurve ref;
    if (header == "week,fraction") ref.weekly = true;
    else if (header != "window,fraction") throw InputError("reference CSV header must be 'window,fraction' or 'week,fraction'");
    std::string line;
    int expected = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto row = split(line);
        if (row.size() != 2) throw InputError("reference CSV: bad row '" + line + "'");
        if (std::stoi(row[0]) != expected++) throw InputError("reference CSV: periods must be 1, 2, ... in order");
        const double f = parse_double(row[1]);
        if (f < 0.0 || f > 1.0) throw InputError("reference CSV: fraction outside [0,1]");
        ref.fractions.push_back(f);
    }
    return ref;
}

std::string text_report(std::span<const TrialLog> logs, const std::optional<ReferenceCurve>& reference) {
    std::ostringstream out;
    const auto adherence = adherence_by_window(logs, 10);
    const auto clusters = cluster_participants(logs);
    const auto gaps = gap_distribution(logs);
    const auto earnings = earnings_stats(logs);
    const auto contacts = contact_response_rate(logs);

    out << "Cohort: " << logs.size() << " participants, " << logs.front().horizon << " days\n\n";
    out << "Adherence (full completion) by 10-day window\n";
    for (std::size_t i = 0; i < adherence.windows.size(); ++i) {
        out << "  days " << i * 10 + 1 << "-" << (i + 1) * 10 << ": " << percent(adherence.windows[i]);
        if (reference && !reference->weekly && i < reference->fractions.size()) {
            const double delta = 100.0 * (adherence.windows[i] - reference->fractions[i]);
            char buf[64];
            std::snprintf(buf, sizeof(buf), "  (reference %s, delta %+.1f pp)",
                          percent(reference->fractions[i]).c_str(), delta);
            out << buf;
        }
        out << '\n';
    }
    out << "Adherence by week\n";
    for (std::size_t i = 0; i < adherence.weeks.size(); ++i) {
        out << "  week " << i + 1 << ": " << percent(adherence.weeks[i]);
        if (reference && reference->weekly && i < reference->fractions.size()) {
            const double delta = 100.0 * (adherence.weeks[i] - reference->fractions[i]);
            char buf[64];
            std::snprintf(buf, sizeof(buf), "  (reference %s, delta %+.1f pp)",
                          percent(reference->fractions[i]).c_str(), delta);
            out << buf;
        }
        out << '\n';
    }

    std::array<int, 3> counts{};
    std::array<double, 3> sums{};
    for (const auto& c : clusters) {
        counts[static_cast<std::size_t>(c.label)]++;
        sums[static_cast<std::size_t>(c.label)] += c.completed_days;
    }
    out << "\nClusters (green > 20 days, blue 10-20, red < 10)\n";
    for (const auto c : {Cluster::Green, Cluster::Blue, Cluster::Red}) {
        const auto i = static_cast<std::size_t>(c);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "  %-5s %3d participants, mean %.2f days\n", std::string(to_string(c)).c_str(),
                      counts[i], counts[i] ? sums[i] / counts[i] : 0.0);
        out << buf;
    }

    out << "\nGaps between successive completions (pooled per gap, n=" << gaps.total << ")\n";
    static constexpr std::array<const char*, 4> labels{"1 day", "2 days", "3 days", ">=4 days"};
    for (std::size_t b = 0; b < 4; ++b) out << "  " << labels[b] << ": " << percent(gaps.fractions[b]) << '\n';

    char buf[128];
    std::snprintf(buf, sizeof(buf), "\nEarnings: mean $%.2f, sd $%.2f, median $%.2f\n", earnings.mean, earnings.sd,
                  earnings.median);
    out << buf;
    out << "Completed on the day after a contact: " << percent(contacts.rate) << " of " << contacts.contacts
        << " contacts\n";
    return out.str();
}

}  // namespace opsched

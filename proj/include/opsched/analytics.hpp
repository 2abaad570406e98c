#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "opsched/engine.hpp"
#include "opsched/trial.hpp"

namespace opsched {

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Completion fractions; denominator is participants x days in the window.
struct AdherenceSummary {
    int window_len = 10;
    int participants = 0;
    std::vector<double> windows;
    std::vector<double> weeks;

    bool operator==(const AdherenceSummary&) const = default;
};

enum class Cluster { Green, Blue, Red };

std::string_view to_string(Cluster c);
Cluster parse_cluster(std::string_view s);

/// green: > 20 completed days, red: < 10, blue: 10..20 inclusive.
Cluster cluster_for(int completed_days);

struct ClusterEntry {
    std::string participant_id;
    int completed_days = 0;
    Cluster label = Cluster::Red;

    bool operator==(const ClusterEntry&) const = default;
};

using ClusterAssignment = std::vector<ClusterEntry>;

/// Gaps between successive completed days, pooled per gap across
/// participants. Buckets: 1, 2, 3, >=4 days.
struct GapHistogram {
    std::array<std::int64_t, 4> counts{};
    std::array<double, 4> fractions{};
    std::int64_t total = 0;

    bool operator==(const GapHistogram&) const = default;
};

struct EarningsStats {
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;

    bool operator==(const EarningsStats&) const = default;
};

struct ContactResponse {
    std::int64_t contacts = 0;   // contacts with a following study day
    std::int64_t responded = 0;  // completed on the day after the contact
    double rate = 0.0;

    bool operator==(const ContactResponse&) const = default;
};

/// Per-day full completion flags of one log.
std::vector<bool> completion_flags(const TrialLog& log);

AdherenceSummary adherence_by_window(std::span<const TrialLog> logs, int window_len = 10);
ClusterAssignment cluster_participants(std::span<const TrialLog> logs);
std::vector<int> gaps_of(const TrialLog& log);
GapHistogram gap_distribution(std::span<const TrialLog> logs);
/// Dollars; population sd; lower-middle median for even counts.
EarningsStats earnings_stats(std::span<const TrialLog> logs);
EarningsStats earnings_stats_from_cents(std::span<const std::int64_t> cents);
ContactResponse contact_response_rate(std::span<const TrialLog> logs);

/// Past-week series of one life-insight quantity ending at `ending_day`;
/// entries for days without data (or before day 1) are empty.
std::array<std::optional<double>, 7> insight_series(const TrialLog& log, InsightKind kind, int ending_day);
std::array<std::optional<double>, 7> insight_series(const TrialLog& log, std::string_view kind, int ending_day);

// CSV export; each read_* reproduces the written summary exactly.
void write_adherence_csv(std::ostream& out, const AdherenceSummary& s);
AdherenceSummary read_adherence_csv(std::istream& in);
void write_clusters_csv(std::ostream& out, const ClusterAssignment& c);
ClusterAssignment read_clusters_csv(std::istream& in);
void write_gaps_csv(std::ostream& out, const GapHistogram& g);
GapHistogram read_gaps_csv(std::istream& in);
void write_earnings_stats_csv(std::ostream& out, const EarningsStats& e);
EarningsStats read_earnings_stats_csv(std::istream& in);

/// Reference adherence curve: header `window,fraction` (10-day windows) or
/// `week,fraction` (7-day weeks), one row per period, fractions in [0,1].
struct ReferenceCurve {
    bool weekly = false;
    std::vector<double> fractions;
};

ReferenceCurve read_reference_csv(std::istream& in);

std::string text_report(std::span<const TrialLog> logs, const std::optional<ReferenceCurve>& reference);

}  // namespace opsched

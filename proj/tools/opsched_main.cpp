// opsched: command-line driver for the incentive engine and cohort simulator.
//
//   opsched simulate   --config PATH --params PATH --n INT --seed INT --out DIR [--horizon INT]
//   opsched analyze    LOG_DIR [--out DIR] [--reference PATH]
//   opsched sweep      [--config PATH] [--params PATH] [--grid PATH] [--reference PATH] --out DIR
//   opsched replay     LOG... [--config PATH]
//   opsched montecarlo --config PATH --p FLOAT --sims INT --seed INT [--out DIR]
//   opsched schema     [--out DIR]

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opsched/analytics.hpp"
#include "opsched/assessments.hpp"
#include "opsched/calibration.hpp"
#include "opsched/trial.hpp"

namespace fs = std::filesystem;
using namespace opsched;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInputError = 2;

struct Common {
    std::string config_path;
    std::string preset_tag = "Iter5";
    std::string params_path;
};

ScheduleConfig resolve_config(const Common& c) {
    if (!c.config_path.empty()) return load_schedule_config(c.config_path);
    auto config = preset(parse_iteration_tag(c.preset_tag));
    validate(config);
    return config;
}

AgentParams resolve_params(const Common& c) {
    return c.params_path.empty() ? AgentParams{} : load_agent_params(c.params_path);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

std::vector<fs::path> log_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InputError("'" + dir.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InputError("no .jsonl logs in '" + dir.string() + "'");
    return files;
}

std::optional<ReferenceCurve> load_reference(const std::string& path) {
    if (path.empty()) return std::nullopt;
    std::ifstream in(path);
    if (!in) throw InputError("cannot open reference '" + path + "'");
    return read_reference_csv(in);
}

int run_simulate(const Common& c, int n, std::uint64_t seed, const std::string& out_dir, std::optional<int> horizon) {
    auto config = resolve_config(c);
    if (horizon) {
        config.horizon_days = *horizon;
        validate(config);
    }
    const auto params = resolve_params(c);
    fs::create_directories(out_dir);
    const auto logs = run_cohort(config, params, n, seed);
    for (const auto& log : logs) write_trial_log_file((fs::path(out_dir) / (log.participant_id + ".jsonl")).string(), log);
    write_file(fs::path(out_dir) / "config.yaml", dump_schedule_config(config));
    write_file(fs::path(out_dir) / "params.yaml", dump_agent_params(params));
    std::cout << "wrote " << logs.size() << " logs to " << out_dir << " (config " << fingerprint(config).substr(0, 12)
              << ")\n";
    return 0;
}

int run_analyze(const std::string& log_dir, std::string out_dir, const std::string& reference_path) {
    if (out_dir.empty()) out_dir = log_dir;
    std::vector<TrialLog> logs;
    for (const auto& f : log_files(log_dir)) logs.push_back(read_trial_log_file(f.string()));
    const auto reference = load_reference(reference_path);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    {
        std::ofstream f(out / "adherence.csv");
        write_adherence_csv(f, adherence_by_window(logs, 10));
    }
    {
        std::ofstream f(out / "clusters.csv");
        write_clusters_csv(f, cluster_participants(logs));
    }
    {
        std::ofstream f(out / "gaps.csv");
        write_gaps_csv(f, gap_distribution(logs));
    }
    {
        std::ofstream f(out / "earnings.csv");
        write_earnings_stats_csv(f, earnings_stats(logs));
    }
    const auto report = text_report(logs, reference);
    write_file(out / "report.txt", report);
    std::cout << report;
    return 0;
}

int run_sweep(const Common& c, const std::string& grid_path, const std::string& reference_path,
              std::optional<double> contact_target, int cohort_size, std::uint64_t seed, const std::string& out_dir) {
    CalibrationOptions options;
    options.config = resolve_config(c);
    options.cohort_size = cohort_size;
    options.seed = seed;

    ParamGrid grid = grid_path.empty() ? default_grid() : load_grid(grid_path);
    if (!c.params_path.empty()) grid.base = load_agent_params(c.params_path);

    CalibrationTargets targets = study4_targets();
    if (const auto ref = load_reference(reference_path)) {
        if (ref->weekly) throw InputError("sweep needs a 10-day window reference ('window,fraction')");
        targets = CalibrationTargets{};
        targets.window_fractions = ref->fractions;
    }
    if (contact_target) targets.contact_response = *contact_target;

    const auto result = calibrate(grid, targets, options);
    const auto report = fit_report(result, grid);
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "fit_report.txt", report);
    write_file(fs::path(out_dir) / "fitted_params.yaml", dump_agent_params(result.params));
    std::cout << report;
    return 0;
}

int run_replay(const Common& c, const std::vector<std::string>& paths) {
    int failures = 0;
    for (const auto& p : paths) {
        std::vector<fs::path> files = fs::is_directory(p) ? log_files(p) : std::vector<fs::path>{p};
        for (const auto& file : files) {
            Common cc = c;
            if (cc.config_path.empty()) {
                const auto sibling = file.parent_path() / "config.yaml";
                if (fs::exists(sibling)) cc.config_path = sibling.string();
            }
            const auto config = resolve_config(cc);
            TrialLog log;
            try {
                log = read_trial_log_file(file.string());
            } catch (const std::exception& e) {
                std::cout << file.string() << ": unreadable: " << e.what() << '\n';
                ++failures;
                continue;
            }
            const auto result = replay(log, config);
            if (result.ok()) {
                std::cout << file.string() << ": ok\n";
                continue;
            }
            ++failures;
            std::cout << file.string() << ": FAILED: " << result.message << '\n';
            if (result.status == ReplayStatus::Divergence) {
                std::cout << "  divergence day " << result.divergence_day << '\n';
                for (const auto& e : result.logged) std::cout << "  logged      " << to_json(e).dump() << '\n';
                for (const auto& e : result.regenerated) std::cout << "  regenerated " << to_json(e).dump() << '\n';
            }
        }
    }
    return failures == 0 ? 0 : kExitFailure;
}

int run_montecarlo(const Common& c, double p, int sims, std::uint64_t seed, const std::string& out_dir,
                   std::int64_t threshold, bool independent) {
    const auto config = resolve_config(c);
    MonteCarloOptions options{threshold, independent};
    const auto dist = monte_carlo_earnings(config, p, sims, seed, options);
    const auto& s = dist.summary;
    std::printf("%d simulations at adherence %.3f (%s)\n", dist.n_sims, p, std::string(to_string(config.iteration_tag)).c_str());
    std::printf("mean $%.2f  sd $%.2f  median $%.2f  max possible $%.2f\n", s.mean / 100, s.sd / 100, s.median / 100,
                max_earnings(config, config.horizon_days) / 100.0);
    std::printf("P(total > $%.2f) = %.4f  (95%% CI %.4f - %.4f)\n", threshold / 100.0, s.p_exceed, s.ci_low, s.ci_high);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream f(fs::path(out_dir) / "earnings_samples.csv");
        write_earnings_csv(f, dist);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reinforcement-schedule engine and adherence simulator"};
    app.require_subcommand(1);

    Common common;
    const auto add_config = [&common](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "Schedule config (YAML)")->check(CLI::ExistingFile);
        sub->add_option("--preset", common.preset_tag, "Preset used when no --config is given (Iter1..Iter5)")
            ->capture_default_str();
    };

    int n = 37;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::optional<int> horizon;
    auto* simulate = app.add_subcommand("simulate", "Simulate a cohort and write one JSONL log per participant");
    add_config(simulate);
    simulate->add_option("--params", common.params_path, "Agent parameters (YAML)")->check(CLI::ExistingFile);
    simulate->add_option("--n", n, "Cohort size")->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "Base seed")->capture_default_str();
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->add_option("--horizon", horizon, "Study length in days (overrides the config)");

    std::string log_dir;
    std::string reference;
    auto* analyze = app.add_subcommand("analyze", "Adherence, clusters, gaps and earnings from a log directory");
    analyze->add_option("logs", log_dir, "Directory of .jsonl logs")->required();
    analyze->add_option("--out", out_dir, "Output directory (default: the log directory)");
    analyze->add_option("--reference", reference, "Reference curve CSV (window,fraction or week,fraction)")
        ->check(CLI::ExistingFile);

    std::string grid_path;
    int cohort = 400;
    std::uint64_t sweep_seed = CalibrationOptions{}.seed;
    std::optional<double> contact_target;
    auto* sweep = app.add_subcommand("sweep", "Grid-search agent parameters against adherence targets");
    add_config(sweep);
    sweep->add_option("--params", common.params_path, "Base agent parameters (YAML)")->check(CLI::ExistingFile);
    sweep->add_option("--grid", grid_path, "Parameter grid (YAML); default grid if omitted")->check(CLI::ExistingFile);
    sweep->add_option("--reference", reference, "Target window CSV (window,fraction); default: Study-4 targets")
        ->check(CLI::ExistingFile);
    sweep->add_option("--contact-target", contact_target, "Target same-day-after-contact completion rate");
    sweep->add_option("--n", cohort, "Cohort size per grid point")->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sweep_seed, "Cohort seed")->capture_default_str();
    sweep->add_option("--out", out_dir, "Output directory for fit_report.txt and fitted_params.yaml")->required();

    std::vector<std::string> replay_paths;
    auto* replay_cmd = app.add_subcommand("replay", "Verify logs by re-running their outcomes through the engine");
    add_config(replay_cmd);
    replay_cmd->add_option("logs", replay_paths, "Log files or directories")->required();

    double p = 0.9;
    int sims = 20000;
    std::int64_t threshold = 1000;
    bool independent = false;
    auto* montecarlo = app.add_subcommand("montecarlo", "Earnings distribution under i.i.d. adherence");
    add_config(montecarlo);
    montecarlo->add_option("--p", p, "Daily adherence probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    montecarlo->add_option("--sims", sims, "Number of simulations")->capture_default_str()->check(CLI::PositiveNumber);
    montecarlo->add_option("--seed", seed, "Seed")->capture_default_str();
    montecarlo->add_option("--out", out_dir, "Directory for earnings_samples.csv");
    montecarlo->add_option("--threshold-cents", threshold, "Exceedance threshold in cents")->capture_default_str();
    montecarlo->add_flag("--independent-trackers", independent, "Draw survey and tasks independently");

    auto* schema = app.add_subcommand("schema", "Print (or write) the survey schema as JSON");
    schema->add_option("--out", out_dir, "Output directory for survey_schema.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return run_simulate(common, n, seed, out_dir, horizon);
        if (*analyze) return run_analyze(log_dir, out_dir, reference);
        if (*sweep) return run_sweep(common, grid_path, reference, contact_target, cohort, sweep_seed, out_dir);
        if (*replay_cmd) return run_replay(common, replay_paths);
        if (*montecarlo) return run_montecarlo(common, p, sims, seed, out_dir, threshold, independent);
        if (*schema) {
            const auto text = survey_schema().dump(2) + "\n";
            if (out_dir.empty()) {
                std::cout << text;
            } else {
                fs::create_directories(out_dir);
                write_file(fs::path(out_dir) / "survey_schema.json", text);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return 0;
}

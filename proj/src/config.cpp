#include "opsched/config.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

namespace opsched {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::pair<std::string_view, Enum>, N>& table,
                std::string_view what) {
    for (const auto& [name, value] : table) {
        if (name == s) return value;
    }
    throw ConfigError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<std::string_view, IterationTag>, 5> kTags{{
    {"Iter1", IterationTag::Iter1},
    {"Iter2", IterationTag::Iter2},
    {"Iter3", IterationTag::Iter3},
    {"Iter4", IterationTag::Iter4},
    {"Iter5", IterationTag::Iter5},
}};

constexpr std::array<std::pair<std::string_view, FishMode>, 3> kFishModes{{
    {"growth_stages", FishMode::GrowthStages},
    {"one_per_day_with_gaps", FishMode::OnePerDayWithGaps},
    {"none", FishMode::None},
}};

constexpr std::array<std::pair<std::string_view, MoneyMode>, 3> kMoneyModes{{
    {"none", MoneyMode::None},
    {"milestones", MoneyMode::Milestones},
    {"flat_per_streak", MoneyMode::FlatPerStreak},
}};

void require(bool ok, const std::string& invariant) {
    if (!ok) throw ConfigError("invalid schedule config: " + invariant);
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

std::string_view to_string(IterationTag tag) {
    for (const auto& [name, value] : kTags) {
        if (value == tag) return name;
    }
    return "?";
}

std::string_view to_string(FishMode mode) {
    for (const auto& [name, value] : kFishModes) {
        if (value == mode) return name;
    }
    return "?";
}

std::string_view to_string(MoneyMode mode) {
    for (const auto& [name, value] : kMoneyModes) {
        if (value == mode) return name;
    }
    return "?";
}

IterationTag parse_iteration_tag(std::string_view s) { return parse_enum(s, kTags, "iteration tag"); }
FishMode parse_fish_mode(std::string_view s) { return parse_enum(s, kFishModes, "fish_mode"); }
MoneyMode parse_money_mode(std::string_view s) { return parse_enum(s, kMoneyModes, "money_mode"); }

ScheduleConfig preset(IterationTag tag) {
    ScheduleConfig c;
    c.iteration_tag = tag;
    switch (tag) {
    case IterationTag::Iter1:
        c.fish_mode = FishMode::GrowthStages;
        c.fish_pool_size = 6;
        c.growth_stages_per_fish = 4;
        c.gap_after_fish_counts.clear();
        c.levels_enabled = false;
        c.sea_fish_start_index = 6;
        break;
    case IterationTag::Iter2:
        break;
    case IterationTag::Iter3:
        c.money_mode = MoneyMode::Milestones;
        break;
    case IterationTag::Iter4:
        c.money_mode = MoneyMode::Milestones;
        c.meme_prob = 0.5;
        c.insight_prob = 0.5;
        break;
    case IterationTag::Iter5:
        c.money_mode = MoneyMode::FlatPerStreak;
        c.front_load_day1_cents = 100;
        c.double_fish_days = 2;
        c.meme_prob = 0.5;
        c.insight_prob = 0.5;
        c.contact_policy.enabled = true;
        break;
    }
    return c;
}

void validate(const ScheduleConfig& c) {
    require(probability(c.meme_prob), "meme_prob must lie in [0,1]");
    require(probability(c.insight_prob), "insight_prob must lie in [0,1]");
    require(c.horizon_days >= 1, "horizon_days must be >= 1");
    require(c.fish_pool_size >= 0, "fish_pool_size must be >= 0");
    require(c.growth_stages_per_fish >= 1, "growth_stages_per_fish must be >= 1");
    require(c.level2_threshold_days >= 1, "level2_threshold_days must be >= 1");
    require(c.points_per_completion >= 0, "points_per_completion must be >= 0");
    require(c.flat_streak_len >= 1, "flat_streak_len must be >= 1");
    require(c.flat_streak_cents >= 0, "flat_streak_cents must be >= 0");
    require(c.front_load_day1_cents >= 0, "front_load_day1_cents must be >= 0");
    require(c.double_fish_days >= 0, "double_fish_days must be >= 0");
    require(c.meme_pool_size >= 1, "meme_pool_size must be >= 1");
    require(c.insight_kind_count >= 1 && c.insight_kind_count <= 7,
            "insight_kind_count must lie in [1,7]");

    const auto& cp = c.contact_policy;
    require(cp.first_after_missed >= 1, "contact_policy.first_after_missed must be >= 1");
    require(cp.repeat_every >= 1, "contact_policy.repeat_every must be >= 1");
    require(cp.stop_after_silent >= 0, "contact_policy.stop_after_silent must be >= 0");

    for (std::size_t i = 0; i < c.milestone_table.size(); ++i) {
        const auto& m = c.milestone_table[i];
        require(m.streak_days >= 1, "milestone streak lengths must be >= 1");
        require(m.cents >= 0, "milestone cents must be >= 0");
        if (i > 0) {
            require(m.streak_days > c.milestone_table[i - 1].streak_days,
                    "non-increasing milestones: streak lengths must be strictly increasing");
        }
    }
    // The table is inert outside milestone mode, so a shorter horizon is fine there.
    if (c.money_mode == MoneyMode::Milestones && !c.milestone_table.empty()) {
        require(c.milestone_table.back().streak_days <= c.horizon_days,
                "largest milestone must not exceed horizon_days");
    }

    for (std::size_t i = 0; i < c.gap_after_fish_counts.size(); ++i) {
        require(c.gap_after_fish_counts[i] >= 0, "gap_after_fish_counts must be >= 0");
        if (i > 0) {
            require(c.gap_after_fish_counts[i] > c.gap_after_fish_counts[i - 1],
                    "gap_after_fish_counts must be strictly increasing");
        }
    }
    if (!c.gap_after_fish_counts.empty()) {
        require(c.gap_after_fish_counts.back() < c.fish_pool_size,
                "max gap_after_fish_counts must be < fish_pool_size");
    }
    if (c.levels_enabled) {
        require(c.sea_fish_start_index >= 1 && c.sea_fish_start_index <= c.fish_pool_size,
                "sea_fish_start_index must lie in [1, fish_pool_size]");
    }
}

nlohmann::json to_json(const ScheduleConfig& c) {
    nlohmann::json milestones = nlohmann::json::array();
    for (const auto& m : c.milestone_table) milestones.push_back({m.streak_days, m.cents});
    return {
        {"iteration_tag", to_string(c.iteration_tag)},
        {"fish_mode", to_string(c.fish_mode)},
        {"fish_pool_size", c.fish_pool_size},
        {"growth_stages_per_fish", c.growth_stages_per_fish},
        {"gap_after_fish_counts", c.gap_after_fish_counts},
        {"levels_enabled", c.levels_enabled},
        {"level2_threshold_days", c.level2_threshold_days},
        {"sea_fish_start_index", c.sea_fish_start_index},
        {"points_per_completion", c.points_per_completion},
        {"money_mode", to_string(c.money_mode)},
        {"milestone_table", milestones},
        {"flat_streak_len", c.flat_streak_len},
        {"flat_streak_cents", c.flat_streak_cents},
        {"front_load_day1_cents", c.front_load_day1_cents},
        {"double_fish_days", c.double_fish_days},
        {"meme_prob", c.meme_prob},
        {"insight_prob", c.insight_prob},
        {"meme_pool_size", c.meme_pool_size},
        {"insight_kind_count", c.insight_kind_count},
        {"contact_policy",
         {{"enabled", c.contact_policy.enabled},
          {"first_after_missed", c.contact_policy.first_after_missed},
          {"repeat_every", c.contact_policy.repeat_every},
          {"stop_after_silent", c.contact_policy.stop_after_silent}}},
        {"horizon_days", c.horizon_days},
        {"report_window", c.report_window},
    };
}

std::string fingerprint(const ScheduleConfig& config) {
    // nlohmann::json objects are key-sorted, so dump() is canonical.
    const std::string canonical = to_json(config).dump();
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_Digest(canonical.data(), canonical.size(), digest.data(), &len, EVP_sha256(), nullptr);
    std::string hex;
    hex.reserve(len * 2);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

namespace {

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("bad value for key '" + key + "'");
    }
}

void apply_contact_policy(ContactPolicy& cp, const YAML::Node& node) {
    if (!node.IsMap()) throw ConfigError("contact_policy must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        const auto& v = kv.second;
        if (key == "enabled") cp.enabled = scalar<bool>(v, key);
        else if (key == "first_after_missed") cp.first_after_missed = scalar<int>(v, key);
        else if (key == "repeat_every") cp.repeat_every = scalar<int>(v, key);
        else if (key == "stop_after_silent") cp.stop_after_silent = scalar<int>(v, key);
        else throw ConfigError("unknown key 'contact_policy." + key + "'");
    }
}

ScheduleConfig parse_block(IterationTag tag, const YAML::Node& block) {
    ScheduleConfig c = preset(tag);
    if (block.IsNull()) return c;
    if (!block.IsMap()) throw ConfigError("block '" + std::string(to_string(tag)) + "' must be a mapping");
    for (const auto& kv : block) {
        const auto key = kv.first.as<std::string>();
        const auto& v = kv.second;
        if (key == "fish_mode") c.fish_mode = parse_fish_mode(scalar<std::string>(v, key));
        else if (key == "fish_pool_size") c.fish_pool_size = scalar<int>(v, key);
        else if (key == "growth_stages_per_fish") c.growth_stages_per_fish = scalar<int>(v, key);
        else if (key == "gap_after_fish_counts") c.gap_after_fish_counts = scalar<std::vector<int>>(v, key);
        else if (key == "levels_enabled") c.levels_enabled = scalar<bool>(v, key);
        else if (key == "level2_threshold_days") c.level2_threshold_days = scalar<int>(v, key);
        else if (key == "sea_fish_start_index") c.sea_fish_start_index = scalar<int>(v, key);
        else if (key == "points_per_completion") c.points_per_completion = scalar<std::int64_t>(v, key);
        else if (key == "money_mode") c.money_mode = parse_money_mode(scalar<std::string>(v, key));
        else if (key == "milestone_table") {
            // Mapping of streak length -> cents; YAML preserves the written order.
            if (!v.IsMap()) throw ConfigError("milestone_table must be a mapping of days -> cents");
            c.milestone_table.clear();
            for (const auto& m : v) {
                c.milestone_table.push_back(
                    {scalar<int>(m.first, key), scalar<std::int64_t>(m.second, key)});
            }
        }
        else if (key == "flat_streak_len") c.flat_streak_len = scalar<int>(v, key);
        else if (key == "flat_streak_cents") c.flat_streak_cents = scalar<std::int64_t>(v, key);
        else if (key == "front_load_day1_cents") c.front_load_day1_cents = scalar<std::int64_t>(v, key);
        else if (key == "double_fish_days") c.double_fish_days = scalar<int>(v, key);
        else if (key == "meme_prob") c.meme_prob = scalar<double>(v, key);
        else if (key == "insight_prob") c.insight_prob = scalar<double>(v, key);
        else if (key == "meme_pool_size") c.meme_pool_size = scalar<int>(v, key);
        else if (key == "insight_kind_count") c.insight_kind_count = scalar<int>(v, key);
        else if (key == "contact_policy") apply_contact_policy(c.contact_policy, v);
        else if (key == "horizon_days") c.horizon_days = scalar<int>(v, key);
        else if (key == "report_window") c.report_window = scalar<std::string>(v, key);
        else throw ConfigError("unknown key '" + key + "' in block '" + std::string(to_string(tag)) + "'");
    }
    return c;
}

}  // namespace

ScheduleConfig parse_schedule_config(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("config must be a mapping of iteration blocks");

    std::optional<IterationTag> use;
    std::vector<std::pair<IterationTag, YAML::Node>> blocks;
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (key == "use") {
            use = parse_iteration_tag(scalar<std::string>(kv.second, key));
            continue;
        }
        IterationTag tag;
        try {
            tag = parse_iteration_tag(key);
        } catch (const ConfigError&) {
            throw ConfigError("unknown top-level key '" + key + "'");
        }
        blocks.emplace_back(tag, kv.second);
    }

    ScheduleConfig config;
    if (use) {
        const auto it = std::find_if(blocks.begin(), blocks.end(),
                                     [&](const auto& b) { return b.first == *use; });
        // `use` without a block means the untouched preset.
        config = it == blocks.end() ? preset(*use) : parse_block(it->first, it->second);
    } else if (blocks.size() == 1) {
        config = parse_block(blocks.front().first, blocks.front().second);
    } else {
        throw ConfigError("config with several blocks needs a 'use' key");
    }
    // Every block must be valid, not just the selected one.
    for (const auto& [tag, node] : blocks) validate(parse_block(tag, node));
    validate(config);
    return config;
}

ScheduleConfig load_schedule_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_schedule_config(ss.str());
}

std::string dump_schedule_config(const ScheduleConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap << YAML::Key << "use" << YAML::Value << std::string(to_string(c.iteration_tag));
    out << YAML::Key << std::string(to_string(c.iteration_tag)) << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "fish_mode" << YAML::Value << std::string(to_string(c.fish_mode));
    out << YAML::Key << "fish_pool_size" << YAML::Value << c.fish_pool_size;
    out << YAML::Key << "growth_stages_per_fish" << YAML::Value << c.growth_stages_per_fish;
    out << YAML::Key << "gap_after_fish_counts" << YAML::Value << YAML::Flow << c.gap_after_fish_counts;
    out << YAML::Key << "levels_enabled" << YAML::Value << c.levels_enabled;
    out << YAML::Key << "level2_threshold_days" << YAML::Value << c.level2_threshold_days;
    out << YAML::Key << "sea_fish_start_index" << YAML::Value << c.sea_fish_start_index;
    out << YAML::Key << "points_per_completion" << YAML::Value << c.points_per_completion;
    out << YAML::Key << "money_mode" << YAML::Value << std::string(to_string(c.money_mode));
    out << YAML::Key << "milestone_table" << YAML::Value << YAML::Flow << YAML::BeginMap;
    for (const auto& m : c.milestone_table) out << YAML::Key << m.streak_days << YAML::Value << m.cents;
    out << YAML::EndMap;
    out << YAML::Key << "flat_streak_len" << YAML::Value << c.flat_streak_len;
    out << YAML::Key << "flat_streak_cents" << YAML::Value << c.flat_streak_cents;
    out << YAML::Key << "front_load_day1_cents" << YAML::Value << c.front_load_day1_cents;
    out << YAML::Key << "double_fish_days" << YAML::Value << c.double_fish_days;
    out << YAML::Key << "meme_prob" << YAML::Value << c.meme_prob;
    out << YAML::Key << "insight_prob" << YAML::Value << c.insight_prob;
    out << YAML::Key << "meme_pool_size" << YAML::Value << c.meme_pool_size;
    out << YAML::Key << "insight_kind_count" << YAML::Value << c.insight_kind_count;
    out << YAML::Key << "contact_policy" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "enabled" << YAML::Value << c.contact_policy.enabled;
    out << YAML::Key << "first_after_missed" << YAML::Value << c.contact_policy.first_after_missed;
    out << YAML::Key << "repeat_every" << YAML::Value << c.contact_policy.repeat_every;
    out << YAML::Key << "stop_after_silent" << YAML::Value << c.contact_policy.stop_after_silent;
    out << YAML::EndMap;
    out << YAML::Key << "horizon_days" << YAML::Value << c.horizon_days;
    out << YAML::Key << "report_window" << YAML::Value << c.report_window;
    out << YAML::EndMap << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace opsched

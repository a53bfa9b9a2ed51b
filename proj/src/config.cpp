#include "barriers/config.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>

#include "barriers/errors.hpp"
#include "barriers/io_util.hpp"

namespace barriers {

namespace {

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return "";
    }
    const auto last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + key + "': cannot parse number from '" + value + "'");
    }
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    return parse_number<double>(key, value);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

const char* kKnownKeys =
    "corpus, countries, publishers, out, seed, jobs, tau_low, tau_high, min_df, max_df_ratio, "
    "concept_weight, lowercase, include_title, epochs, batch_size, hidden_layers, hidden_units, "
    "dropout, learning_rate, l2_lambda, nb_alpha, knn_k, dt_max_depth, dt_min_leaf, train_ratio, "
    "barriers, categories, models, feature_modes, stats_groups";

}  // namespace

RunConfig default_run_config() {
    RunConfig config;
    config.grid.barriers = all_barriers();
    config.grid.categories = all_categories();
    config.grid.models = all_model_kinds();
    config.grid.modes = {FeatureMode::text_only, FeatureMode::text_concepts};
    return config;
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "corpus") {
        config.corpus_path = value;
    } else if (key == "countries") {
        config.countries_path = value;
    } else if (key == "publishers") {
        config.publishers_path = value;
    } else if (key == "out") {
        config.out_dir = value;
    } else if (key == "seed") {
        config.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "jobs") {
        config.jobs = parse_number<int>(key, value);
        if (config.jobs < 1) {
            throw ConfigError("jobs must be >= 1");
        }
    } else if (key == "tau_low") {
        config.thresholds.tau_low = parse_real(key, value);
    } else if (key == "tau_high") {
        config.thresholds.tau_high = parse_real(key, value);
    } else if (key == "min_df") {
        config.features.min_df = parse_number<std::size_t>(key, value);
    } else if (key == "max_df_ratio") {
        config.features.max_df_ratio = parse_real(key, value);
    } else if (key == "concept_weight") {
        config.features.concept_weight = parse_number<int>(key, value);
        if (config.features.concept_weight < 1) {
            throw ConfigError("concept_weight must be >= 1");
        }
    } else if (key == "lowercase") {
        config.features.lowercase = parse_bool(key, value);
    } else if (key == "include_title") {
        config.features.include_title = parse_bool(key, value);
    } else if (key == "epochs") {
        config.train.epochs = parse_number<int>(key, value);
    } else if (key == "batch_size") {
        config.train.batch_size = parse_number<int>(key, value);
    } else if (key == "hidden_layers") {
        config.train.hidden_layers = parse_number<int>(key, value);
    } else if (key == "hidden_units") {
        config.train.hidden_units = parse_number<int>(key, value);
    } else if (key == "dropout") {
        config.train.dropout_rate = parse_real(key, value);
    } else if (key == "learning_rate") {
        config.train.learning_rate = parse_real(key, value);
    } else if (key == "l2_lambda") {
        config.train.l2_lambda = parse_real(key, value);
    } else if (key == "nb_alpha") {
        config.train.nb_alpha = parse_real(key, value);
    } else if (key == "knn_k") {
        config.train.knn_k = parse_number<int>(key, value);
    } else if (key == "dt_max_depth") {
        config.train.dt_max_depth = parse_number<int>(key, value);
    } else if (key == "dt_min_leaf") {
        config.train.dt_min_leaf = parse_number<int>(key, value);
    } else if (key == "train_ratio") {
        config.train_ratio = parse_real(key, value);
    } else if (key == "barriers") {
        if (value == "all") {
            config.grid.barriers = all_barriers();
        } else {
            config.grid.barriers.clear();
            for (const std::string& name : split_list(value)) {
                const auto kind = barrier_from_string(name);
                if (!kind) {
                    throw ConfigError("unknown barrier '" + name +
                                      "'; valid: cultural, economic, political, linguistic, "
                                      "geographic");
                }
                config.grid.barriers.push_back(*kind);
            }
        }
    } else if (key == "categories") {
        if (value == "all") {
            config.grid.categories = all_categories();
        } else {
            config.grid.categories.clear();
            for (const std::string& name : split_list(value)) {
                const auto category = category_from_string(name);
                if (!category) {
                    throw ConfigError(
                        "unknown category '" + name +
                        "'; valid: business, computers, games, health, home, recreation, "
                        "science, shopping, society, sports");
                }
                config.grid.categories.push_back(*category);
            }
        }
    } else if (key == "models") {
        if (value == "all") {
            config.grid.models = all_model_kinds();
        } else {
            config.grid.models.clear();
            for (const std::string& name : split_list(value)) {
                const auto kind = model_kind_from_string(name);
                if (!kind) {
                    throw ConfigError("unknown model '" + name +
                                      "'; valid: lr, nb, knn, dt, mlp");
                }
                config.grid.models.push_back(*kind);
            }
        }
    } else if (key == "feature_modes") {
        config.grid.modes.clear();
        for (const std::string& name : split_list(value)) {
            const auto mode = feature_mode_from_string(name);
            if (!mode) {
                throw ConfigError("unknown feature mode '" + name +
                                  "'; valid: text, text+concepts");
            }
            config.grid.modes.push_back(*mode);
        }
    } else if (key == "stats_groups") {
        if (value != "barriers" && value != "categories") {
            throw ConfigError("stats_groups must be 'barriers' or 'categories'");
        }
        config.stats_groups = value;
    } else {
        throw ConfigError("unknown config key '" + key + "'; valid keys: " + kKnownKeys);
    }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::stringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        const std::string trimmed = trim(line);
        if (trimmed.empty()) {
            continue;
        }
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        apply_config_entry(base, trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
    }
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config file does not exist: " + path);
    }
    return parse_config_text(read_text_file(path), std::move(base));
}

void RunConfig::validate_for_run(bool need_corpus) const {
    thresholds.validate();
    train.validate();
    if (train_ratio <= 0.0 || train_ratio >= 1.0) {
        throw ConfigError("train_ratio must lie strictly between 0 and 1");
    }
    if (features.max_df_ratio <= 0.0 || features.max_df_ratio > 1.0) {
        throw ConfigError("max_df_ratio must lie in (0, 1]");
    }
    if (features.min_df < 1) {
        throw ConfigError("min_df must be >= 1");
    }
    const auto require = [](const std::string& what, const std::string& path) {
        if (path.empty()) {
            throw ConfigError("missing required path: " + what);
        }
        if (!std::filesystem::exists(path)) {
            throw ConfigError(what + " does not exist: " + path);
        }
    };
    if (need_corpus) {
        require("corpus", corpus_path);
    }
    require("countries", countries_path);
    require("publishers", publishers_path);
}

}  // namespace barriers

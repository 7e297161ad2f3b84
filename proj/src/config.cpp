#include "gauss/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "gauss/errors.hpp"

namespace gauss {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) ++a;
    while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
    return s.substr(a, b - a);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, const std::string& key, Parse parse) {
    std::vector<T> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse(item, key));
    }
    if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
    return out;
}

std::size_t parse_size(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size() || v < 0) throw std::invalid_argument(s);
        return std::size_t(v);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return std::uint64_t(v);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
    }
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "dataset.kind",       "dataset.name",        "dataset.path",
        "dataset.labels",     "dataset.test_images", "dataset.test_labels",
        "dataset.label_column", "dataset.classes",   "dataset.per_class",
        "dataset.dim",        "dataset.spread",      "dataset.outlier_fraction",
        "dataset.seed",       "dataset.test_fraction",
        "model.hidden",       "train.epochs",        "train.lr",
        "train.batch",        "al.strategy",         "al.rounds",
        "al.batch",           "al.initial",          "al.seeds",
        "mode",
    };
    return keys;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + stripped + "'");
        }
        cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    const auto& known = known_config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    values_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::size_t KeyValueConfig::get_size(const std::string& key, std::size_t fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_size(it->second, key);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(it->second, key);
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_u64(it->second, key);
}

std::vector<std::size_t> KeyValueConfig::get_size_list(
    const std::string& key, const std::vector<std::size_t>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_list<std::size_t>(it->second, key, parse_size);
}

std::vector<std::uint64_t> KeyValueConfig::get_u64_list(
    const std::string& key, const std::vector<std::uint64_t>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_list<std::uint64_t>(it->second, key, parse_u64);
}

std::vector<std::string> KeyValueConfig::get_string_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_list<std::string>(it->second, key,
                                   [](const std::string& s, const std::string&) { return s; });
}

std::string KeyValueConfig::echo() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
    return out.str();
}

ExperimentConfig experiment_from_config(const KeyValueConfig& cfg) {
    ExperimentConfig ec;
    ec.hidden_sizes = cfg.get_size_list("model.hidden", {16});
    ec.train.epochs_per_round = cfg.get_size("train.epochs", 30);
    ec.train.minibatch_size = cfg.get_size("train.batch", 32);
    ec.train.learning_rate = cfg.get_double("train.lr", 1e-4);
    ec.rounds = cfg.get_size("al.rounds", 10);
    ec.batch_per_round = cfg.get_size("al.batch", 1024);
    ec.initial_train = cfg.get_size("al.initial", 128);
    ec.test_fraction = cfg.get_double("dataset.test_fraction", 0.2);

    const std::string mode = cfg.get_string("mode", "standard");
    if (mode == "standard") {
        ec.mode = RunMode::Standard;
    } else if (mode == "oracle_importance") {
        ec.mode = RunMode::OracleImportance;
    } else {
        throw ConfigError("mode must be 'standard' or 'oracle_importance', got '" + mode + "'");
    }

    if (ec.train.epochs_per_round == 0) throw ConfigError("train.epochs must be positive");
    if (ec.train.minibatch_size == 0) throw ConfigError("train.batch must be positive");
    if (ec.rounds == 0) throw ConfigError("al.rounds must be positive");
    if (ec.batch_per_round == 0) throw ConfigError("al.batch must be positive");
    if (ec.initial_train == 0) throw ConfigError("al.initial must be positive");
    if (ec.train.learning_rate <= 0.0) throw ConfigError("train.lr must be positive");
    return ec;
}

std::vector<Strategy> strategies_from_config(const KeyValueConfig& cfg) {
    const auto names = cfg.get_string_list("al.strategy", {"random"});
    std::vector<Strategy> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(strategy_from_name(n));
    return out;
}

std::vector<std::uint64_t> seeds_from_config(const KeyValueConfig& cfg,
                                             std::uint64_t seed_offset) {
    auto seeds = cfg.get_u64_list("al.seeds", {0, 1, 2, 3, 4});
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) {
        throw ConfigError("al.seeds contains duplicates; runs would overwrite each other");
    }
    for (auto& s : seeds) s += seed_offset;
    return seeds;
}

}  // namespace gauss

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gauss/engine.hpp"

namespace gauss {

/**
 * Flat key/value experiment configuration ("key = value" lines, '#'
 * comments). Keys are validated against the documented set; dotted-key CLI
 * overrides share the exact same names.
 */
class KeyValueConfig {
  public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<std::size_t> get_size_list(const std::string& key,
                                           const std::vector<std::size_t>& fallback) const;
    std::vector<std::uint64_t> get_u64_list(const std::string& key,
                                            const std::vector<std::uint64_t>& fallback) const;
    std::vector<std::string> get_string_list(const std::string& key,
                                             const std::vector<std::string>& fallback) const;

    /// Deterministic echo of every key, sorted, as "key = value" lines.
    std::string echo() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

/// The documented configuration keys.
const std::vector<std::string>& known_config_keys();

/// Engine parameters from a parsed config (dataset keys are handled by the
/// runner). Throws ConfigError on invalid values.
ExperimentConfig experiment_from_config(const KeyValueConfig& cfg);

std::vector<Strategy> strategies_from_config(const KeyValueConfig& cfg);
std::vector<std::uint64_t> seeds_from_config(const KeyValueConfig& cfg,
                                             std::uint64_t seed_offset);

}  // namespace gauss

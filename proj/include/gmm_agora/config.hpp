#pragma once

// String-keyed configuration shared by the C API and the command line. Values
// arrive as text (flags) or JSON (config files); typed getters parse and
// range-check them, and unknown keys are rejected per command.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gmm_agora {

class ConfigMap {
public:
    // Later calls overwrite earlier ones, so loading a file and then applying
    // flags gives flags precedence.
    void set(const std::string& key, const std::string& value);
    void load_json_file(const std::filesystem::path& path);
    void load_json_text(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::optional<double> get_optional_double(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> get_string_list(const std::string& key,
                                             const std::vector<std::string>& fallback) const;

    // Seed from the map, else from GMM_AGORA_SEED, else the fallback.
    std::uint64_t seed(std::uint64_t fallback = 1) const;

    // Throws ParameterError naming the first key not in `allowed`.
    void reject_unknown(const std::set<std::string>& allowed, const std::string& command) const;

private:
    std::map<std::string, std::string> values_;
};

// Normalizes flag spellings: leading dashes dropped, '-' becomes '_'.
std::string normalize_key(const std::string& key);

}  // namespace gmm_agora

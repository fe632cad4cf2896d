#include "gmm_agora/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gmm_agora/errors.hpp"

namespace gmm_agora {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw ParameterError("'" + key + "' expects a finite number, got '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ParameterError("'" + key + "' expects a non-negative integer, got '" + text + "'");
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) throw ParameterError("'" + key + "' is out of range: " + text);
    return static_cast<std::uint64_t>(v);
}

std::string json_scalar_to_text(const std::string& key, const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
    if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
    if (value.is_number_float()) {
        std::ostringstream out;
        out.precision(17);
        out << value.get<double>();
        return out.str();
    }
    throw ParameterError("config key '" + key + "' has an unsupported value type");
}

}  // namespace

std::string normalize_key(const std::string& key) {
    std::string out = key;
    while (!out.empty() && out.front() == '-') out.erase(out.begin());
    for (auto& c : out)
        if (c == '-') c = '_';
    return out;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    const auto k = normalize_key(key);
    require(!k.empty(), "empty configuration key");
    values_[k] = value;
}

void ConfigMap::load_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParameterError(std::string("config file is not valid JSON: ") + e.what());
    }
    require(doc.is_object(), "config file must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ',';
                joined += json_scalar_to_text(key, item);
            }
            set(key, joined);
        } else if (value.is_null()) {
            values_.erase(normalize_key(key));
        } else {
            set(key, json_scalar_to_text(key, value));
        }
    }
}

void ConfigMap::load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot read config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    load_json_text(buffer.str());
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : trim(it->second);
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::size_t ConfigMap::get_size(const std::string& key, std::size_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : static_cast<std::size_t>(parse_u64(key, it->second));
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_u64(key, it->second);
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const auto v = trim(it->second);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ParameterError("'" + key + "' expects true or false, got '" + v + "'");
}

std::optional<double> ConfigMap::get_optional_double(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return parse_double(key, it->second);
}

std::vector<double> ConfigMap::get_double_list(const std::string& key,
                                               const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(it->second)) out.push_back(parse_double(key, item));
    require(!out.empty(), "'" + key + "' must list at least one value");
    return out;
}

std::vector<std::string> ConfigMap::get_string_list(const std::string& key,
                                                    const std::vector<std::string>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto out = split_list(it->second);
    require(!out.empty(), "'" + key + "' must list at least one value");
    return out;
}

std::uint64_t ConfigMap::seed(std::uint64_t fallback) const {
    if (has("seed")) return get_u64("seed", fallback);
    if (const char* env = std::getenv("GMM_AGORA_SEED"); env != nullptr && *env != '\0')
        return parse_u64("GMM_AGORA_SEED", env);
    return fallback;
}

void ConfigMap::reject_unknown(const std::set<std::string>& allowed, const std::string& command) const {
    for (const auto& [key, value] : values_)
        if (!allowed.count(key)) throw ParameterError("unknown option '" + key + "' for " + command);
}

}  // namespace gmm_agora

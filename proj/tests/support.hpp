#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gmm_agora/random.hpp"

namespace testing {

// Replays a fixed list of draws and fails loudly when the code under test asks
// for more than was scripted.
class ScriptedSource final : public gmm_agora::RandomSource {
public:
    ScriptedSource(std::deque<double> uniforms, std::deque<double> normals)
        : uniforms_(std::move(uniforms)), normals_(std::move(normals)) {}

    double uniform() override { return pop(uniforms_, "uniform"); }
    double standard_normal() override { return pop(normals_, "normal"); }

    bool exhausted() const { return uniforms_.empty() && normals_.empty(); }

private:
    static double pop(std::deque<double>& queue, const char* kind) {
        if (queue.empty()) throw std::logic_error(std::string("scripted source ran out of ") + kind + " draws");
        const double v = queue.front();
        queue.pop_front();
        return v;
    }

    std::deque<double> uniforms_;
    std::deque<double> normals_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() / ("gmm_agora_test_" + name)) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ignored;
        std::filesystem::remove_all(path_, ignored);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testing

#pragma once

#include <cstdint>
#include <random>

namespace gmm_agora {

// Source of randomness consumed by the simulation primitives. Everything the
// engine and the chain draw goes through these two calls, so a scripted
// implementation can replay a fixed path.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    // Uniform on [0, 1).
    virtual double uniform() = 0;
    virtual double standard_normal() = 0;

    // Uniform index in [0, count).
    std::size_t index_below(std::size_t count);
};

class Mt19937Source final : public RandomSource {
public:
    explicit Mt19937Source(std::uint64_t seed) : engine_(seed) {}
    double uniform() override { return uniform_(engine_); }
    double standard_normal() override { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Deterministic stream derivation. derive_seed(seed, a, b) is a pure function
// with good avalanche, so (seed, replicate, agent) triples give independent
// generator streams regardless of execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace gmm_agora

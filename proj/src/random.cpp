#include "gmm_agora/random.hpp"

#include <algorithm>

namespace gmm_agora {

std::size_t RandomSource::index_below(std::size_t count) {
    const auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(count));
    return std::min(idx, count - 1);
}

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) {
    return mix(mix(seed) ^ mix(a + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

}  // namespace gmm_agora

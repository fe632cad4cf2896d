#pragma once

#include <stdexcept>
#include <string>

namespace gmm_agora {

// Invalid input: bad shapes, out-of-range parameters, inconsistent configs.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical breakdown: singular covariance, non-positive determinant, NaN.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ParameterError(message);
}

}  // namespace gmm_agora

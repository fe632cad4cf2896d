#pragma once

// Published lower-bound tables (m = 30, rho = 1/2), six significant figures.
// Rows are sigma, columns ell = 1..5.

#include <array>
#include <cstdio>
#include <string_view>
#include <vector>

namespace tables {

struct Row {
    double sigma;
    std::array<double, 5> values;
};

struct Table {
    int id;
    double c;
    bool part_ii;
    std::vector<Row> rows;
};

inline const std::vector<Table>& published() {
    static const std::vector<Table> all = {
        {1, 10.0, false,
         {{0.3, {2.984834e-45, 3.030700e-45, 3.030701e-45, 3.030701e-45, 3.030701e-45}},
          {0.2, {2.897895e-06, 2.897895e-06, 2.897895e-06, 2.897895e-06, 2.897895e-06}},
          {0.1, {9.994152e-01, 9.994152e-01, 9.994152e-01, 9.994152e-01, 9.994152e-01}},
          {0.05, {1.000000e+00, 1.000000e+00, 1.000000e+00, 1.000000e+00, 1.000000e+00}}}},
        {2, 2.0, false,
         {{0.4, {6.188271e-22, 9.169169e-22, 9.176131e-22, 9.176144e-22, 9.176144e-22}},
          {0.3, {1.244469e-09, 1.248270e-09, 1.248270e-09, 1.248270e-09, 1.248270e-09}},
          {0.2, {7.805784e-02, 7.805784e-02, 7.805784e-02, 7.805784e-02, 7.805784e-02}},
          {0.1, {9.998830e-01, 9.998830e-01, 9.998830e-01, 9.998830e-01, 9.998830e-01}},
          {0.05, {1.000000e+00, 1.000000e+00, 1.000000e+00, 1.000000e+00, 1.000000e+00}}}},
        {3, 2.0, true,
         {{0.4, {5.981996e-22, 8.863530e-22, 8.870260e-22, 8.870273e-22, 8.870273e-22}},
          {0.3, {1.202987e-09, 1.206661e-09, 1.206661e-09, 1.206661e-09, 1.206661e-09}},
          {0.2, {7.545591e-02, 7.545591e-02, 7.545591e-02, 7.545591e-02, 7.545591e-02}},
          {0.1, {9.665536e-01, 9.665536e-01, 9.665536e-01, 9.665536e-01, 9.665536e-01}},
          {0.05, {9.666667e-01, 9.666667e-01, 9.666667e-01, 9.666667e-01, 9.666667e-01}}}},
    };
    return all;
}

// True when `value` printed to six significant figures equals `published`.
inline bool matches_six_figures(double value, double published) {
    char a[32], b[32];
    std::snprintf(a, sizeof a, "%.6e", value);
    std::snprintf(b, sizeof b, "%.6e", published);
    return std::string_view(a) == std::string_view(b);
}

}  // namespace tables

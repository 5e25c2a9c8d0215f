#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "wta/matrix.hpp"
#include "wta/scenario.hpp"

namespace wta::test {

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(WTA_DATA_DIR) / name;
}

inline Scenario paper_baseline() { return load_scenario(data_path("paper_baseline.json")); }

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = 0.0,
                            double hi = 10.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = d(rng);
    return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("wta_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// 1 interceptor, 1 target, 1 asset; head-on along x.
inline Scenario one_on_one() {
    Scenario s;
    s.name = "one_on_one";
    s.interceptors.push_back({1, {{0, 0, 0}, {0.8, 0, 0}}, 3.0});
    s.targets.push_back({1, {{100, 0, 0}, {-0.25, 0, 0}}, 1.0, {}, std::nullopt});
    s.assets.push_back({1, {-20, 0, 0}, 0.9, 5.0});
    return s;
}

}  // namespace wta::test

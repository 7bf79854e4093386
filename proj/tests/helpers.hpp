#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include <fuzzmat/fuzzmat.hpp>

namespace testutil {

/// The 4x4 four-level texture used in the worked examples: values 1..4 with
/// levels = 5, so row 0 of every matrix stays empty.
inline fuzzmat::GrayImage example_texture() {
    return fuzzmat::GrayImage(4, 4, 5,
                              {1, 2, 3, 4,
                               1, 3, 4, 4,
                               3, 2, 2, 2,
                               4, 1, 4, 1});
}

inline fuzzmat::GrayImage random_image(std::mt19937_64& rng, int w, int h, int levels) {
    std::uniform_int_distribution<int> dist(0, levels - 1);
    std::vector<int> px(static_cast<size_t>(w) * h);
    for (int& v : px) v = dist(rng);
    return fuzzmat::GrayImage(w, h, levels, std::move(px));
}

inline bool matrices_equal(const fuzzmat::StatMatrix& a, const fuzzmat::StatMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.cells == b.cells;
}

/// Same cell values on the common extent, zeros beyond it (column counts of
/// run/size matrices depend on the longest observation).
inline bool matrices_equal_padded(const fuzzmat::StatMatrix& a, const fuzzmat::StatMatrix& b) {
    if (a.rows != b.rows) return false;
    const int cols = std::max(a.cols, b.cols);
    for (int r = 0; r < a.rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double va = c < a.cols ? a.at(r, c) : 0.0;
            const double vb = c < b.cols ? b.at(r, c) : 0.0;
            if (va != vb) return false;
        }
    return true;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        dir_ = std::filesystem::temp_directory_path() /
               ("fuzzmat_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    std::filesystem::path path(const std::string& name) const { return dir_ / name; }

    std::string writeText(const std::string& name, const std::string& text) const {
        const auto p = path(name);
        std::ofstream out(p, std::ios::binary);
        out << text;
        return p.string();
    }

private:
    std::filesystem::path dir_;
};

}  // namespace testutil

#pragma once

#include <charconv>
#include <map>
#include <string>
#include <vector>

#include <fuzzmat/error.hpp>

namespace fuzzmat {

enum class MatrixKind {
    COM,
    DH,
    SH,
    RLM,
    SZM,
    MSZM,
    FCOM,
    FRLM,
    FSZM,
    FuzzyRLM,
    FuzzySZM,
    MultiFuzzySZM,
};

enum class ColumnSemantics { GrayLevel, RunLength, ZoneSize };

inline bool matrix_kind_is_crisp(MatrixKind k) {
    return k == MatrixKind::COM || k == MatrixKind::DH || k == MatrixKind::SH ||
           k == MatrixKind::RLM || k == MatrixKind::SZM;
}

inline std::string matrix_kind_name(MatrixKind k) {
    switch (k) {
        case MatrixKind::COM: return "com";
        case MatrixKind::DH: return "dh";
        case MatrixKind::SH: return "sh";
        case MatrixKind::RLM: return "rlm";
        case MatrixKind::SZM: return "szm";
        case MatrixKind::MSZM: return "mszm";
        case MatrixKind::FCOM: return "fcom";
        case MatrixKind::FRLM: return "frlm";
        case MatrixKind::FSZM: return "fszm";
        case MatrixKind::FuzzyRLM: return "fuzzyrlm";
        case MatrixKind::FuzzySZM: return "fuzzyszm";
        case MatrixKind::MultiFuzzySZM: return "multifuzzyszm";
    }
    return "?";
}

/// Shortest decimal string that round-trips the value.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Real-valued accumulation matrix: rows are gray levels, columns are
/// co-occurring gray levels, run lengths, or zone sizes depending on kind.
struct StatMatrix {
    MatrixKind kind = MatrixKind::COM;
    ColumnSemantics columnSemantics = ColumnSemantics::GrayLevel;
    int rows = 0;
    int cols = 0;
    std::vector<double> cells;                 // row-major
    long long pixelCount = -1;                 // inside pixels of the source image
    std::map<std::string, std::string> params; // echo of the producing parameters

    StatMatrix() = default;
    StatMatrix(MatrixKind k, ColumnSemantics sem, int r, int c)
        : kind(k), columnSemantics(sem), rows(r), cols(c),
          cells(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return cells[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return cells[static_cast<size_t>(r) * cols + c]; }

    double totalMass() const {
        double m = 0;
        for (double v : cells) m += v;
        return m;
    }

    /// CSV: header row of column indices, one row per gray level. Crisp kinds
    /// print integers, fuzzy kinds full precision.
    std::string toCsv() const {
        bool crisp = matrix_kind_is_crisp(kind);
        if (crisp)  // a normalized crisp matrix no longer holds counts
            for (double v : cells)
                if (v != static_cast<double>(static_cast<long long>(v))) {
                    crisp = false;
                    break;
                }
        std::string out = "g";
        for (int c = 0; c < cols; ++c) out += "," + std::to_string(c);
        out += "\n";
        for (int r = 0; r < rows; ++r) {
            out += std::to_string(r);
            for (int c = 0; c < cols; ++c) {
                out += ",";
                if (crisp)
                    out += std::to_string(static_cast<long long>(at(r, c)));
                else
                    out += format_double(at(r, c));
            }
            out += "\n";
        }
        return out;
    }
};

}  // namespace fuzzmat

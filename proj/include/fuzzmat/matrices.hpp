#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <fuzzmat/error.hpp>
#include <fuzzmat/flat_zones.hpp>
#include <fuzzmat/image.hpp>
#include <fuzzmat/quantize.hpp>
#include <fuzzmat/stat_matrix.hpp>

namespace fuzzmat {

struct Offset {
    int dRow = 0;
    int dCol = 1;

    friend bool operator==(const Offset&, const Offset&) = default;
};

enum class Direction { Deg0, Deg45, Deg90, Deg135 };

/// Unit offsets in (dRow, dCol) convention: 0 deg = (0,1), 45 = (-1,1),
/// 90 = (-1,0), 135 = (-1,-1).
inline Offset offset_of(Direction d) {
    switch (d) {
        case Direction::Deg0: return {0, 1};
        case Direction::Deg45: return {-1, 1};
        case Direction::Deg90: return {-1, 0};
        case Direction::Deg135: return {-1, -1};
    }
    return {0, 1};
}

inline Direction parse_direction(int angle) {
    switch (angle) {
        case 0: return Direction::Deg0;
        case 45: return Direction::Deg45;
        case 90: return Direction::Deg90;
        case 135: return Direction::Deg135;
    }
    throw UsageError("direction must be one of 0, 45, 90, 135");
}

inline int direction_angle(Direction d) {
    switch (d) {
        case Direction::Deg0: return 0;
        case Direction::Deg45: return 45;
        case Direction::Deg90: return 90;
        case Direction::Deg135: return 135;
    }
    return 0;
}

namespace detail {

inline void check_offset(const Offset& o) {
    if (o.dRow == 0 && o.dCol == 0) throw Error("offset must not be (0,0)");
}

// Invokes fn(i, j) for every pair (p, p+offset) with both endpoints inside.
template <class Fn>
inline long long for_each_pair(const GrayImage& img, const Offset& o, Fn&& fn) {
    long long pairs = 0;
    const int w = img.width(), h = img.height();
    for (int r = 0; r < h; ++r) {
        const int r2 = r + o.dRow;
        if (r2 < 0 || r2 >= h) continue;
        for (int c = 0; c < w; ++c) {
            const int c2 = c + o.dCol;
            if (c2 < 0 || c2 >= w) continue;
            if (!img.inside(r, c) || !img.inside(r2, c2)) continue;
            fn(img.at(r, c), img.at(r2, c2));
            ++pairs;
        }
    }
    return pairs;
}

}  // namespace detail

/// Co-occurrence matrix: cell (i,j) counts pixel pairs (p, p+offset) with
/// values (i,j). Always levels x levels. When the offset admits no valid
/// pair the zero matrix is returned with a "warning" entry in params.
inline StatMatrix com(const GrayImage& img, const Offset& offset) {
    detail::check_offset(offset);
    StatMatrix m(MatrixKind::COM, ColumnSemantics::GrayLevel, img.levels(), img.levels());
    m.pixelCount = img.insideCount();
    m.params["offset"] = std::to_string(offset.dRow) + "," + std::to_string(offset.dCol);
    const long long pairs =
        detail::for_each_pair(img, offset, [&](int i, int j) { m.at(i, j) += 1.0; });
    if (pairs == 0) m.params["warning"] = "offset admits no valid pixel pair";
    return m;
}

/// Elementwise arithmetic mean of per-offset COMs, accumulated in list order.
inline StatMatrix com_average(const GrayImage& img, const std::vector<Offset>& offsets) {
    if (offsets.empty()) throw Error("com_average: empty offset list");
    StatMatrix acc = com(img, offsets[0]);
    for (size_t k = 1; k < offsets.size(); ++k) {
        const StatMatrix next = com(img, offsets[k]);
        for (size_t i = 0; i < acc.cells.size(); ++i) acc.cells[i] += next.cells[i];
    }
    for (double& v : acc.cells) v /= static_cast<double>(offsets.size());
    acc.params.erase("offset");
    acc.params.erase("warning");
    acc.params["offsets"] = std::to_string(offsets.size());
    return acc;
}

/// Histogram of absolute gray differences over pixel pairs at the offset.
inline StatMatrix diff_histogram(const GrayImage& img, const Offset& offset) {
    detail::check_offset(offset);
    std::vector<double> bins(1, 0.0);
    int maxDiff = 0;
    const long long pairs = detail::for_each_pair(img, offset, [&](int i, int j) {
        const int d = std::abs(i - j);
        if (d > maxDiff) {
            maxDiff = d;
            bins.resize(d + 1, 0.0);
        }
        bins[d] += 1.0;
    });
    StatMatrix m(MatrixKind::DH, ColumnSemantics::GrayLevel, 1, maxDiff + 1);
    m.cells = std::move(bins);
    m.pixelCount = img.insideCount();
    if (pairs == 0) m.params["warning"] = "offset admits no valid pixel pair";
    return m;
}

/// Histogram of gray sums over pixel pairs; fixed width 2(L-1)+1.
inline StatMatrix sum_histogram(const GrayImage& img, const Offset& offset) {
    detail::check_offset(offset);
    StatMatrix m(MatrixKind::SH, ColumnSemantics::GrayLevel, 1, 2 * (img.levels() - 1) + 1);
    m.pixelCount = img.insideCount();
    const long long pairs =
        detail::for_each_pair(img, offset, [&](int i, int j) { m.at(0, i + j) += 1.0; });
    if (pairs == 0) m.params["warning"] = "offset admits no valid pixel pair";
    return m;
}

/// A maximal constant-value collinear segment.
struct RunEvent {
    int gray = 0;
    int length = 0;
};

namespace detail {

// Walks every maximal line of the image along `dir` and reports maximal
// constant runs of inside pixels; runs break at mask boundaries.
template <class Fn>
inline void for_each_run(const GrayImage& img, Direction dir, Fn&& emit) {
    const int w = img.width(), h = img.height();
    const Offset step = offset_of(dir);

    auto scanLine = [&](int r0, int c0) {
        int curGray = -1, curLen = 0;
        for (int r = r0, c = c0; r >= 0 && r < h && c >= 0 && c < w;
             r += step.dRow, c += step.dCol) {
            if (!img.inside(r, c)) {
                if (curLen > 0) emit(RunEvent{curGray, curLen});
                curLen = 0;
                continue;
            }
            const int v = img.at(r, c);
            if (curLen > 0 && v == curGray) {
                ++curLen;
            } else {
                if (curLen > 0) emit(RunEvent{curGray, curLen});
                curGray = v;
                curLen = 1;
            }
        }
        if (curLen > 0) emit(RunEvent{curGray, curLen});
    };

    switch (dir) {
        case Direction::Deg0:
            for (int r = 0; r < h; ++r) scanLine(r, 0);
            break;
        case Direction::Deg90:
            // step (-1,0): start at the bottom of each column
            for (int c = 0; c < w; ++c) scanLine(h - 1, c);
            break;
        case Direction::Deg45:
            // step (-1,1): anti-diagonals; start on the left edge then the bottom edge
            for (int r = 0; r < h; ++r) scanLine(r, 0);
            for (int c = 1; c < w; ++c) scanLine(h - 1, c);
            break;
        case Direction::Deg135:
            // step (-1,-1): diagonals; start on the right edge then the bottom edge
            for (int r = 0; r < h; ++r) scanLine(r, w - 1);
            for (int c = 0; c < w - 1; ++c) scanLine(h - 1, c);
            break;
    }
}

}  // namespace detail

inline std::vector<RunEvent> collect_runs(const GrayImage& img, Direction dir) {
    if (img.insideCount() == 0) throw Error("runs: empty region");
    std::vector<RunEvent> out;
    detail::for_each_run(img, dir, [&](const RunEvent& e) { out.push_back(e); });
    return out;
}

/// Run-length matrix: cell (g,l) counts maximal runs of gray g and length l
/// along the direction. Columns sized to the longest observed run.
inline StatMatrix rlm(const GrayImage& img, Direction dir) {
    const auto runs = collect_runs(img, dir);
    int maxLen = 1;
    for (const auto& e : runs) maxLen = std::max(maxLen, e.length);
    StatMatrix m(MatrixKind::RLM, ColumnSemantics::RunLength, img.levels(), maxLen + 1);
    m.pixelCount = img.insideCount();
    m.params["dir"] = std::to_string(direction_angle(dir));
    for (const auto& e : runs) m.at(e.gray, e.length) += 1.0;
    return m;
}

/// Column mapping for zone sizes: identity keeps column s = size s, Log2
/// buckets sizes into column floor(log2(s)) + 1 (1 -> 1, 2..3 -> 2, 4..7 -> 3, ...).
enum class SizeBucketing { Identity, Log2 };

inline int bucket_size(int size, SizeBucketing b) {
    if (b == SizeBucketing::Identity) return size;
    int col = 0;
    while (size > 0) {
        size >>= 1;
        ++col;
    }
    return col;
}

/// Size-zone matrix: cell (g,s) counts flat zones of gray g and size s.
inline StatMatrix szm(const GrayImage& img, Connectivity conn,
                      SizeBucketing bucketing = SizeBucketing::Identity) {
    const auto lab = detail::label_zones(img, conn);
    StatMatrix m(MatrixKind::SZM, ColumnSemantics::ZoneSize, img.levels(),
                 bucket_size(lab.maxSize, bucketing) + 1);
    m.pixelCount = img.insideCount();
    m.params["conn"] = std::to_string(static_cast<int>(conn));
    if (bucketing == SizeBucketing::Log2) m.params["sizeq"] = "log2";
    for (size_t z = 0; z < lab.gray.size(); ++z)
        m.at(lab.gray[z], bucket_size(lab.size[z], bucketing)) += 1.0;
    return m;
}

/// Multiple-quantization SZM: weighted sum of SZMs computed at several linear
/// quantizations, with gray rows re-indexed onto a common axis of max(N_k)
/// levels via g' = floor(g * N_max / N_k).
inline StatMatrix mszm(const GrayImage& img, const std::vector<int>& quantizations,
                       const std::vector<double>& weights,
                       Connectivity conn = Connectivity::Eight) {
    if (quantizations.empty() || quantizations.size() != weights.size())
        throw Error("mszm: quantization and weight lists must be nonempty and equal-sized");
    double wsum = 0;
    for (double w : weights) {
        if (w < 0) throw Error("mszm: weights must be nonnegative");
        wsum += w;
    }
    if (wsum <= 0) throw Error("mszm: weight sum must be positive");

    const int nMax = *std::max_element(quantizations.begin(), quantizations.end());
    std::vector<StatMatrix> parts;
    int maxCols = 1;
    for (int n : quantizations) {
        parts.push_back(szm(quantize(img, {QuantMethod::Linear, n}), conn));
        maxCols = std::max(maxCols, parts.back().cols);
    }
    StatMatrix m(MatrixKind::MSZM, ColumnSemantics::ZoneSize, nMax, maxCols);
    m.pixelCount = img.insideCount();
    for (size_t k = 0; k < parts.size(); ++k) {
        const int nk = quantizations[k];
        for (int g = 0; g < parts[k].rows; ++g) {
            const int g2 = static_cast<int>(static_cast<long long>(g) * nMax / nk);
            for (int s = 0; s < parts[k].cols; ++s)
                m.at(g2, s) += weights[k] * parts[k].at(g, s);
        }
    }
    return m;
}

}  // namespace fuzzmat

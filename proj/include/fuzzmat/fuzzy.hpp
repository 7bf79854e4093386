#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <fuzzmat/error.hpp>
#include <fuzzmat/flat_zones.hpp>
#include <fuzzmat/image.hpp>
#include <fuzzmat/matrices.hpp>
#include <fuzzmat/stat_matrix.hpp>

namespace fuzzmat {

enum class MembershipKind { Binary, Linear, Gaussian };

inline MembershipKind parse_membership_kind(const std::string& name) {
    if (name == "binary") return MembershipKind::Binary;
    if (name == "linear") return MembershipKind::Linear;
    if (name == "gaussian") return MembershipKind::Gaussian;
    throw UsageError("unknown membership function '" + name + "'");
}

/// Monotonically non-increasing probability of a gray-level distance, with
/// support bounded by the fuzzy radius R. R = 0 is the crisp membership.
struct MembershipFunction {
    MembershipKind kind = MembershipKind::Linear;
    double radius = 0.0;

    double operator()(double x) const {
        if (x < 0) throw Error("membership argument must be nonnegative");
        if (radius == 0.0) return x == 0.0 ? 1.0 : 0.0;
        switch (kind) {
            case MembershipKind::Binary:
                return x <= radius ? 1.0 : 0.0;
            case MembershipKind::Linear:
                return std::max(1.0 - x / radius, 0.0);
            case MembershipKind::Gaussian: {
                if (x > radius) return 0.0;
                const double sigma = radius / 3.0;
                return std::exp(-x * x / (2.0 * sigma * sigma));
            }
        }
        return 0.0;
    }

    /// Largest integer gray distance that can have nonzero membership.
    int supportRadius() const { return static_cast<int>(std::floor(radius)); }

    std::string name() const {
        switch (kind) {
            case MembershipKind::Binary: return "binary";
            case MembershipKind::Linear: return "linear";
            case MembershipKind::Gaussian: return "gaussian";
        }
        return "?";
    }
};

inline double eval_membership(const MembershipFunction& fn, double x) { return fn(x); }

enum class AggregationMethod { Mean, Median };

inline AggregationMethod parse_aggregation(const std::string& name) {
    if (name == "mean") return AggregationMethod::Mean;
    if (name == "median") return AggregationMethod::Median;
    throw UsageError("unknown aggregation method '" + name + "'");
}

namespace detail {

inline double aggregate_chis(std::vector<double>& chis, AggregationMethod agg) {
    if (agg == AggregationMethod::Mean) {
        double s = 0;
        for (double c : chis) s += c;
        return s / static_cast<double>(chis.size());
    }
    std::sort(chis.begin(), chis.end());
    const size_t n = chis.size();
    return n % 2 == 1 ? chis[n / 2] : 0.5 * (chis[n / 2 - 1] + chis[n / 2]);
}

}  // namespace detail

/// Fill-level fuzzification of the COM: each observed pair (i,j) spreads the
/// product kernel beta(|i-i'|)*beta(|j-j'|) over the Chebyshev-R neighborhood;
/// mass falling outside [0, L-1] is dropped.
inline StatMatrix fcom(const GrayImage& img, const Offset& offset, const MembershipFunction& fn) {
    StatMatrix base = com(img, offset);
    const int R = fn.supportRadius();
    if (R == 0) {
        base.kind = MatrixKind::FCOM;
        return base;
    }
    std::vector<double> kernel(R + 1);
    for (int d = 0; d <= R; ++d) kernel[d] = fn(d);

    const int L = base.rows;
    // separable: rows then columns
    StatMatrix tmp(MatrixKind::FCOM, ColumnSemantics::GrayLevel, L, L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const double v = base.at(i, j);
            if (v == 0.0) continue;
            for (int d = -R; d <= R; ++d) {
                const int i2 = i + d;
                if (i2 < 0 || i2 >= L) continue;
                const double w = kernel[std::abs(d)];
                if (w > 0) tmp.at(i2, j) += v * w;
            }
        }
    StatMatrix out(MatrixKind::FCOM, ColumnSemantics::GrayLevel, L, L);
    out.pixelCount = base.pixelCount;
    out.params = base.params;
    out.params["beta"] = fn.name();
    out.params["radius"] = format_double(fn.radius);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const double v = tmp.at(i, j);
            if (v == 0.0) continue;
            for (int d = -R; d <= R; ++d) {
                const int j2 = j + d;
                if (j2 < 0 || j2 >= L) continue;
                const double w = kernel[std::abs(d)];
                if (w > 0) out.at(i, j2) += v * w;
            }
        }
    return out;
}

/// An increment destined for a crisp matrix cell: gray row and crisp column
/// (run length or zone size).
struct MatrixEvent {
    int gray = 0;
    int column = 0;
};

/// Fill-level fuzzification of RLM/SZM: each event spreads beta over the gray
/// rows within the fuzzy radius; the column axis stays crisp.
inline StatMatrix fill_level_fuzzify(const std::vector<MatrixEvent>& events,
                                     const MembershipFunction& fn, int rows, MatrixKind kind,
                                     long long pixelCount = -1) {
    if (events.empty()) throw Error("fill_level_fuzzify: empty event list");
    if (kind != MatrixKind::FRLM && kind != MatrixKind::FSZM)
        throw Error("fill_level_fuzzify: kind must be FRLM or FSZM");
    int maxCol = 1;
    for (const auto& e : events) maxCol = std::max(maxCol, e.column);
    StatMatrix m(kind,
                 kind == MatrixKind::FRLM ? ColumnSemantics::RunLength : ColumnSemantics::ZoneSize,
                 rows, maxCol + 1);
    m.pixelCount = pixelCount;
    m.params["beta"] = fn.name();
    m.params["radius"] = format_double(fn.radius);
    const int R = fn.supportRadius();
    for (const auto& e : events) {
        for (int d = -R; d <= R; ++d) {
            const int g = e.gray + d;
            if (g < 0 || g >= rows) continue;
            const double w = fn(std::abs(d));
            if (w > 0) m.at(g, e.column) += w;
        }
    }
    return m;
}

/// Connected region grown from a start pixel: members are all reachable
/// pixels whose gray level has nonzero membership relative to the start
/// gray, each carrying its probability chi.
struct FuzzyZone {
    PixelCoord startPixel;
    int startGray = 0;
    int size = 0;
    double aggregate = 1.0;  // chi_phi
    std::vector<std::pair<PixelCoord, double>> members;  // raster order
};

namespace detail {

// Enumerates the deduplicated fuzzy zones. For a fixed start gray v the zone
// of p0 is the connected component containing p0 of {q : beta(|v-f(q)|) > 0},
// so zones are found with one union-find pass per distinct gray value; a
// component yields a zone only when it holds at least one value-v pixel
// (the dedup representative is the raster-earliest of them).
//
// cb(gray, startIdx, size, aggregate, chis, members); `members` is null when
// WithMembers is false.
template <bool WithMembers, class Cb>
inline void scan_fuzzy_zones(const GrayImage& img, Connectivity conn,
                             const MembershipFunction& fn, AggregationMethod agg, Cb&& cb) {
    const int w = img.width(), h = img.height();
    const size_t n = static_cast<size_t>(w) * h;
    if (img.insideCount() == 0) throw Error("fuzzy zones: empty region");

    std::vector<std::uint8_t> present(img.levels(), 0);
    for (size_t i = 0; i < n; ++i)
        if (img.insideIndex(i)) present[img.atIndex(i)] = 1;

    const bool diag = conn == Connectivity::Eight;
    std::vector<std::uint8_t> member(n);
    for (int v = 0; v < img.levels(); ++v) {
        if (!present[v]) continue;
        for (size_t i = 0; i < n; ++i)
            member[i] = img.insideIndex(i) && fn(std::abs(v - img.atIndex(i))) > 0;

        UnionFind uf(n);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const std::int32_t idx = static_cast<std::int32_t>(r) * w + c;
                if (!member[idx]) continue;
                auto tryUnite = [&](int rr, int cc) {
                    if (rr < 0 || cc < 0 || cc >= w) return;
                    const std::int32_t jdx = static_cast<std::int32_t>(rr) * w + cc;
                    if (member[jdx]) uf.unite(idx, jdx);
                };
                tryUnite(r, c - 1);
                tryUnite(r - 1, c);
                if (diag) {
                    tryUnite(r - 1, c - 1);
                    tryUnite(r - 1, c + 1);
                }
            }

        // map roots to local zones, raster order of first member
        std::unordered_map<std::int32_t, std::int32_t> zoneOfRoot;
        std::vector<std::int32_t> startIdx;     // raster-min pixel with value v, -1 if none
        std::vector<std::vector<double>> chis;
        std::vector<std::vector<std::int32_t>> membersOf;
        for (size_t i = 0; i < n; ++i) {
            if (!member[i]) continue;
            const std::int32_t root = uf.find(static_cast<std::int32_t>(i));
            auto it = zoneOfRoot.find(root);
            std::int32_t z;
            if (it == zoneOfRoot.end()) {
                z = static_cast<std::int32_t>(startIdx.size());
                zoneOfRoot.emplace(root, z);
                startIdx.push_back(-1);
                chis.emplace_back();
                if constexpr (WithMembers) membersOf.emplace_back();
            } else {
                z = it->second;
            }
            chis[z].push_back(fn(std::abs(v - img.atIndex(i))));
            if constexpr (WithMembers) membersOf[z].push_back(static_cast<std::int32_t>(i));
            if (startIdx[z] < 0 && img.atIndex(i) == v) startIdx[z] = static_cast<std::int32_t>(i);
        }
        for (size_t z = 0; z < startIdx.size(); ++z) {
            if (startIdx[z] < 0) continue;  // no start pixel of value v in this component
            const double chiPhi = aggregate_chis(chis[z], agg);
            cb(v, startIdx[z], static_cast<int>(chis[z].size()), chiPhi, chis[z],
               WithMembers ? &membersOf[z] : nullptr);
        }
    }
}

}  // namespace detail

/// All deduplicated fuzzy zones of the image, sorted by the raster index of
/// their start pixel. Every inside pixel appears in at least one zone.
inline std::vector<FuzzyZone> extract_fuzzy_zones(const GrayImage& img, Connectivity conn,
                                                  const MembershipFunction& fn,
                                                  AggregationMethod agg) {
    std::vector<FuzzyZone> zones;
    const int w = img.width();
    detail::scan_fuzzy_zones<true>(
        img, conn, fn, agg,
        [&](int gray, std::int32_t startIdx, int size, double chiPhi,
            const std::vector<double>&, const std::vector<std::int32_t>* members) {
            FuzzyZone z;
            z.startPixel = {startIdx / w, startIdx % w};
            z.startGray = gray;
            z.size = size;
            z.aggregate = chiPhi;
            z.members.reserve(members->size());
            for (std::int32_t idx : *members)
                z.members.emplace_back(PixelCoord{idx / w, idx % w},
                                       fn(std::abs(gray - img.atIndex(idx))));
            zones.push_back(std::move(z));
        });
    std::sort(zones.begin(), zones.end(), [&](const FuzzyZone& a, const FuzzyZone& b) {
        return std::pair(a.startPixel.row, a.startPixel.col) <
               std::pair(b.startPixel.row, b.startPixel.col);
    });
    return zones;
}

/// Zone-level fuzzy SZM: each deduplicated fuzzy zone adds its aggregate
/// probability at (start gray, crisp member count).
inline StatMatrix fuzzy_szm(const GrayImage& img, Connectivity conn,
                            const MembershipFunction& fn, AggregationMethod agg) {
    struct Fill {
        int gray;
        int size;
        double chi;
    };
    std::vector<Fill> fills;
    detail::scan_fuzzy_zones<false>(
        img, conn, fn, agg,
        [&](int gray, std::int32_t, int size, double chiPhi, const std::vector<double>&,
            const std::vector<std::int32_t>*) { fills.push_back({gray, size, chiPhi}); });
    int maxSize = 1;
    for (const auto& f : fills) maxSize = std::max(maxSize, f.size);
    StatMatrix m(MatrixKind::FuzzySZM, ColumnSemantics::ZoneSize, img.levels(), maxSize + 1);
    m.pixelCount = img.insideCount();
    m.params["conn"] = std::to_string(static_cast<int>(conn));
    m.params["beta"] = fn.name();
    m.params["radius"] = format_double(fn.radius);
    for (const auto& f : fills) m.at(f.gray, f.size) += f.chi;
    return m;
}

/// Zone-level fuzzy RLM: for every start pixel the fuzzy run is the maximal
/// collinear segment through it whose pixels all have nonzero membership
/// relative to the start gray; deduplicated runs add their aggregate
/// probability at (start gray, length).
inline StatMatrix fuzzy_rlm(const GrayImage& img, Direction dir, const MembershipFunction& fn,
                            AggregationMethod agg) {
    if (img.insideCount() == 0) throw Error("fuzzy runs: empty region");
    const int w = img.width(), h = img.height();
    const Offset step = offset_of(dir);

    struct Fill {
        int gray;
        int length;
        double chi;
    };
    std::vector<Fill> fills;
    // dedup key: first pixel index, length, start gray
    std::unordered_set<std::uint64_t> seen;

    std::vector<std::int32_t> lineIdx;
    std::vector<int> lineVal;
    std::vector<std::uint8_t> lineIn;
    std::vector<double> chis;

    auto scanLine = [&](int r0, int c0) {
        lineIdx.clear();
        lineVal.clear();
        lineIn.clear();
        for (int r = r0, c = c0; r >= 0 && r < h && c >= 0 && c < w;
             r += step.dRow, c += step.dCol) {
            lineIdx.push_back(static_cast<std::int32_t>(r) * w + c);
            lineVal.push_back(img.at(r, c));
            lineIn.push_back(img.inside(r, c) ? 1 : 0);
        }
        const int len = static_cast<int>(lineIdx.size());
        for (int t = 0; t < len; ++t) {
            if (!lineIn[t]) continue;
            const int g0 = lineVal[t];
            int lo = t, hi = t;
            while (lo > 0 && lineIn[lo - 1] && fn(std::abs(g0 - lineVal[lo - 1])) > 0) --lo;
            while (hi + 1 < len && lineIn[hi + 1] && fn(std::abs(g0 - lineVal[hi + 1])) > 0) ++hi;
            const int segLen = hi - lo + 1;
            // (first pixel, start gray) pins the segment: for a fixed start
            // gray the passing pixels are fixed, so segments are the connected
            // components of that set along the line
            const std::uint64_t key = (static_cast<std::uint64_t>(lineIdx[lo]) << 32) |
                                      static_cast<std::uint64_t>(g0);
            if (!seen.insert(key).second) continue;
            chis.clear();
            for (int u = lo; u <= hi; ++u) chis.push_back(fn(std::abs(g0 - lineVal[u])));
            fills.push_back({g0, segLen, detail::aggregate_chis(chis, agg)});
        }
    };

    switch (dir) {
        case Direction::Deg0:
            for (int r = 0; r < h; ++r) scanLine(r, 0);
            break;
        case Direction::Deg90:
            for (int c = 0; c < w; ++c) scanLine(h - 1, c);
            break;
        case Direction::Deg45:
            for (int r = 0; r < h; ++r) scanLine(r, 0);
            for (int c = 1; c < w; ++c) scanLine(h - 1, c);
            break;
        case Direction::Deg135:
            for (int r = 0; r < h; ++r) scanLine(r, w - 1);
            for (int c = 0; c < w - 1; ++c) scanLine(h - 1, c);
            break;
    }

    int maxLen = 1;
    for (const auto& f : fills) maxLen = std::max(maxLen, f.length);
    StatMatrix m(MatrixKind::FuzzyRLM, ColumnSemantics::RunLength, img.levels(), maxLen + 1);
    m.pixelCount = img.insideCount();
    m.params["dir"] = std::to_string(direction_angle(dir));
    m.params["beta"] = fn.name();
    m.params["radius"] = format_double(fn.radius);
    for (const auto& f : fills) m.at(f.gray, f.length) += f.chi;
    return m;
}

/// Multiple fuzzy SZM: one matrix filled by running the fuzzy SZM fill for
/// each membership function in list order (contributions sum).
inline StatMatrix multi_fuzzy_szm(const GrayImage& img, Connectivity conn,
                                  const std::vector<MembershipFunction>& fns,
                                  AggregationMethod agg) {
    if (fns.empty()) throw Error("multi_fuzzy_szm: empty membership function list");
    std::vector<StatMatrix> parts;
    int maxCols = 1;
    for (const auto& fn : fns) {
        parts.push_back(fuzzy_szm(img, conn, fn, agg));
        maxCols = std::max(maxCols, parts.back().cols);
    }
    StatMatrix m(MatrixKind::MultiFuzzySZM, ColumnSemantics::ZoneSize, img.levels(), maxCols);
    m.pixelCount = img.insideCount();
    m.params["conn"] = std::to_string(static_cast<int>(conn));
    for (const auto& part : parts)
        for (int g = 0; g < part.rows; ++g)
            for (int s = 0; s < part.cols; ++s) m.at(g, s) += part.at(g, s);
    return m;
}

}  // namespace fuzzmat

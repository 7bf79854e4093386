#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <fuzzmat/error.hpp>
#include <fuzzmat/image.hpp>

namespace fuzzmat {

enum class Connectivity { Four = 4, Eight = 8 };

inline Connectivity parse_connectivity(int kind) {
    if (kind == 4) return Connectivity::Four;
    if (kind == 8) return Connectivity::Eight;
    throw UsageError("connectivity must be 4 or 8");
}

/// Maximal connected set of pixels sharing one gray level.
struct FlatZone {
    int gray = 0;
    int size = 0;
    PixelCoord firstPixel;               // raster-earliest member
    std::vector<PixelCoord> pixels;      // raster order
};

namespace detail {

struct UnionFind {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> rank_;

    explicit UnionFind(size_t n) : parent(n), rank_(n, 0) {
        for (size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
    }

    std::int32_t find(std::int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];  // path halving
            x = parent[x];
        }
        return x;
    }

    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }
};

// Lean labeling: per-pixel zone id (raster order of first pixel) plus per-zone
// gray/size/first-pixel, without materializing pixel lists. Pixels outside the
// mask get zone id -1.
struct ZoneLabeling {
    std::vector<std::int32_t> zoneOf;    // -1 outside the region
    std::vector<int> gray;
    std::vector<int> size;
    std::vector<std::int32_t> firstIndex;
    int maxSize = 0;
};

inline ZoneLabeling label_zones(const GrayImage& img, Connectivity conn) {
    const int w = img.width(), h = img.height();
    const size_t n = static_cast<size_t>(w) * h;
    if (img.insideCount() == 0) throw Error("flat zones: empty region");

    UnionFind uf(n);
    const bool diag = conn == Connectivity::Eight;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!img.inside(r, c)) continue;
            const std::int32_t idx = static_cast<std::int32_t>(r) * w + c;
            const int v = img.at(r, c);
            auto tryUnite = [&](int rr, int cc) {
                if (rr < 0 || cc < 0 || cc >= w) return;
                if (!img.inside(rr, cc) || img.at(rr, cc) != v) return;
                uf.unite(idx, static_cast<std::int32_t>(rr) * w + cc);
            };
            tryUnite(r, c - 1);
            tryUnite(r - 1, c);
            if (diag) {
                tryUnite(r - 1, c - 1);
                tryUnite(r - 1, c + 1);
            }
        }
    }

    ZoneLabeling out;
    out.zoneOf.assign(n, -1);
    std::vector<std::int32_t> zoneOfRoot(n, -1);
    for (size_t i = 0; i < n; ++i) {
        if (!img.insideIndex(i)) continue;
        const std::int32_t root = uf.find(static_cast<std::int32_t>(i));
        std::int32_t z = zoneOfRoot[root];
        if (z < 0) {
            z = static_cast<std::int32_t>(out.gray.size());
            zoneOfRoot[root] = z;
            out.gray.push_back(img.atIndex(i));
            out.size.push_back(0);
            out.firstIndex.push_back(static_cast<std::int32_t>(i));
        }
        out.zoneOf[i] = z;
        out.size[z] += 1;
    }
    for (int s : out.size) out.maxSize = std::max(out.maxSize, s);
    return out;
}

}  // namespace detail

/// Labels the connected constant-value regions of the (masked) image.
/// Zones partition the inside pixels and come back in raster order of each
/// zone's first pixel.
inline std::vector<FlatZone> label_flat_zones(const GrayImage& img, Connectivity conn) {
    const auto lab = detail::label_zones(img, conn);
    std::vector<FlatZone> zones(lab.gray.size());
    for (size_t z = 0; z < zones.size(); ++z) {
        zones[z].gray = lab.gray[z];
        zones[z].size = lab.size[z];
        zones[z].firstPixel = {lab.firstIndex[z] / img.width(), lab.firstIndex[z] % img.width()};
        zones[z].pixels.reserve(lab.size[z]);
    }
    for (size_t i = 0; i < lab.zoneOf.size(); ++i)
        if (lab.zoneOf[i] >= 0)
            zones[lab.zoneOf[i]].pixels.push_back(
                {static_cast<int>(i) / img.width(), static_cast<int>(i) % img.width()});
    return zones;
}

}  // namespace fuzzmat

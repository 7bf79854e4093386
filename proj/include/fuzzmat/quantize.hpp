#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <fuzzmat/error.hpp>
#include <fuzzmat/image.hpp>

namespace fuzzmat {

enum class QuantMethod { Linear, Logarithmic, EqualPopulation, Clustering };

struct QuantizationSpec {
    QuantMethod method = QuantMethod::Linear;
    int targetLevels = 8;
};

inline QuantMethod parse_quant_method(const std::string& name) {
    if (name == "linear") return QuantMethod::Linear;
    if (name == "log") return QuantMethod::Logarithmic;
    if (name == "equal") return QuantMethod::EqualPopulation;
    if (name == "kmeans") return QuantMethod::Clustering;
    throw UsageError("unknown quantization method '" + name + "'");
}

inline std::string quant_method_name(QuantMethod m) {
    switch (m) {
        case QuantMethod::Linear: return "linear";
        case QuantMethod::Logarithmic: return "log";
        case QuantMethod::EqualPopulation: return "equal";
        case QuantMethod::Clustering: return "kmeans";
    }
    return "?";
}

/// Affinely maps pixel values so the observed minimum lands on 0 and the
/// maximum on levels-1, with round-half-up. Constant images pass through.
/// With a mask, min/max come from inside pixels; outside pixels go through
/// the same map clamped to the valid range.
inline GrayImage stretch_histogram(const GrayImage& img) {
    int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
    for (size_t i = 0; i < img.pixels().size(); ++i) {
        if (!img.insideIndex(i)) continue;
        lo = std::min(lo, img.pixels()[i]);
        hi = std::max(hi, img.pixels()[i]);
    }
    if (lo > hi) throw Error("stretch_histogram: empty region");
    if (lo == hi) return img;

    const double scale = static_cast<double>(img.levels() - 1) / (hi - lo);
    std::vector<int> out(img.pixels().size());
    for (size_t i = 0; i < out.size(); ++i) {
        const int v = img.pixels()[i];
        int m = static_cast<int>(std::floor((v - lo) * scale + 0.5));
        out[i] = std::clamp(m, 0, img.levels() - 1);
    }
    return img.withPixels(std::move(out), img.levels());
}

namespace detail {

// Histogram restricted to inside pixels.
inline std::vector<long long> inside_histogram(const GrayImage& img) {
    std::vector<long long> h(img.levels(), 0);
    for (size_t i = 0; i < img.pixels().size(); ++i)
        if (img.insideIndex(i)) ++h[img.pixels()[i]];
    return h;
}

// --- equal-population partitioning ----------------------------------------
//
// Partition the populated gray values (in value order) into N contiguous
// bins whose populations are as equal as the discrete histogram allows.
// Pipeline: adaptive greedy cuts, coordinate-descent refinement on
// (spread, squared error), and an exact window search when the refined
// result still exceeds the largest single count.

struct EqGoal {
    const std::vector<long long>& pref;  // prefix sums over populated values
    long long total;
    int bins;

    std::pair<long long, double> score(const std::vector<int>& cuts) const {
        const double t = static_cast<double>(total) / bins;
        long long mn = std::numeric_limits<long long>::max(), mx = 0;
        double sq = 0;
        int prev = 0;
        auto acc = [&](int v) {
            long long pop = pref[v] - pref[prev];
            mn = std::min(mn, pop);
            mx = std::max(mx, pop);
            sq += (pop - t) * (pop - t);
            prev = v;
        };
        for (int c : cuts) acc(c);
        acc(static_cast<int>(pref.size()) - 1);
        return {mx - mn, sq};
    }
};

inline std::vector<int> eq_greedy_cuts(const std::vector<long long>& pref, int bins) {
    const int V = static_cast<int>(pref.size()) - 1;
    const long long total = pref[V];
    std::vector<int> cuts;
    int u = 0;
    for (int k = 1; k < bins; ++k) {
        const double target = pref[u] + static_cast<double>(total - pref[u]) / (bins - k + 1);
        int best = u;
        double bestd = std::abs(pref[u] - target);
        for (int v = u; v <= V; ++v) {
            double d = std::abs(pref[v] - target);
            if (d < bestd - 1e-12) {
                best = v;
                bestd = d;
            }
        }
        cuts.push_back(best);
        u = best;
    }
    return cuts;
}

inline void eq_refine_cuts(const EqGoal& goal, std::vector<int>& cuts) {
    const int V = static_cast<int>(goal.pref.size()) - 1;
    bool improved = true;
    for (int iter = 0; improved && iter < 100; ++iter) {
        improved = false;
        for (size_t i = 0; i < cuts.size(); ++i) {
            const int lo = i > 0 ? cuts[i - 1] : 0;
            const int hi = i + 1 < cuts.size() ? cuts[i + 1] : V;
            auto cur = goal.score(cuts);
            int bestv = cuts[i];
            for (int v = lo; v <= hi; ++v) {
                const int old = cuts[i];
                cuts[i] = v;
                auto s = goal.score(cuts);
                cuts[i] = old;
                if (s < cur) {
                    cur = s;
                    bestv = v;
                }
            }
            if (bestv != cuts[i]) {
                cuts[i] = bestv;
                improved = true;
            }
        }
    }
}

// Exact search for cuts whose populations all fit in [m, m+window]; tries the
// largest feasible minimum population first. Returns empty when none found
// within the iteration budget.
inline std::vector<int> eq_exact_window(const std::vector<long long>& pref, int bins,
                                        long long window) {
    const int V = static_cast<int>(pref.size()) - 1;
    const long long total = pref[V];
    const long long mhi = total / bins;
    const long long mlo = std::max<long long>(0, (total + bins - 1) / bins - window);
    long long budget = 4096;
    std::vector<std::vector<int>> from(bins + 1, std::vector<int>(V + 1, -1));
    for (long long m = mhi; m >= mlo && budget-- > 0; --m) {
        for (auto& row : from) std::fill(row.begin(), row.end(), -1);
        from[0][0] = 0;
        for (int k = 1; k <= bins; ++k)
            for (int v = 0; v <= V; ++v)
                for (int u = 0; u <= v; ++u) {
                    const long long pop = pref[v] - pref[u];
                    if (from[k - 1][u] >= 0 && pop >= m && pop <= m + window) {
                        from[k][v] = u;
                        break;
                    }
                }
        if (from[bins][V] >= 0) {
            std::vector<int> cuts;
            int v = V;
            for (int k = bins; k > 0; --k) {
                cuts.push_back(from[k][v]);
                v = from[k][v];
            }
            std::reverse(cuts.begin(), cuts.end());
            cuts.erase(cuts.begin());  // leading zero
            return cuts;
        }
    }
    return {};
}

inline std::vector<int> equal_population_map(const std::vector<long long>& hist, int bins) {
    // populated values in ascending order
    std::vector<int> values;
    std::vector<long long> counts;
    for (size_t v = 0; v < hist.size(); ++v)
        if (hist[v] > 0) {
            values.push_back(static_cast<int>(v));
            counts.push_back(hist[v]);
        }
    const int V = static_cast<int>(values.size());
    std::vector<int> cuts;  // cut i = number of leading values in bins 0..i
    if (V <= bins) {
        for (int i = 1; i < bins; ++i) cuts.push_back(std::min(i, V));
    } else {
        std::vector<long long> pref(V + 1, 0);
        for (int i = 0; i < V; ++i) pref[i + 1] = pref[i] + counts[i];
        const long long cmax = *std::max_element(counts.begin(), counts.end());
        EqGoal goal{pref, pref[V], bins};
        cuts = eq_greedy_cuts(pref, bins);
        eq_refine_cuts(goal, cuts);
        if (goal.score(cuts).first > cmax) {
            auto exact = eq_exact_window(pref, bins, cmax);
            if (!exact.empty()) cuts = exact;
        }
    }
    // bin index for every source gray value; unpopulated values follow the
    // bin of the value range they fall into
    std::vector<int> binOf(hist.size(), 0);
    int bin = 0;
    size_t vi = 0;
    for (size_t v = 0; v < hist.size(); ++v) {
        while (bin < static_cast<int>(cuts.size()) && vi >= static_cast<size_t>(cuts[bin])) ++bin;
        binOf[v] = bin;
        if (vi < values.size() && values[vi] == static_cast<int>(v)) ++vi;
    }
    return binOf;
}

// --- 1-D k-means over the histogram ----------------------------------------
//
// Deterministic: centroids start at the equal-population quantiles, ties in
// assignment go to the lower centroid index, at most 100 iterations.

inline std::vector<int> kmeans_map(const std::vector<long long>& hist, int k) {
    std::vector<int> values;
    std::vector<long long> counts;
    long long total = 0;
    for (size_t v = 0; v < hist.size(); ++v)
        if (hist[v] > 0) {
            values.push_back(static_cast<int>(v));
            counts.push_back(hist[v]);
            total += hist[v];
        }
    const int V = static_cast<int>(values.size());

    std::vector<double> centroids(k);
    {
        // value at rank floor((j + 0.5) * total / k) in the sorted pixel multiset
        long long cum = 0;
        int vi = 0;
        for (int j = 0; j < k; ++j) {
            const long long rank = static_cast<long long>((j + 0.5) * total / k);
            while (vi < V - 1 && cum + counts[vi] <= rank) cum += counts[vi++];
            centroids[j] = values[vi];
        }
    }

    std::vector<int> assign(V, 0), prev(V, -1);
    for (int iter = 0; iter < 100; ++iter) {
        for (int i = 0; i < V; ++i) {
            int best = 0;
            double bestd = std::abs(values[i] - centroids[0]);
            for (int j = 1; j < k; ++j) {
                double d = std::abs(values[i] - centroids[j]);
                if (d < bestd) {
                    bestd = d;
                    best = j;
                }
            }
            assign[i] = best;
        }
        if (assign == prev) break;
        prev = assign;
        for (int j = 0; j < k; ++j) {
            double sum = 0;
            long long n = 0;
            for (int i = 0; i < V; ++i)
                if (assign[i] == j) {
                    sum += static_cast<double>(values[i]) * counts[i];
                    n += counts[i];
                }
            if (n > 0) centroids[j] = sum / n;
        }
    }

    // order clusters by ascending centroid; empty clusters keep their slot
    std::vector<int> order(k);
    for (int j = 0; j < k; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return centroids[a] < centroids[b]; });
    std::vector<int> rank(k);
    for (int j = 0; j < k; ++j) rank[order[j]] = j;

    std::vector<int> binOf(hist.size(), 0);
    for (size_t v = 0; v < hist.size(); ++v) {
        int best = 0;
        double bestd = std::abs(static_cast<double>(v) - centroids[0]);
        for (int j = 1; j < k; ++j) {
            double d = std::abs(static_cast<double>(v) - centroids[j]);
            if (d < bestd) {
                bestd = d;
                best = j;
            }
        }
        binOf[v] = rank[best];
    }
    return binOf;
}

}  // namespace detail

/// Reduces the gray range to spec.targetLevels levels. Linear and logarithmic
/// methods stretch the histogram first; equal-population and clustering work
/// on the raw histogram of inside pixels.
inline GrayImage quantize(const GrayImage& img, const QuantizationSpec& spec) {
    const int N = spec.targetLevels;
    const int L = img.levels();
    if (N < 2) throw Error("quantize: target level count must be at least 2");
    if (N > L) throw Error("quantize: target level count exceeds source levels");

    std::vector<int> out(img.pixels().size());
    switch (spec.method) {
        case QuantMethod::Linear: {
            const GrayImage s = stretch_histogram(img);
            for (size_t i = 0; i < out.size(); ++i)
                out[i] = static_cast<int>(static_cast<long long>(s.pixels()[i]) * N / L);
            break;
        }
        case QuantMethod::Logarithmic: {
            const GrayImage s = stretch_histogram(img);
            const double denom = std::log(static_cast<double>(L));
            for (size_t i = 0; i < out.size(); ++i) {
                int b = static_cast<int>(std::floor(N * std::log(1.0 + s.pixels()[i]) / denom));
                out[i] = std::clamp(b, 0, N - 1);
            }
            break;
        }
        case QuantMethod::EqualPopulation: {
            if (img.insideCount() == 0) throw Error("quantize: empty region");
            const auto hist = detail::inside_histogram(img);
            const auto binOf = detail::equal_population_map(hist, N);
            for (size_t i = 0; i < out.size(); ++i) out[i] = binOf[img.pixels()[i]];
            break;
        }
        case QuantMethod::Clustering: {
            if (img.insideCount() == 0) throw Error("quantize: empty region");
            const auto hist = detail::inside_histogram(img);
            const auto binOf = detail::kmeans_map(hist, N);
            for (size_t i = 0; i < out.size(); ++i) out[i] = binOf[img.pixels()[i]];
            break;
        }
    }
    return img.withPixels(std::move(out), N);
}

}  // namespace fuzzmat

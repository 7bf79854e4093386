#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <fuzzmat/error.hpp>
#include <fuzzmat/stat_matrix.hpp>

namespace fuzzmat {

/// Ordered list of named descriptor values.
struct FeatureVector {
    std::vector<std::pair<std::string, double>> items;

    void push(std::string name, double value) {
        if (!std::isfinite(value)) throw Error("feature '" + name + "' is not finite");
        items.emplace_back(std::move(name), value);
    }

    double operator[](const std::string& name) const {
        for (const auto& [n, v] : items)
            if (n == name) return v;
        throw Error("no feature named '" + name + "'");
    }

    size_t size() const { return items.size(); }
};

/// Divides all cells by the total mass so they sum to 1.
inline StatMatrix normalize(const StatMatrix& m) {
    const double mass = m.totalMass();
    if (mass <= 0) throw Error("normalize: zero-mass matrix");
    StatMatrix out = m;
    for (double& v : out.cells) v /= mass;
    return out;
}

/// Seven Haralick features of a (fuzzy) co-occurrence matrix, computed on the
/// normalized matrix. Correlation of a zero-variance marginal is 0; entropy
/// is base-2; variance is the gray-level (row) marginal variance.
inline FeatureVector haralick_features(const StatMatrix& m) {
    if (m.kind != MatrixKind::COM && m.kind != MatrixKind::FCOM)
        throw Error("haralick_features: matrix is not a co-occurrence matrix");
    const StatMatrix p = normalize(m);

    double mi = 0, mj = 0;
    for (int i = 0; i < p.rows; ++i)
        for (int j = 0; j < p.cols; ++j) {
            mi += i * p.at(i, j);
            mj += j * p.at(i, j);
        }
    double si = 0, sj = 0, cross = 0;
    double energy = 0, contrast = 0, homogeneity = 0, entropy = 0, dissimilarity = 0;
    for (int i = 0; i < p.rows; ++i)
        for (int j = 0; j < p.cols; ++j) {
            const double v = p.at(i, j);
            if (v == 0) continue;
            si += (i - mi) * (i - mi) * v;
            sj += (j - mj) * (j - mj) * v;
            cross += i * j * v;
            energy += v * v;
            contrast += (i - j) * (i - j) * v;
            homogeneity += v / (1.0 + (i - j) * (i - j));
            entropy -= v * std::log2(v);
            dissimilarity += std::abs(i - j) * v;
        }
    const double denom = std::sqrt(si) * std::sqrt(sj);
    const double correlation = denom > 0 ? (cross - mi * mj) / denom : 0.0;

    FeatureVector fv;
    fv.push("energy", energy);
    fv.push("contrast", contrast);
    fv.push("correlation", correlation);
    fv.push("variance", si);
    fv.push("homogeneity", homogeneity);
    fv.push("entropy", entropy);
    fv.push("dissimilarity", dissimilarity);
    return fv;
}

namespace detail {

// The eleven order -2..2 moment features shared by the run-length and
// size-zone families. Gray levels are 1-based in the formulas so inverse
// moments stay finite for row 0.
inline FeatureVector moment_features(const StatMatrix& m, const char* shortName,
                                     const char* longName, const char* percentName) {
    const double mass = m.totalMass();
    if (mass <= 0) throw Error("moment features: zero-mass matrix");
    if (m.pixelCount <= 0)
        throw Error("moment features: pixel count missing from matrix params");

    double sre = 0, lre = 0, lgre = 0, hgre = 0;
    double srlge = 0, srhge = 0, lrlge = 0, lrhge = 0;
    std::vector<double> rowSum(m.rows, 0.0), colSum(m.cols, 0.0);
    for (int g = 0; g < m.rows; ++g)
        for (int c = 0; c < m.cols; ++c) {
            const double v = m.at(g, c);
            if (v == 0) continue;
            const double p = v / mass;
            const double G = g + 1.0;
            const double l = c;
            sre += p / (l * l);
            lre += p * l * l;
            lgre += p / (G * G);
            hgre += p * G * G;
            srlge += p / (l * l * G * G);
            srhge += p * G * G / (l * l);
            lrlge += p * l * l / (G * G);
            lrhge += p * l * l * G * G;
            rowSum[g] += p;
            colSum[c] += p;
        }
    double gln = 0, cln = 0;
    for (double r : rowSum) gln += r * r;
    for (double c : colSum) cln += c * c;

    const std::string s(shortName);
    FeatureVector fv;
    fv.push("S" + s + "E", sre);
    fv.push("L" + s + "E", lre);
    fv.push("LG" + s + "E", lgre);
    fv.push("HG" + s + "E", hgre);
    fv.push("S" + s + "LGE", srlge);
    fv.push("S" + s + "HGE", srhge);
    fv.push("L" + s + "LGE", lrlge);
    fv.push("L" + s + "HGE", lrhge);
    fv.push("GLN", gln);
    fv.push(longName, cln);
    fv.push(percentName, mass / static_cast<double>(m.pixelCount));
    return fv;
}

}  // namespace detail

/// SRE, LRE, LGRE, HGRE, SRLGE, SRHGE, LRLGE, LRHGE, GLN, RLN and RP of a
/// run-length-family matrix.
inline FeatureVector run_length_features(const StatMatrix& m) {
    if (m.columnSemantics != ColumnSemantics::RunLength)
        throw Error("run_length_features: matrix columns are not run lengths");
    return detail::moment_features(m, "R", "RLN", "RP");
}

/// The same eleven moments with sizes in place of lengths (SZE, LZE, ...,
/// ZSN, ZP) plus the two weighted variances GLV and ZSV.
inline FeatureVector size_zone_features(const StatMatrix& m) {
    if (m.columnSemantics != ColumnSemantics::ZoneSize)
        throw Error("size_zone_features: matrix columns are not zone sizes");
    FeatureVector fv = detail::moment_features(m, "Z", "ZSN", "ZP");
    const double mass = m.totalMass();

    double mg = 0, ms = 0;
    for (int g = 0; g < m.rows; ++g)
        for (int c = 0; c < m.cols; ++c) {
            const double p = m.at(g, c) / mass;
            mg += p * (g + 1.0);
            ms += p * c;
        }
    double glv = 0, zsv = 0;
    for (int g = 0; g < m.rows; ++g)
        for (int c = 0; c < m.cols; ++c) {
            const double p = m.at(g, c) / mass;
            if (p == 0) continue;
            glv += p * (g + 1.0 - mg) * (g + 1.0 - mg);
            zsv += p * (c - ms) * (c - ms);
        }
    fv.push("GLV", glv);
    fv.push("ZSV", zsv);
    return fv;
}

}  // namespace fuzzmat

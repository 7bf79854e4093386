#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <fuzzmat/error.hpp>
#include <fuzzmat/image.hpp>
#include <fuzzmat/mlp.hpp>
#include <fuzzmat/parallel.hpp>
#include <fuzzmat/pgm.hpp>
#include <fuzzmat/pipeline.hpp>

namespace fuzzmat {

struct ManifestRecord {
    std::string imagePath;
    std::string maskPath;  // empty = none
    std::string label;
    std::string group;
};

struct DatasetManifest {
    std::vector<ManifestRecord> records;
    std::vector<std::string> warnings;
};

/// Parses a CSV manifest with header `path,label,group[,mask]`; relative paths
/// resolve against the manifest's directory and must exist.
inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(path + ": cannot open manifest");
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    auto splitCsv = [](const std::string& line) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        out.push_back(cur);
        return out;
    };

    std::string line;
    if (!std::getline(in, line)) throw Error(path + ": empty manifest");
    const auto header = splitCsv(line);
    int pathCol = -1, labelCol = -1, groupCol = -1, maskCol = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "path") pathCol = static_cast<int>(i);
        else if (header[i] == "label") labelCol = static_cast<int>(i);
        else if (header[i] == "group") groupCol = static_cast<int>(i);
        else if (header[i] == "mask") maskCol = static_cast<int>(i);
    }
    if (pathCol < 0 || labelCol < 0 || groupCol < 0)
        throw Error(path + ": manifest header must contain path, label and group columns");

    DatasetManifest manifest;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return (fp.is_absolute() ? fp : base / fp).string();
    };
    int rowNum = 1;
    while (std::getline(in, line)) {
        ++rowNum;
        if (line.empty() || line == "\r") continue;
        const auto cells = splitCsv(line);
        const int needed = std::max({pathCol, labelCol, groupCol});
        if (static_cast<int>(cells.size()) <= needed)
            throw Error(path + ": row " + std::to_string(rowNum) + " has too few columns");
        ManifestRecord rec;
        rec.imagePath = resolve(cells[pathCol]);
        rec.label = cells[labelCol];
        rec.group = cells[groupCol];
        if (maskCol >= 0 && maskCol < static_cast<int>(cells.size()) && !cells[maskCol].empty())
            rec.maskPath = resolve(cells[maskCol]);
        if (!std::filesystem::exists(rec.imagePath))
            throw Error(path + ": row " + std::to_string(rowNum) + " references missing file " +
                        rec.imagePath);
        if (!rec.maskPath.empty() && !std::filesystem::exists(rec.maskPath))
            throw Error(path + ": row " + std::to_string(rowNum) + " references missing mask " +
                        rec.maskPath);
        manifest.records.push_back(std::move(rec));
    }
    std::set<std::string> distinctLabels;
    for (const auto& r : manifest.records) distinctLabels.insert(r.label);
    if (distinctLabels.size() < 2)
        manifest.warnings.push_back("manifest has fewer than 2 classes; training will fail");
    return manifest;
}

struct FeatureTable {
    std::vector<std::string> featureNames;
    std::vector<std::vector<double>> rows;  // manifest order
    std::vector<std::string> labels;
    std::vector<std::string> groups;
};

/// Feature rows for every manifest record, columns = concatenated pipeline
/// features. Images are processed on a worker pool; row order always follows
/// the manifest.
inline FeatureTable extract_feature_table(const DatasetManifest& manifest,
                                          const std::vector<PipelineConfig>& pipelines) {
    if (pipelines.empty()) throw UsageError("pipeline has no stages");
    FeatureTable table;
    const int n = static_cast<int>(manifest.records.size());
    table.rows.resize(n);
    table.labels.resize(n);
    table.groups.resize(n);
    std::vector<std::vector<std::string>> names(n);

    parallel_for(n, [&](int i) {
        const auto& rec = manifest.records[i];
        try {
            GrayImage img = load_pgm(rec.imagePath);
            if (!rec.maskPath.empty()) img = img.withMask(load_pgm(rec.maskPath));
            std::vector<double> row;
            std::vector<std::string> rowNames;
            for (const auto& cfg : pipelines) {
                const FeatureVector fv = feature_pipeline(img, cfg);
                for (const auto& [name, value] : fv.items) {
                    rowNames.push_back(name);
                    row.push_back(value);
                }
            }
            table.rows[i] = std::move(row);
            names[i] = std::move(rowNames);
            table.labels[i] = rec.label;
            table.groups[i] = rec.group;
        } catch (const Error& e) {
            throw Error(rec.imagePath + ": " + e.what());
        }
    });

    if (n > 0) table.featureNames = names[0];
    return table;
}

enum class ClassifierKind { Mlp, NearestCentroid };

inline ClassifierKind parse_classifier(const std::string& name) {
    if (name == "mlp") return ClassifierKind::Mlp;
    if (name == "centroid") return ClassifierKind::NearestCentroid;
    throw UsageError("unknown classifier '" + name + "'");
}

/// Deterministic sanity-check baseline: class centroids in standardized
/// feature space, prediction by nearest centroid, softmax of negated
/// distances as confidence.
struct CentroidModel {
    std::vector<std::string> classes;
    std::vector<int> keptColumns;
    std::vector<double> columnMean, columnStd;
    std::vector<std::vector<double>> centroids;

    std::vector<double> predictProba(const std::vector<double>& row) const {
        std::vector<double> x(keptColumns.size());
        for (size_t k = 0; k < keptColumns.size(); ++k)
            x[k] = (row[keptColumns[k]] - columnMean[k]) / columnStd[k];
        std::vector<double> score(classes.size());
        for (size_t c = 0; c < classes.size(); ++c) {
            double d2 = 0;
            for (size_t k = 0; k < x.size(); ++k)
                d2 += (x[k] - centroids[c][k]) * (x[k] - centroids[c][k]);
            score[c] = -std::sqrt(d2);
        }
        const double mx = *std::max_element(score.begin(), score.end());
        double sum = 0;
        for (double& s : score) {
            s = std::exp(s - mx);
            sum += s;
        }
        for (double& s : score) s /= sum;
        return score;
    }
};

inline CentroidModel train_nearest_centroid(const std::vector<std::vector<double>>& rows,
                                            const std::vector<std::string>& labels) {
    if (rows.empty()) throw Error("centroid: empty training set");
    CentroidModel model;
    for (const auto& l : labels)
        if (std::find(model.classes.begin(), model.classes.end(), l) == model.classes.end())
            model.classes.push_back(l);
    if (model.classes.size() < 2) throw Error("centroid: training set has fewer than 2 classes");
    const int nFeatures = static_cast<int>(rows[0].size());
    for (int c = 0; c < nFeatures; ++c) {
        double mean = 0;
        for (const auto& r : rows) mean += r[c];
        mean /= static_cast<double>(rows.size());
        double var = 0;
        for (const auto& r : rows) var += (r[c] - mean) * (r[c] - mean);
        var /= static_cast<double>(rows.size());
        if (var > 0) {
            model.keptColumns.push_back(c);
            model.columnMean.push_back(mean);
            model.columnStd.push_back(std::sqrt(var));
        }
    }
    if (model.keptColumns.empty()) throw Error("centroid: all feature columns are constant");
    model.centroids.assign(model.classes.size(),
                           std::vector<double>(model.keptColumns.size(), 0.0));
    std::vector<long long> counts(model.classes.size(), 0);
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto ci = std::find(model.classes.begin(), model.classes.end(), labels[i]) -
                        model.classes.begin();
        ++counts[ci];
        for (size_t k = 0; k < model.keptColumns.size(); ++k)
            model.centroids[ci][k] +=
                (rows[i][model.keptColumns[k]] - model.columnMean[k]) / model.columnStd[k];
    }
    for (size_t c = 0; c < model.centroids.size(); ++c)
        for (double& v : model.centroids[c]) v /= static_cast<double>(counts[c]);
    return model;
}

struct CVScheme {
    enum class Kind { LeaveOneGroupOut, KFold };
    Kind kind = Kind::LeaveOneGroupOut;
    int k = 5;
    std::uint64_t seed = 0;

    std::string name() const {
        return kind == Kind::LeaveOneGroupOut ? "leave-one-group-out"
                                              : "kfold(" + std::to_string(k) + ")";
    }
};

struct LevelReport {
    std::vector<std::vector<double>> confusion;  // row-normalized percentages
    std::vector<double> perClass;                // diagonal
    double overall = 0;                          // percent
};

struct EvalReport {
    std::string scheme;
    int folds = 0;
    std::vector<std::string> classes;
    std::string classifier;
    LevelReport cellLevel;
    LevelReport imageLevel;
    MLPConfig config;
};

namespace detail {

inline LevelReport make_level_report(const std::vector<std::vector<long long>>& counts) {
    const size_t C = counts.size();
    LevelReport rep;
    rep.confusion.assign(C, std::vector<double>(C, 0.0));
    rep.perClass.assign(C, 0.0);
    long long total = 0, correct = 0;
    for (size_t t = 0; t < C; ++t) {
        long long rowSum = 0;
        for (size_t p = 0; p < C; ++p) rowSum += counts[t][p];
        for (size_t p = 0; p < C; ++p)
            rep.confusion[t][p] = rowSum > 0 ? 100.0 * counts[t][p] / rowSum : 0.0;
        rep.perClass[t] = rep.confusion[t][t];
        total += rowSum;
        correct += counts[t][t];
    }
    rep.overall = total > 0 ? 100.0 * correct / total : 0.0;
    return rep;
}

}  // namespace detail

/// Group-respecting cross-validation: folds never split a group, per-fold
/// standardization is fitted on the training split, the cell-level report
/// scores each record and the image-level report scores each group by the
/// most frequent predicted class among its records (ties toward the class
/// with higher mean softmax confidence).
inline EvalReport cross_validate(const FeatureTable& table, const MLPConfig& config,
                                 const CVScheme& scheme,
                                 ClassifierKind classifier = ClassifierKind::Mlp) {
    const int n = static_cast<int>(table.rows.size());
    if (n == 0) throw Error("cross_validate: empty feature table");

    // distinct groups in manifest order
    std::vector<std::string> groups;
    for (const auto& g : table.groups)
        if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);

    std::vector<std::vector<int>> folds;  // record indices per fold
    if (scheme.kind == CVScheme::Kind::LeaveOneGroupOut) {
        if (groups.size() < 2) throw Error("leave-one-group-out requires at least 2 groups");
        folds.resize(groups.size());
        for (int i = 0; i < n; ++i) {
            const auto gi = std::find(groups.begin(), groups.end(), table.groups[i]) -
                            groups.begin();
            folds[gi].push_back(i);
        }
    } else {
        if (scheme.k < 2) throw Error("kfold requires k >= 2");
        if (scheme.k > static_cast<int>(groups.size()))
            throw Error("kfold: k exceeds the number of groups");
        std::vector<std::string> shuffled = groups;
        std::mt19937_64 rng(scheme.seed);
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::map<std::string, int> foldOf;
        for (size_t j = 0; j < shuffled.size(); ++j)
            foldOf[shuffled[j]] = static_cast<int>(j % scheme.k);
        folds.resize(scheme.k);
        for (int i = 0; i < n; ++i) folds[foldOf[table.groups[i]]].push_back(i);
    }

    // class vocabulary: sorted distinct labels
    std::set<std::string> labelSet(table.labels.begin(), table.labels.end());
    std::vector<std::string> classes(labelSet.begin(), labelSet.end());
    if (classes.size() < 2) throw Error("cross_validate: fewer than 2 classes");
    auto classIndex = [&](const std::string& l) {
        return static_cast<int>(std::find(classes.begin(), classes.end(), l) - classes.begin());
    };

    std::vector<int> predicted(n, -1);
    std::vector<std::vector<double>> proba(n);

    parallel_for(static_cast<int>(folds.size()), [&](int f) {
        std::vector<std::vector<double>> trainRows;
        std::vector<std::string> trainLabels;
        std::vector<char> inFold(n, 0);
        for (int i : folds[f]) inFold[i] = 1;
        for (int i = 0; i < n; ++i)
            if (!inFold[i]) {
                trainRows.push_back(table.rows[i]);
                trainLabels.push_back(table.labels[i]);
            }
        if (trainRows.empty()) throw Error("cross_validate: empty training split");

        // map model-local class order onto the global sorted order
        auto scatter = [&](const std::vector<std::string>& modelClasses,
                           const std::vector<double>& p) {
            std::vector<double> out(classes.size(), 0.0);
            for (size_t c = 0; c < modelClasses.size(); ++c)
                out[classIndex(modelClasses[c])] = p[c];
            return out;
        };

        if (classifier == ClassifierKind::Mlp) {
            MLPConfig foldConfig = config;
            foldConfig.seed = config.seed + static_cast<std::uint64_t>(f);
            const MLPModel model = train_mlp(trainRows, trainLabels, foldConfig);
            for (int i : folds[f]) {
                proba[i] = scatter(model.classes, model.predictProba(table.rows[i]));
                predicted[i] = static_cast<int>(
                    std::max_element(proba[i].begin(), proba[i].end()) - proba[i].begin());
            }
        } else {
            const CentroidModel model = train_nearest_centroid(trainRows, trainLabels);
            for (int i : folds[f]) {
                proba[i] = scatter(model.classes, model.predictProba(table.rows[i]));
                predicted[i] = static_cast<int>(
                    std::max_element(proba[i].begin(), proba[i].end()) - proba[i].begin());
            }
        }
    });

    const size_t C = classes.size();
    std::vector<std::vector<long long>> cellCounts(C, std::vector<long long>(C, 0));
    for (int i = 0; i < n; ++i) ++cellCounts[classIndex(table.labels[i])][predicted[i]];

    // image level: majority vote per group, ties by higher mean confidence
    std::vector<std::vector<long long>> groupCounts(C, std::vector<long long>(C, 0));
    for (const auto& g : groups) {
        std::vector<long long> votes(C, 0);
        std::vector<double> meanConf(C, 0.0);
        int members = 0;
        int trueClass = -1;
        for (int i = 0; i < n; ++i) {
            if (table.groups[i] != g) continue;
            if (trueClass < 0) trueClass = classIndex(table.labels[i]);
            ++votes[predicted[i]];
            for (size_t c = 0; c < C; ++c) meanConf[c] += proba[i][c];
            ++members;
        }
        for (double& m : meanConf) m /= members;
        int best = 0;
        for (size_t c = 1; c < C; ++c) {
            if (votes[c] > votes[best] ||
                (votes[c] == votes[best] && meanConf[c] > meanConf[best]))
                best = static_cast<int>(c);
        }
        ++groupCounts[trueClass][best];
    }

    EvalReport rep;
    rep.scheme = scheme.name();
    rep.folds = static_cast<int>(folds.size());
    rep.classes = classes;
    rep.classifier = classifier == ClassifierKind::Mlp ? "mlp" : "centroid";
    rep.cellLevel = detail::make_level_report(cellCounts);
    rep.imageLevel = detail::make_level_report(groupCounts);
    rep.config = config;
    return rep;
}

inline EvalReport cross_validate(const DatasetManifest& manifest,
                                 const std::vector<PipelineConfig>& pipelines,
                                 const MLPConfig& config, const CVScheme& scheme,
                                 ClassifierKind classifier = ClassifierKind::Mlp) {
    return cross_validate(extract_feature_table(manifest, pipelines), config, scheme, classifier);
}

namespace detail {

inline std::string fixed1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

inline void render_level(std::ostringstream& out, const std::string& title,
                         const std::vector<std::string>& classes, const LevelReport& rep) {
    size_t w = 6;
    for (const auto& c : classes) w = std::max(w, c.size() + 1);
    out << title << "\n  confusion (rows = true class, % of row):\n";
    out << "    " << std::string(w, ' ');
    for (const auto& c : classes) out << std::string(w - c.size(), ' ') << c;
    out << "\n";
    for (size_t t = 0; t < classes.size(); ++t) {
        out << "    " << std::string(w - classes[t].size(), ' ') << classes[t];
        for (size_t p = 0; p < classes.size(); ++p) {
            const std::string s = fixed1(rep.confusion[t][p]);
            out << std::string(w - s.size(), ' ') << s;
        }
        out << "\n";
    }
    out << "  per-class accuracy:";
    for (size_t t = 0; t < classes.size(); ++t)
        out << " " << classes[t] << "=" << fixed1(rep.perClass[t]);
    out << "\n  overall accuracy: " << fixed1(rep.overall) << "\n";
}

}  // namespace detail

/// Human-readable report: row-normalized confusion matrices (one decimal),
/// per-class and overall accuracy at cell and image level.
inline std::string render_report(const EvalReport& rep) {
    std::ostringstream out;
    out << "scheme: " << rep.scheme << "\n";
    out << "folds: " << rep.folds << "\n";
    out << "classifier: " << rep.classifier << "\n\n";
    detail::render_level(out, "cell level", rep.classes, rep.cellLevel);
    out << "\n";
    detail::render_level(out, "image level", rep.classes, rep.imageLevel);
    return out.str();
}

inline nlohmann::json report_to_json(const EvalReport& rep) {
    auto level = [](const LevelReport& l) {
        return nlohmann::json{
            {"confusion", l.confusion}, {"perClass", l.perClass}, {"overall", l.overall}};
    };
    return nlohmann::json{
        {"scheme", rep.scheme},
        {"folds", rep.folds},
        {"classes", rep.classes},
        {"classifier", rep.classifier},
        {"cellLevel", level(rep.cellLevel)},
        {"imageLevel", level(rep.imageLevel)},
        {"config",
         {{"hiddenUnits", rep.config.hiddenUnits},
          {"epochs", rep.config.epochs},
          {"baseLearningRate", rep.config.baseLearningRate},
          {"momentum", rep.config.momentum},
          {"seed", rep.config.seed},
          {"classWeighting", rep.config.classWeighting},
          {"adaptiveRates", rep.config.adaptiveRates}}},
    };
}

}  // namespace fuzzmat

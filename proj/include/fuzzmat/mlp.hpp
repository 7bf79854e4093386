#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <fuzzmat/error.hpp>

namespace fuzzmat {

struct MLPConfig {
    int hiddenUnits = 11;
    int epochs = 300;
    double baseLearningRate = 0.05;
    double momentum = 0.9;
    std::uint64_t seed = 0;
    bool classWeighting = true;
    bool adaptiveRates = true;  // per-weight rate adaptation; off = fixed rate

    void validate() const {
        if (hiddenUnits < 1) throw Error("mlp: hiddenUnits must be at least 1");
        if (epochs < 0) throw Error("mlp: epochs must be nonnegative");
        if (baseLearningRate <= 0) throw Error("mlp: learning rate must be positive");
        if (momentum < 0 || momentum >= 1) throw Error("mlp: momentum must be in [0,1)");
    }
};

namespace detail {

// One hidden layer (sigmoid) into softmax. Parameters live in one flat vector:
// [W1 (hidden x in), b1, W2 (out x hidden), b2].
struct MLPDims {
    int in = 0, hidden = 0, out = 0;

    int sizeW1() const { return hidden * in; }
    int sizeB1() const { return hidden; }
    int sizeW2() const { return out * hidden; }
    int sizeB2() const { return out; }
    int total() const { return sizeW1() + sizeB1() + sizeW2() + sizeB2(); }
    int offB1() const { return sizeW1(); }
    int offW2() const { return sizeW1() + sizeB1(); }
    int offB2() const { return offW2() + sizeW2(); }
};

inline void mlp_forward(const MLPDims& d, const std::vector<double>& params, const double* x,
                        std::vector<double>& hidden, std::vector<double>& probs) {
    hidden.resize(d.hidden);
    for (int h = 0; h < d.hidden; ++h) {
        double z = params[d.offB1() + h];
        const double* w = &params[static_cast<size_t>(h) * d.in];
        for (int i = 0; i < d.in; ++i) z += w[i] * x[i];
        hidden[h] = 1.0 / (1.0 + std::exp(-z));
    }
    probs.resize(d.out);
    double zmax = -1e300;
    for (int o = 0; o < d.out; ++o) {
        double z = params[d.offB2() + o];
        const double* w = &params[d.offW2() + static_cast<size_t>(o) * d.hidden];
        for (int h = 0; h < d.hidden; ++h) z += w[h] * hidden[h];
        probs[o] = z;
        zmax = std::max(zmax, z);
    }
    double sum = 0;
    for (int o = 0; o < d.out; ++o) {
        probs[o] = std::exp(probs[o] - zmax);
        sum += probs[o];
    }
    for (int o = 0; o < d.out; ++o) probs[o] /= sum;
}

// Weighted mean cross-entropy over the batch plus its gradient. Sample i
// carries weight sampleWeight[i]; the loss is normalized by the weight sum so
// class re-weighting does not change the loss scale.
inline double mlp_loss_and_grad(const MLPDims& d, const std::vector<double>& params,
                                const std::vector<std::vector<double>>& X,
                                const std::vector<int>& y,
                                const std::vector<double>& sampleWeight,
                                std::vector<double>* grad) {
    if (grad) grad->assign(d.total(), 0.0);
    double wsum = 0;
    for (double w : sampleWeight) wsum += w;
    double loss = 0;
    std::vector<double> hidden, probs, dout, dhidden;
    for (size_t s = 0; s < X.size(); ++s) {
        mlp_forward(d, params, X[s].data(), hidden, probs);
        const double w = sampleWeight[s] / wsum;
        loss -= w * std::log(std::max(probs[y[s]], 1e-300));
        if (!grad) continue;
        dout.assign(d.out, 0.0);
        for (int o = 0; o < d.out; ++o) dout[o] = w * (probs[o] - (o == y[s] ? 1.0 : 0.0));
        dhidden.assign(d.hidden, 0.0);
        for (int o = 0; o < d.out; ++o) {
            (*grad)[d.offB2() + o] += dout[o];
            double* gw = &(*grad)[d.offW2() + static_cast<size_t>(o) * d.hidden];
            const double* w2 = &params[d.offW2() + static_cast<size_t>(o) * d.hidden];
            for (int h = 0; h < d.hidden; ++h) {
                gw[h] += dout[o] * hidden[h];
                dhidden[h] += dout[o] * w2[h];
            }
        }
        for (int h = 0; h < d.hidden; ++h) {
            const double dz = dhidden[h] * hidden[h] * (1.0 - hidden[h]);
            (*grad)[d.offB1() + h] += dz;
            double* gw = &(*grad)[static_cast<size_t>(h) * d.in];
            for (int i = 0; i < d.in; ++i) gw[i] += dz * X[s][i];
        }
    }
    return loss;
}

}  // namespace detail

/// Trained classifier: z-score scaler (constant columns dropped), the network
/// parameters, and the label vocabulary in training order.
class MLPModel {
public:
    std::vector<std::string> classes;
    std::vector<double> classWeights;  // 1.0 everywhere when weighting is off
    std::vector<int> keptColumns;
    std::vector<double> columnMean;   // for kept columns
    std::vector<double> columnStd;
    std::vector<std::string> warnings;
    detail::MLPDims dims;
    std::vector<double> params;

    std::vector<double> standardized(const std::vector<double>& row) const {
        std::vector<double> out(keptColumns.size());
        for (size_t k = 0; k < keptColumns.size(); ++k)
            out[k] = (row[keptColumns[k]] - columnMean[k]) / columnStd[k];
        return out;
    }

    /// Softmax probabilities for one raw (unstandardized) feature row.
    std::vector<double> predictProba(const std::vector<double>& row) const {
        const std::vector<double> x = standardized(row);
        std::vector<double> hidden, probs;
        detail::mlp_forward(dims, params, x.data(), hidden, probs);
        return probs;
    }

    /// Predicted class index; ties go to the lower index.
    int predict(const std::vector<double>& row) const {
        const auto p = predictProba(row);
        return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    }
};

/// Trains the one-hidden-layer network with back-propagation, per-weight
/// adaptive learning rates (x1.2 on kept gradient sign, x0.5 on flip, clamped
/// to [1e-6, 1]) and classical momentum, on full-batch gradients. Class
/// weights are total/(classCount * classSamples) when weighting is on.
/// Deterministic given the seed: hidden weights come from a seeded generator,
/// the output layer starts at zero.
inline MLPModel train_mlp(const std::vector<std::vector<double>>& rows,
                          const std::vector<std::string>& labels, const MLPConfig& config) {
    config.validate();
    if (rows.empty()) throw Error("mlp: empty training set");
    if (rows.size() != labels.size()) throw Error("mlp: row/label count mismatch");

    MLPModel model;
    for (const auto& l : labels)
        if (std::find(model.classes.begin(), model.classes.end(), l) == model.classes.end())
            model.classes.push_back(l);
    if (model.classes.size() < 2) throw Error("mlp: training set has fewer than 2 classes");

    const int nFeatures = static_cast<int>(rows[0].size());
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != nFeatures) throw Error("mlp: ragged feature rows");

    // z-score scaler fitted here (the caller passes the training split only);
    // constant columns carry no information and break the division
    for (int c = 0; c < nFeatures; ++c) {
        double mean = 0;
        for (const auto& r : rows) mean += r[c];
        mean /= static_cast<double>(rows.size());
        double var = 0;
        for (const auto& r : rows) var += (r[c] - mean) * (r[c] - mean);
        var /= static_cast<double>(rows.size());
        const double sd = std::sqrt(var);
        if (sd > 0) {
            model.keptColumns.push_back(c);
            model.columnMean.push_back(mean);
            model.columnStd.push_back(sd);
        } else {
            model.warnings.push_back("dropped constant feature column " + std::to_string(c));
        }
    }
    if (model.keptColumns.empty()) throw Error("mlp: all feature columns are constant");

    std::vector<std::vector<double>> X(rows.size());
    std::vector<int> y(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        X[i] = model.standardized(rows[i]);
        y[i] = static_cast<int>(std::find(model.classes.begin(), model.classes.end(), labels[i]) -
                                model.classes.begin());
    }

    model.classWeights.assign(model.classes.size(), 1.0);
    if (config.classWeighting) {
        std::vector<long long> classCount(model.classes.size(), 0);
        for (int c : y) ++classCount[c];
        for (size_t c = 0; c < model.classes.size(); ++c)
            model.classWeights[c] = static_cast<double>(rows.size()) /
                                    (static_cast<double>(model.classes.size()) * classCount[c]);
    }
    std::vector<double> sampleWeight(rows.size(), 1.0);
    for (size_t i = 0; i < rows.size(); ++i) sampleWeight[i] = model.classWeights[y[i]];

    detail::MLPDims d{static_cast<int>(model.keptColumns.size()), config.hiddenUnits,
                      static_cast<int>(model.classes.size())};
    model.dims = d;
    model.params.assign(d.total(), 0.0);
    std::mt19937_64 rng(config.seed);
    const double a = 1.0 / std::sqrt(static_cast<double>(d.in));
    std::uniform_real_distribution<double> init(-a, a);
    for (int i = 0; i < d.sizeW1(); ++i) model.params[i] = init(rng);
    // hidden biases and the whole output layer start at zero, so the
    // untrained network predicts the uniform distribution

    std::vector<double> grad, prevGrad(d.total(), 0.0), velocity(d.total(), 0.0);
    std::vector<double> rate(d.total(), config.baseLearningRate);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        detail::mlp_loss_and_grad(d, model.params, X, y, sampleWeight, &grad);
        for (int i = 0; i < d.total(); ++i) {
            if (config.adaptiveRates) {
                const double s = grad[i] * prevGrad[i];
                if (s > 0)
                    rate[i] = std::min(rate[i] * 1.2, 1.0);
                else if (s < 0)
                    rate[i] = std::max(rate[i] * 0.5, 1e-6);
            }
            velocity[i] = config.momentum * velocity[i] - rate[i] * grad[i];
            model.params[i] += velocity[i];
        }
        std::swap(prevGrad, grad);
    }
    return model;
}

}  // namespace fuzzmat

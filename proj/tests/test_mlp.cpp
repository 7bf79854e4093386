#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <fuzzmat/fuzzmat.hpp>

using namespace fuzzmat;

TEST_CASE("analytic gradient matches central finite differences") {
    const detail::MLPDims d{4, 3, 2};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.8, 0.8);

    std::vector<double> params(d.total());
    for (double& p : params) p = u(rng);

    std::vector<std::vector<double>> X(3, std::vector<double>(d.in));
    for (auto& row : X)
        for (double& v : row) v = u(rng);
    const std::vector<int> y{0, 1, 0};
    const std::vector<double> w{1.0, 2.0, 0.5};

    std::vector<double> grad;
    detail::mlp_loss_and_grad(d, params, X, y, w, &grad);

    const double eps = 1e-5;
    double maxRel = 0;
    for (int i = 0; i < d.total(); ++i) {
        std::vector<double> p = params;
        p[i] += eps;
        const double up = detail::mlp_loss_and_grad(d, p, X, y, w, nullptr);
        p[i] -= 2 * eps;
        const double down = detail::mlp_loss_and_grad(d, p, X, y, w, nullptr);
        const double fd = (up - down) / (2 * eps);
        const double rel = std::abs(grad[i] - fd) / std::max(1e-8, std::abs(grad[i]) + std::abs(fd));
        maxRel = std::max(maxRel, rel);
    }
    CHECK(maxRel < 1e-4);
}

TEST_CASE("XOR reaches full training accuracy with 11 hidden units") {
    const std::vector<std::vector<double>> rows{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    const std::vector<std::string> labels{"even", "odd", "odd", "even"};
    MLPConfig cfg;
    cfg.hiddenUnits = 11;
    cfg.epochs = 5000;
    cfg.baseLearningRate = 0.05;
    cfg.momentum = 0.9;
    cfg.seed = 0;
    const MLPModel model = train_mlp(rows, labels, cfg);
    for (size_t i = 0; i < rows.size(); ++i)
        CHECK(model.classes[model.predict(rows[i])] == labels[i]);
}

TEST_CASE("zero training epochs predict at class-prior chance") {
    // output layer starts at zero, so the softmax is uniform and argmax falls
    // back to the first class; accuracy equals that class's prior
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 40; ++i) {
        rows.push_back({u(rng), u(rng)});
        labels.push_back(i % 4 == 0 ? "minor" : "major");
    }
    MLPConfig cfg;
    cfg.epochs = 0;
    const MLPModel model = train_mlp(rows, labels, cfg);
    int firstClass = 0;
    for (const auto& r : rows) {
        const auto p = model.predictProba(r);
        CHECK(p[0] == Catch::Approx(0.5).margin(1e-12));
        firstClass += model.predict(r) == 0;
    }
    CHECK(firstClass == 40);
    CHECK(model.classes[0] == "minor");  // first label seen
}

TEST_CASE("training loss is non-increasing with a small fixed rate") {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const bool pos = i % 2 == 0;
        rows.push_back({g(rng) + (pos ? 1.5 : -1.5), g(rng)});
        labels.push_back(pos ? "p" : "n");
    }

    auto lossAfter = [&](int epochs) {
        MLPConfig cfg;
        cfg.adaptiveRates = false;
        cfg.momentum = 0.0;
        cfg.baseLearningRate = 1e-3;
        cfg.epochs = epochs;
        cfg.seed = 9;
        const MLPModel m = train_mlp(rows, labels, cfg);
        double loss = 0, wsum = 0;
        for (size_t i = 0; i < rows.size(); ++i) {
            const auto p = m.predictProba(rows[i]);
            const int yi = labels[i] == m.classes[0] ? 0 : 1;
            const double w = m.classWeights[yi];
            loss -= w * std::log(p[yi]);
            wsum += w;
        }
        return loss / wsum;
    };

    double prev = lossAfter(0);
    for (int k = 5; k <= 60; k += 5) {
        const double cur = lossAfter(k);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("class weights keep weight x count constant across classes") {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    auto add = [&](const std::string& label, int count) {
        for (int i = 0; i < count; ++i) {
            rows.push_back({u(rng), u(rng), u(rng)});
            labels.push_back(label);
        }
    };
    add("a", 30);
    add("b", 6);
    add("c", 12);
    MLPConfig cfg;
    cfg.epochs = 1;
    const MLPModel m = train_mlp(rows, labels, cfg);
    std::vector<long long> counts(m.classes.size(), 0);
    for (const auto& l : labels)
        ++counts[std::find(m.classes.begin(), m.classes.end(), l) - m.classes.begin()];
    const double product0 = m.classWeights[0] * counts[0];
    for (size_t c = 1; c < m.classes.size(); ++c)
        CHECK(m.classWeights[c] * counts[c] == Catch::Approx(product0).epsilon(1e-12));

    // duplicating one class rebalances its weight to keep the product stable
    add("b", 18);
    const MLPModel m2 = train_mlp(rows, labels, cfg);
    std::vector<long long> counts2(m2.classes.size(), 0);
    for (const auto& l : labels)
        ++counts2[std::find(m2.classes.begin(), m2.classes.end(), l) - m2.classes.begin()];
    const double q0 = m2.classWeights[0] * counts2[0];
    for (size_t c = 1; c < m2.classes.size(); ++c)
        CHECK(m2.classWeights[c] * counts2[c] == Catch::Approx(q0).epsilon(1e-12));
}

TEST_CASE("degenerate tables: constant columns dropped, all-constant rejected") {
    std::vector<std::vector<double>> rows{{1.0, 0.5}, {1.0, -0.5}, {1.0, 0.7}, {1.0, -0.7}};
    const std::vector<std::string> labels{"a", "b", "a", "b"};
    MLPConfig cfg;
    cfg.epochs = 10;
    const MLPModel m = train_mlp(rows, labels, cfg);
    CHECK(m.keptColumns == std::vector<int>{1});
    REQUIRE(m.warnings.size() == 1);

    const std::vector<std::vector<double>> allConst{{1.0}, {1.0}, {1.0}};
    CHECK_THROWS_AS(train_mlp(allConst, {"a", "b", "a"}, cfg), Error);

    CHECK_THROWS_AS(train_mlp(rows, {"a", "a", "a", "a"}, cfg), Error);
}

TEST_CASE("training is deterministic for a fixed seed") {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 20; ++i) {
        rows.push_back({u(rng), u(rng)});
        labels.push_back(i % 2 == 0 ? "a" : "b");
    }
    MLPConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 1234;
    const MLPModel a = train_mlp(rows, labels, cfg);
    const MLPModel b = train_mlp(rows, labels, cfg);
    CHECK(a.params == b.params);
    cfg.seed = 1235;
    const MLPModel c = train_mlp(rows, labels, cfg);
    CHECK(a.params != c.params);
}

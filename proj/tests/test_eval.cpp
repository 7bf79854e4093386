#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <fuzzmat/fuzzmat.hpp>

#include "helpers.hpp"

using namespace fuzzmat;
using testutil::TempDir;

namespace {

// two well-separated 2-D gaussian blobs, one group per sample
FeatureTable two_blob_table(int perClass, unsigned seed) {
    FeatureTable t;
    t.featureNames = {"x", "y"};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 2 * perClass; ++i) {
        const bool pos = i % 2 == 0;
        const double cx = pos ? 0.0 : 5.0;
        t.rows.push_back({cx + g(rng), cx + g(rng)});
        t.labels.push_back(pos ? "A" : "B");
        t.groups.push_back("g" + std::to_string(i));
    }
    return t;
}

std::string write_example_pgm(const TempDir& tmp, const std::string& name) {
    const auto path = tmp.path(name).string();
    save_pgm(testutil::example_texture(), path);
    return path;
}

}  // namespace

TEST_CASE("manifest parsing: records, masks, and errors") {
    TempDir tmp;
    write_example_pgm(tmp, "a.pgm");
    write_example_pgm(tmp, "b.pgm");
    write_example_pgm(tmp, "m.pgm");

    const auto manifestPath = tmp.writeText(
        "data.csv", "path,label,group,mask\na.pgm,CE,img1,\nb.pgm,HO,img2,m.pgm\n");
    const DatasetManifest m = load_manifest(manifestPath);
    REQUIRE(m.records.size() == 2);
    CHECK(m.records[0].label == "CE");
    CHECK(m.records[0].maskPath.empty());
    CHECK(m.records[1].maskPath.ends_with("m.pgm"));
    CHECK(m.warnings.empty());

    const auto missing = tmp.writeText("bad.csv", "path,label,group\nnope.pgm,CE,img1\n");
    CHECK_THROWS_WITH(load_manifest(missing), Catch::Matchers::ContainsSubstring("row 2"));

    const auto noHeader = tmp.writeText("nohdr.csv", "a.pgm,CE,img1\n");
    CHECK_THROWS_WITH(load_manifest(noHeader), Catch::Matchers::ContainsSubstring("header"));

    const auto single = tmp.writeText("one.csv", "path,label,group\na.pgm,CE,img1\n");
    CHECK(load_manifest(single).warnings.size() == 1);
}

TEST_CASE("feature table extraction is deterministic and matches the pipeline") {
    TempDir tmp;
    write_example_pgm(tmp, "tex.pgm");
    const auto manifestPath = tmp.writeText(
        "data.csv", "path,label,group\ntex.pgm,CE,img1\ntex.pgm,CE,img1\n");
    const DatasetManifest manifest = load_manifest(manifestPath);

    const PipelineConfig cfg = parse_pipeline("kind=szm conn=8");
    const FeatureTable table = extract_feature_table(manifest, {cfg});
    REQUIRE(table.rows.size() == 2);
    REQUIRE(table.featureNames.size() == 13);
    CHECK(table.rows[0] == table.rows[1]);

    const FeatureVector direct = feature_pipeline(testutil::example_texture(), cfg);
    for (size_t i = 0; i < direct.items.size(); ++i) {
        CHECK(table.featureNames[i] == direct.items[i].first);
        CHECK(table.rows[0][i] == direct.items[i].second);
    }
    CHECK(direct["szm-c8.ZP"] == Catch::Approx(9.0 / 16.0));
    CHECK(direct["szm-c8.SZE"] ==
          Catch::Approx((5.0 + 0.25 + 1.0 / 3.0) / 9.0).epsilon(1e-12));
}

TEST_CASE("extraction failures name the offending file") {
    TempDir tmp;
    write_example_pgm(tmp, "tex.pgm");
    const auto manifestPath =
        tmp.writeText("data.csv", "path,label,group\ntex.pgm,CE,img1\n");
    DatasetManifest manifest = load_manifest(manifestPath);
    manifest.records[0].imagePath = tmp.path("gone.pgm").string();  // vanished after load
    CHECK_THROWS_WITH(extract_feature_table(manifest, {parse_pipeline("kind=szm")}),
                      Catch::Matchers::ContainsSubstring("gone.pgm"));
}

TEST_CASE("two separable blobs cross-validate above 95 percent") {
    const FeatureTable table = two_blob_table(100, 21);
    MLPConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 0;
    CVScheme scheme;
    scheme.kind = CVScheme::Kind::KFold;
    scheme.k = 5;
    scheme.seed = 0;
    const EvalReport rep = cross_validate(table, cfg, scheme);
    CHECK(rep.folds == 5);
    CHECK(rep.cellLevel.overall > 95.0);
    CHECK(rep.imageLevel.overall > 95.0);

    // confusion rows are percentages of the true class
    for (const auto& row : rep.cellLevel.confusion) {
        double sum = 0;
        for (double v : row) sum += v;
        CHECK(sum == Catch::Approx(100.0).margin(0.1));
    }
}

TEST_CASE("identical seeds give byte-identical reports") {
    const FeatureTable table = two_blob_table(30, 33);
    MLPConfig cfg;
    cfg.epochs = 80;
    cfg.seed = 7;
    CVScheme scheme;
    scheme.kind = CVScheme::Kind::KFold;
    scheme.k = 4;
    scheme.seed = 7;
    const EvalReport a = cross_validate(table, cfg, scheme);
    const EvalReport b = cross_validate(table, cfg, scheme);
    CHECK(render_report(a) == render_report(b));
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
}

TEST_CASE("folds never split groups and cover every record once") {
    FeatureTable table;
    table.featureNames = {"x"};
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 24; ++i) {
        table.rows.push_back({u(rng) + (i % 2) * 3.0});
        table.labels.push_back(i % 2 ? "A" : "B");
        table.groups.push_back("g" + std::to_string(i / 4));  // 6 groups of 4
    }
    MLPConfig cfg;
    cfg.epochs = 30;
    CVScheme logo;
    logo.kind = CVScheme::Kind::LeaveOneGroupOut;
    const EvalReport rep = cross_validate(table, cfg, logo);
    CHECK(rep.folds == 6);

    CVScheme kf;
    kf.kind = CVScheme::Kind::KFold;
    kf.k = 3;
    kf.seed = 5;
    CHECK(cross_validate(table, cfg, kf).folds == 3);

    kf.k = 7;  // more folds than groups
    CHECK_THROWS_AS(cross_validate(table, cfg, kf), Error);

    FeatureTable oneGroup = table;
    for (auto& g : oneGroup.groups) g = "only";
    CHECK_THROWS_AS(cross_validate(oneGroup, cfg, logo), Error);
}

TEST_CASE("kfold with k equal to the group count has leave-one-group-out structure") {
    const FeatureTable table = two_blob_table(10, 55);  // 20 groups
    MLPConfig cfg;
    CVScheme logo;
    logo.kind = CVScheme::Kind::LeaveOneGroupOut;
    CVScheme kf;
    kf.kind = CVScheme::Kind::KFold;
    kf.k = 20;
    kf.seed = 3;
    // the centroid baseline is seed-free, so identical folds mean identical reports
    const EvalReport a = cross_validate(table, cfg, logo, ClassifierKind::NearestCentroid);
    const EvalReport b = cross_validate(table, cfg, kf, ClassifierKind::NearestCentroid);
    CHECK(a.folds == b.folds);
    CHECK(a.cellLevel.confusion == b.cellLevel.confusion);
    CHECK(a.imageLevel.confusion == b.imageLevel.confusion);
}

TEST_CASE("image-level majority vote aggregates cells per group") {
    // 4 groups x 3 records, two groups per class, separable by construction
    FeatureTable table;
    table.featureNames = {"x"};
    for (int i = 0; i < 12; ++i) {
        const bool pos = i < 6;
        table.rows.push_back({(pos ? 1.0 : -1.0) + 0.01 * i});
        table.labels.push_back(pos ? "A" : "B");
        table.groups.push_back((pos ? "ga" : "gb") + std::to_string(i % 2));
    }
    MLPConfig cfg;
    cfg.epochs = 100;
    CVScheme logo;
    logo.kind = CVScheme::Kind::LeaveOneGroupOut;
    const EvalReport rep = cross_validate(table, cfg, logo);
    CHECK(rep.imageLevel.confusion.size() == 2);
    const double sum0 = rep.imageLevel.confusion[0][0] + rep.imageLevel.confusion[0][1];
    CHECK(sum0 == Catch::Approx(100.0).margin(0.1));
}

TEST_CASE("report rendering shows one-decimal percentages at both levels") {
    EvalReport rep;
    rep.scheme = "leave-one-group-out";
    rep.folds = 4;
    rep.classes = {"A", "B"};
    rep.classifier = "mlp";
    rep.cellLevel.confusion = {{75.0, 25.0}, {0.0, 100.0}};
    rep.cellLevel.perClass = {75.0, 100.0};
    rep.cellLevel.overall = 87.5;
    rep.imageLevel = rep.cellLevel;
    const std::string text = render_report(rep);
    CHECK(text.find("75.0") != std::string::npos);
    CHECK(text.find("25.0") != std::string::npos);
    CHECK(text.find("100.0") != std::string::npos);
    CHECK(text.find("overall accuracy: 87.5") != std::string::npos);
    CHECK(text.find("cell level") != std::string::npos);
    CHECK(text.find("image level") != std::string::npos);

    const auto j = report_to_json(rep);
    CHECK(j["scheme"] == "leave-one-group-out");
    CHECK(j["folds"] == 4);
    CHECK(j["cellLevel"]["overall"] == 87.5);
    CHECK(j["imageLevel"]["confusion"][0][1] == 25.0);
    CHECK(j["config"].contains("hiddenUnits"));
}

TEST_CASE("level reports normalize count matrices by row") {
    // constant predictor: everything lands in one column
    const LevelReport rep = detail::make_level_report({{3, 0}, {2, 0}});
    CHECK(rep.confusion[0][0] == 100.0);
    CHECK(rep.confusion[1][0] == 100.0);
    CHECK(rep.confusion[0][1] == 0.0);
    CHECK(rep.confusion[1][1] == 0.0);
    CHECK(rep.overall == 60.0);

    const LevelReport split = detail::make_level_report({{3, 1}, {0, 4}});
    CHECK(split.confusion[0][0] == 75.0);
    CHECK(split.confusion[0][1] == 25.0);
    CHECK(split.perClass[1] == 100.0);
}

TEST_CASE("perfect and single-column confusion shapes") {
    const FeatureTable table = two_blob_table(10, 77);
    MLPConfig cfg;
    CVScheme logo;
    logo.kind = CVScheme::Kind::LeaveOneGroupOut;
    const EvalReport rep = cross_validate(table, cfg, logo, ClassifierKind::NearestCentroid);
    // blobs this far apart classify perfectly: identity confusion
    CHECK(rep.cellLevel.confusion[0][0] == Catch::Approx(100.0));
    CHECK(rep.cellLevel.confusion[1][1] == Catch::Approx(100.0));
    CHECK(rep.cellLevel.overall == Catch::Approx(100.0));
}

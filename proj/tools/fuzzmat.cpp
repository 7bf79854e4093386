// fuzzmat: command-line front-end for the texture-matrix library.
//
// Exit codes: 0 success, 1 runtime error (I/O, degenerate input),
// 2 usage error.

#include <cstdint>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fuzzmat/fuzzmat.hpp>

namespace {

using namespace fuzzmat;

struct Flags {
    std::vector<std::string> inputs;
    std::string maskPath;
    std::string outPath;
    std::string kind = "szm";
    std::string quant;
    std::string offset = "0,1";
    std::vector<std::string> offsets;
    int dir = 0;
    int conn = 8;
    std::string beta = "linear";
    double radius = 0.0;
    std::string agg = "mean";
    std::string multi;
    std::string quants;
    std::string weights;
    std::uint64_t seed = 0;

    // evaluate
    std::vector<std::string> pipelines;
    std::string scheme = "logo";
    std::string classifier = "mlp";
    int hidden = 11;
    int epochs = 300;
    double lr = 0.05;
    double momentum = 0.9;
    bool noWeighting = false;
    bool jsonOut = false;

    // bench
    int benchSize = 256;
    int benchLevels = 16;
};

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

Offset parse_offset_flag(const std::string& s) {
    const auto parts = split_list(s, ',');
    if (parts.size() != 2) throw UsageError("--offset expects dr,dc");
    return {detail::parse_int(parts[0], "offset row"), detail::parse_int(parts[1], "offset col")};
}

PipelineConfig config_from_flags(const Flags& f) {
    PipelineConfig cfg;
    cfg.kind = parse_op_kind(f.kind);
    if (!f.quant.empty()) cfg.quant = parse_quant_spec(f.quant);
    cfg.offset = parse_offset_flag(f.offset);
    for (const auto& o : f.offsets) cfg.offsets.push_back(parse_offset_flag(o));
    cfg.dir = parse_direction(f.dir);
    cfg.conn = parse_connectivity(f.conn);
    cfg.beta = parse_membership_kind(f.beta);
    if (f.radius < 0) throw UsageError("--radius must be nonnegative");
    cfg.radius = f.radius;
    cfg.agg = parse_aggregation(f.agg);
    if (!f.multi.empty())
        for (const auto& r : split_list(f.multi, ','))
            cfg.multiRadii.push_back(detail::parse_real(r, "--multi radius"));
    if (!f.quants.empty())
        for (const auto& q : split_list(f.quants, ','))
            cfg.mszmLevels.push_back(detail::parse_int(q, "--quants levels"));
    if (!f.weights.empty())
        for (const auto& w : split_list(f.weights, ','))
            cfg.mszmWeights.push_back(detail::parse_real(w, "--weights value"));
    return cfg;
}

GrayImage load_input(const std::string& path, const std::string& maskPath) {
    GrayImage img = load_pgm(path);
    if (!maskPath.empty()) img = img.withMask(load_pgm(maskPath));
    return img;
}

void emit(const Flags& f, const std::string& text) {
    if (f.outPath.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(f.outPath, std::ios::binary);
        if (!out) throw Error(f.outPath + ": cannot open for writing");
        out << text;
    }
}

int run_info(const Flags& f) {
    const GrayImage img = load_input(f.inputs[0], f.maskPath);
    int lo = img.levels(), hi = -1;
    std::set<int> distinct;
    for (size_t i = 0; i < img.pixels().size(); ++i) {
        if (!img.insideIndex(i)) continue;
        lo = std::min(lo, img.pixels()[i]);
        hi = std::max(hi, img.pixels()[i]);
        distinct.insert(img.pixels()[i]);
    }
    std::ostringstream out;
    out << "path: " << f.inputs[0] << "\n"
        << "width: " << img.width() << "\n"
        << "height: " << img.height() << "\n"
        << "levels: " << img.levels() << "\n"
        << "inside pixels: " << img.insideCount() << "\n";
    if (hi >= 0)
        out << "min: " << lo << "\nmax: " << hi << "\ndistinct values: " << distinct.size()
            << "\n";
    emit(f, out.str());
    return 0;
}

int run_quantize(const Flags& f) {
    if (f.quant.empty()) throw UsageError("quantize requires --quant method:N");
    const GrayImage img = load_input(f.inputs[0], f.maskPath);
    const GrayImage q = quantize(img, parse_quant_spec(f.quant));
    if (f.outPath.empty()) {
        std::cout << to_pgm_ascii(q);
    } else {
        save_pgm(q, f.outPath);
    }
    return 0;
}

int run_flatzones(const Flags& f) {
    const GrayImage img = load_input(f.inputs[0], f.maskPath);
    const auto zones = label_flat_zones(img, parse_connectivity(f.conn));
    std::string out = "gray,size,row,col\n";
    for (const auto& z : zones)
        out += std::to_string(z.gray) + "," + std::to_string(z.size) + "," +
               std::to_string(z.firstPixel.row) + "," + std::to_string(z.firstPixel.col) + "\n";
    emit(f, out);
    return 0;
}

int run_matrix(const Flags& f) {
    const GrayImage raw = load_input(f.inputs[0], f.maskPath);
    const PipelineConfig cfg = config_from_flags(f);
    const GrayImage img = cfg.quant ? quantize(raw, *cfg.quant) : raw;
    const StatMatrix m = matrix_from_config(img, cfg);
    if (auto it = m.params.find("warning"); it != m.params.end())
        std::cerr << "warning: " << it->second << "\n";
    emit(f, m.toCsv());
    return 0;
}

int run_features(const Flags& f) {
    const PipelineConfig cfg = config_from_flags(f);
    std::string header = "path";
    std::string body;
    bool first = true;
    for (const auto& path : f.inputs) {
        const GrayImage img = load_input(path, f.maskPath);
        const FeatureVector fv = feature_pipeline(img, cfg);
        if (first) {
            for (const auto& [name, v] : fv.items) header += "," + name;
            first = false;
        }
        body += path;
        for (const auto& [name, v] : fv.items) body += "," + format_double(v);
        body += "\n";
    }
    emit(f, header + "\n" + body);
    return 0;
}

std::vector<PipelineConfig> pipelines_from_flags(const Flags& f) {
    if (f.pipelines.empty()) throw UsageError("at least one --pipeline is required");
    std::vector<PipelineConfig> out;
    for (const auto& p : f.pipelines) out.push_back(parse_pipeline(p));
    return out;
}

int run_extract(const Flags& f) {
    const DatasetManifest manifest = load_manifest(f.inputs[0]);
    for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
    const FeatureTable table = extract_feature_table(manifest, pipelines_from_flags(f));
    std::string out = "path,label,group";
    for (const auto& n : table.featureNames) out += "," + n;
    out += "\n";
    for (size_t i = 0; i < table.rows.size(); ++i) {
        out += manifest.records[i].imagePath + "," + table.labels[i] + "," + table.groups[i];
        for (double v : table.rows[i]) out += "," + format_double(v);
        out += "\n";
    }
    emit(f, out);
    return 0;
}

CVScheme parse_scheme(const std::string& text, std::uint64_t seed) {
    CVScheme scheme;
    scheme.seed = seed;
    if (text == "logo") {
        scheme.kind = CVScheme::Kind::LeaveOneGroupOut;
        return scheme;
    }
    if (text.rfind("kfold:", 0) == 0) {
        scheme.kind = CVScheme::Kind::KFold;
        scheme.k = detail::parse_int(text.substr(6), "kfold k");
        return scheme;
    }
    throw UsageError("--scheme must be logo or kfold:K");
}

int run_evaluate(const Flags& f) {
    const DatasetManifest manifest = load_manifest(f.inputs[0]);
    for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
    MLPConfig config;
    config.hiddenUnits = f.hidden;
    config.epochs = f.epochs;
    config.baseLearningRate = f.lr;
    config.momentum = f.momentum;
    config.seed = f.seed;
    config.classWeighting = !f.noWeighting;
    const EvalReport rep =
        cross_validate(manifest, pipelines_from_flags(f), config, parse_scheme(f.scheme, f.seed),
                       parse_classifier(f.classifier));
    emit(f, f.jsonOut ? report_to_json(rep).dump(2) + "\n" : render_report(rep));
    return 0;
}

int run_bench(const Flags& f) {
    std::mt19937_64 rng(f.seed);
    std::uniform_int_distribution<int> dist(0, f.benchLevels - 1);
    std::vector<int> px(static_cast<size_t>(f.benchSize) * f.benchSize);
    for (int& v : px) v = dist(rng);
    const GrayImage img(f.benchSize, f.benchSize, f.benchLevels, std::move(px));

    const MembershipFunction fn{parse_membership_kind(f.beta),
                                f.radius > 0 ? f.radius : 2.0};
    using clock = std::chrono::steady_clock;

    const auto t0 = clock::now();
    const StatMatrix crisp = szm(img, parse_connectivity(f.conn));
    const auto t1 = clock::now();
    const StatMatrix fuzzy = fuzzy_szm(img, parse_connectivity(f.conn), fn,
                                       parse_aggregation(f.agg));
    const auto t2 = clock::now();

    const double szmMs = std::chrono::duration<double, std::milli>(t1 - t0).count();
    const double fuzzyMs = std::chrono::duration<double, std::milli>(t2 - t1).count();
    std::ostringstream out;
    out << "image: " << f.benchSize << "x" << f.benchSize << " noise, " << f.benchLevels
        << " levels\n"
        << "szm: " << detail::fixed1(szmMs) << " ms (" << format_double(crisp.totalMass())
        << " zones)\n"
        << "fuzzy_szm (" << fn.name() << " R=" << format_double(fn.radius)
        << "): " << detail::fixed1(fuzzyMs) << " ms (mass "
        << format_double(fuzzy.totalMass()) << ")\n"
        << "ratio: " << (szmMs > 0 ? detail::fixed1(fuzzyMs / szmMs) : std::string("inf"))
        << "x\n";
    emit(f, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Flags f;
    CLI::App app{"gray-level statistical texture matrices, fuzzy variants and evaluation"};
    app.require_subcommand(1);

    auto addImageOpts = [&](CLI::App* cmd, bool multiInput = false) {
        cmd->add_option("input", f.inputs, "input image (PGM P2/P5)")
            ->required()
            ->expected(multiInput ? -1 : 1);
        cmd->add_option("--mask", f.maskPath, "region-of-interest mask (PGM, nonzero = inside)");
        cmd->add_option("--out", f.outPath, "write output to a file instead of stdout");
    };
    auto addMatrixOpts = [&](CLI::App* cmd) {
        cmd->add_option("--kind", f.kind,
                        "matrix kind: com|comavg|dh|sh|rlm|szm|mszm|fcom|frlm|fszm|"
                        "fuzzyrlm|fuzzyszm|multifuzzyszm")
            ->check(CLI::IsMember({"com", "comavg", "dh", "sh", "rlm", "szm", "mszm", "fcom",
                                   "frlm", "fszm", "fuzzyrlm", "fuzzyszm", "multifuzzyszm"}));
        cmd->add_option("--quant", f.quant, "quantization method:N (linear|log|equal|kmeans)");
        cmd->add_option("--offset", f.offset, "pair offset dr,dc (default 0,1)");
        cmd->add_option("--offsets", f.offsets, "offsets for comavg, repeatable dr,dc");
        cmd->add_option("--dir", f.dir, "run direction angle")
            ->check(CLI::IsMember({0, 45, 90, 135}));
        cmd->add_option("--conn", f.conn, "zone connectivity")->check(CLI::IsMember({4, 8}));
        cmd->add_option("--beta", f.beta, "membership function")
            ->check(CLI::IsMember({"binary", "linear", "gaussian"}));
        cmd->add_option("--radius", f.radius, "fuzzy radius R (nonnegative)");
        cmd->add_option("--agg", f.agg, "zone probability aggregation")
            ->check(CLI::IsMember({"mean", "median"}));
        cmd->add_option("--multi", f.multi, "radii R1,R2,... for multifuzzyszm");
        cmd->add_option("--quants", f.quants, "levels N1,N2,... for mszm");
        cmd->add_option("--weights", f.weights, "weights w1,w2,... for mszm");
    };

    auto* info = app.add_subcommand("info", "image summary");
    addImageOpts(info);

    auto* quant = app.add_subcommand("quantize", "gray-level reduction, emits PGM");
    addImageOpts(quant);
    quant->add_option("--quant", f.quant, "quantization method:N")->required();

    auto* zones = app.add_subcommand("flatzones", "flat zones as CSV (gray,size,row,col)");
    addImageOpts(zones);
    zones->add_option("--conn", f.conn, "zone connectivity")->check(CLI::IsMember({4, 8}));

    auto* matrix = app.add_subcommand("matrix", "statistical matrix as CSV");
    addImageOpts(matrix);
    addMatrixOpts(matrix);

    auto* features = app.add_subcommand("features", "feature vector per image as CSV");
    addImageOpts(features, true);
    addMatrixOpts(features);

    auto* extract = app.add_subcommand("extract", "feature table for a dataset manifest");
    extract->add_option("manifest", f.inputs, "manifest CSV (path,label,group[,mask])")
        ->required()
        ->expected(1);
    extract->add_option("--pipeline", f.pipelines,
                        "pipeline description, repeatable (e.g. \"kind=szm conn=8\")");
    extract->add_option("--out", f.outPath, "write output to a file");

    auto* evaluate = app.add_subcommand("evaluate", "cross-validated classification report");
    evaluate->add_option("manifest", f.inputs, "manifest CSV")->required()->expected(1);
    evaluate->add_option("--pipeline", f.pipelines, "pipeline description, repeatable");
    evaluate->add_option("--scheme", f.scheme, "logo or kfold:K");
    evaluate->add_option("--classifier", f.classifier, "mlp or centroid")
        ->check(CLI::IsMember({"mlp", "centroid"}));
    evaluate->add_option("--hidden", f.hidden, "hidden units");
    evaluate->add_option("--epochs", f.epochs, "training epochs");
    evaluate->add_option("--lr", f.lr, "base learning rate");
    evaluate->add_option("--momentum", f.momentum, "momentum in [0,1)");
    evaluate->add_flag("--no-weighting", f.noWeighting, "disable class re-weighting");
    evaluate->add_flag("--json", f.jsonOut, "emit the report as JSON");
    evaluate->add_option("--seed", f.seed, "random seed");
    evaluate->add_option("--out", f.outPath, "write output to a file");

    auto* bench = app.add_subcommand("bench", "szm vs fuzzy_szm timing on noise");
    bench->add_option("--size", f.benchSize, "image side length");
    bench->add_option("--levels", f.benchLevels, "gray levels");
    bench->add_option("--radius", f.radius, "fuzzy radius (default 2)");
    bench->add_option("--beta", f.beta, "membership function");
    bench->add_option("--agg", f.agg, "aggregation");
    bench->add_option("--conn", f.conn, "connectivity")->check(CLI::IsMember({4, 8}));
    bench->add_option("--seed", f.seed, "noise seed");
    bench->add_option("--out", f.outPath, "write output to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(info)) return run_info(f);
        if (app.got_subcommand(quant)) return run_quantize(f);
        if (app.got_subcommand(zones)) return run_flatzones(f);
        if (app.got_subcommand(matrix)) return run_matrix(f);
        if (app.got_subcommand(features)) return run_features(f);
        if (app.got_subcommand(extract)) return run_extract(f);
        if (app.got_subcommand(evaluate)) return run_evaluate(f);
        if (app.got_subcommand(bench)) return run_bench(f);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fuzzmat/error.hpp>
#include <fuzzmat/features.hpp>
#include <fuzzmat/fuzzy.hpp>
#include <fuzzmat/matrices.hpp>
#include <fuzzmat/quantize.hpp>

namespace fuzzmat {

/// Matrix-producing operations reachable from a pipeline (or the CLI --kind flag).
enum class OpKind {
    Com,
    ComAvg,
    Dh,
    Sh,
    Rlm,
    Szm,
    Mszm,
    Fcom,
    Frlm,
    Fszm,
    FuzzyRlm,
    FuzzySzm,
    MultiFuzzySzm,
};

inline OpKind parse_op_kind(const std::string& name) {
    if (name == "com") return OpKind::Com;
    if (name == "comavg") return OpKind::ComAvg;
    if (name == "dh") return OpKind::Dh;
    if (name == "sh") return OpKind::Sh;
    if (name == "rlm") return OpKind::Rlm;
    if (name == "szm") return OpKind::Szm;
    if (name == "mszm") return OpKind::Mszm;
    if (name == "fcom") return OpKind::Fcom;
    if (name == "frlm") return OpKind::Frlm;
    if (name == "fszm") return OpKind::Fszm;
    if (name == "fuzzyrlm") return OpKind::FuzzyRlm;
    if (name == "fuzzyszm") return OpKind::FuzzySzm;
    if (name == "multifuzzyszm") return OpKind::MultiFuzzySzm;
    throw UsageError("unknown matrix kind '" + name + "'");
}

inline std::string op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::Com: return "com";
        case OpKind::ComAvg: return "comavg";
        case OpKind::Dh: return "dh";
        case OpKind::Sh: return "sh";
        case OpKind::Rlm: return "rlm";
        case OpKind::Szm: return "szm";
        case OpKind::Mszm: return "mszm";
        case OpKind::Fcom: return "fcom";
        case OpKind::Frlm: return "frlm";
        case OpKind::Fszm: return "fszm";
        case OpKind::FuzzyRlm: return "fuzzyrlm";
        case OpKind::FuzzySzm: return "fuzzyszm";
        case OpKind::MultiFuzzySzm: return "multifuzzyszm";
    }
    return "?";
}

/// One feature-extraction pipeline: optional quantization, a matrix kind with
/// its parameters, and the feature family implied by the matrix columns.
struct PipelineConfig {
    OpKind kind = OpKind::Szm;
    std::optional<QuantizationSpec> quant;
    Offset offset{0, 1};
    std::vector<Offset> offsets;  // comavg; empty = the four unit directions
    Direction dir = Direction::Deg0;
    Connectivity conn = Connectivity::Eight;
    MembershipKind beta = MembershipKind::Linear;
    double radius = 0.0;
    AggregationMethod agg = AggregationMethod::Mean;
    std::vector<double> multiRadii;  // multifuzzyszm
    std::vector<int> mszmLevels;
    std::vector<double> mszmWeights;  // empty = uniform

    MembershipFunction membership() const { return {beta, radius}; }

    /// Canonical identity used to prefix feature names.
    std::string id() const {
        std::string s = op_kind_name(kind);
        auto offmark = [](const Offset& o) {
            return "o" + std::to_string(o.dRow) + "_" + std::to_string(o.dCol);
        };
        switch (kind) {
            case OpKind::Com:
            case OpKind::Dh:
            case OpKind::Sh:
                s += "-" + offmark(offset);
                break;
            case OpKind::ComAvg:
                if (offsets.empty()) {
                    s += "-4dir";
                } else {
                    for (const auto& o : offsets) s += "-" + offmark(o);
                }
                break;
            case OpKind::Rlm:
                s += "-d" + std::to_string(direction_angle(dir));
                break;
            case OpKind::Szm:
                s += "-c" + std::to_string(static_cast<int>(conn));
                break;
            case OpKind::Mszm: {
                s += "-c" + std::to_string(static_cast<int>(conn)) + "-q";
                for (size_t i = 0; i < mszmLevels.size(); ++i)
                    s += (i ? "_" : "") + std::to_string(mszmLevels[i]);
                break;
            }
            case OpKind::Fcom:
                s += "-" + offmark(offset) + "-" + MembershipFunction{beta, radius}.name() +
                     format_double(radius);
                break;
            case OpKind::Frlm:
                s += "-d" + std::to_string(direction_angle(dir)) + "-" +
                     MembershipFunction{beta, radius}.name() + format_double(radius);
                break;
            case OpKind::Fszm:
                s += "-c" + std::to_string(static_cast<int>(conn)) + "-" +
                     MembershipFunction{beta, radius}.name() + format_double(radius);
                break;
            case OpKind::FuzzyRlm:
                s += "-d" + std::to_string(direction_angle(dir)) + "-" +
                     MembershipFunction{beta, radius}.name() + format_double(radius) +
                     (agg == AggregationMethod::Mean ? "-mean" : "-median");
                break;
            case OpKind::FuzzySzm:
                s += "-c" + std::to_string(static_cast<int>(conn)) + "-" +
                     MembershipFunction{beta, radius}.name() + format_double(radius) +
                     (agg == AggregationMethod::Mean ? "-mean" : "-median");
                break;
            case OpKind::MultiFuzzySzm: {
                s += "-c" + std::to_string(static_cast<int>(conn)) + "-" +
                     MembershipFunction{beta, radius}.name();
                for (size_t i = 0; i < multiRadii.size(); ++i)
                    s += (i ? "_" : "") + format_double(multiRadii[i]);
                s += agg == AggregationMethod::Mean ? "-mean" : "-median";
                break;
            }
        }
        if (quant)
            s += "-q" + quant_method_name(quant->method) + std::to_string(quant->targetLevels);
        return s;
    }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
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
    out.push_back(cur);
    return out;
}

inline int parse_int(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid integer '" + s + "' for " + what);
    }
}

inline double parse_real(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid number '" + s + "' for " + what);
    }
}

}  // namespace detail

inline QuantizationSpec parse_quant_spec(const std::string& text) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 2) throw UsageError("quantization spec must be method:N, got '" + text + "'");
    return {parse_quant_method(parts[0]), detail::parse_int(parts[1], "quantization levels")};
}

/// Parses a pipeline description of space-separated key=value tokens, e.g.
/// "kind=fuzzyszm conn=8 beta=linear radius=2 agg=mean quant=linear:32".
/// List values use ':' as separator (offset=0:1, quants=8:16).
inline PipelineConfig parse_pipeline(const std::string& text) {
    std::istringstream in(text);
    std::string token;
    PipelineConfig cfg;
    bool haveKind = false;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw UsageError("pipeline token '" + token + "' is not key=value");
        const std::string key = token.substr(0, eq);
        const std::string val = token.substr(eq + 1);
        if (key == "kind") {
            cfg.kind = parse_op_kind(val);
            haveKind = true;
        } else if (key == "quant") {
            cfg.quant = parse_quant_spec(val);
        } else if (key == "offset") {
            const auto p = detail::split(val, ':');
            if (p.size() != 2) throw UsageError("offset must be dr:dc");
            cfg.offset = {detail::parse_int(p[0], "offset row"),
                          detail::parse_int(p[1], "offset col")};
        } else if (key == "offsets") {
            for (const auto& one : detail::split(val, ';')) {
                const auto p = detail::split(one, ':');
                if (p.size() != 2) throw UsageError("offsets must be dr:dc;dr:dc;...");
                cfg.offsets.push_back({detail::parse_int(p[0], "offset row"),
                                       detail::parse_int(p[1], "offset col")});
            }
        } else if (key == "dir") {
            cfg.dir = parse_direction(detail::parse_int(val, "direction"));
        } else if (key == "conn") {
            cfg.conn = parse_connectivity(detail::parse_int(val, "connectivity"));
        } else if (key == "beta") {
            cfg.beta = parse_membership_kind(val);
        } else if (key == "radius") {
            cfg.radius = detail::parse_real(val, "radius");
            if (cfg.radius < 0) throw UsageError("radius must be nonnegative");
        } else if (key == "agg") {
            cfg.agg = parse_aggregation(val);
        } else if (key == "multi") {
            for (const auto& one : detail::split(val, ':'))
                cfg.multiRadii.push_back(detail::parse_real(one, "multi radius"));
        } else if (key == "quants") {
            for (const auto& one : detail::split(val, ':'))
                cfg.mszmLevels.push_back(detail::parse_int(one, "mszm levels"));
        } else if (key == "weights") {
            for (const auto& one : detail::split(val, ':'))
                cfg.mszmWeights.push_back(detail::parse_real(one, "mszm weight"));
        } else {
            throw UsageError("unknown pipeline key '" + key + "'");
        }
    }
    if (!haveKind) throw UsageError("pipeline has no stages (missing kind=...)");
    return cfg;
}

/// The four unit direction offsets used for averaged COMs.
inline std::vector<Offset> standard_offsets() {
    return {offset_of(Direction::Deg0), offset_of(Direction::Deg45), offset_of(Direction::Deg90),
            offset_of(Direction::Deg135)};
}

/// Builds the configured statistical matrix from an already-quantized image.
inline StatMatrix matrix_from_config(const GrayImage& img, const PipelineConfig& cfg) {
    switch (cfg.kind) {
        case OpKind::Com: return com(img, cfg.offset);
        case OpKind::ComAvg:
            return com_average(img, cfg.offsets.empty() ? standard_offsets() : cfg.offsets);
        case OpKind::Dh: return diff_histogram(img, cfg.offset);
        case OpKind::Sh: return sum_histogram(img, cfg.offset);
        case OpKind::Rlm: return rlm(img, cfg.dir);
        case OpKind::Szm: return szm(img, cfg.conn);
        case OpKind::Mszm: {
            if (cfg.mszmLevels.empty()) throw UsageError("mszm requires quants=N1:N2:...");
            std::vector<double> w = cfg.mszmWeights;
            if (w.empty()) w.assign(cfg.mszmLevels.size(), 1.0 / cfg.mszmLevels.size());
            return mszm(img, cfg.mszmLevels, w, cfg.conn);
        }
        case OpKind::Fcom: return fcom(img, cfg.offset, cfg.membership());
        case OpKind::Frlm: {
            const auto runs = collect_runs(img, cfg.dir);
            std::vector<MatrixEvent> events;
            events.reserve(runs.size());
            for (const auto& r : runs) events.push_back({r.gray, r.length});
            StatMatrix m = fill_level_fuzzify(events, cfg.membership(), img.levels(),
                                              MatrixKind::FRLM, img.insideCount());
            m.params["dir"] = std::to_string(direction_angle(cfg.dir));
            return m;
        }
        case OpKind::Fszm: {
            const auto lab = detail::label_zones(img, cfg.conn);
            std::vector<MatrixEvent> events;
            events.reserve(lab.gray.size());
            for (size_t z = 0; z < lab.gray.size(); ++z)
                events.push_back({lab.gray[z], lab.size[z]});
            StatMatrix m = fill_level_fuzzify(events, cfg.membership(), img.levels(),
                                              MatrixKind::FSZM, img.insideCount());
            m.params["conn"] = std::to_string(static_cast<int>(cfg.conn));
            return m;
        }
        case OpKind::FuzzyRlm: return fuzzy_rlm(img, cfg.dir, cfg.membership(), cfg.agg);
        case OpKind::FuzzySzm: return fuzzy_szm(img, cfg.conn, cfg.membership(), cfg.agg);
        case OpKind::MultiFuzzySzm: {
            if (cfg.multiRadii.empty()) throw UsageError("multifuzzyszm requires multi=R1:R2:...");
            std::vector<MembershipFunction> fns;
            for (double r : cfg.multiRadii) fns.push_back({cfg.beta, r});
            return multi_fuzzy_szm(img, cfg.conn, fns, cfg.agg);
        }
    }
    throw Error("unreachable matrix kind");
}

/// Runs quantization, matrix filling and the feature family implied by the
/// matrix columns; feature names come back prefixed with the pipeline id.
inline FeatureVector feature_pipeline(const GrayImage& img, const PipelineConfig& cfg) {
    const GrayImage work = cfg.quant ? quantize(img, *cfg.quant) : img;
    const StatMatrix m = matrix_from_config(work, cfg);

    FeatureVector raw;
    switch (m.columnSemantics) {
        case ColumnSemantics::GrayLevel:
            if (m.kind == MatrixKind::DH || m.kind == MatrixKind::SH)
                throw Error("no feature family for kind '" + matrix_kind_name(m.kind) + "'");
            raw = haralick_features(m);
            break;
        case ColumnSemantics::RunLength: raw = run_length_features(m); break;
        case ColumnSemantics::ZoneSize: raw = size_zone_features(m); break;
    }
    FeatureVector out;
    const std::string prefix = cfg.id() + ".";
    for (auto& [name, value] : raw.items) out.push(prefix + name, value);
    return out;
}

}  // namespace fuzzmat

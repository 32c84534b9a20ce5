#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "twistor/charts.hpp"
#include "twistor/spaces.hpp"
#include "twistor/types.hpp"

namespace twistor {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct StructureConfig {
    Kind kind = Kind::pseudo_riemannian;
    int p = 2;
    int q = 0;
    int n = 2; // symplectic half-dimension
    bool oriented = false;
};

struct SourceConfig {
    std::string fixture = "sphere"; // chart fixtures, "random", or "symplectic_fixture"
    double radius = 1.0;
    double radius2 = 1.0;
    double scale = 1.0;
    double fd_step = 1e-3;
    bool richardson = true;
    std::vector<double> point; // empty: generic default per dimension
    std::uint64_t tensor_seed = 1;
    int weyl_seeds = 0;
    bool with_ricci_part = true;
};

struct SamplingConfig {
    int fiber_samples = 64;
    int pair_samples = 64;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct OutputConfig {
    std::string format = "text"; // "json" or "text"
    std::string path;            // empty: stdout
    bool emit_timing = false;    // timing goes to stderr; never into the report
};

struct RunConfig {
    StructureConfig structure;
    SourceConfig source;
    SamplingConfig sampling;
    ToleranceProfile tol;
    bool flip_orientation = false;
    OutputConfig output;

    void validate() const {
        if (sampling.fiber_samples < 1 || sampling.pair_samples < 1)
            throw ConfigError("sampling counts must be >= 1");
        if (sampling.threads < 1) throw ConfigError("threads must be >= 1");
        if (tol.exact <= 0 || tol.verdict_pass <= 0 || tol.rank <= 0)
            throw ConfigError("tolerances must be positive");
        if (output.format != "json" && output.format != "text")
            throw ConfigError("format must be json or text");
    }
};

// ---------------------------------------------------------------------------
// JSON round trips
// ---------------------------------------------------------------------------

inline Json tolerances_to_json(const ToleranceProfile& t) {
    Json j;
    j["exact"] = t.exact;
    j["reconstruction"] = t.reconstruction;
    j["group"] = t.group;
    j["membership"] = t.membership;
    j["rank"] = t.rank;
    j["fd_gate"] = t.fd_gate;
    j["fd_match"] = t.fd_match;
    j["verdict_pass"] = t.verdict_pass;
    j["verdict_fail"] = t.verdict_fail;
    j["degenerate"] = t.degenerate;
    return j;
}

inline void tolerances_from_json(const Json& j, ToleranceProfile& t) {
    auto get = [&](const char* k, double& v) {
        if (j.contains(k)) v = j.at(k).get<double>();
    };
    get("exact", t.exact);
    get("reconstruction", t.reconstruction);
    get("group", t.group);
    get("membership", t.membership);
    get("rank", t.rank);
    get("fd_gate", t.fd_gate);
    get("fd_match", t.fd_match);
    get("verdict_pass", t.verdict_pass);
    get("verdict_fail", t.verdict_fail);
    get("degenerate", t.degenerate);
}

inline Json config_to_json(const RunConfig& c) {
    Json j;
    Json s;
    s["kind"] = kind_name(c.structure.kind);
    if (c.structure.kind == Kind::pseudo_riemannian) {
        s["p"] = c.structure.p;
        s["q"] = c.structure.q;
        s["oriented"] = c.structure.oriented;
    } else {
        s["n"] = c.structure.n;
    }
    j["structure"] = s;
    Json src;
    src["fixture"] = c.source.fixture;
    src["radius"] = c.source.radius;
    src["radius2"] = c.source.radius2;
    src["scale"] = c.source.scale;
    src["fd_step"] = c.source.fd_step;
    src["richardson"] = c.source.richardson;
    src["point"] = c.source.point;
    src["tensor_seed"] = c.source.tensor_seed;
    src["weyl_seeds"] = c.source.weyl_seeds;
    src["with_ricci_part"] = c.source.with_ricci_part;
    j["source"] = src;
    // threads is an execution detail: reports are byte-identical across
    // thread counts, so it must not appear in the echoed input
    Json sm;
    sm["fiber_samples"] = c.sampling.fiber_samples;
    sm["pair_samples"] = c.sampling.pair_samples;
    sm["seed"] = c.sampling.seed;
    j["sampling"] = sm;
    j["tolerances"] = tolerances_to_json(c.tol);
    j["flip_orientation"] = c.flip_orientation;
    return j;
}

inline RunConfig config_from_json(const Json& j) {
    RunConfig c;
    try {
        if (j.contains("structure")) {
            const Json& s = j.at("structure");
            if (s.contains("kind")) {
                std::string k = s.at("kind").get<std::string>();
                if (k == "pseudo" || k == "pseudo_riemannian")
                    c.structure.kind = Kind::pseudo_riemannian;
                else if (k == "symplectic")
                    c.structure.kind = Kind::symplectic;
                else
                    throw ConfigError("unknown kind: " + k);
            }
            if (s.contains("p")) c.structure.p = s.at("p").get<int>();
            if (s.contains("q")) c.structure.q = s.at("q").get<int>();
            if (s.contains("n")) c.structure.n = s.at("n").get<int>();
            if (s.contains("oriented")) c.structure.oriented = s.at("oriented").get<bool>();
            if (s.contains("dim")) {
                int dim = s.at("dim").get<int>();
                if (dim % 2 != 0) throw ConfigError("dim must be even");
                if (c.structure.kind == Kind::pseudo_riemannian) {
                    if (!s.contains("p")) {
                        c.structure.p = dim / 2;
                        c.structure.q = 0;
                    } else if (2 * (c.structure.p + c.structure.q) != dim) {
                        throw ConfigError("dim inconsistent with signature");
                    }
                } else {
                    c.structure.n = dim / 2;
                }
            }
        }
        if (j.contains("source")) {
            const Json& s = j.at("source");
            if (s.contains("fixture")) c.source.fixture = s.at("fixture").get<std::string>();
            if (s.contains("radius")) c.source.radius = s.at("radius").get<double>();
            if (s.contains("radius2")) c.source.radius2 = s.at("radius2").get<double>();
            if (s.contains("scale")) c.source.scale = s.at("scale").get<double>();
            if (s.contains("fd_step")) c.source.fd_step = s.at("fd_step").get<double>();
            if (s.contains("richardson")) c.source.richardson = s.at("richardson").get<bool>();
            if (s.contains("point")) c.source.point = s.at("point").get<std::vector<double>>();
            if (s.contains("tensor_seed"))
                c.source.tensor_seed = s.at("tensor_seed").get<std::uint64_t>();
            if (s.contains("weyl_seeds")) c.source.weyl_seeds = s.at("weyl_seeds").get<int>();
            if (s.contains("with_ricci_part"))
                c.source.with_ricci_part = s.at("with_ricci_part").get<bool>();
        }
        if (j.contains("sampling")) {
            const Json& s = j.at("sampling");
            if (s.contains("fiber_samples")) c.sampling.fiber_samples = s.at("fiber_samples").get<int>();
            if (s.contains("pair_samples")) c.sampling.pair_samples = s.at("pair_samples").get<int>();
            if (s.contains("seed")) c.sampling.seed = s.at("seed").get<std::uint64_t>();
            if (s.contains("threads")) c.sampling.threads = s.at("threads").get<int>();
        }
        if (j.contains("tolerances")) tolerances_from_json(j.at("tolerances"), c.tol);
        if (j.contains("flip_orientation")) c.flip_orientation = j.at("flip_orientation").get<bool>();
        if (j.contains("output")) {
            const Json& o = j.at("output");
            if (o.contains("format")) c.output.format = o.at("format").get<std::string>();
            if (o.contains("path")) c.output.path = o.at("path").get<std::string>();
            if (o.contains("emit_timing")) c.output.emit_timing = o.at("emit_timing").get<bool>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return c;
}

inline Json matrix_to_json(const Matrix& m) {
    Json j;
    j["dim"] = static_cast<int>(m.rows());
    j["shape"] = Json::array({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
    Json data = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    j["data"] = data;
    return j;
}

// ---------------------------------------------------------------------------
// Deterministic serialisation: insertion-ordered keys, floats with 17
// significant digits, no locale dependence.
// ---------------------------------------------------------------------------

namespace detail {

inline void emit_json(const Json& j, std::string& out, int depth) {
    auto pad = [&](int d) { out.append(static_cast<std::size_t>(2 * d), ' '); };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                pad(depth + 1);
                out += Json(it.key()).dump();
                out += ": ";
                emit_json(it.value(), out, depth + 1);
            }
            out += "\n";
            pad(depth);
            out += "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ", ";
                first = false;
                emit_json(v, out, depth + 1);
            }
            out += "]";
            return;
        }
        case Json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) throw Error("report contains a non-finite number");
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out += buf;
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

} // namespace detail

inline std::string serialize_report(const Json& report) {
    std::string out;
    detail::emit_json(report, out, 0);
    out += "\n";
    return out;
}

} // namespace twistor

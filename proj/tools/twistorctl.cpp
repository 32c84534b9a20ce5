// twistorctl: curvature decompositions, twistor-space integrability and
// 2-form verdicts, Nijenhuis ranks, and j-action spectra, with reproducible
// JSON reports.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <twistor/all.hpp>
#include <twistor/engine.hpp>
#include <twistor/report.hpp>
#include <twistor/selftest.hpp>

namespace {

using namespace twistor;

struct CliFlags {
    std::string config_path;
    std::string kind;
    int dim = 0;
    std::string signature;
    bool oriented = false;
    bool flip_orientation = false;
    std::string fixture;
    double radius = 0;
    double radius2 = 0;
    double scale = 0;
    std::string point;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int fiber_samples = 0;
    int pair_samples = 0;
    int threads = 0;
    int weyl_seeds = -1;
    bool no_ricci_part = false;
    std::string format;
    std::string out_path;
    bool emit_timing = false;
    bool mutate = false;
    bool selftest_json = false;
};

void add_common_flags(CLI::App* sub, CliFlags& f) {
    sub->add_option("--config", f.config_path, "JSON config file; flags override its fields");
    sub->add_option("--kind", f.kind, "pseudo|symplectic");
    sub->add_option("--dim", f.dim, "dimension 2n of the model space");
    sub->add_option("--signature", f.signature, "signature halves p,q (pseudo kind)");
    sub->add_flag("--oriented", f.oriented, "use the oriented pseudo fibre");
    sub->add_flag("--flip-orientation", f.flip_orientation, "reverse the reference orientation");
    sub->add_option("--fixture", f.fixture,
                    "flat|sphere|hyperbolic|product_spheres|fubini_study_cp2|pseudo_sphere_22|"
                    "random|symplectic_fixture");
    sub->add_option("--radius", f.radius, "fixture radius");
    sub->add_option("--radius2", f.radius2, "second radius (product_spheres)");
    sub->add_option("--scale", f.scale, "potential scale (fubini_study_cp2)");
    sub->add_option("--point", f.point, "chart point x1,x2,...");
    sub->add_option("--seed", f.seed, "64-bit sampling seed")->each([&](std::string) {
        f.seed_set = true;
    });
    sub->add_option("--fiber-samples", f.fiber_samples, "fibre points sampled per verdict");
    sub->add_option("--pair-samples", f.pair_samples, "argument pairs sampled per rank");
    sub->add_option("--threads", f.threads, "worker threads for sampling loops");
    sub->add_option("--weyl-seeds", f.weyl_seeds, "Weyl seeds of the symplectic fixture");
    sub->add_flag("--no-ricci-part", f.no_ricci_part, "symplectic fixture without the E(r) part");
    sub->add_option("--format", f.format, "json|text");
    sub->add_option("--out", f.out_path, "write the report to a file instead of stdout");
    sub->add_flag("--emit-timing", f.emit_timing, "print wall time to stderr");
}

std::vector<double> parse_point(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError("bad --point component: " + item);
        }
    }
    return out;
}

RunConfig build_config(const CliFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw ConfigError("cannot open config file: " + f.config_path);
        Json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
        }
        cfg = config_from_json(doc);
    }
    if (!f.kind.empty()) {
        if (f.kind == "pseudo" || f.kind == "pseudo_riemannian")
            cfg.structure.kind = Kind::pseudo_riemannian;
        else if (f.kind == "symplectic")
            cfg.structure.kind = Kind::symplectic;
        else
            throw ConfigError("unknown --kind: " + f.kind);
    }
    if (!f.signature.empty()) {
        int p = 0, q = 0;
        if (std::sscanf(f.signature.c_str(), "%d,%d", &p, &q) != 2)
            throw ConfigError("--signature expects p,q");
        cfg.structure.p = p;
        cfg.structure.q = q;
    }
    if (f.dim > 0) {
        if (f.dim % 2 != 0) throw ConfigError("--dim must be even");
        if (cfg.structure.kind == Kind::pseudo_riemannian) {
            if (f.signature.empty()) {
                cfg.structure.p = f.dim / 2;
                cfg.structure.q = 0;
            } else if (2 * (cfg.structure.p + cfg.structure.q) != f.dim) {
                throw ConfigError("--dim inconsistent with --signature");
            }
        } else {
            cfg.structure.n = f.dim / 2;
        }
    }
    if (f.oriented) cfg.structure.oriented = true;
    if (f.flip_orientation) cfg.flip_orientation = true;
    if (!f.fixture.empty()) cfg.source.fixture = f.fixture;
    if (cfg.structure.kind == Kind::symplectic && f.fixture.empty() && f.config_path.empty())
        cfg.source.fixture = "symplectic_fixture";
    if (f.radius > 0) cfg.source.radius = f.radius;
    if (f.radius2 > 0) cfg.source.radius2 = f.radius2;
    if (f.scale > 0) cfg.source.scale = f.scale;
    if (!f.point.empty()) cfg.source.point = parse_point(f.point);
    if (f.seed_set) {
        cfg.sampling.seed = f.seed;
        cfg.source.tensor_seed = f.seed;
    }
    if (f.fiber_samples > 0) cfg.sampling.fiber_samples = f.fiber_samples;
    if (f.pair_samples > 0) cfg.sampling.pair_samples = f.pair_samples;
    if (f.threads > 0) cfg.sampling.threads = f.threads;
    if (f.weyl_seeds >= 0) cfg.source.weyl_seeds = f.weyl_seeds;
    if (f.no_ricci_part) cfg.source.with_ricci_part = false;
    if (!f.format.empty()) cfg.output.format = f.format;
    if (!f.out_path.empty()) cfg.output.path = f.out_path;
    if (f.emit_timing) cfg.output.emit_timing = true;
    return cfg;
}

int write_output(const std::string& text, const OutputConfig& out) {
    if (out.path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream os(out.path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + out.path);
    os << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"twistor-space curvature toolbox"};
    app.require_subcommand(1);

    CliFlags flags;
    std::string command;
    for (const char* name : {"decompose", "verdict", "nijenhuis", "two-form", "spectrum"}) {
        CLI::App* sub = app.add_subcommand(name, "");
        add_common_flags(sub, flags);
        sub->callback([&command, name] { command = name; });
    }
    CLI::App* st = app.add_subcommand("selftest", "run the reduced property suite");
    st->add_flag("--json", flags.selftest_json, "machine-readable results");
    st->add_flag("--mutate", flags.mutate, "perturb an internal constant (must fail)");
    st->add_option("--format", flags.format, "json|text");
    st->callback([&command] { command = "selftest"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    try {
        if (command == "selftest") {
            if (flags.mutate) twistor::detail::mutation_epsilon() = 1e-3;
            std::vector<twistor::SelftestCheck> checks = twistor::run_selftest();
            bool all = true;
            for (const auto& c : checks) all = all && c.pass;
            if (flags.selftest_json || flags.format == "json")
                std::cout << twistor::serialize_report(twistor::selftest_to_json(checks));
            else
                std::cout << twistor::selftest_table(checks);
            return all ? 0 : 1;
        }

        twistor::RunConfig cfg = build_config(flags);
        twistor::Json rep;
        if (command == "decompose")
            rep = twistor::cmd_decompose(cfg);
        else if (command == "verdict")
            rep = twistor::cmd_verdict(cfg);
        else if (command == "nijenhuis")
            rep = twistor::cmd_nijenhuis(cfg);
        else if (command == "two-form")
            rep = twistor::cmd_two_form(cfg);
        else if (command == "spectrum")
            rep = twistor::cmd_spectrum(cfg);
        else
            throw twistor::ConfigError("unknown command");

        write_output(twistor::render_report(rep, cfg.output.format), cfg.output);
        if (cfg.output.emit_timing) {
            auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
            std::fprintf(stderr, "elapsed_ms %.3f\n", ms.count());
        }
        return 0;
    } catch (const twistor::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

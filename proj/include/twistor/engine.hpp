#pragma once

#include <complex>
#include <sstream>
#include <string>

#include "twistor/charts.hpp"
#include "twistor/report.hpp"
#include "twistor/twistor.hpp"

namespace twistor {

inline BilinearStructure base_from_config(const StructureConfig& s) {
    if (s.kind == Kind::pseudo_riemannian) return standard_pseudo(s.p, s.q, s.oriented);
    return standard_symplectic(s.n);
}

namespace detail {

inline Fixture fixture_from_name(const std::string& name) {
    if (name == "flat") return Fixture::flat;
    if (name == "sphere") return Fixture::sphere;
    if (name == "hyperbolic") return Fixture::hyperbolic;
    if (name == "product_spheres") return Fixture::product_spheres;
    if (name == "fubini_study_cp2") return Fixture::fubini_study_cp2;
    if (name == "pseudo_sphere_22") return Fixture::pseudo_sphere_22;
    throw ConfigError("unknown fixture: " + name);
}

inline Vector default_point(int dim) {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = 0.15 * (0.3 + 0.17 * i) * (i % 2 == 0 ? 1.0 : -1.0);
    return x;
}

} // namespace detail

// Builds the curvature tensor the run operates on.
inline CurvatureTensor tensor_from_config(const RunConfig& cfg) {
    const StructureConfig& s = cfg.structure;
    const SourceConfig& src = cfg.source;
    if (src.fixture == "random") return random_curvature(base_from_config(s), src.tensor_seed);
    if (cfg.structure.kind == Kind::symplectic) {
        if (src.fixture != "symplectic_fixture")
            throw ConfigError("symplectic kind supports fixtures: random, symplectic_fixture");
        SymplecticPointFixture fx =
            make_symplectic_fixture(s.n, src.tensor_seed, src.weyl_seeds, src.with_ricci_part);
        return symplectic_fixture_curvature(fx, cfg.tol);
    }
    Fixture f = detail::fixture_from_name(src.fixture);
    ChartMetric chart;
    int dim = 2 * (s.p + s.q);
    chart = make_chart(f, dim, src.radius, src.radius2, src.scale);
    if (chart.p != s.p || chart.q != s.q)
        throw ConfigError("fixture signature does not match the requested structure");
    chart.fd_step = src.fd_step;
    chart.richardson = src.richardson;
    Vector x = src.point.empty()
                   ? detail::default_point(dim)
                   : Eigen::Map<const Vector>(src.point.data(),
                                              static_cast<Eigen::Index>(src.point.size()));
    if (x.size() != dim) throw ConfigError("point dimension does not match the structure");
    return curvature_at(chart, x, s.oriented, cfg.tol);
}

namespace detail {

inline Json verdict_to_json(const Verdict& v) {
    Json j;
    j["question"] = question_name(v.question);
    j["closed_form_defined"] = v.closed_form_defined;
    j["closed_form_answer"] = v.closed_form_answer;
    j["reason"] = v.reason;
    j["sampled_answer"] = v.sampled_answer;
    j["worst_residual"] = v.worst_residual;
    j["sample_count"] = v.sample_count;
    j["agree"] = v.agree();
    return j;
}

inline Json report_header(const RunConfig& cfg, const std::string& command) {
    Json j;
    j["schema_version"] = 1;
    j["command"] = command;
    j["input"] = config_to_json(cfg);
    j["seed"] = cfg.sampling.seed;
    return j;
}

inline VerdictConfig verdict_config(const RunConfig& cfg) {
    VerdictConfig vc;
    vc.fiber_samples = cfg.sampling.fiber_samples;
    vc.seed = cfg.sampling.seed;
    vc.flip_orientation = cfg.flip_orientation;
    vc.threads = cfg.sampling.threads;
    vc.tol = cfg.tol;
    return vc;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Commands.  Each returns the full report document.
// ---------------------------------------------------------------------------

inline Json cmd_decompose(const RunConfig& cfg) {
    cfg.validate();
    CurvatureTensor R = tensor_from_config(cfg);
    Json rep = detail::report_header(cfg, "decompose");
    Json res;
    res["kind"] = kind_name(R.base.kind);
    res["dim"] = R.base.dim();
    res["tensor_norm"] = R.norm();
    if (R.base.kind == Kind::pseudo_riemannian) {
        PseudoDecomposition dec = decompose_pseudo(R);
        res["scal"] = dec.scal;
        res["ricci"] = matrix_to_json(dec.ricci);
        Json parts;
        parts["S_norm"] = dec.S_part.norm();
        parts["E_norm"] = dec.E_part.norm();
        parts["C_norm"] = dec.C_part.norm();
        res["decomposition"] = parts;
        PinchingReport pr = pinching_report(R, cfg.sampling.pair_samples, cfg.sampling.seed,
                                            cfg.tol.degenerate);
        Json sec;
        sec["min"] = pr.min;
        sec["max"] = pr.max;
        sec["ratio"] = pr.ratio;
        sec["samples"] = pr.samples;
        res["sectional"] = sec;
    } else {
        SymplecticDecomposition dec = decompose_symplectic(R);
        res["ricci"] = matrix_to_json(dec.ricci);
        Json parts;
        parts["E_norm"] = dec.E_part.norm();
        parts["W_norm"] = dec.W_part.norm();
        res["decomposition"] = parts;
        RicciTypeResult rt = is_ricci_type(R, cfg.tol.membership);
        res["ricci_type"] = rt.value;
        res["ricci_type_residual"] = rt.residual;
    }
    rep["results"] = res;
    return rep;
}

inline Json cmd_verdict(const RunConfig& cfg) {
    cfg.validate();
    CurvatureTensor R = tensor_from_config(cfg);
    VerdictConfig vc = detail::verdict_config(cfg);
    Verdict jp = integrability_verdict(R, 1, vc);
    Verdict jm = integrability_verdict(R, -1, vc);
    Verdict t11 = type11_verdict(R, vc);
    bool agreement = jp.agree() && jm.agree() && t11.agree();
    if (!agreement) {
        std::ostringstream os;
        os << "verdict disagreement:";
        for (const Verdict* v : {&jp, &jm, &t11})
            if (!v->agree())
                os << " " << question_name(v->question) << " closed=" << v->closed_form_answer
                   << " sampled=" << v->sampled_answer << " residual=" << v->worst_residual;
        throw Error(os.str());
    }
    Json rep = detail::report_header(cfg, "verdict");
    Json res;
    res["Jplus_integrable"] = detail::verdict_to_json(jp);
    res["Jminus_integrable"] = detail::verdict_to_json(jm);
    res["type11_compatible"] = detail::verdict_to_json(t11);
    res["agreement"] = agreement;
    rep["results"] = res;
    return rep;
}

inline Json cmd_nijenhuis(const RunConfig& cfg) {
    cfg.validate();
    CurvatureTensor R = tensor_from_config(cfg);
    ComplexStructure j = sample_fiber_point(R.base, cfg.sampling.seed, 0, cfg.flip_orientation);
    Json rep = detail::report_header(cfg, "nijenhuis");
    Json res;
    for (int sign : {1, -1}) {
        std::vector<VerticalVector> vb = vertical_basis(j);
        int tangent_dim = R.base.dim() + static_cast<int>(vb.size());
        int samples = std::max(cfg.sampling.pair_samples, 4 * tangent_dim);
        SpanReport span = nijenhuis_span(R, j, sign, samples, cfg.sampling.seed, cfg.tol.rank);
        Json s;
        s["rank"] = span.rank;
        s["horizontal_rank"] = span.horizontal_rank;
        s["tangent_dim"] = span.tangent_dim;
        s["samples"] = samples;
        res[sign > 0 ? "Jplus" : "Jminus"] = s;
        if (sign < 0) res["horizontal_containment"] = span.horizontal_rank == R.base.dim();
    }
    rep["results"] = res;
    return rep;
}

inline Json cmd_two_form(const RunConfig& cfg) {
    cfg.validate();
    CurvatureTensor R = tensor_from_config(cfg);
    ComplexStructure j0 = standard_j0(R.base);
    VerdictConfig vc = detail::verdict_config(cfg);
    Json rep = detail::report_header(cfg, "two-form");
    Json res;
    NondegeneracyResult nd = two_form_nondegenerate(R, j0, cfg.tol.degenerate);
    res["nondegenerate_at_j0"] = nd.nondegenerate;
    res["det_scale"] = nd.det_scale;
    res["horizontal_sv_ratio"] = nd.horizontal_sv_ratio;
    res["type11_residual_at_j0"] = type11_check(R, j0);
    Verdict sympl = two_form_symplectic_verdict(R, vc);
    res["symplectic"] = detail::verdict_to_json(sympl);
    Verdict t11 = type11_verdict(R, vc);
    res["type11_compatible"] = detail::verdict_to_json(t11);
    if (nd.nondegenerate) {
        res["Jplus_positive"] = two_form_positivity(R, j0, 1, cfg.tol.degenerate);
        res["Jminus_positive"] = two_form_positivity(R, j0, -1, cfg.tol.degenerate);
    } else {
        res["Jplus_positive"] = nullptr;
        res["Jminus_positive"] = nullptr;
    }
    rep["results"] = res;
    return rep;
}

inline Json cmd_spectrum(const RunConfig& cfg) {
    cfg.validate();
    CurvatureTensor R = tensor_from_config(cfg); // validates the source; the
                                                 // spectrum itself depends on the base only
    const BilinearStructure& base = R.base;
    int samples = std::min(cfg.sampling.fiber_samples, 64);
    std::vector<double> dev(static_cast<std::size_t>(samples), 0.0);
    std::vector<std::array<int, 3>> counts(static_cast<std::size_t>(samples), {0, 0, 0});
    parallel_for(samples, cfg.sampling.threads, [&](int i) {
        ComplexStructure js = sample_fiber_point(base, cfg.sampling.seed, i, cfg.flip_orientation);
        Matrix A = j_action_operator(js);
        Eigen::EigenSolver<Matrix> es(A);
        double worst = 0;
        std::array<int, 3> cnt = {0, 0, 0};
        for (int k = 0; k < es.eigenvalues().size(); ++k) {
            std::complex<double> lam = es.eigenvalues()(k);
            double best = 1e300;
            int which = 0;
            const double targets[3] = {0.0, 2.0, 4.0};
            for (int t = 0; t < 3; ++t) {
                double dist = std::min(std::abs(lam - std::complex<double>(0, targets[t])),
                                       std::abs(lam + std::complex<double>(0, targets[t])));
                if (dist < best) {
                    best = dist;
                    which = t;
                }
            }
            worst = std::max(worst, best);
            ++cnt[static_cast<std::size_t>(which)];
        }
        dev[static_cast<std::size_t>(i)] = worst;
        counts[static_cast<std::size_t>(i)] = cnt;
    });
    double worst = 0;
    for (double v : dev) worst = std::max(worst, v);
    bool consistent = true;
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] != counts[0]) consistent = false;

    Json rep = detail::report_header(cfg, "spectrum");
    Json res;
    res["samples"] = samples;
    res["curvature_space_dim"] = curvature_space(base).dim();
    res["worst_deviation"] = worst;
    res["within_tolerance"] = worst <= 1e-8;
    Json cl;
    cl["zero"] = counts[0][0];
    cl["two_i"] = counts[0][1];
    cl["four_i"] = counts[0][2];
    res["cluster_counts"] = cl;
    res["cluster_counts_stable_across_fiber"] = consistent;
    rep["results"] = res;
    return rep;
}

// ---------------------------------------------------------------------------
// Text rendering and output plumbing
// ---------------------------------------------------------------------------

inline std::string render_text(const Json& rep) {
    std::ostringstream os;
    os << "twistorctl " << rep.at("command").get<std::string>() << " (schema_version "
       << rep.at("schema_version").get<int>() << ")\n";
    std::function<void(const Json&, int)> walk = [&](const Json& j, int depth) {
        std::string pad(static_cast<std::size_t>(2 * depth), ' ');
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() == "data") {
                os << pad << "data: [" << it.value().size() << " values]\n";
                continue;
            }
            if (it.value().is_object()) {
                os << pad << it.key() << ":\n";
                walk(it.value(), depth + 1);
            } else {
                os << pad << it.key() << ": " << it.value().dump() << "\n";
            }
        }
    };
    os << "results:\n";
    walk(rep.at("results"), 1);
    os << "seed: " << rep.at("seed").dump() << "\n";
    return os.str();
}

inline std::string render_report(const Json& rep, const std::string& format) {
    return format == "json" ? serialize_report(rep) : render_text(rep);
}

} // namespace twistor

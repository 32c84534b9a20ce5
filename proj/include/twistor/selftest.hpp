#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "twistor/engine.hpp"

namespace twistor {

struct SelftestCheck {
    std::string name;
    bool pass = false;
    double residual = 0;
};

// Reduced-count property suite behind `twistorctl selftest`.  `intensity`
// scales the sample counts (tests use < 1 to stay quick).
inline std::vector<SelftestCheck> run_selftest(double intensity = 1.0) {
    std::vector<SelftestCheck> out;
    auto add = [&](const std::string& name, double residual, double bound) {
        out.push_back({name, residual <= bound, residual});
    };
    int reps = std::max(1, static_cast<int>(8 * intensity));

    // vertical space dimensions
    {
        bool ok = true;
        for (int n : {2, 3}) {
            ok = ok && static_cast<int>(vertical_basis(standard_j0(standard_pseudo(n, 0))).size()) ==
                           n * (n - 1);
            ok = ok && static_cast<int>(vertical_basis(standard_j0(standard_symplectic(n))).size()) ==
                           n * (n + 1);
        }
        out.push_back({"vertical_space_dimensions", ok, ok ? 0.0 : 1.0});
    }

    // group sampling preserves the form
    {
        double worst = 0;
        for (int s = 0; s < 4 * reps; ++s) {
            BilinearStructure b = (s % 2 == 0) ? standard_pseudo(2, 1) : standard_symplectic(2);
            Matrix A = random_group_element(b, 7000 + static_cast<std::uint64_t>(s));
            worst = std::max(worst, (A.transpose() * b.form * A - b.form).norm());
        }
        add("group_form_preservation", worst, 1e-9);
    }

    // projector idempotence (dim 4, both kinds)
    {
        double worst = 0;
        for (Kind kind : {Kind::pseudo_riemannian, Kind::symplectic}) {
            const CurvatureSpace& cs = curvature_space(kind, 4);
            Rng rng(77);
            Tensor4 x(4);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    for (int c = 0; c < 4; ++c)
                        for (int e = 0; e < 4; ++e) x(a, b, c, e) = rng.uniform(-1.0, 1.0);
            Tensor4 px = cs.project(x);
            Tensor4 ppx = cs.project(px);
            ppx -= px;
            worst = std::max(worst, ppx.norm());
        }
        add("curvature_projector_idempotent", worst, 1e-10);
    }

    // the two trace-form lemmas
    {
        double worst = 0;
        for (int s = 0; s < reps; ++s) {
            BilinearStructure b = standard_pseudo(2, 0);
            ComplexStructure j = sample_fiber_point(b, 8000 + static_cast<std::uint64_t>(s), s);
            Matrix S = random_v3_form(j, 8100 + static_cast<std::uint64_t>(s));
            Matrix o2 = omega2(psi_j(S, j), j);
            worst = std::max(worst, (o2 + 8.0 * (b.n + 1) * S * j.J).cwiseAbs().maxCoeff());
        }
        add("trace_form_identity_pseudo", worst, 1e-9);
    }
    {
        double worst = 0;
        for (int s = 0; s < reps; ++s) {
            BilinearStructure b = standard_symplectic(2);
            ComplexStructure j = sample_fiber_point(b, 8200 + static_cast<std::uint64_t>(s), s);
            Matrix S = random_v3_form(j, 8300 + static_cast<std::uint64_t>(s));
            Matrix o2 = omega2(R_of_S(S, j), j);
            worst = std::max(worst, (o2 + 8.0 * (b.n - 1) * S * j.J).cwiseAbs().maxCoeff());
        }
        add("trace_form_identity_symplectic", worst, 1e-9);
    }

    // P_j idempotence (exercises the recovery coefficients)
    {
        double worst = 0;
        for (Kind kind : {Kind::pseudo_riemannian, Kind::symplectic}) {
            BilinearStructure b =
                kind == Kind::pseudo_riemannian ? standard_pseudo(2, 0) : standard_symplectic(2);
            for (int s = 0; s < reps; ++s) {
                CurvatureTensor R = random_curvature(b, 8400 + static_cast<std::uint64_t>(s));
                ComplexStructure j = sample_fiber_point(b, 8500 + static_cast<std::uint64_t>(s), s);
                CurvatureTensor p1 = projector_Pj(R, j);
                CurvatureTensor p2 = projector_Pj(p1, j);
                Tensor4 diff = p2.R;
                diff -= p1.R;
                worst = std::max(worst, diff.norm() / std::max(1.0, p1.norm()));
            }
        }
        add("Pj_idempotent", worst, 1e-9);
    }

    // j-action spectrum (dim 4, both kinds)
    {
        double worst = 0;
        for (Kind kind : {Kind::pseudo_riemannian, Kind::symplectic}) {
            BilinearStructure b =
                kind == Kind::pseudo_riemannian ? standard_pseudo(2, 0) : standard_symplectic(2);
            for (int s = 0; s < std::max(2, reps / 2); ++s) {
                ComplexStructure j = sample_fiber_point(b, 8600 + static_cast<std::uint64_t>(s), s);
                Matrix A = j_action_operator(j);
                Eigen::EigenSolver<Matrix> es(A);
                for (int k = 0; k < es.eigenvalues().size(); ++k) {
                    std::complex<double> lam = es.eigenvalues()(k);
                    double best = 1e300;
                    for (double t : {0.0, 2.0, -2.0, 4.0, -4.0})
                        best = std::min(best, std::abs(lam - std::complex<double>(0, t)));
                    worst = std::max(worst, best);
                }
            }
        }
        add("j_action_spectrum", worst, 1e-8);
    }

    // 4i projector vs the complex-arithmetic route, via the polynomial identity
    {
        double worst = 0;
        BilinearStructure b = standard_pseudo(2, 0);
        for (int s = 0; s < reps; ++s) {
            CurvatureTensor R = random_curvature(b, 8700 + static_cast<std::uint64_t>(s));
            ComplexStructure j = sample_fiber_point(b, 8800 + static_cast<std::uint64_t>(s), s);
            FourIComponent once = four_i_component(R, j);
            FourIComponent twice = four_i_component(once.component, j);
            Tensor4 diff = twice.component.R;
            diff -= once.component.R;
            worst = std::max(worst, diff.norm());
        }
        add("four_i_projector_idempotent", worst, 1e-9);
    }

    // FD engine against the constant-curvature oracle
    {
        ChartMetric sphere = make_chart(Fixture::sphere, 4);
        Vector x(4);
        x << 0.11, -0.07, 0.19, 0.05;
        CurvatureTensor R = curvature_at(sphere, x);
        PseudoDecomposition dec = decompose_pseudo(R);
        double worst = std::abs(dec.scal - 12.0);
        worst = std::max(worst, dec.E_part.norm());
        worst = std::max(worst, dec.C_part.norm());
        add("fd_sphere_oracle", worst, 1e-5);
    }

    // byte-determinism of a small report across thread counts
    {
        RunConfig cfg;
        cfg.structure = {Kind::pseudo_riemannian, 2, 0, 2, true};
        cfg.source.fixture = "sphere";
        cfg.sampling.fiber_samples = 8;
        cfg.sampling.pair_samples = 16;
        cfg.output.format = "json";
        std::string a = serialize_report(cmd_verdict(cfg));
        cfg.sampling.threads = 4;
        std::string b = serialize_report(cmd_verdict(cfg));
        out.push_back({"report_determinism_threads", a == b, a == b ? 0.0 : 1.0});
    }

    return out;
}

inline Json selftest_to_json(const std::vector<SelftestCheck>& checks) {
    Json j;
    j["schema_version"] = 1;
    j["command"] = "selftest";
    Json arr = Json::array();
    bool all = true;
    for (const auto& c : checks) {
        Json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["residual"] = c.residual;
        arr.push_back(e);
        all = all && c.pass;
    }
    j["checks"] = arr;
    j["passed"] = all;
    return j;
}

inline std::string selftest_table(const std::vector<SelftestCheck>& checks) {
    std::ostringstream os;
    bool all = true;
    for (const auto& c : checks) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e", c.residual);
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " (residual " << buf << ")\n";
        all = all && c.pass;
    }
    os << (all ? "selftest: all checks passed\n" : "selftest: FAILURES present\n");
    return os.str();
}

} // namespace twistor

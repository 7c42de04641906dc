#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qtm/gauss.hpp"
#include "qtm/mainterm.hpp"
#include "qtm/moment.hpp"
#include "qtm/special.hpp"
#include "qtm/symbolic.hpp"

using json = nlohmann::json;
using namespace qtm;

namespace {

std::vector<double> split_reals(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw CLI::ValidationError("bad number: " + tok);
    }
    return out;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json check_json(const IdentityCheck& c) {
    json j{{"pass", c.equal}, {"terms_checked", c.terms_checked}};
    if (!c.equal) j["witness"] = c.witness;
    return j;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Third moment of quadratic Dirichlet L-functions: checks and numerics"};
    app.set_config("--config", "", "key=value file with default option values");
    app.require_subcommand(1);

    // gauss
    auto* g = app.add_subcommand("gauss", "evaluate the Gauss sum G_k(n)");
    std::int64_t gk = 0, gn = 1;
    bool g_direct = false, g_formula = false;
    g->add_option("--k", gk)->required();
    g->add_option("--n", gn, "odd modulus")->required();
    g->add_flag("--direct", g_direct, "direct summation only");
    g->add_flag("--formula", g_formula, "closed formula only");

    // verify-identities
    auto* v = app.add_subcommand("verify-identities", "exact and numeric identity checks");
    bool v_euler = false, v_arch = false, v_alt = false;
    std::string v_class;
    int v_samples = 100;
    std::uint64_t v_seed = 1;
    v->add_flag("--euler", v_euler, "symbolic Euler-factor identities");
    v->add_flag("--archimedean", v_arch, "archimedean gamma/zeta identity");
    v->add_flag("--alternating", v_alt, "alternating-sum identity");
    v->add_option("--class", v_class, "prime class for --euler")
        ->check(CLI::IsMember({"p_eq_2", "p_generic", "p_div_a", "p_div_l_odd", "p_div_l_even"}));
    v->add_option("--samples", v_samples, "random points for --archimedean")->check(CLI::PositiveNumber);
    v->add_option("--seed", v_seed);

    // mainterm
    auto* m = app.add_subcommand("mainterm", "CFKRS main term for the smoothed third moment");
    double m_X = 1e4;
    std::uint64_t m_l = 1;
    std::string m_shifts;
    int m_M = 4;
    std::uint64_t m_P = 10000;
    m->add_option("--X", m_X, "scale of the bump weight")->check(CLI::PositiveNumber);
    m->add_option("--l", m_l, "odd twist")->check(CLI::PositiveNumber);
    m->add_option("--shifts", m_shifts, "a,b,c; omitted means the limit at zero");
    m->add_option("--M", m_M, "degree of zeta extraction")->check(CLI::Range(2, 6));
    m->add_option("--P", m_P, "Euler product cutoff");

    // lvalue
    auto* l = app.add_subcommand("lvalue", "L(1/2 + shift, chi_8d)");
    std::uint64_t l_d = 1;
    std::string l_shift = "0,0";
    double l_trunc = 12;
    l->add_option("--d", l_d, "odd squarefree d")->required();
    l->add_option("--shift", l_shift, "re,im");
    l->add_option("--trunc", l_trunc, "truncation in units of sqrt(8d/pi)");
    std::string l_g = "one";
    l->add_option("--g", l_g, "AFE weight G(s)")->check(CLI::IsMember({"one", "gaussian"}));

    // moment
    auto* mo = app.add_subcommand("moment", "empirical smoothed third moment vs prediction");
    double mo_X = 1e4;
    std::string mo_scales;
    MomentConfig mcfg;
    mo->add_option("--X", mo_X)->check(CLI::PositiveNumber);
    mo->add_option("--scales", mo_scales, "X1,X2,...");
    mo->add_option("--workers", mcfg.workers)->check(CLI::PositiveNumber);
    mo->add_option("--trunc", mcfg.trunc);

    // poisson-check
    auto* po = app.add_subcommand("poisson-check", "Poisson summation over odd d");
    std::uint64_t po_n = 1;
    double po_X = 1e3;
    int po_k = -1;
    po->add_option("--n", po_n, "odd n")->required();
    po->add_option("--X", po_X)->check(CLI::PositiveNumber);
    po->add_option("--k-cutoff", po_k, "fixed dual cutoff (default automatic)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*g) {
            json j{{"k", gk}, {"n", gn}};
            if (!g_formula) j["direct"] = cjson(gauss_direct(gk, gn));
            if (!g_direct) {
                auto f = gauss_formula(gk, gn);
                j["formula"] = {{"exact", f.to_string()}, {"value", f.to_double()}};
            }
            print(j);
            return 0;
        }
        if (*v) {
            if (!v_euler && !v_arch && !v_alt) v_euler = v_arch = v_alt = true;
            json j;
            bool ok = true;
            if (v_euler) {
                std::vector<PrimeClass> cls(kAllPrimeClasses.begin(), kAllPrimeClasses.end());
                if (!v_class.empty()) cls = {prime_class_from_name(v_class)};
                json e = json::array();
                for (const auto& r : verify_euler_identities(cls)) {
                    e.push_back({{"class", prime_class_name(r.cls)}, {"k0", check_json(r.k0)},
                                 {"square", check_json(r.square)}});
                    ok = ok && r.k0.equal && r.square.equal;
                }
                j["euler"] = e;
                if (v_class.empty()) {
                    auto ap = verify_identity(series_T(), ap_prime_closed());
                    auto ao = verify_identity(sym::q() * series_U(), ap_odd_closed());
                    j["ap_closed"] = {{"even", check_json(ap)}, {"odd", check_json(ao)}};
                    ok = ok && ap.equal && ao.equal;
                    auto jr = j_euler_generic(8);
                    j["j_sum"] = {{"pass", jr.pass()}, {"cases", jr.cases.size()}};
                    ok = ok && jr.pass();
                }
            }
            if (v_arch) {
                auto r = archimedean_sweep(v_samples, v_seed);
                j["archimedean"] = {{"samples", r.samples}, {"max_gap", r.max_gap}, {"worst_u", cjson(r.worst)},
                                    {"pass", r.max_gap <= 1e-8}};
                ok = ok && r.max_gap <= 1e-8;
            }
            if (v_alt) {
                json a = json::array();
                for (cplx z : {cplx(1.5), cplx(2.0), cplx(3.0), cplx(1.5, 1.0)}) {
                    auto r = alternating_sum_check(z);
                    a.push_back({{"z", cjson(z)}, {"lhs", cjson(r.lhs)}, {"rhs", cjson(r.rhs)}, {"gap", r.gap},
                                 {"pass", r.gap <= 1e-8}});
                    ok = ok && r.gap <= 1e-8;
                }
                j["alternating"] = a;
            }
            j["pass"] = ok;
            print(j);
            return ok ? 0 : 1;
        }
        if (*m) {
            SmoothWeight F(m_X);
            json j;
            if (m_shifts.empty()) {
                auto r = main_term_at_zero(m_l, F, m_M, m_P);
                j = {{"value", r.value},
                     {"error_estimate", r.error_estimate},
                     {"components",
                      {{"imag_part", r.imag_part},
                       {"direction_gap", r.direction_gap},
                       {"node_refinement_gap", r.node_refinement_gap},
                       {"radius", r.radius},
                       {"nodes", r.nodes}}}};
            } else {
                auto s = split_reals(m_shifts);
                if (s.size() != 3) throw CLI::ValidationError("--shifts needs three values");
                MainTermSpec spec{{s[0], s[1], s[2]}, m_l, &F};
                auto plan = ArithFactorPlan::make(m_l, m_M, m_P);
                auto r = eight_term_sum_detail(spec, plan);
                auto a = a_factor_product(plan, spec.shifts);
                json comps = json::array();
                for (auto t : r.terms) comps.push_back(cjson(t));
                j = {{"value", cjson(r.total)},
                     {"error_estimate", a.tail_bound * std::abs(r.total)},
                     {"components", comps}};
            }
            print(j);
            return 0;
        }
        if (*l) {
            auto sv = split_reals(l_shift);
            if (sv.empty() || sv.size() > 2) throw CLI::ValidationError("--shift is re[,im]");
            auto r = lvalue_single(l_d, {sv[0], sv.size() > 1 ? sv[1] : 0.0}, l_g == "one" ? AFEWeightG::one() : AFEWeightG{}, l_trunc);
            print({{"d", r.d}, {"value", cjson(r.value)}, {"method", lmethod_name(r.method)},
                   {"error_bound", r.error_bound}});
            return 0;
        }
        if (*mo) {
            std::vector<double> xs = mo_scales.empty() ? std::vector<double>{mo_X} : split_reals(mo_scales);
            auto rep = moment_scaling_fit(xs, mcfg);
            std::printf("X,empirical,predicted,residual,count\n");
            json rows = json::array();
            for (const auto& r : rep.rows) {
                if (r.failed) {
                    std::printf("%.17g,failed,failed,failed,0\n", r.X);
                    rows.push_back({{"X", r.X}, {"error", r.error}});
                } else {
                    std::printf("%.17g,%.17g,%.17g,%.17g,%llu\n", r.X, r.empirical, r.predicted, r.residual,
                                static_cast<unsigned long long>(r.count));
                    rows.push_back({{"X", r.X}, {"relative_residual", r.residual / r.predicted}});
                }
            }
            json j{{"workers", mcfg.workers}, {"rows", rows}};
            if (rep.fit_ok) j["fitted_exponent"] = {{"slope", rep.slope}, {"ci95", {rep.slope_lo, rep.slope_hi}}};
            std::cout << j.dump() << "\n";
            return 0;
        }
        if (*po) {
            auto r = poisson_check(po_n, SmoothWeight(po_X), po_k);
            print({{"n", po_n}, {"X", po_X}, {"gap", r.gap}, {"relative_gap", r.gap / r.ftilde1}, {"lhs", r.lhs},
                   {"rhs", r.rhs}, {"k_used", r.k_used}});
            return 0;
        }
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

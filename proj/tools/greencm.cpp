#include "greencm/basis_cache.hpp"
#include "greencm/cmformula.hpp"
#include "greencm/greeneval.hpp"
#include "greencm/maassfield.hpp"
#include "greencm/qforms.hpp"
#include "greencm/whbasis.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace greencm;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
    bool deterministic = false;
    std::string cache_dir;
    bool no_cache = false;
    std::string log_level = "warn";
    std::string data_dir = "data";
};

std::string ld_string(long double x, int digits = 15) {
    std::ostringstream os;
    os.precision(digits);
    os << std::scientific << x;
    return os.str();
}

std::string fixed_string(long double x, int digits) {
    std::ostringstream os;
    os.precision(digits);
    os << std::fixed << x;
    return os.str();
}

ordered_json numeric(const std::string& value, const std::string& tol) { return {{"value", value}, {"tolerance", tol}}; }

struct Check {
    std::string name;
    std::string expected, got, tolerance;
    bool pass = false;
};

ordered_json checks_json(const std::vector<Check>& cs) {
    ordered_json a = ordered_json::array();
    for (auto& c : cs)
        a.push_back({{"check", c.name}, {"expected", c.expected}, {"got", c.got}, {"tolerance", c.tolerance},
                     {"pass", c.pass}});
    return a;
}

Check value_check(const std::string& name, const BigReal& got, const std::string& expected, const std::string& tol) {
    PrecisionScope ps(160);
    BigReal diff = abs(got - BigReal(expected));
    return {name, expected, decimal_string(got, 13), tol, diff < BigReal(tol)};
}

Check ld_check(const std::string& name, long double got, const std::string& expected, const std::string& tol) {
    long double diff = std::fabs(got - std::stold(expected));
    return {name, expected, fixed_string(got, 12), tol, diff < std::stold(tol)};
}

std::string label_string(const std::vector<long>& l) {
    std::string s = "(";
    for (size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
    return s + ")";
}

// coefficients on table labels; scale kept separate when irrational
std::map<std::pair<Rational, std::string>, Rational> labelled(const CMSetup& s, const CoefficientFunctional& F,
                                                              const CoefficientTable& t) {
    std::map<std::pair<Rational, std::string>, Rational> out;
    for (auto& term : F.terms) {
        Rational c = term.coeff;
        if (F.scale.rad == 1) c *= F.scale.q;
        out[{term.m, label_string(t.label(t.key(functional_coordinates(s, term.mu))))}] += c;
    }
    return out;
}

ordered_json functional_json(const CMSetup& s, const CoefficientFunctional& F, const CoefficientTable* t) {
    ordered_json terms = ordered_json::array();
    for (auto& term : F.terms) {
        ordered_json mu;
        if (t) {
            mu = label_string(t->label(t->key(functional_coordinates(s, term.mu))));
        } else {
            RatVector x = functional_coordinates(s, term.mu);
            mu = ordered_json::array();
            for (Eigen::Index i = 0; i < x.size(); ++i) mu.push_back(to_string(x(i)));
        }
        terms.push_back({to_string(term.m), mu, to_string(term.coeff)});
    }
    return {{"scale", F.scale.to_string()}, {"terms", terms}};
}

// published vector check: the map must agree exactly, entry by entry
Check vector_check(const std::string& name, const std::map<std::pair<Rational, std::string>, Rational>& got,
                   const std::vector<std::tuple<Rational, std::string, Rational>>& expected, int sign = 1) {
    std::map<std::pair<Rational, std::string>, Rational> e;
    for (auto& [m, l, c] : expected) e[{m, l}] = c * sign;
    std::string mism;
    std::set<std::pair<Rational, std::string>> keys;
    for (auto& kv : got) keys.insert(kv.first);
    for (auto& kv : e) keys.insert(kv.first);
    for (auto& k : keys) {
        Rational a = got.count(k) ? got.at(k) : Rational(0);
        Rational b = e.count(k) ? e.at(k) : Rational(0);
        if (a != b) mism += " c(" + to_string(k.first) + "," + k.second + "): " + to_string(a) + " vs " + to_string(b) + ";";
    }
    auto fmt = [](const std::map<std::pair<Rational, std::string>, Rational>& m) {
        std::string s;
        for (auto& [k, v] : m) s += to_string(v) + "*c(" + to_string(k.first) + "," + k.second + ") ";
        return s;
    };
    Check c{name, fmt(e), fmt(got), "exact", mism.empty()};
    if (!mism.empty()) c.got += "| mismatch:" + mism;
    return c;
}

std::filesystem::path table_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::path p = std::filesystem::path(cfg.data_dir) / name;
    return p;
}

ordered_json run_example(const RunConfig& cfg, int n, bool direct, bool& pass) {
    std::vector<Check> checks;
    ordered_json extra;
    if (n == 1 || n == 2) {
        CoefficientTable t = load_table(table_path(cfg, "table-23.json"));
        if (n == 1) {
            CMSetup s = build_cm_setup(-23, 1, -4, 2);
            ScalarForm f = standard_input(2, 40);
            CoefficientFunctional F = formula_functional(s, f);
            CoefficientFunctional pp = per_point(s, F);
            checks.push_back(vector_check("functional for G3(i,z1)", labelled(s, pp, t),
                                          {{rat(7, 23), "(4)", rat(-25, 23)},
                                           {rat(14, 23), "(3)", rat(-4, 23)},
                                           {rat(19, 23), "(2)", rat(11, 23)},
                                           {rat(22, 23), "(1)", rat(20, 23)},
                                           {rat(1), "(0)", rat(1, 2)},
                                           {rat(-1, 23), "(1)", rat(378, 23)}}));
            BigReal v = evaluate_cm_value(s, pp, t, 128);
            checks.push_back(value_check("G3(i,(1+sqrt(-23))/2) from table", v, "-1.000394556341", "1e-10"));
            PrecisionScope ps(128);
            BigReal sum = v;
            auto moves = conjugate_moves(t);
            int k = 0;
            for (auto& mv : moves) {
                CoefficientTable u = galois_act(t, mv);
                if (mv.box.im == 0) continue;
                BigReal w = evaluate_cm_value(s, pp, u, 128);
                checks.push_back(value_check("conjugate value " + std::to_string(++k), w, "-3.854054384748", "1e-8"));
                sum += w;
            }
            checks.push_back(value_check("sum over the three CM points", sum, "-8.708503325837", "1e-8"));
            if (direct) {
                GreenResult g = green_hecke(3, 1, parse_point("i"), s.z2, 1e-9L);
                checks.push_back(ld_check("direct G3 lattice sum", g.value, "-1.000394556341", "1e-8"));
                checks.push_back(ld_check("formula vs direct", g.value, decimal_string(v, 15), "1e-8"));
                if (!cfg.deterministic) extra["direct_seconds"] = fixed_string(g.seconds, 2);
            }
        } else {
            CMSetup s4 = build_cm_setup(-23, 1, -4, 4);
            CoefficientFunctional F4 = formula_functional(s4, standard_input(4, 40));
            checks.push_back(vector_check("functional for (1/2)G5", labelled(s4, F4, t),
                                          {{rat(7, 23), "(4)", rat(493, 4232)},
                                           {rat(14, 23), "(3)", rat(447, 1058)},
                                           {rat(19, 23), "(2)", rat(613, 4232)},
                                           {rat(22, 23), "(1)", rat(-233, 1058)},
                                           {rat(1), "(0)", rat(-3, 16)},
                                           {rat(-1, 23), "(1)", rat(-5775, 2116)}}));
            checks.push_back(value_check("G5(i,z1)", evaluate_cm_value(s4, per_point(s4, F4), t, 128),
                                         "-0.0869366459199", "1e-9"));
            CMSetup s6 = build_cm_setup(-23, 1, -4, 6);
            CoefficientFunctional F6 = formula_functional(s6, standard_input(6, 40));
            std::vector<std::tuple<Rational, std::string, Rational>> printed{
                {rat(7, 23), "(4)", rat(-80659, 194672)},  {rat(14, 23), "(3)", rat(2578, 24334)},
                {rat(19, 23), "(2)", rat(60209, 194672)},  {rat(22, 23), "(1)", rat(-769, 12167)},
                {rat(1), "(0)", rat(-5, 32)},              {rat(-1, 23), "(1)", rat(-42273, 97336)}};
            Check as_printed = vector_check("functional for (1/2)G7 as printed", labelled(s6, F6, t), printed);
            Check negated = vector_check("functional for (1/2)G7 up to global sign", labelled(s6, F6, t), printed, -1);
            checks.push_back(as_printed.pass ? as_printed : negated);
            extra["j6_printed_sign_agrees"] = as_printed.pass;
            BigReal v6 = evaluate_cm_value(s6, per_point(s6, F6), t, 128);
            {
                PrecisionScope ps(128);
                BigReal rel = abs(abs(v6) - BigReal("0.0101643901834")) / BigReal("0.0101643901834");
                checks.push_back({"|G7(i,z1)|", "0.0101643901834", decimal_string(v6, 13), "2e-5 relative",
                                  rel < BigReal("2e-5")});
            }
            if (direct) {
                ScalarForm f6 = standard_input(6, 40);
                GreenResult g = green_divisor(6, f6, cm_divisor(s6), s6.z2, 1e-12L);
                long double per = g.value / cm_divisor(s6).total_weight().convert_to<long double>();
                checks.push_back(ld_check("sign of G7 from the direct sum", per, decimal_string(v6, 15), "1e-9"));
            }
        }
    } else if (n == 3) {
        CoefficientTable t = load_table(table_path(cfg, "table-63.json"));
        CMSetup s = build_cm_setup(-7, -3, 1, 1);
        ScalarForm f = standard_input(1, 40);
        CoefficientFunctional F = formula_functional(s, f);
        CoefficientFunctional pp = per_point(s, F);
        Check c = vector_check("functional for G2 (times sqrt(21)/3)", labelled(s, pp, t),
                               {{rat(-1, 21), "(1,0)", rat(-25 * 3, 21)},
                                {rat(-1, 21), "(1,1)", rat(25 * 3, 21)},
                                {rat(-1, 21), "(8,0)", rat(-25 * 3, 21)},
                                {rat(-1, 21), "(8,2)", rat(5 * 3, 21)},
                                {rat(5, 21), "(4,0)", rat(3, 21)},
                                {rat(5, 21), "(4,1)", rat(-3, 21)},
                                {rat(5, 21), "(10,0)", rat(3, 21)},
                                {rat(5, 21), "(10,1)", rat(-3, 21)}});
        // the printed prefactor is 3/sqrt(21) = sqrt(21)/7; compare rational parts against sqrt(21)
        c.tolerance = "exact, prefactor " + pp.scale.to_string();
        c.pass = c.pass && pp.scale.rad == 21 && pp.scale.q == 1;
        checks.push_back(c);
        BigReal v = evaluate_cm_value(s, pp, t, 128);
        checks.push_back(value_check("G2((1+sqrt(-3))/2,(1+sqrt(-7))/2) from table", v, "-8.786454145857", "1e-8"));
        if (direct) {
            GreenResult g = green_divisor(1, f, cm_divisor(s), s.z2, 1e-8L);
            long double w = cm_divisor(s).total_weight().convert_to<long double>();
            checks.push_back(ld_check("formula vs direct", g.value / w, decimal_string(v, 15), "1e-7"));
        }
    } else {
        throw CLI::ValidationError("example", "example number must be 1, 2 or 3");
    }
    pass = true;
    for (auto& c : checks) pass = pass && c.pass;
    ordered_json out{{"example", n}, {"checks", checks_json(checks)}, {"pass", pass}};
    for (auto& [k, v] : extra.items()) out[k] = v;
    return out;
}

int emit(const ordered_json& j, int code) {
    std::cout << j.dump(2) << std::endl;
    return code;
}

int error_out(const std::string& type, const std::string& msg, int code) {
    spdlog::error("{}", msg);
    return emit({{"error", {{"type", type}, {"message", msg}}}}, code);
}

}  // namespace

int main(int argc, char** argv) {
    auto logger = spdlog::stderr_color_mt("greencm");
    spdlog::set_default_logger(logger);

    CLI::App app{"Higher Green functions at CM points: closed formula and direct evaluation"};
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_flag("--deterministic", cfg.deterministic, "omit timings so repeated runs give identical output");
    app.add_option("--cache-dir", cfg.cache_dir, "cache directory for basis expansions (default $GREENCM_CACHE)");
    app.add_flag("--no-cache", cfg.no_cache, "disable the basis cache");
    app.add_option("--log-level", cfg.log_level, "trace, debug, info, warn, error")->capture_default_str();
    app.add_option("--data-dir", cfg.data_dir, "directory holding table-23.json and table-63.json")->capture_default_str();

    auto* ex = app.add_subcommand("example", "reproduce one of the worked examples end to end");
    int ex_n = 0;
    bool ex_skip_direct = false;
    ex->add_option("n", ex_n, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
    ex->add_flag("--skip-direct", ex_skip_direct, "skip the direct lattice-sum cross-check");

    auto* ge = app.add_subcommand("green-eval", "direct evaluation of the Hecke-translated Green function");
    double ge_s = 0, ge_tol = 1e-9;
    long ge_m = 1;
    std::string ge_z1, ge_z2;
    long long ge_heegner = 0;
    ge->add_option("--s", ge_s, "spectral parameter s > 1")->required();
    ge->add_option("--m", ge_m, "Hecke index")->capture_default_str()->check(CLI::PositiveNumber);
    ge->add_option("--z1", ge_z1, "first point: i, x+yi, x,y or (p+sqrt(-N))/q");
    ge->add_option("--z2", ge_z2, "second point")->required();
    ge->add_option("--heegner", ge_heegner, "replace z1 by the Heegner divisor C(D) of discriminant D");
    ge->add_option("--tol", ge_tol, "target tolerance")->capture_default_str()->check(CLI::PositiveNumber);

    auto* cm = app.add_subcommand("cm-formula", "closed formula: exact functional and its value");
    long long cm_d2 = 0, cm_delta = 1, cm_d1 = 0;
    long cm_j = 0, cm_order = 0;
    std::string cm_table;
    bool cm_cross = false, cm_per_point = false;
    double cm_tol = 1e-8;
    int cm_conj = -1;
    cm->add_option("--d2", cm_d2)->required();
    cm->add_option("--delta", cm_delta)->capture_default_str();
    cm->add_option("--d1", cm_d1)->required();
    cm->add_option("--j", cm_j)->required()->check(CLI::PositiveNumber);
    cm->add_option("--order", cm_order, "scalar series order for the lift (0 = automatic)");
    cm->add_option("--table", cm_table, "coefficient table (JSON)");
    cm->add_flag("--per-point", cm_per_point, "divide by the total weight of the CM divisor");
    cm->add_option("--conjugate", cm_conj, "evaluate at the table's k-th conjugate embedding");
    cm->add_flag("--crosscheck", cm_cross, "compare against the direct lattice sum");
    cm->add_option("--tol", cm_tol, "cross-check tolerance")->capture_default_str()->check(CLI::PositiveNumber);

    auto* sv = app.add_subcommand("survey-classgroups", "count fundamental discriminants with class group exponent <= 2");
    long long sv_bound = 1000;
    sv->add_option("--bound", sv_bound, "|D| < bound")->capture_default_str()->check(CLI::PositiveNumber);

    auto* bs = app.add_subcommand("basis", "plus-space basis and Zagier lifts");
    long bs_j = 2, bs_depth = 4, bs_order = 24;
    long long bs_lift = 0;
    bs->add_option("--j", bs_j, "weight 1/2 - j")->capture_default_str();
    bs->add_option("--depth", bs_depth, "pole order bound (scalar exponents)")->capture_default_str();
    bs->add_option("--order", bs_order, "coefficients below this scalar exponent")->capture_default_str();
    bs->add_option("--lift", bs_lift, "instead print the Zagier lift of the standard input by this discriminant");

    auto* tv = app.add_subcommand("table-validate", "load and validate a coefficient table");
    std::string tv_path;
    tv->add_option("path", tv_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    spdlog::set_level(spdlog::level::from_str(cfg.log_level));
    if (!cfg.cache_dir.empty()) set_cache_dir(cfg.cache_dir);
    if (cfg.no_cache) set_cache_enabled(false);
    auto t0 = std::chrono::steady_clock::now();
    auto timing = [&](ordered_json& j) {
        if (!cfg.deterministic)
            j["seconds"] = fixed_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3);
    };

    // malformed points are usage errors
    auto point = [](const std::string& opt, const std::string& text) {
        try {
            return parse_point(text);
        } catch (const MathError& e) {
            throw CLI::ValidationError(opt, e.what());
        }
    };

    try {
        if (*ex) {
            bool pass = false;
            ordered_json out = run_example(cfg, ex_n, !ex_skip_direct, pass);
            timing(out);
            return emit(out, pass ? 0 : 1);
        }
        if (*ge) {
            if (ge_s <= 1) throw CLI::ValidationError("--s", "s must exceed 1");
            UHPoint z2 = point("--z2", ge_z2);
            GreenResult r;
            ordered_json in{{"s", fixed_string(ge_s, 6)}, {"m", ge_m}, {"z2", ge_z2}, {"tol", ld_string(ge_tol, 3)}};
            if (ge_heegner != 0) {
                HeegnerDivisor div = heegner_divisor(ge_heegner);
                long double acc = 0, cert = 0;
                for (auto& [w, p] : div.terms) {
                    long double wv = static_cast<long double>(w.convert_to<double>());
                    GreenResult g = green_hecke(ge_s, ge_m, UHPoint::from_form(p.form), z2, ge_tol / (div.terms.size() + 1));
                    acc += wv * g.value;
                    cert += std::fabs(wv) * g.certified_tol;
                    r.terms += g.terms;
                }
                r.value = acc;
                r.certified_tol = cert;
                in["heegner"] = ge_heegner;
            } else {
                if (ge_z1.empty()) throw CLI::RequiredError("--z1 or --heegner");
                r = green_hecke(ge_s, ge_m, point("--z1", ge_z1), z2, ge_tol);
                in["z1"] = ge_z1;
            }
            ordered_json out{{"inputs", in},
                             {"value", fixed_string(r.value, 13)},
                             {"certified_tol", ld_string(std::max(r.certified_tol, 1e-15L), 3)},
                             {"terms", r.terms}};
            timing(out);
            return emit(out, 0);
        }
        if (*cm) {
            CMSetup s = build_cm_setup(cm_d2, cm_delta, cm_d1, cm_j);
            ScalarForm f = standard_input(cm_j, 40);
            std::optional<CoefficientTable> t;
            if (!cm_table.empty()) {
                t = load_table(cm_table);
                if (auto lo = t->smallest_index()) s.vmin = std::min(s.vmin, *lo);
            }
            CoefficientFunctional F = formula_functional(s, f, cm_order);
            CoefficientFunctional shown = cm_per_point ? per_point(s, F) : F;
            ordered_json out{{"inputs",
                              {{"d2", cm_d2}, {"delta", cm_delta}, {"d1", cm_d1}, {"j", cm_j}, {"per_point", cm_per_point}}},
                             {"functional", functional_json(s, shown, t ? &*t : nullptr)}};
            bool ok = true;
            if (t) {
                CoefficientTable used = *t;
                if (cm_conj >= 0) {
                    auto moves = conjugate_moves(*t);
                    if (cm_conj >= static_cast<int>(moves.size()))
                        throw CLI::ValidationError("--conjugate", "index exceeds the field degree");
                    used = galois_act(*t, moves[static_cast<size_t>(cm_conj)]);
                    out["conjugate"] = cm_conj;
                }
                BigReal v = evaluate_cm_value(s, shown, used, 128);
                out["value"] = numeric(decimal_string(v, 15), "1e-30");
                if (cm_cross) {
                    if (cm_conj >= 0) throw CLI::ValidationError("--crosscheck", "only available at the pinned embedding");
                    const long double w = cm_per_point ? cm_divisor(s).total_weight().convert_to<long double>() : 1.0L;
                    CrossCheck c = crosscheck_direct(s, f, used, static_cast<long double>(cm_tol) * w, F);
                    PrecisionScope ps(128);
                    out["crosscheck"] = {{"formula", decimal_string(c.formula / BigReal(static_cast<double>(w)), 15)},
                                         {"direct", numeric(fixed_string(c.direct / w, 13), ld_string(c.direct_tol / w, 3))},
                                         {"difference", ld_string(c.difference / w, 3)},
                                         {"tolerance", ld_string(cm_tol, 3)},
                                         {"pass", c.pass}};
                    ok = c.pass;
                }
            }
            timing(out);
            return emit(out, ok ? 0 : 1);
        }
        if (*sv) {
            auto [fields, good] = exponent2_survey(sv_bound);
            ordered_json out{{"bound", sv_bound}, {"fields", fields}, {"exponent2_or_trivial", good}};
            timing(out);
            return emit(out, 0);
        }
        if (*bs) {
            ordered_json out;
            if (bs_lift != 0) {
                ZagierLift z = zagier_lift(standard_input(bs_j, bs_order), bs_lift, bs_j, bs_order);
                ordered_json cs = ordered_json::object();
                for (auto& [e, c] : z.cleared.scalar.terms()) cs[to_string(e)] = to_string(c);
                out = {{"j", bs_j}, {"d", bs_lift}, {"prefactor", z.prefactor.to_string()}, {"coefficients", cs}};
            } else {
                PlusBasis b = plus_space_basis(bs_j, bs_depth, bs_order);
                ordered_json forms = ordered_json::array();
                for (auto& pf : b.forms) {
                    ordered_json cs = ordered_json::object();
                    for (auto& [e, c] : pf.scalar.terms()) cs[to_string(e)] = to_string(c);
                    forms.push_back({{"pivot", pf.pivot}, {"coefficients", cs}});
                }
                out = {{"j", bs_j}, {"depth", bs_depth}, {"order", bs_order}, {"A", b.A}, {"forms", forms},
                       {"cache", cache_file(bs_j, bs_depth, bs_order).string()}};
            }
            timing(out);
            return emit(out, 0);
        }
        if (*tv) {
            CoefficientTable t = load_table(tv_path);
            ordered_json es = ordered_json::array();
            for (auto& [k, a] : t.entries) {
                ordered_json alpha = ordered_json::array();
                for (auto& c : a.coordinates()) alpha.push_back(to_string(c));
                es.push_back({{"m", to_string(k.first)},
                              {"mu", label_string(t.label(k.second))},
                              {"alpha", alpha},
                              {"c", numeric(decimal_string(maass_coefficient(t, k.first, k.second, 128), 15), "1e-30")}});
            }
            ordered_json out{{"valid", true},
                             {"degree", t.field->degree()},
                             {"r", t.r},
                             {"discriminant_group", t.group->orders()},
                             {"entries", es},
                             {"provenance", t.provenance}};
            return emit(out, 0);
        }
    } catch (const CLI::Error& e) {
        return error_out("usage", e.what(), 2);
    } catch (const SingularityError& e) {
        return error_out("singularity", e.what(), 1);
    } catch (const TableIncomplete& e) {
        return error_out("table_incomplete", e.what(), 1);
    } catch (const MathError& e) {
        return error_out("math", e.what(), 1);
    } catch (const std::exception& e) {
        return error_out("internal", e.what(), 1);
    }
    return 2;
}

#include "greencm/basis_cache.hpp"
#include "greencm/cmformula.hpp"
#include "greencm/greeneval.hpp"
#include "greencm/maassfield.hpp"
#include "greencm/qforms.hpp"
#include "greencm/whbasis.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

using namespace greencm;

namespace {

// tolerances, pinned
constexpr const char* kTolValue1 = "1e-10";
constexpr long double kTolCross1 = 1e-8L;
constexpr long double kTolDirect1 = 1e-9L;
constexpr double kBudgetDirect1 = 60.0;
constexpr double kBudgetFunctional1 = 10.0;
constexpr const char* kTolConj = "1e-8";
constexpr const char* kTolValue4 = "1e-9";
constexpr const char* kTolRel6 = "2e-5";
constexpr const char* kTolValue3 = "1e-8";
constexpr const char* kTolClosed3 = "1e-9";
constexpr long double kTolCross3 = 1e-7L;
constexpr double kBudgetSurvey = 10.0;
constexpr const char* kTolLegendre = "1e-20";
constexpr const char* kTolHypid = "1e-12";
constexpr long double kTolPhi = 1e-8L;
constexpr long double kTolInvariance = 1e-9L;
constexpr const char* kTolTable = "1e-11";

const std::string kData = std::string(GREENCM_SOURCE_DIR) + "/data/";

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const BigReal& x, int d = 13) { return decimal_string(x, d); }
std::string fmt_ld(long double x, int d = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*Lf", d, x);
    return buf;
}

bool close(const BigReal& a, const std::string& b, const std::string& tol) {
    PrecisionScope ps(160);
    return abs(a - BigReal(b)) < BigReal(tol);
}

using Entry = std::tuple<Rational, std::vector<long>, Rational>;

// coefficient vector on table labels; the rational part of the scale is folded in when the scale is rational
std::map<std::pair<Rational, std::vector<long>>, Rational> on_labels(const CMSetup& s, const CoefficientFunctional& F,
                                                                     const CoefficientTable& t) {
    std::map<std::pair<Rational, std::vector<long>>, Rational> out;
    for (auto& term : F.terms) {
        Rational c = term.coeff;
        if (F.scale.rad == 1) c *= F.scale.q;
        out[{term.m, t.label(t.key(functional_coordinates(s, term.mu)))}] += c;
    }
    return out;
}

std::string label_str(const std::vector<long>& l) {
    std::string r = "(";
    for (size_t i = 0; i < l.size(); ++i) r += (i ? "," : "") + std::to_string(l[i]);
    return r + ")";
}

// exact comparison; mismatches are listed
bool same_vector(const std::map<std::pair<Rational, std::vector<long>>, Rational>& got, const std::vector<Entry>& want,
                 int sign, std::vector<std::string>* diffs) {
    std::map<std::pair<Rational, std::vector<long>>, Rational> w;
    for (auto& [m, l, c] : want) w[{m, l}] = c * sign;
    std::set<std::pair<Rational, std::vector<long>>> keys;
    for (auto& kv : got) keys.insert(kv.first);
    for (auto& kv : w) keys.insert(kv.first);
    bool ok = true;
    for (auto& k : keys) {
        Rational a = got.count(k) ? got.at(k) : Rational(0), b = w.count(k) ? w.at(k) : Rational(0);
        if (a != b) {
            ok = false;
            if (diffs)
                diffs->push_back("c(" + to_string(k.first) + "," + label_str(k.second) + "): got " + to_string(a) +
                                 ", printed " + to_string(b));
        }
    }
    return ok;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Outcome o;
    // cold cache, so the timing includes the basis construction
    auto dir = std::filesystem::temp_directory_path() / "greencm-acceptance-cold";
    std::filesystem::remove_all(dir);
    set_cache_dir(dir);
    auto t0 = std::chrono::steady_clock::now();
    CMSetup s = build_cm_setup(-23, 1, -4, 2);
    CoefficientFunctional pp = per_point(s, formula_functional(s, standard_input(2, 40)));
    double secs = seconds_since(t0);
    CoefficientTable t = load_table(kData + "table-23.json");
    std::vector<Entry> want{{rat(7, 23), {4}, rat(-25, 23)},  {rat(14, 23), {3}, rat(-4, 23)},
                            {rat(19, 23), {2}, rat(11, 23)},  {rat(22, 23), {1}, rat(20, 23)},
                            {rat(1), {0}, rat(1, 2)},         {rat(-1, 23), {1}, rat(378, 23)}};
    std::vector<std::string> diffs;
    o.require(same_vector(on_labels(s, pp, t), want, 1, &diffs), "exact vector");
    for (auto& d : diffs) o.note(d);
    o.require(secs < kBudgetFunctional1, "time budget");
    o.note("functional built in " + fmt_ld(secs, 2) + " s (cold cache)");
    std::filesystem::remove_all(dir);
    set_cache_dir(std::filesystem::path());
    return o;
}

Outcome criterion2() {
    Outcome o;
    CMSetup s = build_cm_setup(-23, 1, -4, 2);
    CoefficientTable t = load_table(kData + "table-23.json");
    ScalarForm f = standard_input(2, 40);
    CoefficientFunctional pp = per_point(s, formula_functional(s, f));
    BigReal v = evaluate_cm_value(s, pp, t, 128);
    o.require(close(v, "-1.000394556341", kTolValue1), "value " + fmt(v));
    o.note("formula " + fmt(v));

    CrossCheck c = crosscheck_direct(s, f, t, kTolCross1);
    o.require(c.pass && std::fabs(c.difference) < kTolCross1, "crosscheck");
    o.note("crosscheck difference " + fmt_ld(std::fabs(c.difference), 15));

    auto t0 = std::chrono::steady_clock::now();
    GreenResult g = green_hecke(3, 1, parse_point("i"), s.z2, kTolDirect1);
    double secs = seconds_since(t0);
    o.require(secs <= kBudgetDirect1, "direct evaluation time");
    o.require(std::fabs(g.value - (-1.000394556341L)) < 10 * kTolDirect1, "direct value " + fmt_ld(g.value));
    o.note("direct " + fmt_ld(g.value) + " in " + fmt_ld(secs, 2) + " s");
    return o;
}

Outcome criterion3() {
    Outcome o;
    CMSetup s = build_cm_setup(-23, 1, -4, 2);
    CoefficientTable t = load_table(kData + "table-23.json");
    CoefficientFunctional pp = per_point(s, formula_functional(s, standard_input(2, 40)));
    PrecisionScope ps(160);
    BigReal sum = evaluate_cm_value(s, pp, t, 128);
    int n = 0;
    for (auto& mv : conjugate_moves(t)) {
        if (mv.box.im == 0) continue;
        BigReal w = evaluate_cm_value(s, pp, galois_act(t, mv), 128);
        o.require(close(w, "-3.854054384748", kTolConj), "conjugate value " + fmt(w));
        sum += w;
        ++n;
    }
    o.require(n == 2, "two complex conjugate embeddings");
    o.require(close(sum, "-8.708503325837", kTolConj), "sum " + fmt(sum));

    // -(1/23) log(11^80 19^22 23^23 / 7^66) with the rational field
    auto Q = std::make_shared<NumberField>(std::vector<Integer>{0, 1}, EmbeddingBox{0, 0, 1});
    Integer num = pow(Integer(11), 80) * pow(Integer(19), 22) * pow(Integer(23), 23);
    Rational beta(num, pow(Integer(7), 66));
    BigReal closed = -nf_log_abs(NFElem::from_rational(Q, beta), 160) / 23;
    o.require(abs(sum - closed) < BigReal(kTolConj), "sum against the closed form " + fmt(closed));
    o.note("sum " + fmt(sum) + ", closed form " + fmt(closed));
    return o;
}

Outcome criterion4() {
    Outcome o;
    CMSetup s = build_cm_setup(-23, 1, -4, 4);
    CoefficientTable t = load_table(kData + "table-23.json");
    CoefficientFunctional F = formula_functional(s, standard_input(4, 40));
    std::vector<Entry> want{{rat(7, 23), {4}, rat(493, 4232)},  {rat(14, 23), {3}, rat(447, 1058)},
                            {rat(19, 23), {2}, rat(613, 4232)}, {rat(22, 23), {1}, rat(-233, 1058)},
                            {rat(1), {0}, rat(-3, 16)},         {rat(-1, 23), {1}, rat(-5775, 2116)}};
    std::vector<std::string> diffs;
    o.require(same_vector(on_labels(s, F, t), want, 1, &diffs), "exact vector");
    for (auto& d : diffs) o.note(d);
    BigReal v = evaluate_cm_value(s, per_point(s, F), t, 128);
    o.require(close(v, "-0.0869366459199", kTolValue4), "value " + fmt(v));
    o.note("G5 " + fmt(v));
    return o;
}

Outcome criterion5() {
    Outcome o;
    CMSetup s = build_cm_setup(-23, 1, -4, 6);
    CoefficientTable t = load_table(kData + "table-23.json");
    ScalarForm f = standard_input(6, 40);
    CoefficientFunctional F = formula_functional(s, f);
    std::vector<Entry> printed{{rat(7, 23), {4}, rat(-80659, 194672)}, {rat(14, 23), {3}, rat(2578, 24334)},
                               {rat(19, 23), {2}, rat(60209, 194672)}, {rat(22, 23), {1}, rat(-769, 12167)},
                               {rat(1), {0}, rat(-5, 32)},             {rat(-1, 23), {1}, rat(-42273, 97336)}};
    auto got = on_labels(s, F, t);
    bool as_printed = same_vector(got, printed, 1, nullptr);
    bool negated = same_vector(got, printed, -1, nullptr);
    o.require(as_printed || negated, "vector up to global sign");
    if (!as_printed && negated) o.note("sign flag: the computed vector is the negative of the printed one");

    BigReal v = evaluate_cm_value(s, per_point(s, F), t, 128);
    {
        PrecisionScope ps(160);
        BigReal ref("0.0101643901834");
        o.require(abs(abs(v) - ref) / ref < BigReal(kTolRel6), "|value| " + fmt(v));
    }
    CrossCheck c = crosscheck_direct(s, f, t, 1e-10L, F);
    o.require(c.pass, "direct sum settles the sign");
    bool printed_value_sign = v < 0;
    o.note("G7 " + fmt(v) + ", direct " + fmt_ld(c.direct / cm_divisor(s).total_weight().convert_to<long double>(), 13) +
           (printed_value_sign ? ", sign agrees with the printed value" : ", sign differs from the printed value"));
    return o;
}

Outcome criterion6() {
    Outcome o;
    CMSetup s = build_cm_setup(-7, -3, 1, 1);
    CoefficientTable t = load_table(kData + "table-63.json");
    ScalarForm f = standard_input(1, 40);
    CoefficientFunctional F = formula_functional(s, f);
    CoefficientFunctional pp = per_point(s, F);
    // printed: (3/sqrt(21)) * (...) = sqrt(21) * (...)/7
    std::vector<Entry> want{{rat(-1, 21), {1, 0}, rat(-25, 7)}, {rat(-1, 21), {1, 1}, rat(25, 7)},
                            {rat(-1, 21), {8, 0}, rat(-25, 7)}, {rat(-1, 21), {8, 2}, rat(5, 7)},
                            {rat(5, 21), {4, 0}, rat(1, 7)},    {rat(5, 21), {4, 1}, rat(-1, 7)},
                            {rat(5, 21), {10, 0}, rat(1, 7)},   {rat(5, 21), {10, 1}, rat(-1, 7)}};
    std::vector<std::string> diffs;
    bool vec = pp.scale.rad == 21 && pp.scale.q == 1 && same_vector(on_labels(s, pp, t), want, 1, &diffs);
    o.require(vec, "exact vector with prefactor 3/sqrt(21)");
    for (auto& d : diffs) o.note(d);

    BigReal v = evaluate_cm_value(s, pp, t, 128);
    o.require(close(v, "-8.786454145857", kTolValue3), "value " + fmt(v));

    auto K = std::make_shared<NumberField>(std::vector<Integer>{-21, 0, 1},
                                           EmbeddingBox{parse_rational("4.58"), 0, parse_rational("0.01")});
    NFElem a = NFElem(K, {Rational(32), Rational(7)}).pow(4) * NFElem::from_rational(K, rat(1, 25));
    PrecisionScope ps(160);
    BigReal closed = -3 / sqrt(BigReal(21)) * nf_log_abs(a, 160);
    o.require(abs(v - closed) < BigReal(kTolClosed3), "closed form " + fmt(closed));

    CrossCheck c = crosscheck_direct(s, f, t, kTolCross3 / 4, F);
    long double w = cm_divisor(s).total_weight().convert_to<long double>();
    long double diff = std::fabs(c.direct / w - v.convert_to<long double>());
    o.require(diff < kTolCross3, "crosscheck");
    o.note("G2 " + fmt(v) + ", closed form " + fmt(closed) + ", direct " + fmt_ld(c.direct / w));
    return o;
}

Outcome criterion7() {
    Outcome o;
    ZagierLift z = zagier_lift(standard_input(2, 10), -4, 2, 24);
    // 4 Za = cleared series, prefactor 1/4
    o.require(z.prefactor.rad == 1 && z.prefactor.q == rat(1, 4), "prefactor of Za^2_{-4}");
    std::vector<std::pair<long, long>> printed4{{-4, 1}, {0, -126}, {1, -1248}, {4, -263832}, {5, -666664}};
    for (long e = -4; e < 6; ++e) {
        Rational want = 0;
        for (auto& [pe, c] : printed4)
            if (pe == e) want = c;
        Rational got = z.cleared.scalar.get(e);
        if (got != want) {
            o.require(false, "4Za^2_{-4}: q^" + std::to_string(e));
            o.note("q^" + std::to_string(e) + ": got " + to_string(got) + ", printed " + to_string(want));
        }
    }
    ZagierLift z1 = zagier_lift(standard_input(1, 10), 1, 1, 24);
    o.require(z1.prefactor.rad == 1 && z1.prefactor.q == 1, "prefactor of Za^1_1");
    std::vector<std::pair<long, long>> printed1{{-1, 1},  {0, 10},     {3, -64},   {4, 108},   {7, -513},
                                                {8, 808}, {11, -2752}, {12, 4016}, {15, -11775}};
    for (long e = -1; e < 16; ++e) {
        Rational want = 0;
        for (auto& [pe, c] : printed1)
            if (pe == e) want = c;
        Rational got = z1.cleared.scalar.get(e);
        if (got != want) {
            o.require(false, "Za^1_1: q^" + std::to_string(e));
            o.note("Za^1_1 q^" + std::to_string(e) + ": got " + to_string(got) + ", printed " + to_string(want));
        }
    }
    return o;
}

Outcome criterion8() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    auto [fields, good] = exponent2_survey(1000);
    double secs = seconds_since(t0);
    o.require(fields == 305 && good == 52, "(" + std::to_string(fields) + ", " + std::to_string(good) + ")");
    o.require(secs <= kBudgetSurvey, "time budget");
    o.note("(" + std::to_string(fields) + ", " + std::to_string(good) + ") in " + fmt_ld(secs, 3) + " s");
    return o;
}

UHPoint act(long long a, long long b, long long c, long long d, const UHPoint& z) {
    long double den = (c * z.x + d) * (c * z.x + d) + c * c * z.y * z.y;
    long double x = ((a * z.x + b) * (c * z.x + d) + a * c * z.y * z.y) / den;
    return UHPoint{x, z.y / den, std::nullopt};
}

Outcome criterion9() {
    Outcome o;
    // duality on the full computed rectangle
    for (long j : {0L, 1L}) {
        DualityBases D = duality_bases(j, 44, 48);
        std::set<long> ms, ns;
        long bad = 0;
        for (auto& f : D.f.forms)
            for (auto& g : D.g.forms) {
                long m = -f.pivot, n = -g.pivot;
                if (m >= D.g.order || n >= D.f.order) continue;
                ms.insert(m);
                ns.insert(n);
                if (D.a(m, n) != -D.b(n, m)) ++bad;
            }
        o.require(bad == 0, "duality for j = " + std::to_string(j));
        o.require(ms.size() >= 20 && ns.size() >= 20, "rectangle size for j = " + std::to_string(j));
        o.note("duality j=" + std::to_string(j) + ": " + std::to_string(ms.size()) + "x" + std::to_string(ns.size()));
    }

    {
        PrecisionScope ps(192);
        BigReal worst = 0;
        for (long s = 2; s <= 7; ++s)
            for (const char* t : {"1.01", "1.5", "3", "10", "100"}) {
                BigReal a = legendre_q(BigReal(s), BigReal(t), 160), b = legendre_q_closed(s - 1, BigReal(t), 160);
                BigReal d = abs(a - b);
                if (d > worst) worst = d;
            }
        o.require(worst < BigReal(kTolLegendre), "Legendre paths");
        o.note("Legendre max difference " + decimal_string(worst, 30));
    }

    {
        PrecisionScope ps(160);
        std::mt19937 rng(20240601);
        std::uniform_real_distribution<double> S(1.3, 4.0), X(0.01, 0.9);
        BigReal worst = 0;
        for (int k = 0; k < 50; ++k) {
            BigReal s = BigReal(S(rng)), x = BigReal(X(rng));
            BigReal lhs = pow(x, s - BigReal(0.25)) * gauss_2f1(s - BigReal(0.25), s + BigReal(0.25), 2 * s, x, 128);
            BigReal rhs = pow(BigReal(2), BigReal(1.5) - 2 * s) * tgamma(4 * s - 1) /
                          pow(tgamma(2 * s - BigReal(0.5)), 2) * legendre_q(2 * s - BigReal(0.5), 1 / sqrt(x), 128);
            BigReal d = abs(lhs - rhs);
            if (d > worst) worst = d;
        }
        o.require(worst < BigReal(kTolHypid), "quadratic transformation");
    }

    {
        std::vector<std::pair<UHPoint, long double>> samples{{{0.1L, 1.3L, std::nullopt}, 2.0L},
                                                             {{-0.3L, 0.98L, std::nullopt}, 2.5L},
                                                             {{0.45L, 2.1L, std::nullopt}, 3.0L},
                                                             {{0.0L, 1.7L, std::nullopt}, 2.25L},
                                                             {{0.27L, 1.05L, std::nullopt}, 4.0L}};
        HeegnerDivisor C = heegner_divisor(-23);
        long double worst = 0;
        for (auto& [z, s] : samples) {
            long double p = phi_m_mu(z, s, rat(23, 4), 1, kTolPhi / 10).value;
            long double G = 0;
            for (auto& [w, pt] : C.terms)
                G += w.convert_to<long double>() *
                     green_hecke(2 * s - 0.5L, 1, z, UHPoint::from_form(pt.form), kTolPhi / 20).value;
            // Z(m, mu) = 2 C(-23)
            worst = std::max(worst, std::fabs(p - (-2 / std::tgamma(s + 0.25L)) * 2 * G));
        }
        o.require(worst < kTolPhi, "Phi against G");
        o.note("Phi vs G max difference " + fmt_ld(worst, 14));
    }

    {
        std::mt19937 rng(77);
        UHPoint z1{0.13L, 1.21L, std::nullopt}, z2{-0.31L, 0.97L, std::nullopt};
        const long double base = green_hecke(3, 1, z1, z2, kTolInvariance).value;
        std::uniform_int_distribution<long long> H(-20, 20);
        long double worst = 0;
        int done = 0;
        while (done < 10) {
            long long a = H(rng), b = H(rng), c = H(rng);
            if (a == 0 || (1 + b * c) % a) continue;
            long long d = (1 + b * c) / a;
            if (std::llabs(d) > 20) continue;
            worst = std::max(worst, std::fabs(green_hecke(3, 1, act(a, b, c, d, z1), z2, kTolInvariance).value - base));
            ++done;
        }
        std::uniform_real_distribution<double> X(-0.5, 0.5), Y(0.9, 2.0);
        for (int k = 0; k < 5; ++k) {
            UHPoint p{X(rng), Y(rng), std::nullopt}, q{X(rng), Y(rng), std::nullopt};
            worst = std::max(worst, std::fabs(green_hecke(3, 1, p, q, kTolInvariance).value -
                                              green_hecke(3, 1, q, p, kTolInvariance).value));
        }
        o.require(worst < 2 * kTolInvariance, "invariance and symmetry");
        o.note("invariance/symmetry max difference " + fmt_ld(worst, 14));
    }
    return o;
}

Outcome criterion10() {
    Outcome o;
    struct Row {
        const char* file;
        Rational m;
        std::vector<long> label;
        const char* value;
    };
    std::vector<Row> rows{
        {"table-23.json", rat(7, 23), {4}, "-0.153173096659"},   {"table-23.json", rat(11, 23), {9}, "-1.563265867556"},
        {"table-23.json", rat(14, 23), {3}, "-1.489050606868"},  {"table-23.json", rat(19, 23), {2}, "-3.770909708871"},
        {"table-23.json", rat(22, 23), {1}, "-6.04452042127"},   {"table-23.json", rat(1), {0}, "-7.218353704778"},
        {"table-23.json", rat(-1, 23), {1}, "0.562399148646"},   {"table-63.json", rat(-1, 21), {1, 0}, "0.692410519993"},
        {"table-63.json", rat(-1, 21), {1, 1}, "0"},             {"table-63.json", rat(-1, 21), {8, 0}, "-0.170144107668"},
        {"table-63.json", rat(-1, 21), {8, 2}, "0"},             {"table-63.json", rat(5, 21), {4, 0}, "0.255860917422"},
        {"table-63.json", rat(5, 21), {4, 1}, "-0.582934829024"}, {"table-63.json", rat(5, 21), {10, 0}, "-1.786600671916"},
        {"table-63.json", rat(5, 21), {10, 1}, "-0.582934829024"}};
    std::map<std::string, CoefficientTable> tables;
    for (auto& r : rows) {
        if (!tables.count(r.file)) tables.emplace(r.file, load_table(kData + r.file));
        const CoefficientTable& t = tables.at(r.file);
        BigReal v = maass_coefficient(t, r.m, t.key_from_generators(r.label), 128);
        // recompute at doubled precision
        BigReal v2 = maass_coefficient(t, r.m, t.key_from_generators(r.label), 256);
        PrecisionScope ps(256);
        bool ok = close(v, r.value, kTolTable) && abs(v - v2) < BigReal("1e-30");
        o.require(ok, "c(" + to_string(r.m) + "," + label_str(r.label) + ") = " + fmt(v) + " vs " + r.value);
    }
    o.note(std::to_string(rows.size()) + " table entries checked");
    return o;
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Example 1 coefficient vector", criterion1},
        {"Example 1 value, cross-check and direct evaluation", criterion2},
        {"Example 1 conjugate values and average", criterion3},
        {"Example 2 (j = 4) vector and value", criterion4},
        {"Example 2 (j = 6) vector up to sign and |value|", criterion5},
        {"Example 3 vector, value, closed form and cross-check", criterion6},
        {"Zagier lift expansions", criterion7},
        {"class group exponent survey", criterion8},
        {"property suites", criterion9},
        {"table fidelity", criterion10}};
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        double secs = seconds_since(t0);
        if (!o.pass) ++failed;
        std::printf("%s %zu %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs);
        for (auto& n : o.notes) std::printf("    %s\n", n.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

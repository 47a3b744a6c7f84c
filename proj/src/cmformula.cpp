#include "greencm/cmformula.hpp"

#include <cmath>

namespace greencm {

namespace {

RatVector vec3(const Rational& a, const Rational& b, const Rational& c) {
    RatVector v(3);
    v << a, b, c;
    return v;
}

LatticeInV lattice_from_columns(const std::vector<RatVector>& cols, long long scale) {
    RatMatrix B(3, static_cast<Eigen::Index>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = cols[i];
    return make_lattice_in_v(B, scale);
}

// G+ on one component: sum over v = Q(beta) mod 1, vmin <= v < trunc, of c(v, beta) q^v
QSeries<LinForm> unknown_series(const DiscGroup& N, const RatVector& beta, const Rational& vmin, const Rational& trunc) {
    const Rational qb = frac_part(N.lattice().Q(beta));
    const DiscVector key = N.fold(N.reduce(beta));
    long d = lcm_ll(lcm_ll(to_ll(denom(qb)), to_ll(denom(vmin))), to_ll(denom(trunc)));
    long lo = static_cast<long>(to_ll(vmin * d));
    long hi = static_cast<long>(to_ll(trunc * d));
    QSeries<LinForm> g(d, lo, hi);
    Rational first = qb + floor_rat(vmin - qb);
    if (first < vmin) first += 1;
    for (Rational v = first; v < trunc; v += 1) g.at(static_cast<long>(to_ll(v * d))) = LinForm::unknown(v, key);
    return g;
}

}  // namespace

CMSetup build_cm_setup(long long d2, long long delta, long long d1, long j) {
    if (j < 1) throw MathError("cm setup: j must be a positive integer");
    if (d2 >= 0 || (((d2 % 4) + 4) % 4 != 0 && ((d2 % 4) + 4) % 4 != 1))
        throw MathError("cm setup: d2 must be a negative discriminant");
    if (!is_fundamental_discriminant(delta)) throw MathError("cm setup: Delta must be a fundamental discriminant");
    if (!is_fundamental_discriminant(d1)) throw MathError("cm setup: d1 must be a fundamental discriminant");
    const int sj = j % 2 ? -1 : 1;
    if (sj * d1 >= 0) throw MathError("cm setup: need (-1)^j d1 < 0");
    if (sj * delta <= 0) throw MathError("cm setup: need (-1)^j Delta > 0");

    CMSetup s;
    s.d2 = d2;
    s.r2 = static_cast<int>(((d2 % 2) + 2) % 2);
    s.delta = delta;
    s.r = static_cast<int>(((delta % 2) + 2) % 2);
    s.d1 = d1;
    s.j = j;
    s.m1 = rat(std::llabs(d1), 4);

    const Rational r2(s.r2);
    s.x2 = vec3(-1, r2, rat(d2 - s.r2 * s.r2, 4));
    RatVector pbasis = s.x2 * rat(2, 2 - s.r2);
    RatVector e1 = vec3(0, 2, -r2);
    RatVector e2 = vec3(-1, 0, rat(s.r2 * s.r2 - d2, 4));

    s.L = level1_lattice();
    s.LDelta = rescale_lattice(s.L, delta);
    s.P0 = lattice_from_columns({pbasis}, 1);
    s.N0 = lattice_from_columns({e1, e2}, 1);
    s.P = rescale_lattice(s.P0, delta);
    s.N = rescale_lattice(s.N0, delta);
    const Rational D(delta);
    s.M = lattice_from_columns({pbasis * D, e1 * D, e2 * D}, std::llabs(delta));
    s.Pgroup = std::make_shared<DiscGroup>(s.P.lattice);
    s.Ngroup = std::make_shared<DiscGroup>(s.N.lattice);
    s.Mgroup = std::make_shared<DiscGroup>(s.M.lattice);

    s.z2_form = BQF{1, -s.r2, (s.r2 * s.r2 - d2) / 4};
    s.z2 = UHPoint::from_form(s.z2_form);
    s.vmin = -rat(1, std::llabs(d2 * delta));
    return s;
}

CoefficientFunctional formula_functional(const CMSetup& s, const ScalarForm& f, long order) {
    if (order <= 0) order = 16;
    ZagierLift za = zagier_lift(f, s.d1, s.j, order);
    CoefficientFunctional out;
    out.scale = za.prefactor;
    const Rational zt = za.cleared.scalar.trunc_order() / 4;
    out.trunc = zt;
    if (za.cleared.scalar.is_zero_series()) return out;
    if (zt <= -s.vmin) throw MathError("formula_functional: series order too low, need order > " + to_string(-4 * s.vmin));

    // vector valued lift on M_Delta
    PsiMap psi = psi_delta(s.L, s.delta, s.r);
    VVSeries<Rational> zl = psi.apply(za.cleared.vector_avatar());
    VVSeries<Rational> zm = restrict_to_sublattice(zl, psi.target, s.M, s.Mgroup);

    Rational nmin = 0;
    for (auto& [mu, ser] : zm.comp)
        if (!ser.is_zero_series()) nmin = std::min(nmin, rat(ser.valuation_num(), ser.den()));
    const Rational tb = -nmin + 1;

    const bool odd = s.j % 2 != 0;
    ThetaSeries th = odd ? theta_weight32(s.P, s.x2, tb, s.Pgroup) : theta_series(s.P.lattice, tb, s.Pgroup);
    const long idx = odd ? (s.j - 1) / 2 : s.j / 2;
    out.scale = out.scale * th.scale;

    VVSeries<LinForm> br{s.Mgroup, {}, tb};
    for (auto& [mu, ser] : zm.comp) {
        if (ser.is_zero_series()) continue;
        RatVector x = s.Mgroup->lift(mu);
        RatVector a(1), b(2);
        a(0) = x(0);
        b << x(1), x(2);
        QSeries<Rational> ta = th.series.component(s.Pgroup->reduce(a));
        if (ta.is_zero_series()) continue;
        QSeries<LinForm> g = unknown_series(*s.Ngroup, b, s.vmin, tb);
        br.comp.emplace(mu, rankin_cohen(ta, th.weight, g, Rational(1), idx));
    }
    LinForm total = ct_pair(zm, br);

    Rational c = -1;
    for (long i = 1; i < s.j; ++i) c *= 2;
    for (auto& [k, v] : total.terms) {
        if (k.first == 0 && k.second == s.Ngroup->zero())
            throw MathError("formula_functional: the constant coefficient c(0,0) entered the functional");
        out.terms.push_back({k.first, k.second, c * v});
    }
    return out;
}

HeegnerDivisor cm_divisor(const CMSetup& s) { return twisted_divisor(s.delta, s.r, s.m1); }

CoefficientFunctional per_point(const CMSetup& s, const CoefficientFunctional& F) {
    Rational w = cm_divisor(s).total_weight();
    if (w == 0) throw MathError("per_point: divisor has zero weight");
    CoefficientFunctional out = F;
    for (auto& t : out.terms) t.coeff /= w;
    return out;
}

RatVector functional_coordinates(const CMSetup& s, const DiscVector& mu) { return s.Ngroup->lift(mu); }

BigReal evaluate_cm_value(const CMSetup& s, const CoefficientFunctional& F, const CoefficientTable& t, unsigned bits) {
    if (t.group->lattice().gram() != s.N.lattice.gram())
        throw MathError("evaluate_cm_value: table lattice does not match N_Delta");
    std::vector<BigReal> parts;
    for (auto& term : F.terms) parts.push_back(maass_coefficient(t, term.m, t.key(functional_coordinates(s, term.mu)), bits));
    PrecisionScope ps(bits + 16);
    BigReal acc = 0;
    for (size_t i = 0; i < F.terms.size(); ++i) acc += BigReal(F.terms[i].coeff) * parts[i];
    return acc * F.scale.value(bits + 16);
}

CrossCheck crosscheck_direct(const CMSetup& s, const ScalarForm& f, const CoefficientTable& t, long double tol,
                             const std::optional<CoefficientFunctional>& F) {
    CrossCheck r;
    CoefficientFunctional fn = F ? *F : formula_functional(s, f);
    r.formula = evaluate_cm_value(s, fn, t, 128);
    HeegnerDivisor div = cm_divisor(s);
    if (div.terms.empty() || fn.is_zero()) {
        r.direct = 0;
    } else {
        GreenResult g = green_divisor(s.j, f, div, s.z2, tol / 4);
        r.direct = g.value;
        r.direct_tol = g.certified_tol;
    }
    r.difference = std::fabs(r.formula.convert_to<long double>() - r.direct);
    r.pass = r.difference < tol;
    return r;
}

}  // namespace greencm

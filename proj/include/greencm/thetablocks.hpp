#pragma once

#include "greencm/arith.hpp"
#include "greencm/discforms.hpp"
#include "greencm/whbasis.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace greencm {

// linear form in unknown coefficients c(m, beta), beta already folded under +-
using LinKey = std::pair<Rational, DiscVector>;

struct LinForm {
    std::map<LinKey, Rational> terms;

    LinForm() = default;
    static LinForm unknown(const Rational& m, const DiscVector& beta) {
        LinForm f;
        f.terms.emplace(LinKey{m, beta}, Rational(1));
        return f;
    }

    LinForm& operator+=(const LinForm& o) {
        for (auto& [k, v] : o.terms) add(k, v);
        return *this;
    }
    LinForm operator+(const LinForm& o) const { LinForm r = *this; return r += o; }
    LinForm operator-() const {
        LinForm r = *this;
        for (auto& [k, v] : r.terms) v = -v;
        return r;
    }
    LinForm operator-(const LinForm& o) const { return *this + (-o); }
    LinForm operator*(const Rational& s) const {
        LinForm r;
        if (s == 0) return r;
        r = *this;
        for (auto& [k, v] : r.terms) v *= s;
        return r;
    }
    friend LinForm operator*(const Rational& s, const LinForm& f) { return f * s; }
    bool operator==(const LinForm& o) const { return terms == o.terms; }

private:
    void add(const LinKey& k, const Rational& v) {
        auto it = terms.find(k);
        if (it == terms.end()) {
            if (v != 0) terms.emplace(k, v);
            return;
        }
        it->second += v;
        if (it->second == 0) terms.erase(it);
    }
};

inline bool is_zero(const LinForm& f) { return f.terms.empty(); }

struct ThetaSeries {
    VVSeries<Rational> series;  // coefficients rational; true values are these times `scale`
    Rational weight;
    Surd scale;
};

// sum over lambda in mu + P of q^{Q(lambda)}; P positive definite
ThetaSeries theta_series(const EvenLattice& P, const Rational& order, DiscGroupPtr group = nullptr);

// (1/sqrt|Delta|) sum p(lambda) q^{Q(lambda)} on a rank one lattice in V, where p = +-sqrt(Q_V)
// is positive on the side of `ray`
ThetaSeries theta_weight32(const LatticeInV& P, const RatVector& ray, const Rational& order,
                           DiscGroupPtr group = nullptr);

// C(x, s) for rational x
Rational gen_binomial(const Rational& x, long s);

template <class A, class B>
auto rankin_cohen(const QSeries<A>& f, const Rational& k, const QSeries<B>& g, const Rational& l, long idx) {
    if (idx < 0) throw MathError("rankin_cohen: negative index");
    using R = decltype(std::declval<A>() * std::declval<B>());
    std::vector<QSeries<A>> df{f};
    std::vector<QSeries<B>> dg{g};
    for (long s = 1; s <= idx; ++s) {
        df.push_back(df.back().derivative());
        dg.push_back(dg.back().derivative());
    }
    std::optional<QSeries<R>> acc;
    for (long s = 0; s <= idx; ++s) {
        Rational c = gen_binomial(k + idx - 1, s) * gen_binomial(l + idx - 1, idx - s);
        if (s % 2) c = -c;
        QSeries<R> term = multiply(df[idx - s], dg[s]).scaled(c);
        acc = acc ? *acc + term : term;
    }
    return *acc;
}

// constant term of sum_mu f_mu g_mu; throws if truncation leaves it undetermined
template <class A, class B>
auto ct_pair(const VVSeries<A>& f, const VVSeries<B>& g) {
    using R = decltype(std::declval<A>() * std::declval<B>());
    if (f.group != g.group && (!f.group || !g.group || f.group->orders() != g.group->orders()))
        throw MathError("ct_pair: series live on different discriminant groups");
    std::set<DiscVector> keys;
    for (auto& kv : f.comp) keys.insert(kv.first);
    for (auto& kv : g.comp) keys.insert(kv.first);
    R acc{};
    for (const auto& mu : keys) {
        QSeries<A> fs = f.component(mu);
        QSeries<B> gs = g.component(mu);
        const Rational ft = fs.trunc_order(), gt = gs.trunc_order();
        if (ft + gt <= 0) throw MathError("ct_pair: truncation too low to determine the constant term");
        for (auto& [e, c] : fs.terms()) {
            if (!gs.known(-e))
                throw MathError("ct_pair: second series needed at exponent " + to_string(-e) + ", known only below " +
                                to_string(gt));
            acc = acc + c * gs.coeff(-e);
        }
        for (auto& [e, c] : gs.terms())
            if (!fs.known(-e))
                throw MathError("ct_pair: first series needed at exponent " + to_string(-e) + ", known only below " +
                                to_string(ft));
    }
    return acc;
}

}  // namespace greencm

#include "greencm/whbasis.hpp"

#include "greencm/basis_cache.hpp"
#include "greencm/qforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace greencm {

bool plus_admissible(long j, long e) {
    long s = (j % 2 == 0) ? e : -e;
    long r = ((s % 4) + 4) % 4;
    return r == 0 || r == 1;
}

bool PlusForm::admissible(long e) const { return plus_admissible(j, e); }

VVSeries<Rational> PlusForm::vector_avatar() const {
    auto G = std::make_shared<DiscGroup>(level1_lattice().lattice);
    DiscVector mu0 = G->zero(), mu1 = G->element(1);
    RSeries s = scalar.with_den(1);
    long t = s.trunc();
    // component mu: exponents e = 0 mod 4 (mu0) or the other admissible class (mu1)
    long lo = std::min(s.start(), t);
    RSeries c0(4, lo, t), c1(4, lo, t);
    for (long e = s.start(); e < t; ++e) {
        const Rational& v = s.at(e);
        if (v == 0) continue;
        if (((e % 4) + 4) % 4 == 0) c0.at(e) = v;
        else c1.at(e) = v;
    }
    VVSeries<Rational> out{G, {}, rat(t, 4)};
    out.comp.emplace(mu0, c0.normalized());
    out.comp.emplace(mu1, c1.normalized());
    return out;
}

RSeries scalar_from_vector(const VVSeries<Rational>& f) {
    RSeries acc = RSeries::zero(f.trunc * 4);
    for (auto& [mu, s] : f.comp) {
        RSeries w = s.with_den(lcm_ll(s.den(), 4));
        // exponent n/D in q -> 4n/D in the scalar model
        long D = w.den();
        RSeries r(D / 4, w.start(), w.trunc());
        for (long n = w.start(); n < w.trunc(); ++n) r.at(n) = w.at(n);
        acc = acc + r;
    }
    return acc.normalized();
}

// ---------------------------------------------------------------------------

namespace {

Rational bernoulli(long n) {
    std::vector<Rational> B(static_cast<size_t>(n + 1));
    for (long m = 0; m <= n; ++m) {
        B[m] = rat(1, m + 1);
        for (long k = m; k >= 1; --k) B[k - 1] = (B[k - 1] - B[k]) * k;
    }
    // Akiyama-Tanigawa gives B_1 = +1/2; only even n are used
    return B[0];
}

Integer sigma(long n, long k) {
    Integer s = 0;
    for (long d = 1; d * d <= n; ++d)
        if (n % d == 0) {
            s += mp::pow(Integer(d), static_cast<unsigned>(k));
            if (d * d != n) s += mp::pow(Integer(n / d), static_cast<unsigned>(k));
        }
    return s;
}

}  // namespace

RSeries eisenstein_series(long k, long order) {
    if (k < 2 || k % 2) throw MathError("eisenstein_series: weight must be even and >= 2");
    RSeries s(1, 0, std::max(order, 1L));
    s.at(0) = 1;
    Rational f = Rational(-2 * k) / bernoulli(k);
    for (long n = 1; n < order; ++n) s.at(n) = f * Rational(sigma(n, k - 1));
    return s;
}

RSeries eta_power_product(long e, long order) {
    std::vector<Rational> p(static_cast<size_t>(std::max(order, 1L)));
    p[0] = 1;
    for (long n = 1; n < order; ++n)
        for (long r = 0; r < std::labs(e); ++r) {
            if (e > 0)
                for (long i = order - 1; i >= n; --i) p[i] -= p[i - n];
            else
                for (long i = n; i < order; ++i) p[i] += p[i - n];
        }
    RSeries s(1, 0, order);
    for (long i = 0; i < order; ++i) s.at(i) = p[i];
    return s;
}

RSeries delta_series(long order) { return eta_power_product(24, order - 1).shifted(1); }

RSeries theta_series_1d(long order) {
    RSeries s(1, 0, order);
    for (long n = 0; n * n < order; ++n) s.at(n * n) = n == 0 ? 1 : 2;
    return s;
}

RSeries theta1_series_1d(long order) {
    RSeries s(1, 0, order);
    for (long n = 0; n * n < order; ++n) s.at(n * n) = n == 0 ? 1 : (n % 2 ? -2 : 2);
    return s;
}

std::vector<RSeries> level1_forms(long k, long nmax, long order) {
    std::vector<RSeries> out;
    RSeries E4 = eisenstein_series(4, order), E6 = eisenstein_series(6, order);
    RSeries Dinv = series_inverse(delta_series(order + 2));
    for (long n = 0; n <= nmax; ++n) {
        long W = k + 12 * n;
        if (W < 0) continue;
        RSeries Dn = series_pow(Dinv, n);
        for (long b = 0; 6 * b <= W; ++b) {
            if ((W - 6 * b) % 4) continue;
            long a = (W - 6 * b) / 4;
            out.push_back(series_pow(E4, a) * series_pow(E6, b) * Dn);
        }
    }
    return out;
}

ScalarForm standard_input(long j, long order) {
    RSeries Dinv = series_inverse(delta_series(order + 3));
    if (j == 1) {
        RSeries E10 = eisenstein_series(4, order + 2) * eisenstein_series(6, order + 2);
        return {-2, (E10 * Dinv).truncated(order)};
    }
    if (j == 2 || j == 4 || j == 6) {
        RSeries f = series_pow(eisenstein_series(4, order + 2), 3 - j / 2) * Dinv;
        return {-2 * j, f.truncated(order)};
    }
    throw MathError("standard_input: no named construction for j = " + std::to_string(j));
}

// ---------------------------------------------------------------------------

const PlusForm& PlusBasis::element(long pivot) const {
    for (auto& f : forms)
        if (f.pivot == pivot) return f;
    throw MathError("plus space basis has no element with principal part q^" + std::to_string(pivot) +
                    " (depth " + std::to_string(depth) + ")");
}

bool PlusBasis::has(long pivot) const {
    return std::any_of(forms.begin(), forms.end(), [&](const PlusForm& f) { return f.pivot == pivot; });
}

namespace {

std::vector<RSeries> plus_candidates(long j, long depth, long N) {
    const long M = N / 4 + depth + 8;
    RSeries e2 = eisenstein_series(2, M).substitute(4);
    RSeries g;
    Rational kg;
    long ka, kb;
    if (j % 2 == 0) {
        g = theta_series_1d(N + 8 * depth + 40);
        kg = rat(1, 2);
        ka = -j;
        kb = -j - 2;
    } else {
        // theta_1(tau) / eta(4 tau)^6
        RSeries eta = eta_power_product(-6, M + 10).substitute(4).shifted(-1);
        g = theta1_series_1d(N + 8 * depth + 40) * eta;
        kg = rat(-5, 2);
        ka = 3 - j;
        kb = 1 - j;
    }
    // Serre derivative at level four
    RSeries tg = g.derivative().scaled(rat(1, 4)) - (e2 * g).scaled(kg / 12);
    long nmax = depth / 4 + 2;
    std::vector<RSeries> c;
    for (auto& A : level1_forms(ka, nmax, M)) c.push_back(A.substitute(4) * g);
    for (auto& B : level1_forms(kb, nmax, M)) c.push_back(B.substitute(4) * tg);
    return c;
}

}  // namespace

PlusBasis plus_space_basis(long j, long depth, long order) {
    if (depth < 1) throw MathError("plus_space_basis: depth must be >= 1");
    if (auto cached = cache_load(j, depth, order)) return *cached;

    const long N = order + 4 * depth + 40;
    std::vector<RSeries> cand = plus_candidates(j, depth, N);
    long t = N;
    long lo = 0;
    for (auto& c : cand) {
        t = std::min(t, c.trunc());
        lo = std::min(lo, c.start());
    }
    if (t < order) throw MathError("plus_space_basis: internal truncation below the requested order");
    const size_t W = static_cast<size_t>(t - lo);

    struct Row {
        long piv;
        std::vector<Rational> v;
    };
    std::vector<Row> basis;
    for (auto& c : cand) {
        std::vector<Rational> v(W);
        for (long e = c.start(); e < t; ++e) {
            const Rational& x = c.at(e);
            if (x == 0) continue;
            if (!plus_admissible(j, e)) throw MathError("plus_space_basis: candidate leaves the plus space");
            v[static_cast<size_t>(e - lo)] = x;
        }
        for (auto& b : basis) {
            Rational x = v[static_cast<size_t>(b.piv - lo)];
            if (x == 0) continue;
            for (size_t i = 0; i < W; ++i)
                if (b.v[i] != 0) v[i] -= x * b.v[i];
        }
        size_t p = 0;
        while (p < W && v[p] == 0) ++p;
        if (p == W) continue;
        Rational lead = v[p];
        for (size_t i = p; i < W; ++i)
            if (v[i] != 0) v[i] /= lead;
        for (auto& b : basis) {
            Rational y = b.v[p];
            if (y == 0) continue;
            for (size_t i = p; i < W; ++i)
                if (v[i] != 0) b.v[i] -= y * v[i];
        }
        basis.push_back({static_cast<long>(p) + lo, std::move(v)});
    }
    std::sort(basis.begin(), basis.end(), [](const Row& a, const Row& b) { return a.piv < b.piv; });

    PlusBasis out;
    out.j = j;
    out.depth = depth;
    out.order = order;
    out.A = basis.empty() ? -depth - 1 : basis.back().piv;
    for (long e = -depth; e <= out.A; ++e) {
        if (!plus_admissible(j, e)) continue;
        bool found = std::any_of(basis.begin(), basis.end(), [&](const Row& r) { return r.piv == e; });
        if (!found)
            throw MathError("plus_space_basis: row reduction did not realize the principal part q^" +
                            std::to_string(e));
    }
    for (auto& b : basis) {
        if (b.piv < -depth) continue;
        PlusForm f;
        f.j = j;
        f.pivot = b.piv;
        f.scalar = RSeries(1, b.piv, order);
        for (long e = b.piv; e < order; ++e) f.scalar.at(e) = b.v[static_cast<size_t>(e - lo)];
        out.forms.push_back(std::move(f));
    }
    cache_store(out);
    return out;
}

// ---------------------------------------------------------------------------

Surd Surd::operator*(const Surd& o) const {
    Surd r;
    r.q = q * o.q;
    long long g = std::gcd(rad, o.rad);
    // sqrt(a) sqrt(b) = g sqrt(a b / g^2)
    r.q *= g;
    r.rad = (rad / g) * (o.rad / g);
    return r;
}

BigReal Surd::value(unsigned bits) const {
    PrecisionScope ps(bits);
    BigReal v = sqrt(BigReal(rad));
    return BigReal(q) * v;
}

std::string Surd::to_string() const {
    if (rad == 1) return greencm::to_string(q);
    return greencm::to_string(q) + "*sqrt(" + std::to_string(rad) + ")";
}

Surd surd_sqrt(const Rational& x) {
    if (x <= 0) throw MathError("surd_sqrt: argument must be positive");
    // sqrt(p/q) = sqrt(p q)/q
    Integer pq = numer(x) * denom(x);
    long long n = to_ll(pq);
    long long sq = 1, rad = 1;
    for (long long p = 2; p * p <= n; ++p) {
        while (n % (p * p) == 0) {
            n /= p * p;
            sq *= p;
        }
    }
    rad = n;
    return Surd{Rational(sq) / Rational(denom(x)), rad};
}

ZagierLift zagier_lift(const ScalarForm& f, long long d, long j, long order) {
    if (!is_fundamental_discriminant(d)) throw MathError("zagier_lift: d must be a fundamental discriminant");
    if ((j % 2 == 0 && d >= 0) || (j % 2 != 0 && d <= 0)) throw MathError("zagier_lift: need (-1)^j d < 0");
    if (f.weight != -2 * j) throw MathError("zagier_lift: input weight must be -2j");
    const long long ad = std::llabs(d);
    // principal part
    std::vector<std::pair<long, Rational>> pp;
    long mmax = 0;
    for (long e = f.expansion.start(); e < 0 && e < f.expansion.trunc(); ++e) {
        const Rational& c = f.expansion.at(e);
        if (c == 0) continue;
        pp.emplace_back(-e, c);
        mmax = std::max(mmax, -e);
    }
    ZagierLift out;
    out.j = j;
    out.d = d;
    Rational pre = 1;
    for (long i = 0; i < j / 2; ++i) pre /= ad;
    out.prefactor = j % 2 ? Surd{pre, 1} * surd_sqrt(rat(1, ad)) : Surd{pre, 1};
    out.cleared.j = j;
    if (pp.empty()) {
        out.cleared.scalar = RSeries::zero(order);
        out.cleared.pivot = order;
        return out;
    }
    long depth = static_cast<long>(ad * mmax * mmax);
    PlusBasis B = plus_space_basis(j, depth, order);
    RSeries acc = RSeries::zero(order);
    for (auto& [m, c] : pp)
        for (long n = 1; n <= m; ++n) {
            if (m % n) continue;
            long long k = kronecker(d, n);
            if (k == 0) continue;
            Rational w = c * Rational(k) * Rational(mp::pow(Integer(n), static_cast<unsigned>(j)));
            long idx = static_cast<long>(ad * (m / n) * (m / n));
            acc = acc + B.element(-idx).scalar.scaled(w);
        }
    out.cleared.scalar = acc;
    out.cleared.pivot = acc.valuation_num();
    return out;
}

// ---------------------------------------------------------------------------

Rational DualityBases::a(long m, long n) const { return f.element(-m).scalar.get(n); }
Rational DualityBases::b(long n, long m) const { return g.element(-n).scalar.get(m); }

DualityBases duality_bases(long j, long depth, long order) {
    DualityBases D{plus_space_basis(j, depth, order), plus_space_basis(-1 - j, depth, order)};
    // f_m = q^-m + O(q^{A_f+1}) and g_n = q^-n + O(q^{A_g+1}) pair up iff A_f + A_g = -1 for some
    // choice of A inside the gaps of non-admissible exponents above the top pivots
    auto next_adm = [](long j, long e) {
        do ++e;
        while (!plus_admissible(j, e));
        return e;
    };
    long lo = D.f.A + D.g.A;
    long hi = (next_adm(j, D.f.A) - 1) + (next_adm(-1 - j, D.g.A) - 1);
    if (lo > -1 || hi < -1)
        throw MathError("duality_bases: pivot bounds are not complementary (A_f = " + std::to_string(D.f.A) +
                        ", A_g = " + std::to_string(D.g.A) + ")");
    return D;
}

std::vector<std::optional<Rational>> shimura_lift(const VVSeries<Rational>& g, const Rational& m0,
                                                  const DiscVector& mu0, long long D0, long j, long nmax) {
    std::vector<std::optional<Rational>> out(static_cast<size_t>(nmax + 1));
    for (long n = 1; n <= nmax; ++n) {
        Rational s = 0;
        bool known = true;
        for (long d = 1; d <= n && known; ++d) {
            if (n % d) continue;
            long long k = kronecker(D0, d);
            if (k == 0) continue;
            long e = n / d;
            Rational m = m0 * e * e;
            DiscVector mu = g.group->scale(e, mu0);
            QSeries<Rational> comp = g.component(mu);
            if (!comp.known(m)) {
                known = false;
                break;
            }
            s += Rational(mp::pow(Integer(d), static_cast<unsigned>(2 * j))) * Rational(k) * comp.coeff(m);
        }
        if (known) out[static_cast<size_t>(n)] = s;
    }
    return out;
}

}  // namespace greencm

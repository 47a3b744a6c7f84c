#include "greencm/arith.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace greencm {

PrecisionScope::PrecisionScope(unsigned bits) : saved_(BigReal::default_precision()) {
    BigReal::default_precision(digits10_for_bits(bits));
}

PrecisionScope::~PrecisionScope() { BigReal::default_precision(saved_); }

unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

Rational rat(long long num, long long den) {
    if (den == 0) throw MathError("rational with zero denominator");
    return Rational(Integer(num), Integer(den));
}

Rational rat(const Integer& num, const Integer& den) {
    if (den == 0) throw MathError("rational with zero denominator");
    return Rational(num, den);
}

Integer numer(const Rational& q) { return mp::numerator(q); }
Integer denom(const Rational& q) { return mp::denominator(q); }

Integer floor_rat(const Rational& q) {
    Integer n = numer(q), d = denom(q);
    Integer f = n / d;
    if (n < 0 && f * d != n) f -= 1;
    return f;
}

Rational frac_part(const Rational& q) { return q - Rational(floor_rat(q)); }

bool is_integer(const Rational& q) { return denom(q) == 1; }

std::string to_string(const Rational& q) {
    if (denom(q) == 1) return numer(q).str();
    return numer(q).str() + "/" + denom(q).str();
}

std::string to_string(const Integer& z) { return z.str(); }

Rational parse_rational(const std::string& s0) {
    std::string s = s0;
    s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
    if (s.empty()) throw MathError("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return rat(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
    auto epos = s.find_first_of("eE");
    long exp10 = 0;
    if (epos != std::string::npos) {
        exp10 = std::stol(s.substr(epos + 1));
        s = s.substr(0, epos);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<long>(s.size() - dot - 1);
        s.erase(dot, 1);
    }
    // leading zeros would read as octal
    bool negative = !s.empty() && (s[0] == '-' || s[0] == '+');
    std::string digits = negative ? s.substr(1) : s;
    negative = negative && s[0] == '-';
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw MathError("malformed rational literal: " + s0);
    Integer n(digits);
    if (negative) n = -n;
    Integer p = 1;
    for (long i = 0; i < std::labs(exp10); ++i) p *= 10;
    return exp10 >= 0 ? Rational(n * p) : rat(n, p);
}

long long to_ll(const Integer& z) {
    if (z > Integer(std::numeric_limits<long long>::max()) || z < Integer(std::numeric_limits<long long>::min()))
        throw MathError("integer does not fit in 64 bits");
    return z.convert_to<long long>();
}

long long to_ll(const Rational& q) {
    if (!is_integer(q)) throw MathError("rational is not integral: " + to_string(q));
    return to_ll(numer(q));
}

long long lcm_ll(long long a, long long b) { return std::lcm(std::llabs(a), std::llabs(b)); }

std::string decimal_string(const BigReal& x, int digits) {
    std::ostringstream os;
    os.precision(digits);
    os << std::fixed << x;
    std::string r = os.str();
    // no "-0.000"
    if (r.size() > 1 && r[0] == '-' && r.find_first_not_of("0.", 1) == std::string::npos) r.erase(0, 1);
    return r;
}

RSeries series_multiply(const RSeries& a, const RSeries& b) { return multiply(a, b); }

RSeries series_inverse(const RSeries& a) {
    long v = a.valuation_num();
    if (v >= a.trunc()) throw MathError("series_inverse: series is zero to its truncation order");
    long n = a.trunc() - v;
    Rational lead = a.at(v);
    std::vector<Rational> u(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) u[i] = a.at(v + i) / lead;
    std::vector<Rational> r(static_cast<size_t>(n));
    r[0] = 1;
    for (long i = 1; i < n; ++i) {
        Rational acc = 0;
        for (long k = 1; k <= i; ++k)
            if (u[k] != 0) acc += u[k] * r[i - k];
        r[i] = -acc;
    }
    RSeries out(a.den(), -v, -v + n);
    for (long i = 0; i < n; ++i) out.at(i - v) = r[i] / lead;
    return out;
}

RSeries series_pow(const RSeries& a, long e) {
    if (e == 0) return RSeries::monomial(0, Rational(1), rat(a.trunc() - a.valuation_num(), a.den()));
    RSeries base = e < 0 ? series_inverse(a) : a;
    std::optional<RSeries> r;
    for (long k = std::labs(e); k > 0; k >>= 1) {
        if (k & 1) r = r ? multiply(*r, base) : base;
        if (k > 1) base = multiply(base, base);
    }
    return *r;
}

// ---------------------------------------------------------------------------

Poly::Poly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

Poly Poly::from_integers(const std::vector<Integer>& c) {
    std::vector<Rational> r;
    for (auto& z : c) r.emplace_back(z);
    return Poly(r);
}

Poly Poly::x() { return Poly({Rational(0), Rational(1)}); }

void Poly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<Rational> r(std::max(c_.size(), o.c_.size()));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(static_cast<int>(i)) + o.coeff(static_cast<int>(i));
    return Poly(r);
}

Poly Poly::operator-(const Poly& o) const {
    std::vector<Rational> r(std::max(c_.size(), o.c_.size()));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(static_cast<int>(i)) - o.coeff(static_cast<int>(i));
    return Poly(r);
}

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return Poly();
    std::vector<Rational> r(c_.size() + o.c_.size() - 1);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Poly(r);
}

Poly Poly::operator*(const Rational& s) const {
    std::vector<Rational> r = c_;
    for (auto& v : r) v *= s;
    return Poly(r);
}

Poly Poly::derivative() const {
    std::vector<Rational> r;
    for (size_t i = 1; i < c_.size(); ++i) r.push_back(c_[i] * static_cast<long long>(i));
    return Poly(r);
}

std::pair<Poly, Poly> Poly::divmod(const Poly& d) const {
    if (d.is_zero()) throw MathError("polynomial division by zero");
    std::vector<Rational> rem = c_;
    int dd = d.degree();
    if (degree() < dd) return {Poly(), *this};
    std::vector<Rational> q(static_cast<size_t>(degree() - dd + 1));
    const Rational& lead = d.c_.back();
    for (int i = degree(); i >= dd; --i) {
        Rational f = rem[i] / lead;
        q[i - dd] = f;
        if (f == 0) continue;
        for (int k = 0; k <= dd; ++k) rem[i - dd + k] -= f * d.c_[k];
    }
    rem.resize(static_cast<size_t>(dd));
    return {Poly(q), Poly(rem)};
}

Poly Poly::compose_mod(const Poly& inner, const Poly& mod) const {
    Poly r;
    for (int i = degree(); i >= 0; --i) r = ((r * inner) + Poly({c_[i]})) % mod;
    return r;
}

std::pair<Poly, Poly> poly_inverse_mod(const Poly& a, const Poly& m) {
    Poly r0 = m, r1 = a % m, s0, s1({Rational(1)});
    while (!r1.is_zero()) {
        auto [q, r] = r0.divmod(r1);
        Poly s = s0 - q * s1;
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    Rational lead = r0.coeffs().back();
    return {r0 * (Rational(1) / lead), s0 * (Rational(1) / lead)};
}

// ---------------------------------------------------------------------------

namespace {

// simultaneous Newton (Aberth) iteration for all roots
std::vector<BigComplex> aberth(const Poly& p, unsigned bits) {
    int n = p.degree();
    Poly dp = p.derivative();
    BigReal bound = 1;
    for (int i = 0; i < n; ++i) {
        BigReal c = abs(BigReal(p.coeff(i)));
        if (c + 1 > bound) bound = c + 1;
    }
    std::vector<BigComplex> z(n);
    const BigReal twopi = 2 * boost::math::constants::pi<BigReal>();
    for (int k = 0; k < n; ++k) {
        BigReal ang = twopi * k / n + BigReal(0.4);
        z[k] = BigComplex(bound * cos(ang) / 2, bound * sin(ang) / 2);
    }
    BigReal eps = ldexp(BigReal(1), -static_cast<int>(bits));
    for (int it = 0; it < 2000; ++it) {
        BigReal worst = 0;
        for (int k = 0; k < n; ++k) {
            BigComplex num = p.eval(z[k]), den = dp.eval(z[k]);
            if (den.norm() == 0) den = BigComplex(eps, eps);
            BigComplex ratio = num / den;
            BigComplex s(0, 0);
            for (int j = 0; j < n; ++j)
                if (j != k) s += BigComplex(1, 0) / (z[k] - z[j]);
            BigComplex w = ratio / (BigComplex(1, 0) - ratio * s);
            z[k] -= w;
            BigReal a = w.abs() / (1 + z[k].abs());
            if (a > worst) worst = a;
        }
        if (worst < eps) break;
    }
    return z;
}

}  // namespace

NumberField::NumberField(std::vector<Integer> minpoly, EmbeddingBox box)
    : minpoly_(Poly::from_integers(minpoly)), ints_(std::move(minpoly)), box_(std::move(box)) {
    if (minpoly_.degree() < 1) throw MathError("minimal polynomial must have degree >= 1");
    if (minpoly_.coeffs().back() != 1) throw MathError("minimal polynomial must be monic");
    check_irreducible();
    embedding(128);
}

std::vector<NumberField::Root> NumberField::roots(unsigned bits) const {
    PrecisionScope ps(bits + 32);
    int n = degree();
    std::vector<Root> out;
    if (n == 1) {
        out.push_back({BigComplex(BigReal(-minpoly_.coeff(0)), BigReal(0)), BigReal(0)});
        return out;
    }
    auto z = aberth(minpoly_, bits + 16);
    Poly dp = minpoly_.derivative();
    for (auto& r : z) {
        // a disk of radius n|p/p'| about r contains a root
        BigComplex d = dp.eval(r);
        if (d.norm() == 0) throw MathError("minimal polynomial has a repeated root");
        BigReal rad = n * (minpoly_.eval(r) / d).abs();
        out.push_back({r, rad});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((out[i].z - out[j].z).abs() <= out[i].radius + out[j].radius)
                throw MathError("root isolation failed; increase precision");
    return out;
}

BigComplex NumberField::embedding(unsigned bits) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.lower_bound(bits);
        if (it != cache_.end()) return it->second;
    }
    auto rs = roots(bits);
    PrecisionScope ps(bits + 32);
    BigComplex c(BigReal(box_.re), BigReal(box_.im));
    BigReal R(box_.radius);
    int hits = 0;
    BigComplex found;
    for (auto& r : rs) {
        BigReal dist = (r.z - c).abs();
        if (dist <= R + r.radius) {
            if (dist + r.radius > R) throw MathError("embedding box does not isolate a root (boundary)");
            ++hits;
            found = r.z;
        }
    }
    if (hits != 1) throw MathError("embedding box contains " + std::to_string(hits) + " roots, expected 1");
    if (abs(found.im) <= rs.front().radius * 4 && box_.im == 0) found.im = 0;
    std::lock_guard<std::mutex> lk(mu_);
    cache_[bits] = found;
    return found;
}

void NumberField::check_irreducible() const {
    int n = degree();
    if (n <= 1) return;
    auto rs = roots(160);
    PrecisionScope ps(192);
    // any monic integer factor is a product over a subset of roots
    for (int k = 1; k <= n / 2; ++k) {
        std::vector<int> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            std::vector<BigComplex> f{BigComplex(1, 0)};
            for (int i : idx) {
                std::vector<BigComplex> g(f.size() + 1, BigComplex(0, 0));
                for (size_t t = 0; t < f.size(); ++t) {
                    g[t + 1] += f[t];
                    g[t] -= f[t] * rs[i].z;
                }
                f = g;
            }
            bool integral = true;
            std::vector<Rational> cand;
            for (auto& c : f) {
                BigReal rr = round(c.re);
                if (abs(c.im) > BigReal(1e-20) || abs(c.re - rr) > BigReal(1e-20)) {
                    integral = false;
                    break;
                }
                cand.emplace_back(Integer(rr.convert_to<Integer>()));
            }
            if (integral) {
                Poly g(cand);
                if ((minpoly_ % g).is_zero()) throw MathError("minimal polynomial is reducible");
            }
            int i = k - 1;
            while (i >= 0 && idx[i] == n - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
        }
    }
}

BigComplex real_root_refine(const NumberField& field, unsigned bits) { return field.embedding(bits); }

NFElem::NFElem(FieldPtr f, std::vector<Rational> coords) : f_(std::move(f)) {
    if (!f_) throw MathError("NFElem without field");
    if (static_cast<int>(coords.size()) > f_->degree()) p_ = Poly(coords) % f_->minpoly();
    else p_ = Poly(coords);
}

NFElem NFElem::from_rational(FieldPtr f, const Rational& q) { return NFElem(std::move(f), {q}); }

NFElem NFElem::generator(FieldPtr f) {
    return NFElem(f, (Poly::x() % f->minpoly()).coeffs());
}

std::vector<Rational> NFElem::coordinates() const {
    std::vector<Rational> c(static_cast<size_t>(f_->degree()));
    for (int i = 0; i < f_->degree(); ++i) c[i] = p_.coeff(i);
    return c;
}

NFElem NFElem::operator+(const NFElem& o) const { return NFElem(f_, (p_ + o.p_).coeffs()); }
NFElem NFElem::operator-(const NFElem& o) const { return NFElem(f_, (p_ - o.p_).coeffs()); }
NFElem NFElem::operator*(const NFElem& o) const {
    return NFElem(f_, ((p_ * o.p_) % f_->minpoly()).coeffs());
}

NFElem NFElem::inverse() const {
    if (is_zero()) throw MathError("inverse of zero field element");
    auto [g, s] = poly_inverse_mod(p_, f_->minpoly());
    if (g.degree() != 0) throw MathError("field element not invertible (reducible modulus)");
    return NFElem(f_, s.coeffs());
}

NFElem NFElem::pow(long e) const {
    NFElem base = e < 0 ? inverse() : *this;
    NFElem r = from_rational(f_, 1);
    for (long k = std::labs(e); k > 0; k >>= 1) {
        if (k & 1) r = r * base;
        if (k > 1) base = base * base;
    }
    return r;
}

BigComplex NFElem::eval(unsigned bits) const {
    BigComplex z = f_->embedding(bits + 32);
    PrecisionScope ps(bits + 32);
    return p_.eval(z);
}

BigReal nf_log_abs(const NFElem& e, unsigned bits) {
    if (e.is_zero()) throw MathError("nf_log_abs of zero");
    // guard bits for cancellation in the polynomial evaluation
    unsigned guard = 64;
    for (auto& c : e.poly().coeffs()) {
        unsigned b = static_cast<unsigned>(mp::msb(abs(numer(c)) + 1));
        if (b > guard) guard = b;
    }
    BigComplex v = e.eval(bits + guard);
    PrecisionScope ps(bits + guard);
    BigReal n = v.norm();
    if (n == 0) throw MathError("nf_log_abs: embedding value vanished at working precision");
    return log(n) / 2;
}

}  // namespace greencm

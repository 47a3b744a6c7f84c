#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace greencm {

namespace mp = boost::multiprecision;

using Integer = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;
using BigReal = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

struct MathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// MPFR default precision is process wide; this guard sets it in bits.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

unsigned digits10_for_bits(unsigned bits);

Rational rat(long long num, long long den = 1);
Rational rat(const Integer& num, const Integer& den);
Integer numer(const Rational& q);
Integer denom(const Rational& q);
Integer floor_rat(const Rational& q);
Rational frac_part(const Rational& q);  // in [0,1)
bool is_integer(const Rational& q);
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);
Rational parse_rational(const std::string& s);  // "p/q", "p" or a decimal literal
long long to_ll(const Integer& z);
long long to_ll(const Rational& q);  // throws unless integral
long long lcm_ll(long long a, long long b);
std::string decimal_string(const BigReal& x, int digits);

inline bool is_zero(const Rational& q) { return q == 0; }

// ---------------------------------------------------------------------------
// complex numbers over an arbitrary real scalar

template <class T>
struct Cplx {
    T re{}, im{};
    Cplx() = default;
    Cplx(T r) : re(std::move(r)), im(0) {}
    Cplx(T r, T i) : re(std::move(r)), im(std::move(i)) {}

    Cplx operator+(const Cplx& o) const { return {re + o.re, im + o.im}; }
    Cplx operator-(const Cplx& o) const { return {re - o.re, im - o.im}; }
    Cplx operator-() const { return {-re, -im}; }
    Cplx operator*(const Cplx& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    Cplx operator*(const T& s) const { return {re * s, im * s}; }
    Cplx operator/(const Cplx& o) const {
        T d = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
    }
    Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
    Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
    Cplx& operator*=(const Cplx& o) { return *this = *this * o; }
    T norm() const { return re * re + im * im; }
    T abs() const {
        using std::sqrt;
        return sqrt(norm());
    }
};

using BigComplex = Cplx<BigReal>;

// ---------------------------------------------------------------------------
// truncated q-series, exponents n/den, coefficients n in [start, trunc) known

template <class C>
class QSeries {
public:
    QSeries() = default;
    QSeries(long den, long start, long trunc) : den_(den), start_(start), trunc_(trunc) {
        if (den <= 0) throw MathError("QSeries: exponent denominator must be positive");
        if (trunc < start) trunc_ = start;
        c_.assign(static_cast<size_t>(trunc_ - start_), C{});
    }
    // zero series known below exponent trunc
    static QSeries zero(const Rational& trunc) {
        long d = static_cast<long>(to_ll(denom(trunc)));
        long t = static_cast<long>(to_ll(numer(trunc)));
        return QSeries(d, t, t);
    }
    static QSeries monomial(const Rational& e, C c, const Rational& trunc) {
        long d = lcm_ll(to_ll(denom(e)), to_ll(denom(trunc)));
        long n = static_cast<long>(to_ll(e * d));
        long t = static_cast<long>(to_ll(trunc * d));
        QSeries s(d, std::min(n, t), t);
        if (n < t) s.at(n) = std::move(c);
        return s;
    }

    long den() const { return den_; }
    long start() const { return start_; }
    long trunc() const { return trunc_; }
    Rational trunc_order() const { return rat(trunc_, den_); }

    C& at(long n) {
        if (n < start_ || n >= trunc_) throw MathError("QSeries: index outside stored range");
        return c_[static_cast<size_t>(n - start_)];
    }
    const C& at(long n) const {
        if (n < start_ || n >= trunc_) throw MathError("QSeries: index outside stored range");
        return c_[static_cast<size_t>(n - start_)];
    }
    // coefficient at exponent n/den; zero below start, error at or beyond truncation
    C get(long n) const {
        if (n >= trunc_) throw MathError("QSeries: coefficient beyond truncation order");
        if (n < start_) return C{};
        return c_[static_cast<size_t>(n - start_)];
    }
    C coeff(const Rational& e) const {
        Rational x = e * den_;
        if (!is_integer(x)) {
            if (e >= trunc_order()) throw MathError("QSeries: coefficient beyond truncation order");
            return C{};
        }
        return get(static_cast<long>(to_ll(x)));
    }
    bool known(const Rational& e) const { return e < trunc_order(); }

    // first nonzero exponent numerator, or trunc if none
    long valuation_num() const {
        for (long n = start_; n < trunc_; ++n)
            if (!is_zero(c_[static_cast<size_t>(n - start_)])) return n;
        return trunc_;
    }
    Rational valuation() const { return rat(valuation_num(), den_); }
    bool is_zero_series() const { return valuation_num() == trunc_; }

    std::vector<std::pair<Rational, C>> terms() const {
        std::vector<std::pair<Rational, C>> out;
        for (long n = start_; n < trunc_; ++n) {
            const C& v = c_[static_cast<size_t>(n - start_)];
            if (!is_zero(v)) out.emplace_back(rat(n, den_), v);
        }
        return out;
    }

    QSeries with_den(long d) const {
        if (d % den_) throw MathError("QSeries: incompatible exponent denominator");
        long k = d / den_;
        QSeries r(d, start_ * k, trunc_ * k);
        for (long n = start_; n < trunc_; ++n) r.at(n * k) = at(n);
        return r;
    }
    // drop the common exponent denominator as far as possible
    QSeries normalized() const {
        long g = den_;
        for (long n = start_; n < trunc_ && g > 1; ++n)
            if (!is_zero(at(n))) g = std::gcd(g, std::labs(n));
        g = std::gcd(g, std::labs(trunc_));
        if (g <= 1) return *this;
        long s = start_ >= 0 ? (start_ + g - 1) / g : -((-start_) / g);
        QSeries r(den_ / g, s, trunc_ / g);
        for (long n = start_; n < trunc_; ++n)
            if (!is_zero(at(n))) r.at(n / g) = at(n);
        return r;
    }
    QSeries truncated(const Rational& t) const {
        if (t >= trunc_order()) return *this;
        long d = lcm_ll(den_, to_ll(denom(t)));
        QSeries s = with_den(d);
        long tn = static_cast<long>(to_ll(t * d));
        QSeries r(d, std::min(s.start_, tn), tn);
        for (long n = r.start_; n < tn; ++n) r.at(n) = s.get(n);
        return r.normalized();
    }

    QSeries operator-() const {
        QSeries r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }
    template <class S>
    QSeries scaled(const S& s) const {
        QSeries r = *this;
        for (auto& v : r.c_) v = v * s;
        return r;
    }
    friend QSeries operator+(const QSeries& a, const QSeries& b) { return combine(a, b, false); }
    friend QSeries operator-(const QSeries& a, const QSeries& b) { return combine(a, b, true); }
    QSeries& operator+=(const QSeries& b) { return *this = *this + b; }

    // q d/dq
    QSeries derivative() const {
        QSeries r = *this;
        for (long n = start_; n < trunc_; ++n) r.at(n) = at(n) * rat(n, den_);
        return r;
    }
    // q -> q^k
    QSeries substitute(long k) const {
        if (k <= 0) throw MathError("QSeries: substitution exponent must be positive");
        QSeries r(den_, start_ * k, trunc_ * k);
        for (long n = start_; n < trunc_; ++n) r.at(n * k) = at(n);
        return r;
    }
    // multiply by q^e
    QSeries shifted(const Rational& e) const {
        long d = lcm_ll(den_, to_ll(denom(e)));
        QSeries s = with_den(d);
        long sh = static_cast<long>(to_ll(e * d));
        QSeries r(d, s.start_ + sh, s.trunc_ + sh);
        for (long n = s.start_; n < s.trunc_; ++n) r.at(n + sh) = s.at(n);
        return r;
    }

    template <class A, class B>
    friend auto multiply(const QSeries<A>& a, const QSeries<B>& b);

private:
    static QSeries combine(const QSeries& a0, const QSeries& b0, bool sub) {
        long d = lcm_ll(a0.den_, b0.den_);
        QSeries a = a0.with_den(d), b = b0.with_den(d);
        long t = std::min(a.trunc_, b.trunc_);
        long s = std::min(a.start_, b.start_);
        QSeries r(d, std::min(s, t), t);
        for (long n = r.start_; n < t; ++n) {
            C x = a.get(n);
            C y = b.get(n);
            r.at(n) = sub ? C(x - y) : C(x + y);
        }
        return r;
    }

    template <class>
    friend class QSeries;

    long den_ = 1;
    long start_ = 0;
    long trunc_ = 0;
    std::vector<C> c_;
};

template <class A, class B>
auto multiply(const QSeries<A>& a0, const QSeries<B>& b0) {
    using R = decltype(std::declval<A>() * std::declval<B>());
    long d = lcm_ll(a0.den(), b0.den());
    QSeries<A> a = a0.with_den(d);
    QSeries<B> b = b0.with_den(d);
    long va = a.valuation_num(), vb = b.valuation_num();
    long t = std::min(a.trunc() + vb, b.trunc() + va);
    long s = va + vb;
    QSeries<R> r(d, std::min(s, t), t);
    for (long i = va; i < a.trunc(); ++i) {
        const A& x = a.at(i);
        if (is_zero(x)) continue;
        for (long k = vb; k < b.trunc() && i + k < t; ++k) {
            const B& y = b.at(k);
            if (is_zero(y)) continue;
            r.at(i + k) += x * y;
        }
    }
    return r;
}

template <class C>
QSeries<C> operator*(const QSeries<C>& a, const QSeries<C>& b) { return multiply(a, b); }

using RSeries = QSeries<Rational>;

RSeries series_multiply(const RSeries& a, const RSeries& b);
RSeries series_inverse(const RSeries& a);
RSeries series_pow(const RSeries& a, long e);

// ---------------------------------------------------------------------------
// polynomials over Q, coefficients ascending

class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<Rational> c);
    static Poly from_integers(const std::vector<Integer>& c);
    static Poly x();

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : Rational(0); }
    bool is_zero() const { return c_.empty(); }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const Rational& s) const;
    Poly derivative() const;
    std::pair<Poly, Poly> divmod(const Poly& d) const;
    Poly operator%(const Poly& d) const { return divmod(d).second; }
    Poly compose_mod(const Poly& inner, const Poly& mod) const;  // self(inner) mod `mod`
    bool operator==(const Poly& o) const { return c_ == o.c_; }

    template <class T>
    Cplx<T> eval(const Cplx<T>& z) const {
        Cplx<T> r(T(0), T(0));
        for (int i = degree(); i >= 0; --i) r = r * z + Cplx<T>(T(c_[i]), T(0));
        return r;
    }

private:
    void trim();
    std::vector<Rational> c_;
};

// extended gcd: returns (g, s) with s*a = g mod m, g monic
std::pair<Poly, Poly> poly_inverse_mod(const Poly& a, const Poly& m);

// ---------------------------------------------------------------------------
// number fields with one pinned complex embedding

struct EmbeddingBox {
    Rational re, im, radius;  // closed disk
};

class NumberField {
public:
    // minpoly: integer coefficients, constant term first, monic
    NumberField(std::vector<Integer> minpoly, EmbeddingBox box);

    int degree() const { return minpoly_.degree(); }
    const Poly& minpoly() const { return minpoly_; }
    const std::vector<Integer>& minpoly_integers() const { return ints_; }
    const EmbeddingBox& box() const { return box_; }

    // certified approximations of all roots, each with an error radius
    struct Root {
        BigComplex z;
        BigReal radius;
    };
    std::vector<Root> roots(unsigned bits) const;
    BigComplex embedding(unsigned bits) const;

private:
    void check_irreducible() const;
    Poly minpoly_;
    std::vector<Integer> ints_;
    EmbeddingBox box_;
    mutable std::mutex mu_;
    mutable std::map<unsigned, BigComplex> cache_;  // bits -> embedding value
};

using FieldPtr = std::shared_ptr<const NumberField>;

class NFElem {
public:
    NFElem() = default;
    NFElem(FieldPtr f, std::vector<Rational> coords);
    static NFElem from_rational(FieldPtr f, const Rational& q);
    static NFElem generator(FieldPtr f);

    const FieldPtr& field() const { return f_; }
    const Poly& poly() const { return p_; }
    std::vector<Rational> coordinates() const;
    bool is_zero() const { return p_.is_zero(); }

    NFElem operator+(const NFElem& o) const;
    NFElem operator-(const NFElem& o) const;
    NFElem operator*(const NFElem& o) const;
    NFElem inverse() const;
    NFElem pow(long e) const;
    bool operator==(const NFElem& o) const { return p_ == o.p_; }

    BigComplex eval(unsigned bits) const;

private:
    FieldPtr f_;
    Poly p_;
};

BigComplex real_root_refine(const NumberField& field, unsigned bits);
BigReal nf_log_abs(const NFElem& e, unsigned bits);

}  // namespace greencm

#include "greencm/qforms.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

namespace greencm {

long double CMPoint::x() const { return -static_cast<long double>(form.b) / (2.0L * form.a); }

long double CMPoint::y() const {
    return std::sqrt(static_cast<long double>(-form.disc())) / (2.0L * form.a);
}

BigComplex CMPoint::z(unsigned bits) const {
    PrecisionScope ps(bits);
    BigReal two_a = BigReal(2 * form.a);
    BigReal re = BigReal(-form.b) / two_a;
    BigReal im = sqrt(BigReal(-form.disc())) / two_a;
    return {re, im};
}

Rational HeegnerDivisor::total_weight() const {
    Rational s = 0;
    for (auto& [w, p] : terms) s += w;
    return s;
}

BQF reduce_form(const BQF& f0) {
    if (f0.a <= 0 || f0.disc() >= 0) throw MathError("reduce_form: form is not positive definite");
    BQF f = f0;
    while (true) {
        // translate b into (-a, a]
        if (f.b <= -f.a || f.b > f.a) {
            long long k = (f.a - f.b) / (2 * f.a);
            if ((f.a - f.b) < 0 && (f.a - f.b) % (2 * f.a)) --k;
            // b' = b + 2ak, c' = a k^2 + b k + c
            f.c = f.a * k * k + f.b * k + f.c;
            f.b = f.b + 2 * f.a * k;
        }
        if (f.a > f.c) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            continue;
        }
        break;
    }
    if (f.a == f.c && f.b < 0) f.b = -f.b;
    return f;
}

bool is_reduced(const BQF& f) {
    if (f.a <= 0 || f.disc() >= 0) return false;
    if (std::llabs(f.b) > f.a || f.a > f.c) return false;
    if ((std::llabs(f.b) == f.a || f.a == f.c) && f.b < 0) return false;
    return true;
}

namespace {

void check_disc(long long D) {
    if (D >= 0 || (((D % 4) + 4) % 4 != 0 && ((D % 4) + 4) % 4 != 1))
        throw MathError("invalid negative discriminant " + std::to_string(D));
}

// all reduced forms of discriminant D, primitive or not
std::vector<BQF> reduced_forms(long long D, bool primitive_only) {
    check_disc(D);
    std::vector<BQF> out;
    const long long N = -D;
    for (long long a = 1; 3 * a * a <= N; ++a)
        for (long long b = -a + 1; b <= a; ++b) {
            if (((b * b + N) % (4 * a)) != 0) continue;
            long long c = (b * b + N) / (4 * a);
            BQF f{a, b, c};
            if (!is_reduced(f)) continue;
            if (primitive_only && std::gcd(std::gcd(a, std::llabs(b)), c) != 1) continue;
            out.push_back(f);
        }
    return out;
}

}  // namespace

std::vector<BQF> class_representatives(long long D) { return reduced_forms(D, true); }

int stabilizer_order(const BQF& f0) {
    BQF f = reduce_form(f0);
    if (f.b == 0 && f.a == f.c) return 4;
    if (f.a == f.b && f.b == f.c) return 6;
    return 2;
}

bool is_fundamental_discriminant(long long d) {
    if (d == 1) return true;
    if (d == 0) return false;
    auto squarefree = [](long long n) {
        n = std::llabs(n);
        for (long long p = 2; p * p <= n; ++p)
            if (n % (p * p) == 0) return false;
        return true;
    };
    long long m = ((d % 4) + 4) % 4;
    if (m == 1) return squarefree(d);
    if (m == 0) {
        long long e = d / 4;
        long long r = ((e % 4) + 4) % 4;
        return (r == 2 || r == 3) && squarefree(e);
    }
    return false;
}

long long kronecker(long long D, long long n) {
    if (n == 0) return std::llabs(D) == 1 ? 1 : 0;
    long long r = 1;
    if (n < 0) {
        n = -n;
        if (D < 0) r = -r;
    }
    while (n % 2 == 0) {
        n /= 2;
        if (D % 2 == 0) return 0;
        long long m8 = ((D % 8) + 8) % 8;
        if (m8 == 3 || m8 == 5) r = -r;
    }
    // Jacobi symbol (D/n), n odd positive
    long long a = ((D % n) + n) % n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            if (n % 8 == 3 || n % 8 == 5) r = -r;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) r = -r;
        a %= n;
    }
    return n == 1 ? r : 0;
}

namespace {

// small values represented by [a,b,c], scanning shells of growing sup-norm
template <class Pred>
bool find_represented(long long a, long long b, long long c, long long R, Pred pred, long long& found) {
    auto val = [&](long long x, long long y) { return a * x * x + b * x * y + c * y * y; };
    for (long long s = 1; s <= R; ++s)
        for (long long t = -s; t <= s; ++t)
            for (long long u : {-s, s}) {
                for (auto [x, y] : {std::pair{t, u}, std::pair{u, t}}) {
                    long long n = val(x, y);
                    if (n != 0 && pred(n)) {
                        found = n;
                        return true;
                    }
                }
            }
    return false;
}

std::vector<long long> prime_factors(long long n) {
    n = std::llabs(n);
    std::vector<long long> ps;
    for (long long p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) ps.push_back(n);
    return ps;
}

}  // namespace

int genus_character_local(long long delta, long long a, long long b, long long c) {
    if (delta == 1) return 1;
    long long D = b * b - 4 * a * c;
    if (D % delta != 0) return 0;
    long long g = std::gcd(std::gcd(std::llabs(a), std::llabs(b)), std::gcd(std::llabs(c), std::llabs(delta)));
    if (g != 1) return 0;
    // delta = product of prime discriminants p*
    long long odd = delta;
    while (odd % 2 == 0) odd /= 2;
    const long long oddstar = (((odd % 4) + 4) % 4 == 1) ? odd : -odd;
    int chi = 1;
    const long long R = std::llabs(delta) + std::llabs(D) + 2;
    for (long long p : prime_factors(delta)) {
        long long pstar = p == 2 ? delta / oddstar : (p % 4 == 1 ? p : -p);
        long long n = 0;
        if (!find_represented(a, b, c, R, [&](long long v) { return v % p != 0; }, n)) return 0;
        chi *= static_cast<int>(kronecker(pstar, n));
    }
    return chi;
}

int genus_character_abc(long long delta, long long a, long long b, long long c) {
    if (delta == 1) return 1;
    long long D = b * b - 4 * a * c;
    if (D % delta != 0) return 0;
    long long g = std::gcd(std::gcd(std::llabs(a), std::llabs(b)), std::gcd(std::llabs(c), std::llabs(delta)));
    if (g != 1) return 0;
    const long long R = std::llabs(delta) + std::llabs(D);
    long long n = 0;
    if (find_represented(a, b, c, R, [&](long long v) { return std::gcd(std::llabs(v), std::llabs(delta)) == 1; }, n))
        return static_cast<int>(kronecker(delta, n));
    return genus_character_local(delta, a, b, c);
}

int genus_character(long long delta, const BQF& f) { return genus_character_abc(delta, f.a, f.b, f.c); }

HeegnerDivisor twisted_divisor(long long delta, long long r, const Rational& m) {
    if (delta != 1 && !is_fundamental_discriminant(delta))
        throw MathError("twisted_divisor: Delta must be 1 or a fundamental discriminant");
    if ((((delta - r * r) % 4) + 4) % 4 != 0) throw MathError("twisted_divisor: need Delta = r^2 mod 4");
    if (m <= 0) throw MathError("twisted_divisor: m must be positive");
    Rational Dq = -4 * m * std::llabs(delta);
    if (!is_integer(Dq)) throw MathError("twisted_divisor: -4m|Delta| is not an integer");
    long long D = to_ll(Dq);
    check_disc(D);
    HeegnerDivisor out;
    for (const BQF& f : reduced_forms(D, false)) {
        int chi = genus_character(delta, f);
        if (chi == 0) continue;
        out.terms.emplace_back(rat(2 * chi, stabilizer_order(f)), CMPoint{f});
    }
    return out;
}

HeegnerDivisor heegner_divisor(long long d) {
    check_disc(d);
    return twisted_divisor(1, 1, rat(-d, 4));
}

std::pair<long, long> exponent2_survey(long long bound) {
    if (bound < 4) throw MathError("exponent2_survey: bound must be at least 4");
    long fields = 0, good = 0;
    for (long long n = 3; n < bound; ++n) {
        long long D = -n;
        if (!is_fundamental_discriminant(D)) continue;
        ++fields;
        bool ok = true;
        for (const BQF& f : class_representatives(D))
            if (!(f.b == 0 || f.a == f.b || f.a == f.c)) {
                ok = false;
                break;
            }
        if (ok) ++good;
    }
    return {fields, good};
}

}  // namespace greencm

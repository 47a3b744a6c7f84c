#pragma once

#include "greencm/arith.hpp"

#include <tuple>
#include <utility>
#include <vector>

namespace greencm {

struct BQF {
    long long a = 0, b = 0, c = 0;
    long long disc() const { return b * b - 4 * a * c; }
    bool operator==(const BQF& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const BQF& o) const {
        return std::tie(a, b, c) < std::tie(o.a, o.b, o.c);
    }
};

struct CMPoint {
    BQF form;
    // z = (-b + i sqrt|D|)/(2a)
    long double x() const;
    long double y() const;
    BigComplex z(unsigned bits) const;
};

struct HeegnerDivisor {
    std::vector<std::pair<Rational, CMPoint>> terms;
    Rational total_weight() const;
};

BQF reduce_form(const BQF& f);
bool is_reduced(const BQF& f);
std::vector<BQF> class_representatives(long long D);
int stabilizer_order(const BQF& f);

long long kronecker(long long D, long long n);
bool is_fundamental_discriminant(long long d);  // 1 counts

// chi_Delta on an arbitrary integral form [a,b,c] (any signature); 0 unless Delta | b^2-4ac
int genus_character(long long delta, const BQF& f);
int genus_character_abc(long long delta, long long a, long long b, long long c);
// product of local characters over primes dividing Delta (certified fallback)
int genus_character_local(long long delta, long long a, long long b, long long c);

HeegnerDivisor twisted_divisor(long long delta, long long r, const Rational& m);
// C(d) := Z_1(|d|/4)
HeegnerDivisor heegner_divisor(long long d);

std::pair<long, long> exponent2_survey(long long bound);

}  // namespace greencm

#pragma once

#include "greencm/arith.hpp"
#include "greencm/discforms.hpp"

#include <optional>
#include <string>
#include <vector>

namespace greencm {

struct ScalarForm {
    long weight = 0;
    RSeries expansion;  // integer exponents
};

// half-integral weight form in the plus space, scalar model q -> q^4:
// exponent e of the stored series corresponds to q^{e/4} in the vector model
struct PlusForm {
    long j = 0;       // weight 1/2 - j
    long pivot = 0;   // leading exponent (scalar model)
    RSeries scalar;

    Rational weight() const { return rat(1, 2) - j; }
    bool admissible(long e) const;
    VVSeries<Rational> vector_avatar() const;
};

bool plus_admissible(long j, long e);  // (-1)^j e = 0,1 mod 4

// the same inverse map, used for round-trip tests
RSeries scalar_from_vector(const VVSeries<Rational>& f);

// classical series, exact, known below exponent `order`
RSeries eisenstein_series(long k, long order);  // k >= 4 even; E_2 also accepted via k = 2
RSeries delta_series(long order);
RSeries eta_power_product(long e, long order);  // prod (1-q^n)^e
RSeries theta_series_1d(long order);            // sum q^{n^2}
RSeries theta1_series_1d(long order);           // sum (-1)^n q^{n^2}

// level one forms E4^a E6^b Delta^{-n} of weight k with pole order <= nmax
std::vector<RSeries> level1_forms(long k, long nmax, long order);

ScalarForm standard_input(long j, long order);  // E4^{3-j/2}/Delta (even j), E10/Delta (j = 1)

struct PlusBasis {
    long j = 0;
    long depth = 0;
    long order = 0;       // coefficients known below this scalar exponent
    long A = 0;           // largest pivot: f_m = q^{-m} + O(q^{A+1})
    std::vector<PlusForm> forms;  // sorted by pivot

    const PlusForm& element(long pivot) const;  // throws if absent
    bool has(long pivot) const;
};

// reduced echelon basis with pivots at all admissible exponents in [-depth, A]
PlusBasis plus_space_basis(long j, long depth, long order);

// surd q * sqrt(rad), rad squarefree positive
struct Surd {
    Rational q = 1;
    long long rad = 1;
    Surd operator*(const Surd& o) const;
    BigReal value(unsigned bits) const;
    std::string to_string() const;
};
Surd surd_sqrt(const Rational& x);  // sqrt of a positive rational

struct ZagierLift {
    long j = 0;
    long long d = 0;
    Surd prefactor;  // Za = prefactor * cleared
    PlusForm cleared;
};

// |d|^{-j/2} sum_m c_f(-m) sum_{n|m} (d/n) n^j f_{|d| m^2/n^2}
ZagierLift zagier_lift(const ScalarForm& f, long long d, long j, long order);

struct DualityBases {
    PlusBasis f;  // weight 1/2 - j
    PlusBasis g;  // weight 3/2 + j
    Rational a(long m, long n) const;  // coefficient of q^n in f_m (scalar model)
    Rational b(long n, long m) const;  // coefficient of q^m in g_n
};
DualityBases duality_bases(long j, long depth, long order);

// B(n) = sum_{d|n} d^{2j} (D0/d) b(m0 n^2/d^2, mu0 n/d); nullopt where b is unknown
std::vector<std::optional<Rational>> shimura_lift(const VVSeries<Rational>& g, const Rational& m0,
                                                  const DiscVector& mu0, long long D0, long j, long nmax);

}  // namespace greencm

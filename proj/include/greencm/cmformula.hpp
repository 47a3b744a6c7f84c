#pragma once

#include "greencm/arith.hpp"
#include "greencm/discforms.hpp"
#include "greencm/greeneval.hpp"
#include "greencm/maassfield.hpp"
#include "greencm/qforms.hpp"
#include "greencm/thetablocks.hpp"
#include "greencm/whbasis.hpp"

#include <optional>
#include <vector>

namespace greencm {

struct CMSetup {
    long long d2 = 0;
    int r2 = 0;
    long long delta = 1;
    int r = 1;
    long long d1 = 0;
    long j = 0;
    Rational m1;

    RatVector x2;             // (a,b,c) coordinates
    LatticeInV L, LDelta;     // level one lattice and its Delta-rescaling
    LatticeInV P0, N0;        // P = Z (2/(2-r2)) x2 and its complement inside L
    LatticeInV P, N, M;       // P_Delta, N_Delta, M_Delta = P_Delta + N_Delta
    DiscGroupPtr Pgroup, Ngroup, Mgroup;
    UHPoint z2;               // CM point of x2
    BQF z2_form;
    Rational vmin;            // lowest exponent of the G+ principal part
};

CMSetup build_cm_setup(long long d2, long long delta, long long d1, long j);

struct FunctionalTerm {
    Rational m;
    DiscVector mu;  // folded, in setup.Ngroup
    Rational coeff;
};

// value = scale * sum coeff * c(m, mu)
struct CoefficientFunctional {
    Surd scale;
    std::vector<FunctionalTerm> terms;
    Rational trunc;  // series order used

    bool is_zero() const { return terms.empty(); }
};

// functional for the divisor value sum_{Z_Delta(m1)} G^f_{j+1}(., z2)
CoefficientFunctional formula_functional(const CMSetup& s, const ScalarForm& f, long order = 0);

// same functional divided by the total weight of the divisor (the single CM point for class number one)
CoefficientFunctional per_point(const CMSetup& s, const CoefficientFunctional& F);

// N_Delta coordinates of a folded class, as used by the tables
RatVector functional_coordinates(const CMSetup& s, const DiscVector& mu);

BigReal evaluate_cm_value(const CMSetup& s, const CoefficientFunctional& F, const CoefficientTable& t, unsigned bits);

HeegnerDivisor cm_divisor(const CMSetup& s);

struct CrossCheck {
    BigReal formula;
    long double direct = 0;
    long double direct_tol = 0;
    long double difference = 0;
    bool pass = false;
};

CrossCheck crosscheck_direct(const CMSetup& s, const ScalarForm& f, const CoefficientTable& t, long double tol,
                             const std::optional<CoefficientFunctional>& F = std::nullopt);

}  // namespace greencm

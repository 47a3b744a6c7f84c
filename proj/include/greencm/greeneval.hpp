#pragma once

#include "greencm/arith.hpp"
#include "greencm/qforms.hpp"
#include "greencm/whbasis.hpp"

#include <optional>
#include <string>

namespace greencm {

struct SingularityError : MathError {
    using MathError::MathError;
};

struct UHPoint {
    long double x = 0, y = 1;
    std::optional<BQF> cm;

    static UHPoint from_form(const BQF& f);
};

// "i", "x+yi", "x,y" or "(p+sqrt(-N))/q"
UHPoint parse_point(const std::string& s);

// ---------------------------------------------------------------------------
// special functions, MPFR (bits of working precision)

BigReal gauss_2f1(const BigReal& a, const BigReal& b, const BigReal& c, const BigReal& z, unsigned bits);

// Q_{s-1}(t) = Gamma(s)^2/(2 Gamma(2s)) (2/(1+t))^s F(s,s,2s;2/(1+t))
BigReal legendre_q(const BigReal& s, const BigReal& t, unsigned bits);
// integer order n: P_n(t) log((t+1)/(t-1))/2 - W_{n-1}(t)
BigReal legendre_q_closed(long n, const BigReal& t, unsigned bits);
// int_0^oo (t + sqrt(t^2-1) cosh u)^{-s} du by double exponential quadrature
long double legendre_q_integral(long double s, long double t);

// long double production path, order nu = s - 1 >= 0
long double legendre_q_fast(long double nu, long double t);
// int_T^oo Q_nu(t) dt from the 1/t^2 expansion
long double legendre_q_tail(long double nu, long double T);

// ---------------------------------------------------------------------------

struct GreenResult {
    long double value = 0;
    long double certified_tol = 0;  // doubling estimate |V(T) - V(T/2)|
    long long terms = 0;
    long double T = 0;
    double seconds = 0;
};

// G_s^m(z1, z2) = -2 sum over matrices of determinant m modulo +-1 of Q_{s-1}(cosh d(z1, gamma z2))
GreenResult green_hecke(long double s, long m, const UHPoint& z1, const UHPoint& z2, long double tol);

// Phi_{m,mu}(z, s) on the level one lattice: the lambda-sum with hypergeometric terms
GreenResult phi_m_mu(const UHPoint& z, long double s, const Rational& m, int mu, long double tol);

// sum over divisor points of weight * sum_m c_f(-m) m^j G_{j+1}^m(point, z2)
GreenResult green_divisor(long j, const ScalarForm& f, const HeegnerDivisor& div, const UHPoint& z2,
                          long double tol);

}  // namespace greencm

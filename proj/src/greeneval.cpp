#include "greencm/greeneval.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <chrono>
#include <cmath>
#include <numeric>
#include <regex>

namespace greencm {

UHPoint UHPoint::from_form(const BQF& f) {
    CMPoint p{f};
    return UHPoint{p.x(), p.y(), f};
}

UHPoint parse_point(const std::string& s0) {
    std::string s;
    for (char c : s0)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s == "i") return {0.0L, 1.0L, BQF{1, 0, 1}};
    std::smatch m;
    static const std::regex cm(R"(\(?(-?\d+)?([+-])sqrt\((-\d+)\)\)?/(\d+))");
    if (std::regex_match(s, m, cm)) {
        long long p = m[1].matched ? std::stoll(m[1]) : 0;
        long long D = std::stoll(m[3]);
        long long q = std::stoll(m[4]);
        if (m[2] == "-") throw MathError("parse_point: point must lie in the upper half-plane");
        // z = (p + sqrt(D))/q = (-b + sqrt(D))/(2a)
        if (q % 2 == 0) {
            long long a = q / 2, b = -p;
            if ((b * b - D) % (4 * a) == 0) return UHPoint::from_form(BQF{a, b, (b * b - D) / (4 * a)});
        }
        return {static_cast<long double>(p) / q, std::sqrt(static_cast<long double>(-D)) / q, std::nullopt};
    }
    static const std::regex pair(R"(([-+0-9.eE]+),([-+0-9.eE]+))");
    if (std::regex_match(s, m, pair)) {
        long double y = std::stold(m[2]);
        if (y <= 0) throw MathError("parse_point: imaginary part must be positive");
        return {std::stold(m[1]), y, std::nullopt};
    }
    static const std::regex cart(R"(([-+]?[0-9.eE]+)?([-+][0-9.eE]*)\*?i)");
    if (std::regex_match(s, m, cart)) {
        long double x = m[1].matched ? std::stold(m[1]) : 0.0L;
        std::string ys = m[2];
        long double y = (ys == "+" || ys == "-") ? (ys == "+" ? 1.0L : -1.0L) : std::stold(ys);
        if (y <= 0) throw MathError("parse_point: imaginary part must be positive");
        return {x, y, std::nullopt};
    }
    throw MathError("parse_point: cannot parse '" + s0 + "'");
}

// ---------------------------------------------------------------------------

BigReal gauss_2f1(const BigReal& a0, const BigReal& b0, const BigReal& c0, const BigReal& z0, unsigned bits) {
    PrecisionScope ps(bits + 16);
    BigReal a = a0, b = b0, c = c0, z = z0;
    if (c <= 0 && floor(c) == c) throw MathError("gauss_2f1: c is a non-positive integer");
    if (abs(z) >= 1) throw MathError("gauss_2f1: |z| must be below 1");
    BigReal eps = pow(BigReal(2), -static_cast<int>(bits));
    BigReal term = 1, sum = 1;
    const long cap = 50000000;
    for (long n = 0; n < cap; ++n) {
        BigReal ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * z;
        term *= ratio;
        sum += term;
        if (term == 0) return sum;
        BigReal next = abs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2)) * z);
        BigReal r = next > abs(z) ? next : BigReal(abs(z));
        if (r < 1) {
            // ratios are eventually monotone towards |z|, so the tail is geometric with rate r
            BigReal tail = abs(term) * r / (1 - r);
            if (tail <= eps * abs(sum)) return sum;
        }
    }
    throw MathError("gauss_2f1: no convergence, z too close to 1 for the requested precision");
}

BigReal legendre_q(const BigReal& s0, const BigReal& t0, unsigned bits) {
    PrecisionScope ps(bits + 32);
    BigReal s = s0, t = t0;
    if (t <= 1) throw MathError("legendre_q: t must exceed 1");
    BigReal w = 2 / (1 + t);
    BigReal pre = tgamma(s) * tgamma(s) / (2 * tgamma(2 * s)) * pow(w, s);
    return pre * gauss_2f1(s, s, 2 * s, w, bits + 16);
}

BigReal legendre_q_closed(long n, const BigReal& t0, unsigned bits) {
    if (n < 0) throw MathError("legendre_q_closed: negative order");
    // cancellation loses about log2(t^{2n+1}) bits
    double lt = std::log2(std::max(2.0, t0.convert_to<double>()));
    unsigned guard = static_cast<unsigned>(lt * (2 * n + 1)) + 32;
    PrecisionScope ps(bits + guard);
    BigReal t = t0;
    if (t <= 1) throw MathError("legendre_q_closed: t must exceed 1");
    std::vector<BigReal> P(static_cast<size_t>(n + 1));
    P[0] = 1;
    if (n >= 1) P[1] = t;
    for (long k = 1; k < n; ++k) P[k + 1] = ((2 * k + 1) * t * P[k] - k * P[k - 1]) / (k + 1);
    BigReal L = log((t + 1) / (t - 1)) / 2;
    BigReal W = 0;
    for (long k = 1; k <= n; ++k) W += P[k - 1] * P[n - k] / k;
    return P[n] * L - W;
}

long double legendre_q_integral(long double s, long double t) {
    boost::math::quadrature::exp_sinh<long double> integrator;
    const long double r = std::sqrt(t * t - 1);
    auto f = [&](long double u) { return std::pow(t + r * std::cosh(u), -s); };
    return integrator.integrate(f);
}

namespace {

// Q_nu(t) = sqrt(pi) Gamma(nu+1) / (Gamma(nu+3/2) (2t)^{nu+1}) F((nu+1)/2, (nu+2)/2; nu+3/2; 1/t^2)
struct LegendreSeries {
    long double nu = -1, lead = 0;
    long inu = -1;  // nu when integral
    std::vector<long double> c;  // coefficients of t^{-nu-1-2k}

    void prepare(long double v) {
        if (v == nu) return;
        nu = v;
        inu = (std::fabs(nu - std::round(nu)) < 1e-18L && nu < 64) ? static_cast<long>(std::round(nu)) : -1;
        lead = std::sqrt(std::acos(-1.0L)) * std::tgamma(nu + 1) / (std::tgamma(nu + 1.5L) * std::pow(2.0L, nu + 1));
        c.assign(1, lead);
        long double a = (nu + 1) / 2, b = (nu + 2) / 2, g = nu + 1.5L;
        for (int k = 0; k < 400; ++k) {
            long double next = c.back() * (a + k) * (b + k) / ((g + k) * (k + 1));
            c.push_back(next);
        }
    }
    long double value(long double t) const {
        const long double w = 1 / (t * t);
        long double p;
        if (inu >= 0) {
            p = 1 / t;
            for (long i = 0; i < inu; ++i) p /= t;
        } else {
            p = std::pow(t, -nu - 1);
        }
        long double sum = 0;
        for (size_t k = 0; k < c.size(); ++k) {
            long double term = c[k] * p;
            sum += term;
            if (term < sum * 1e-21L) break;
            p *= w;
        }
        return sum;
    }
    long double tail(long double T) const {
        const long double w = 1 / (T * T);
        long double sum = 0, p = std::pow(T, -nu);
        for (size_t k = 0; k < c.size(); ++k) {
            long double term = c[k] * p / (nu + 2 * static_cast<long double>(k));
            sum += term;
            if (term < sum * 1e-21L) break;
            p *= w;
        }
        return sum;
    }
};

thread_local LegendreSeries tl_series;

long double closed_form_ld(long n, long double t) {
    long double p0 = 1, p1 = t;
    std::vector<long double> P{1.0L, t};
    for (long k = 1; k < n; ++k) P.push_back(((2 * k + 1) * t * P[k] - k * P[k - 1]) / (k + 1));
    (void)p0;
    (void)p1;
    long double L = 0.5L * std::log((t + 1) / (t - 1));
    long double W = 0;
    for (long k = 1; k <= n; ++k) W += P[k - 1] * P[n - k] / k;
    return P[n] * L - W;
}

long double near_form_ld(long double nu, long double t) {
    // Gamma(s)^2/(2Gamma(2s)) w^s F(s,s;2s;w), w = 2/(1+t), s = nu+1
    long double s = nu + 1, w = 2 / (1 + t);
    long double pre = std::exp(2 * std::lgamma(s) - std::lgamma(2 * s)) / 2 * std::pow(w, s);
    long double term = 1, sum = 1;
    for (long n = 0; n < 20000000; ++n) {
        term *= (s + n) * (s + n) / ((2 * s + n) * (n + 1)) * w;
        sum += term;
        if (term < 1e-21L * sum && n > 4) break;
    }
    return pre * sum;
}

}  // namespace

long double legendre_q_fast(long double nu, long double t) {
    if (t <= 1) throw SingularityError("legendre_q: argument at the logarithmic singularity");
    if (t >= 1.5L) {
        tl_series.prepare(nu);
        return tl_series.value(t);
    }
    long double r = std::round(nu);
    if (std::fabs(nu - r) < 1e-15L) return closed_form_ld(static_cast<long>(r), t);
    return near_form_ld(nu, t);
}

long double legendre_q_tail(long double nu, long double T) {
    tl_series.prepare(nu);
    return tl_series.tail(T);
}

// ---------------------------------------------------------------------------

namespace {

struct Kahan {
    long double sum = 0, comp = 0;
    void add(long double x) {
        long double y = x - comp;
        long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

void egcd(long long a, long long b, long long& x, long long& y) {
    // x a + y b = gcd(a,b) (= 1 here)
    long long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        long long q = a / b;
        std::tie(a, b) = std::pair{b, a - q * b};
        std::tie(x0, x1) = std::pair{x1, x0 - q * x1};
        std::tie(y0, y1) = std::pair{y1, y0 - q * y1};
    }
    if (a < 0) {
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
}

// sum over gamma in PSL2(Z) of F(t(z1, gamma z2)) for t <= T
template <class F>
void psl2_orbit_sum(const UHPoint& z1, long double x2, long double y2, long double Tlo, long double T, F visit) {
    const long double x1 = z1.x, y1 = z1.y;
    const long double Ymin = y1 * (T - std::sqrt(T * T - 1));
    const long double R = y2 / Ymin;
    const long long cmax = static_cast<long long>(std::sqrt(R) / y2) + 1;
    for (long long c = 0; c <= cmax; ++c) {
        long long dlo, dhi;
        if (c == 0) {
            dlo = dhi = 1;
        } else {
            long double w = R - (c * y2) * (c * y2);
            if (w < 0) continue;
            w = std::sqrt(w);
            dlo = static_cast<long long>(std::ceil(-c * x2 - w));
            dhi = static_cast<long long>(std::floor(-c * x2 + w));
        }
        for (long long d = dlo; d <= dhi; ++d) {
            if (std::gcd(c, d) != 1) continue;
            long long a, b;
            if (c == 0) {
                a = 1;
                b = 0;
            } else {
                // a d - b c = 1
                long long u, v;
                egcd(d, c, u, v);
                a = u;
                b = -v;
            }
            long double cx = c * x2 + d, cy = c * y2;
            long double den = cx * cx + cy * cy;
            long double Y = y2 / den;
            long double X = ((a * x2 + b) * cx + a * c * y2 * y2) / den;
            long double W = 2 * y1 * Y * (T - 1) - (y1 - Y) * (y1 - Y);
            if (W < 0) continue;
            W = std::sqrt(W);
            long long nlo = static_cast<long long>(std::ceil(x1 - X - W));
            long long nhi = static_cast<long long>(std::floor(x1 - X + W));
            long double base = (y1 - Y) * (y1 - Y);
            for (long long n = nlo; n <= nhi; ++n) {
                long double dx = x1 - X - n;
                long double t = 1 + (dx * dx + base) / (2 * y1 * Y);
                if (t <= T && t > Tlo) visit(t);
            }
        }
    }
}

long long sigma1(long m) {
    long long s = 0;
    for (long d = 1; d <= m; ++d)
        if (m % d == 0) s += d;
    return s;
}

}  // namespace

GreenResult green_hecke(long double s, long m, const UHPoint& z1, const UHPoint& z2, long double tol) {
    if (s <= 1) throw MathError("green_hecke: s must exceed 1");
    if (m <= 0) throw MathError("green_hecke: m must be positive");
    if (tol <= 0) throw MathError("green_hecke: tolerance must be positive");
    // the sums run in long double
    if (tol < 1e-16L) throw MathError("green_hecke: tolerance below the working precision (1e-16)");
    auto t0 = std::chrono::steady_clock::now();
    const long double nu = s - 1;
    // Hecke translates (A z2 + B)/D, AD = m, 0 <= B < D
    std::vector<std::pair<long double, long double>> pts;
    for (long A = 1; A <= m; ++A) {
        if (m % A) continue;
        long D = m / A;
        for (long B = 0; B < D; ++B) pts.emplace_back((A * z2.x + B) / D, A * z2.y / D);
    }
    const long double density = 6.0L * static_cast<long double>(sigma1(m));
    // shells (T/2, T] are added incrementally
    Kahan k;
    long long terms = 0;
    auto extend = [&](long double Tlo, long double T) {
        for (auto& [x2, y2] : pts)
            psl2_orbit_sum(z1, x2, y2, Tlo, T, [&](long double t) {
                if (t < 1 + 1e-14L)
                    throw SingularityError("green_hecke: z1 lies on the Hecke orbit of z2 (logarithmic singularity)");
                k.add(legendre_q_fast(nu, t));
                ++terms;
            });
        return -2 * (k.sum + density * legendre_q_tail(nu, T));
    };
    GreenResult r;
    long double T = 32;
    long double prev = extend(0, T);
    const long double Tmax = 1LL << 30;
    while (true) {
        T *= 2;
        long double cur = extend(T / 2, T);
        long double diff = std::fabs(cur - prev);
        if (diff < tol / 2) {
            r.value = cur;
            r.certified_tol = diff;
            break;
        }
        if (T >= Tmax) throw MathError("green_hecke: tolerance unachievable within the enumeration budget");
        prev = cur;
    }
    r.terms = terms;
    r.T = T;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// ---------------------------------------------------------------------------

GreenResult phi_m_mu(const UHPoint& z, long double s, const Rational& m, int mu, long double tol) {
    if (s <= 1.25L) throw MathError("phi_m_mu: need s > 5/4");
    if (m <= 0) throw MathError("phi_m_mu: m must be positive");
    if (!(tol >= 1e-16L)) throw MathError("phi_m_mu: tolerance below the working precision (1e-16)");
    auto t0 = std::chrono::steady_clock::now();
    // lambda = (a,b,c) in mu + L: b = mu mod 2, Q = ac - b^2/4 = m
    const Rational D4 = -4 * m;
    GreenResult r;
    if (!is_integer(D4) || (((to_ll(D4) % 4) + 4) % 4 != (mu ? 1 : 0))) {
        r.seconds = 0;
        return r;  // not represented
    }
    const long long D = to_ll(D4);
    const long double mm = static_cast<long double>(m.convert_to<double>());
    const long double sm = std::sqrt(mm);
    const long double x = z.x, y = z.y;
    const long double a1 = s - 0.25L, b1 = s + 0.25L, c1 = 2 * s;
    const long double pre = 2 * std::tgamma(a1) / std::tgamma(c1);
    // term(t) = pre * sum_k coef_k t^{-2 a1 - 2k}
    std::vector<long double> coef{1.0L};
    for (int k = 0; k < 2000; ++k) coef.push_back(coef.back() * (a1 + k) * (b1 + k) / ((c1 + k) * (k + 1)));
    auto term = [&](long double t) {
        long double w = 1 / (t * t);
        long double sum = 0, p = std::pow(w, a1);
        for (size_t k = 0; k < coef.size(); ++k) {
            long double tk = coef[k] * p;
            sum += tk;
            if (tk < 1e-21L * sum) return pre * sum;
            p *= w;
        }
        // close to t = 1: fall back to the plain series in w
        long double f = 1, tk = 1;
        for (long n = 0; n < 50000000; ++n) {
            tk *= (a1 + n) * (b1 + n) / ((c1 + n) * (n + 1)) * w;
            f += tk;
            if (tk < 1e-21L * f) break;
        }
        return pre * std::pow(w, a1) * f;
    };
    auto tail = [&](long double T) {
        long double sum = 0, p = std::pow(T, 1 - 2 * a1);
        for (size_t k = 0; k < coef.size(); ++k) {
            long double tk = coef[k] * p / (2 * a1 + 2 * static_cast<long double>(k) - 1);
            sum += tk;
            if (tk < 1e-21L * sum) break;
            p /= T * T;
        }
        return pre * sum;
    };
    // lambda count density per unit t: 2 signs * 6 * sum over classes of 2/w
    Rational hw = 0;
    for (auto& [w, p] : twisted_divisor(1, mu, m).terms) hw += w;
    const long double density = 12.0L * static_cast<long double>(hw.convert_to<double>());
    Kahan k;
    long long terms = 0;
    auto extend = [&](long double Tlo, long double T) {
        // c|z - b/2c|^2-type bound: c y^2 <= 2 sqrt(m) y T
        const long double B = 2 * sm * y * T;
        const long long cmax = static_cast<long long>(B / (y * y)) + 1;
        for (long long c = 1; c <= cmax; ++c) {
            long double rem = (B - c * y * y - mm / c) / c;
            if (rem < 0) continue;
            long double w = std::sqrt(rem);
            long long blo = static_cast<long long>(std::ceil(2 * c * (x - w))) - 1;
            long long bhi = static_cast<long long>(std::floor(2 * c * (x + w))) + 1;
            for (long long b = blo; b <= bhi; ++b) {
                if (((b % 2) + 2) % 2 != mu) continue;
                long long num = b * b - D;  // 4ac
                if (num % (4 * c)) continue;
                long long a = num / (4 * c);
                long double val = a - b * x + c * (x * x + y * y);
                long double t = std::fabs(val) / (2 * sm * y);
                if (t > T || t <= Tlo) continue;
                if (t < 1 + 1e-14L) throw SingularityError("phi_m_mu: z is a CM point of the divisor");
                k.add(2 * term(t));  // lambda and -lambda
                terms += 2;
            }
        }
        return k.sum + density * tail(T);
    };
    long double T = 32;
    long double prev = extend(0, T);
    while (true) {
        T *= 2;
        long double cur = extend(T / 2, T);
        long double diff = std::fabs(cur - prev);
        if (diff < tol / 2) {
            r.value = cur;
            r.certified_tol = diff;
            break;
        }
        if (T > (1LL << 28)) throw MathError("phi_m_mu: tolerance unachievable within the enumeration budget");
        prev = cur;
    }
    r.terms = terms;
    r.T = T;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

GreenResult green_divisor(long j, const ScalarForm& f, const HeegnerDivisor& div, const UHPoint& z2,
                          long double tol) {
    auto t0 = std::chrono::steady_clock::now();
    if (f.expansion.den() != 1) throw MathError("green_divisor: expected integral exponents");
    std::vector<std::pair<long, long double>> pp;  // (m, c_f(-m) m^j)
    for (long e = f.expansion.start(); e < 0 && e < f.expansion.trunc(); ++e) {
        const Rational& c = f.expansion.at(e);
        if (c == 0) continue;
        long m = -e;
        pp.emplace_back(m, static_cast<long double>(c.convert_to<double>()) * std::pow(static_cast<long double>(m), j));
    }
    long double wsum = 0;
    for (auto& [w, p] : div.terms) wsum += std::fabs(static_cast<long double>(w.convert_to<double>()));
    long double csum = 0;
    for (auto& [m, c] : pp) csum += std::fabs(c);
    GreenResult r;
    if (wsum == 0 || csum == 0) return r;
    const long double inner_tol = tol / (wsum * csum);
    Kahan acc;
    long double cert = 0;
    for (auto& [w, p] : div.terms) {
        long double wv = static_cast<long double>(w.convert_to<double>());
        UHPoint z1 = UHPoint::from_form(p.form);
        for (auto& [m, c] : pp) {
            GreenResult g = green_hecke(static_cast<long double>(j + 1), m, z1, z2, inner_tol);
            acc.add(wv * c * g.value);
            cert += std::fabs(wv * c) * g.certified_tol;
            r.terms += g.terms;
            r.T = std::max(r.T, g.T);
        }
    }
    r.value = acc.sum;
    r.certified_tol = cert;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace greencm

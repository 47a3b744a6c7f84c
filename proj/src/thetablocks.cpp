#include "greencm/thetablocks.hpp"

#include <cmath>

namespace greencm {

Rational gen_binomial(const Rational& x, long s) {
    if (s < 0) return 0;
    Rational r = 1;
    for (long i = 0; i < s; ++i) r = r * (x - i) / (i + 1);
    return r;
}

namespace {

using Entries = std::map<DiscVector, std::map<Rational, Rational>>;

VVSeries<Rational> assemble(const DiscGroupPtr& G, const Entries& ent, const Rational& order) {
    VVSeries<Rational> out{G, {}, order};
    for (auto& [mu, terms] : ent) {
        long d = static_cast<long>(to_ll(denom(order)));
        for (auto& [e, c] : terms) d = lcm_ll(d, to_ll(denom(e)));
        long t = static_cast<long>(to_ll(order * d));
        RSeries s(d, 0, t);
        for (auto& [e, c] : terms) s.at(static_cast<long>(to_ll(e * d))) += c;
        out.comp.emplace(mu, s.normalized());
    }
    return out;
}

// all y in Z^n (dual coordinates G^{-1} y) with Q < order
template <class Visit>
void enumerate_dual(const EvenLattice& P, const Rational& order, Visit visit) {
    const int n = P.rank();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.gram().cast<double>());
    double lmax = es.eigenvalues().maxCoeff();
    long R = static_cast<long>(std::sqrt(2.0 * order.convert_to<double>() * lmax)) + 1;
    std::vector<long> y(static_cast<size_t>(n), -R);
    const RatMatrix& Gi = P.gram_inverse();
    while (true) {
        RatVector yv(n);
        for (int i = 0; i < n; ++i) yv(i) = y[static_cast<size_t>(i)];
        RatVector x = Gi * yv;
        Rational q = P.Q(x);
        if (q < order) visit(x, q);
        int i = 0;
        while (i < n && y[static_cast<size_t>(i)] == R) y[static_cast<size_t>(i++)] = -R;
        if (i == n) break;
        ++y[static_cast<size_t>(i)];
    }
}

}  // namespace

ThetaSeries theta_series(const EvenLattice& P, const Rational& order, DiscGroupPtr group) {
    auto [pos, neg] = P.signature();
    if (neg != 0) throw MathError("theta_series: lattice is not positive definite");
    (void)pos;
    if (!group) group = std::make_shared<DiscGroup>(P);
    Entries ent;
    enumerate_dual(P, order, [&](const RatVector& x, const Rational& q) { ent[group->reduce(x)][q] += 1; });
    return {assemble(group, ent, order), rat(P.rank(), 2), Surd{}};
}

ThetaSeries theta_weight32(const LatticeInV& P, const RatVector& ray, const Rational& order, DiscGroupPtr group) {
    if (P.lattice.rank() != 1) throw MathError("theta_weight32: expected a rank one lattice");
    const long long g = P.lattice.gram()(0, 0);
    if (g <= 0) throw MathError("theta_weight32: lattice is not positive definite");
    Rational orient = b_abc(P.basis.col(0), ray);
    if (orient == 0) throw MathError("theta_weight32: ray is orthogonal to the lattice");
    const int sign = orient > 0 ? 1 : -1;
    if (!group) group = std::make_shared<DiscGroup>(P.lattice);
    Entries ent;
    enumerate_dual(P.lattice, order, [&](const RatVector& x, const Rational& q) {
        if (x(0) == 0) return;
        ent[group->reduce(x)][q] += Rational(sign) * x(0);
    });
    // p(lambda)/sqrt|Delta| = sign * y * sqrt(g/2) for lambda = y * basis
    return {assemble(group, ent, order), rat(3, 2), surd_sqrt(Rational(g) / 2)};
}

}  // namespace greencm

#pragma once

#include "greencm/arith.hpp"
#include "greencm/qforms.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace greencm {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using RatMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RatVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using CMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic> to_rational(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
    Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic> r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
    return r;
}

// exact determinant (fraction-free elimination)
template <class Scalar>
Rational determinant(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m0) {
    RatMatrix m = to_rational(m0);
    const Eigen::Index n = m.rows();
    Rational det = 1;
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = c;
        while (p < n && m(p, c) == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            m.row(p).swap(m.row(c));
            det = -det;
        }
        det *= m(c, c);
        for (Eigen::Index r = c + 1; r < n; ++r) {
            if (m(r, c) == 0) continue;
            Rational f = m(r, c) / m(c, c);
            for (Eigen::Index k = c; k < n; ++k) m(r, k) -= f * m(c, k);
        }
    }
    return det;
}

RatMatrix rational_inverse(const RatMatrix& m);

class EvenLattice {
public:
    EvenLattice() = default;
    explicit EvenLattice(IntMatrix gram);

    const IntMatrix& gram() const { return gram_; }
    int rank() const { return static_cast<int>(gram_.rows()); }
    std::pair<int, int> signature() const { return signature_; }
    Integer det() const;
    const RatMatrix& gram_inverse() const { return ginv_; }

    Rational Q(const RatVector& x) const;
    Rational B(const RatVector& x, const RatVector& y) const;
    bool in_dual(const RatVector& x) const;

private:
    IntMatrix gram_;
    RatMatrix ginv_;
    std::pair<int, int> signature_{0, 0};
};

EvenLattice rescale_lattice(const EvenLattice& M, long long delta);

struct DiscVector {
    std::vector<long> c;
    bool operator<(const DiscVector& o) const { return c < o.c; }
    bool operator==(const DiscVector& o) const { return c == o.c; }
    bool operator!=(const DiscVector& o) const { return c != o.c; }
};

// L'/L via Smith normal form of the Gram matrix
class DiscGroup {
public:
    explicit DiscGroup(EvenLattice L);

    const EvenLattice& lattice() const { return L_; }
    const std::vector<long>& orders() const { return orders_; }
    long size() const { return size_; }

    DiscVector zero() const { return DiscVector{std::vector<long>(orders_.size(), 0)}; }
    std::vector<DiscVector> elements() const;
    long index(const DiscVector& v) const;
    DiscVector element(long idx) const;

    DiscVector add(const DiscVector& a, const DiscVector& b) const;
    DiscVector neg(const DiscVector& a) const;
    DiscVector scale(long k, const DiscVector& a) const;
    long order_of(const DiscVector& a) const;
    // canonical representative of {a, -a}
    DiscVector fold(const DiscVector& a) const;

    Rational Q(const DiscVector& a) const;  // in [0,1)
    Rational B(const DiscVector& a, const DiscVector& b) const;

    RatVector lift(const DiscVector& a) const;    // coordinates in the lattice basis
    DiscVector reduce(const RatVector& x) const;  // x must lie in L'
    const RatMatrix& generators() const { return gens_; }

private:
    EvenLattice L_;
    std::vector<long> orders_;  // invariant factors > 1
    long size_ = 1;
    RatMatrix gens_;        // columns: generators in lattice coordinates
    RatMatrix coord_map_;   // rows: functionals giving generator coordinates
};

using DiscGroupPtr = std::shared_ptr<const DiscGroup>;

// vector valued q-series indexed by a discriminant group; absent components are zero
template <class C>
struct VVSeries {
    DiscGroupPtr group;
    std::map<DiscVector, QSeries<C>> comp;
    Rational trunc = 0;

    QSeries<C> component(const DiscVector& v) const {
        auto it = comp.find(v);
        if (it != comp.end()) return it->second;
        return QSeries<C>::zero(trunc);
    }
};

// matrices of rho_L(T), rho_L(S) indexed by DiscGroup::elements() order
std::pair<CMatrix, CMatrix> weil_rep_generators(const DiscGroup& G);

// lattice together with its basis inside the space of trace-zero 2x2 matrices, written as
// (a,b,c) for [[b/2,-a],[c,-b/2]]; the lattice form is Q_V/scale
struct LatticeInV {
    EvenLattice lattice;
    RatMatrix basis;  // 3 x rank
    long long scale = 1;
};

Rational q_abc(const RatVector& x);                     // ac - b^2/4
Rational b_abc(const RatVector& x, const RatVector& y);  // a c' + a' c - b b'/2

LatticeInV make_lattice_in_v(const RatMatrix& basis, long long scale = 1);
LatticeInV level1_lattice();
LatticeInV rescale_lattice(const LatticeInV& M, long long delta);

// f_M per the sublattice lemma: M' / M components pulled back from L'/L
template <class C>
VVSeries<C> restrict_to_sublattice(const VVSeries<C>& f, const LatticeInV& L, const LatticeInV& M,
                                   DiscGroupPtr gm = nullptr);

// psi_Delta as a sparse linear map phi_mu -> sum chi(delta) phi_delta
struct PsiMap {
    DiscGroupPtr src;  // L'/L
    DiscGroupPtr dst;  // L'/Delta L
    LatticeInV target;
    std::map<DiscVector, std::vector<std::pair<DiscVector, int>>> image;

    template <class C>
    VVSeries<C> apply(const VVSeries<C>& f) const {
        VVSeries<C> out{dst, {}, f.trunc};
        for (auto& [mu, series] : f.comp) {
            auto it = image.find(mu);
            if (it == image.end()) continue;
            for (auto& [delta, chi] : it->second) {
                auto jt = out.comp.find(delta);
                QSeries<C> term = series.scaled(Rational(chi));
                if (jt == out.comp.end()) out.comp.emplace(delta, term);
                else jt->second = jt->second + term;
            }
        }
        return out;
    }
    CMatrix matrix() const;  // |dst| x |src|
};

PsiMap psi_delta(const LatticeInV& L, long long delta, long long r);

// ---------------------------------------------------------------------------

template <class C>
VVSeries<C> restrict_to_sublattice(const VVSeries<C>& f, const LatticeInV& L, const LatticeInV& M,
                                   DiscGroupPtr gm) {
    if (L.scale != M.scale) throw MathError("restrict_to_sublattice: lattices carry different forms");
    RatMatrix lb = L.basis;
    // coordinates of M's basis in L's basis
    RatMatrix sol = rational_inverse(lb.transpose() * lb) * lb.transpose() * M.basis;
    if (!(lb * sol == M.basis)) throw MathError("restrict_to_sublattice: M is not inside L");
    for (Eigen::Index i = 0; i < sol.rows(); ++i)
        for (Eigen::Index j = 0; j < sol.cols(); ++j)
            if (!is_integer(sol(i, j))) throw MathError("restrict_to_sublattice: M is not a sublattice of L");
    if (!gm) gm = std::make_shared<DiscGroup>(M.lattice);
    VVSeries<C> out{gm, {}, f.trunc};
    for (const auto& mu : gm->elements()) {
        RatVector x = sol * gm->lift(mu);
        if (!f.group->lattice().in_dual(x)) continue;
        DiscVector m = f.group->reduce(x);
        auto it = f.comp.find(m);
        if (it != f.comp.end()) out.comp.emplace(mu, it->second);
    }
    return out;
}

}  // namespace greencm

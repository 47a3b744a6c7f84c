#include "greencm/discforms.hpp"

#include "greencm/qforms.hpp"

#include <cmath>
#include <numbers>

namespace greencm {

RatMatrix rational_inverse(const RatMatrix& m0) {
    const Eigen::Index n = m0.rows();
    if (m0.cols() != n) throw MathError("rational_inverse: matrix not square");
    RatMatrix m = m0;
    RatMatrix inv = RatMatrix::Identity(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = c;
        while (p < n && m(p, c) == 0) ++p;
        if (p == n) throw MathError("rational_inverse: singular matrix");
        m.row(p).swap(m.row(c));
        inv.row(p).swap(inv.row(c));
        Rational piv = m(c, c);
        m.row(c) /= piv;
        inv.row(c) /= piv;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == c || m(r, c) == 0) continue;
            Rational f = m(r, c);
            m.row(r) -= f * m.row(c);
            inv.row(r) -= f * inv.row(c);
        }
    }
    return inv;
}

EvenLattice::EvenLattice(IntMatrix gram) : gram_(std::move(gram)) {
    if (gram_.rows() != gram_.cols()) throw MathError("Gram matrix not square");
    for (Eigen::Index i = 0; i < gram_.rows(); ++i) {
        if (gram_(i, i) % 2) throw MathError("Gram matrix has odd diagonal entry");
        for (Eigen::Index j = 0; j < gram_.cols(); ++j)
            if (gram_(i, j) != gram_(j, i)) throw MathError("Gram matrix not symmetric");
    }
    if (determinant(gram_) == 0) throw MathError("degenerate Gram matrix");
    ginv_ = rational_inverse(to_rational(gram_));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_.cast<double>());
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) (es.eigenvalues()(i) > 0 ? pos : neg)++;
    signature_ = {pos, neg};
}

Integer EvenLattice::det() const { return numer(determinant(gram_)); }

Rational EvenLattice::B(const RatVector& x, const RatVector& y) const {
    RatVector gy = to_rational(gram_) * y;
    Rational s = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += x(i) * gy(i);
    return s;
}

Rational EvenLattice::Q(const RatVector& x) const { return B(x, x) / 2; }

bool EvenLattice::in_dual(const RatVector& x) const {
    RatVector g = to_rational(gram_) * x;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (!is_integer(g(i))) return false;
    return true;
}

EvenLattice rescale_lattice(const EvenLattice& M, long long delta) {
    if (!is_fundamental_discriminant(delta)) throw MathError("rescale_lattice: Delta is not a fundamental discriminant");
    return EvenLattice(M.gram() * std::llabs(delta));
}

// ---------------------------------------------------------------------------

namespace {

struct Smith {
    std::vector<long long> d;
    IntMatrix V, Vinv;
};

Smith smith_form(const IntMatrix& g) {
    const Eigen::Index n = g.rows();
    IntMatrix A = g;
    IntMatrix V = IntMatrix::Identity(n, n), Vinv = IntMatrix::Identity(n, n);
    auto col_swap = [&](Eigen::Index i, Eigen::Index j) {
        A.col(i).swap(A.col(j));
        V.col(i).swap(V.col(j));
        Vinv.row(i).swap(Vinv.row(j));
    };
    // col_j -= q col_t
    auto col_sub = [&](Eigen::Index j, Eigen::Index t, long long q) {
        A.col(j) -= q * A.col(t);
        V.col(j) -= q * V.col(t);
        Vinv.row(t) += q * Vinv.row(j);
    };
    for (Eigen::Index t = 0; t < n; ++t) {
        while (true) {
            Eigen::Index pi = -1, pj = -1;
            long long best = 0;
            for (Eigen::Index i = t; i < n; ++i)
                for (Eigen::Index j = t; j < n; ++j)
                    if (A(i, j) != 0 && (best == 0 || std::llabs(A(i, j)) < best)) {
                        best = std::llabs(A(i, j));
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) break;
            A.row(pi).swap(A.row(t));
            if (pj != t) col_swap(pj, t);
            bool clean = true;
            for (Eigen::Index i = t + 1; i < n; ++i) {
                long long q = A(i, t) / A(t, t);
                A.row(i) -= q * A.row(t);
                if (A(i, t) != 0) clean = false;
            }
            for (Eigen::Index j = t + 1; j < n; ++j) {
                long long q = A(t, j) / A(t, t);
                col_sub(j, t, q);
                if (A(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            bool divides = true;
            for (Eigen::Index i = t + 1; i < n && divides; ++i)
                for (Eigen::Index j = t + 1; j < n; ++j)
                    if (A(i, j) % A(t, t) != 0) {
                        A.row(t) += A.row(i);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (A(t, t) < 0) {
            A.col(t) *= -1;
            V.col(t) *= -1;
            Vinv.row(t) *= -1;
        }
    }
    Smith s;
    for (Eigen::Index i = 0; i < n; ++i) s.d.push_back(A(i, i));
    s.V = V;
    s.Vinv = Vinv;
    return s;
}

long mod_pos(long a, long m) { return ((a % m) + m) % m; }

}  // namespace

DiscGroup::DiscGroup(EvenLattice L) : L_(std::move(L)) {
    Smith s = smith_form(L_.gram());
    const Eigen::Index n = L_.rank();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (s.d[i] == 0) throw MathError("degenerate Gram matrix");
        if (s.d[i] > 1) keep.push_back(i);
    }
    gens_ = RatMatrix(n, static_cast<Eigen::Index>(keep.size()));
    coord_map_ = RatMatrix(static_cast<Eigen::Index>(keep.size()), n);
    RatMatrix V = to_rational(s.V), Vinv = to_rational(s.Vinv);
    for (size_t k = 0; k < keep.size(); ++k) {
        Eigen::Index i = keep[k];
        orders_.push_back(static_cast<long>(s.d[i]));
        size_ *= static_cast<long>(s.d[i]);
        gens_.col(static_cast<Eigen::Index>(k)) = V.col(i) / Rational(s.d[i]);
        coord_map_.row(static_cast<Eigen::Index>(k)) = Vinv.row(i) * Rational(s.d[i]);
    }
}

std::vector<DiscVector> DiscGroup::elements() const {
    std::vector<DiscVector> out;
    out.reserve(static_cast<size_t>(size_));
    for (long i = 0; i < size_; ++i) out.push_back(element(i));
    return out;
}

long DiscGroup::index(const DiscVector& v) const {
    long idx = 0;
    for (size_t i = 0; i < orders_.size(); ++i) idx = idx * orders_[i] + v.c[i];
    return idx;
}

DiscVector DiscGroup::element(long idx) const {
    DiscVector v = zero();
    for (size_t i = orders_.size(); i-- > 0;) {
        v.c[i] = idx % orders_[i];
        idx /= orders_[i];
    }
    return v;
}

DiscVector DiscGroup::add(const DiscVector& a, const DiscVector& b) const {
    DiscVector r = zero();
    for (size_t i = 0; i < orders_.size(); ++i) r.c[i] = mod_pos(a.c[i] + b.c[i], orders_[i]);
    return r;
}

DiscVector DiscGroup::neg(const DiscVector& a) const { return scale(-1, a); }

DiscVector DiscGroup::scale(long k, const DiscVector& a) const {
    DiscVector r = zero();
    for (size_t i = 0; i < orders_.size(); ++i) r.c[i] = mod_pos(k * a.c[i], orders_[i]);
    return r;
}

long DiscGroup::order_of(const DiscVector& a) const {
    long o = 1;
    for (size_t i = 0; i < orders_.size(); ++i) o = std::lcm(o, orders_[i] / std::gcd(orders_[i], a.c[i]));
    return o;
}

DiscVector DiscGroup::fold(const DiscVector& a) const {
    DiscVector n = neg(a);
    return n < a ? n : a;
}

Rational DiscGroup::Q(const DiscVector& a) const { return frac_part(L_.Q(lift(a))); }

Rational DiscGroup::B(const DiscVector& a, const DiscVector& b) const {
    return frac_part(L_.B(lift(a), lift(b)));
}

RatVector DiscGroup::lift(const DiscVector& a) const {
    RatVector x = RatVector::Zero(L_.rank());
    for (size_t i = 0; i < orders_.size(); ++i) x += gens_.col(static_cast<Eigen::Index>(i)) * Rational(a.c[i]);
    return x;
}

DiscVector DiscGroup::reduce(const RatVector& x) const {
    if (!L_.in_dual(x)) throw MathError("DiscGroup::reduce: vector not in the dual lattice");
    RatVector y = coord_map_ * x;
    DiscVector v = zero();
    for (size_t i = 0; i < orders_.size(); ++i) {
        if (!is_integer(y(static_cast<Eigen::Index>(i)))) throw MathError("DiscGroup::reduce: internal coordinate error");
        v.c[i] = mod_pos(static_cast<long>(to_ll(y(static_cast<Eigen::Index>(i)))), orders_[i]);
    }
    return v;
}

std::pair<CMatrix, CMatrix> weil_rep_generators(const DiscGroup& G) {
    const long n = G.size();
    auto els = G.elements();
    CMatrix T = CMatrix::Zero(n, n), S(n, n);
    const long double tau = 2 * std::numbers::pi_v<long double>;
    auto e = [&](const Rational& q) {
        Rational f = frac_part(q);
        long double x = static_cast<long double>(numer(f).convert_to<long long>()) /
            static_cast<long double>(denom(f).convert_to<long long>());
        return std::polar(1.0L, tau * x);
    };
    auto [bp, bm] = G.lattice().signature();
    std::complex<long double> pre = e(rat(bm - bp, 8)) / std::sqrt(static_cast<long double>(n));
    for (long i = 0; i < n; ++i) {
        T(i, i) = e(G.Q(els[i]));
        for (long j = 0; j < n; ++j) S(j, i) = pre * e(-G.B(els[i], els[j]));
    }
    return {T, S};
}

// ---------------------------------------------------------------------------

Rational q_abc(const RatVector& x) { return x(0) * x(2) - x(1) * x(1) / 4; }

Rational b_abc(const RatVector& x, const RatVector& y) {
    return x(0) * y(2) + y(0) * x(2) - x(1) * y(1) / 2;
}

LatticeInV make_lattice_in_v(const RatMatrix& basis, long long scale) {
    const Eigen::Index n = basis.cols();
    IntMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            Rational v = b_abc(basis.col(i), basis.col(j)) / scale;
            if (!is_integer(v)) throw MathError("lattice basis gives a non-integral Gram matrix");
            g(i, j) = to_ll(v);
        }
    return LatticeInV{EvenLattice(g), basis, scale};
}

LatticeInV level1_lattice() {
    RatMatrix b = RatMatrix::Zero(3, 3);
    b(0, 0) = 1;
    b(1, 1) = 2;
    b(2, 2) = 1;
    return make_lattice_in_v(b);
}

LatticeInV rescale_lattice(const LatticeInV& M, long long delta) {
    if (!is_fundamental_discriminant(delta)) throw MathError("rescale_lattice: Delta is not a fundamental discriminant");
    LatticeInV r = make_lattice_in_v(M.basis * Rational(delta), M.scale * std::llabs(delta));
    return r;
}

PsiMap psi_delta(const LatticeInV& L, long long delta, long long r) {
    if (!is_fundamental_discriminant(delta)) throw MathError("psi_delta: Delta is not a fundamental discriminant");
    if ((((delta - r * r) % 4) + 4) % 4 != 0) throw MathError("psi_delta: parity mismatch, need Delta = r^2 mod 4");
    PsiMap out;
    out.src = std::make_shared<DiscGroup>(L.lattice);
    out.target = rescale_lattice(L, delta);
    out.dst = std::make_shared<DiscGroup>(out.target.lattice);
    const long long ad = std::llabs(delta);
    const int sgn = delta > 0 ? 1 : -1;
    for (const auto& mu : out.src->elements()) {
        RatVector xmu = out.src->lift(mu);
        Rational qmu = L.lattice.Q(xmu);
        std::vector<std::pair<DiscVector, int>> img;
        for (const auto& d : out.dst->elements()) {
            // ambient coordinates of delta in L's basis: Delta * (coordinates in the rescaled basis)
            RatVector xd = out.dst->lift(d) * Rational(delta);
            Rational qd = L.lattice.Q(xd) / ad;
            if (!is_integer(qd - Rational(sgn) * qmu)) continue;
            RatVector diff = xd - Rational(r) * xmu;
            bool in_l = true;
            for (Eigen::Index i = 0; i < diff.size(); ++i)
                if (!is_integer(diff(i))) in_l = false;
            if (!in_l) continue;
            RatVector abc = L.basis * xd;
            for (int i = 0; i < 3; ++i)
                if (!is_integer(abc(i))) throw MathError("psi_delta: dual vector is not integral in (a,b,c)");
            int chi = genus_character_abc(delta, to_ll(abc(0)), to_ll(abc(1)), to_ll(abc(2)));
            if (chi != 0) img.emplace_back(d, chi);
        }
        out.image.emplace(mu, std::move(img));
    }
    return out;
}

CMatrix PsiMap::matrix() const {
    CMatrix m = CMatrix::Zero(dst->size(), src->size());
    for (auto& [mu, img] : image)
        for (auto& [d, chi] : img) m(dst->index(d), src->index(mu)) += static_cast<long double>(chi);
    return m;
}

}  // namespace greencm

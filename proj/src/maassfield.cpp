#include "greencm/maassfield.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace greencm {

namespace {

using nlohmann::json;

Rational pair_rational(const json& v, const char* what) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw MathError(std::string("table: ") + what + " must be an integer pair [num, den]");
    long long d = v[1];
    if (d <= 0) throw MathError(std::string("table: ") + what + " has non-positive denominator");
    return rat(v[0].get<long long>(), d);
}

Rational decimal_field(const json& v, const char* what) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    throw MathError(std::string("table: ") + what + " must be a decimal string");
}

Rational to_rational_exact(const BigReal& x, int digits) { return parse_rational(decimal_string(x, digits)); }

}  // namespace

std::optional<Rational> CoefficientTable::smallest_index() const {
    if (entries.empty()) return std::nullopt;
    Rational lo = entries.begin()->first.first;
    for (auto& kv : entries) lo = std::min(lo, kv.first.first);
    return lo;
}

DiscVector CoefficientTable::key(const RatVector& x) const { return group->fold(group->reduce(x)); }

DiscVector CoefficientTable::key_from_generators(const std::vector<long>& k) const {
    if (k.size() != generators.size()) throw MathError("table: mu has the wrong number of coordinates");
    RatVector x = RatVector::Zero(group->lattice().rank());
    for (size_t i = 0; i < k.size(); ++i) x += Rational(k[i]) * generators[i];
    return key(x);
}

std::vector<long> CoefficientTable::label(const DiscVector& k0) const {
    const DiscVector k = group->fold(k0);
    std::vector<long> ord;
    for (auto& g : generators) ord.push_back(group->order_of(group->reduce(g)));
    std::vector<long> c(ord.size(), 0);
    while (true) {
        if (key_from_generators(c) == k) return c;
        size_t i = c.size();
        while (i > 0) {
            --i;
            if (++c[i] < ord[i]) break;
            c[i] = 0;
            if (i == 0) throw MathError("table: class is not generated by the listed generators");
        }
        if (c.empty()) throw MathError("table: class is not generated by the listed generators");
    }
}

CoefficientTable parse_table(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw MathError(std::string("table: invalid JSON: ") + e.what());
    }
    try {
        CoefficientTable t;
        const json& f = doc.at("field");
        std::vector<Integer> mp;
        for (auto& c : f.at("minpoly")) {
            if (!c.is_number_integer()) throw MathError("table: minpoly coefficients must be integers");
            mp.emplace_back(c.get<long long>());
        }
        const json& em = f.at("embedding");
        EmbeddingBox box{decimal_field(em.at("re"), "embedding.re"), decimal_field(em.at("im"), "embedding.im"),
                         decimal_field(em.at("radius"), "embedding.radius")};
        if (box.radius <= 0) throw MathError("table: embedding radius must be positive");
        t.field = std::make_shared<const NumberField>(mp, box);

        if (!doc.at("r").is_number_integer() || doc.at("r").get<long>() <= 0)
            throw MathError("table: r must be a positive integer");
        t.r = doc.at("r");

        const json& lat = doc.at("lattice");
        const json& g = lat.at("gram");
        const Eigen::Index n = static_cast<Eigen::Index>(g.size());
        IntMatrix gram(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (g[i].size() != static_cast<size_t>(n)) throw MathError("table: Gram matrix is not square");
            for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = g[i][j].get<long long>();
        }
        t.group = std::make_shared<DiscGroup>(EvenLattice(gram));
        if (lat.contains("generators")) {
            for (auto& gen : lat.at("generators")) {
                if (gen.size() != static_cast<size_t>(n)) throw MathError("table: generator has the wrong length");
                RatVector x(n);
                for (Eigen::Index i = 0; i < n; ++i) x(i) = pair_rational(gen[i], "generator coordinate");
                if (!t.group->lattice().in_dual(x)) throw MathError("table: generator is not in the dual lattice");
                t.generators.push_back(x);
            }
        } else {
            for (long i = 0; i < static_cast<long>(t.group->orders().size()); ++i) {
                DiscVector e = t.group->zero();
                e.c[static_cast<size_t>(i)] = 1;
                t.generators.push_back(t.group->lift(e));
            }
        }

        for (auto& e : doc.at("entries")) {
            Rational m = pair_rational(e.at("m"), "m");
            std::vector<long> k;
            for (auto& c : e.at("mu")) k.push_back(c.get<long>());
            DiscVector mu = t.key_from_generators(k);
            if (frac_part(m - t.group->Q(mu)) != 0)
                throw MathError("table: entry m = " + to_string(m) + " does not match Q(mu) mod 1");
            std::vector<Rational> coords;
            for (auto& c : e.at("alpha")) coords.push_back(pair_rational(c, "alpha coordinate"));
            if (static_cast<int>(coords.size()) > t.field->degree())
                throw MathError("table: alpha has more coordinates than the field degree");
            NFElem a(t.field, coords);
            if (a.is_zero()) throw MathError("table: alpha must be nonzero");
            if (!t.entries.emplace(std::pair{m, mu}, a).second)
                throw MathError("table: duplicate entry for m = " + to_string(m));
        }
        if (doc.contains("provenance")) t.provenance = doc.at("provenance").get<std::string>();
        return t;
    } catch (const json::exception& e) {
        throw MathError(std::string("table: schema violation: ") + e.what());
    }
}

CoefficientTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MathError("table: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_table(ss.str());
}

BigReal maass_coefficient(const CoefficientTable& t, const Rational& m, const DiscVector& mu0, unsigned bits) {
    DiscVector mu = t.group->fold(mu0);
    auto it = t.entries.find({m, mu});
    if (it != t.entries.end()) {
        BigReal v = nf_log_abs(it->second, bits);
        PrecisionScope ps(bits);
        return -v / t.r;
    }
    auto lo = t.smallest_index();
    PrecisionScope ps(bits);
    if (!lo || m < *lo) return BigReal(0);
    if (frac_part(m - t.group->Q(mu)) != 0) return BigReal(0);
    throw TableIncomplete("table incomplete: no coefficient for m = " + to_string(m));
}

GaloisMove identity_move(const CoefficientTable& t) {
    std::vector<Rational> img(static_cast<size_t>(t.field->degree()), Rational(0));
    if (img.size() > 1) img[1] = 1;
    else img[0] = -t.field->minpoly().coeff(0);
    return {img, t.field->box()};
}

std::vector<GaloisMove> conjugate_moves(const CoefficientTable& t) {
    auto rs = t.field->roots(160);
    PrecisionScope ps(192);
    BigReal sep = -1;
    for (size_t i = 0; i < rs.size(); ++i)
        for (size_t j = i + 1; j < rs.size(); ++j) {
            BigReal d = (rs[i].z - rs[j].z).abs();
            if (sep < 0 || d < sep) sep = d;
        }
    Rational radius = sep < 0 ? rat(1, 1000000) : to_rational_exact(sep / 8, 40);
    if (radius > rat(1, 1000000)) radius = rat(1, 1000000);
    std::vector<GaloisMove> out;
    GaloisMove id = identity_move(t);
    for (auto& r : rs) {
        EmbeddingBox b{to_rational_exact(r.z.re, 40), to_rational_exact(r.z.im, 40), radius};
        out.push_back({id.image, b});
    }
    return out;
}

CoefficientTable galois_act(const CoefficientTable& t, const GaloisMove& sigma) {
    const Poly& mp = t.field->minpoly();
    Poly img(sigma.image);
    if (img.degree() >= mp.degree()) img = img % mp;
    if (img.degree() < 1 && mp.degree() > 1) throw MathError("galois_act: image of the generator is rational");
    if (!mp.compose_mod(img, mp).is_zero())
        throw MathError("galois_act: image is not a root of the minimal polynomial");
    std::vector<Integer> ints = t.field->minpoly_integers();
    CoefficientTable out = t;
    out.field = std::make_shared<const NumberField>(ints, sigma.box);
    out.entries.clear();
    for (auto& [k, a] : t.entries) out.entries.emplace(k, NFElem(out.field, a.poly().compose_mod(img, mp).coeffs()));
    return out;
}

}  // namespace greencm

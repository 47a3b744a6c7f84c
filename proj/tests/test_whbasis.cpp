#include "greencm/basis_cache.hpp"
#include "greencm/whbasis.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace greencm;

namespace {

struct TempCache {
    std::filesystem::path dir;
    TempCache() {
        dir = std::filesystem::temp_directory_path() / ("greencm-test-" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(dir);
        set_cache_dir(dir);
        set_cache_enabled(true);
    }
    ~TempCache() {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
};

}  // namespace

TEST_CASE("Eisenstein series and Delta") {
    RSeries E4 = eisenstein_series(4, 12), E6 = eisenstein_series(6, 12);
    CHECK(E4.get(1) == 240);
    CHECK(E6.get(1) == -504);
    RSeries d = series_pow(E4, 3) - series_pow(E6, 2) - delta_series(12).scaled(Rational(1728));
    for (long n = 0; n < 12; ++n) CHECK(d.get(n) == 0);
    CHECK(delta_series(12).get(2) == -24);
    CHECK(eisenstein_series(2, 5).get(1) == -24);
    CHECK(eisenstein_series(12, 3).get(1) == rat(65520, 691));
}

TEST_CASE("standard inputs") {
    ScalarForm f = standard_input(2, 10);
    CHECK(f.weight == -4);
    CHECK(f.expansion.get(-1) == 1);
    CHECK(f.expansion.get(0) == 504);
    ScalarForm g = standard_input(1, 10);
    CHECK(g.weight == -2);
    CHECK(g.expansion.get(-1) == 1);
    CHECK(g.expansion.get(0) == -240);
    CHECK(standard_input(4, 5).weight == -8);
    CHECK_THROWS_AS(standard_input(3, 5), MathError);
}

TEST_CASE("plus-space admissibility") {
    CHECK(plus_admissible(2, 0));
    CHECK(plus_admissible(2, 1));
    CHECK(plus_admissible(2, -4));
    CHECK_FALSE(plus_admissible(2, -1));
    CHECK(plus_admissible(1, -1));
    CHECK(plus_admissible(1, 3));
    CHECK_FALSE(plus_admissible(1, 1));
}

TEST_CASE("plus-space basis is echelon with admissible support") {
    set_cache_enabled(false);
    PlusBasis B = plus_space_basis(2, 12, 24);
    for (long e = -12; e <= B.A; ++e) CHECK(B.has(e) == plus_admissible(2, e));
    for (auto& f : B.forms) {
        CHECK(f.scalar.get(f.pivot) == 1);
        for (auto& [e, c] : f.scalar.terms()) {
            CHECK(plus_admissible(2, static_cast<long>(to_ll(e))));
            // other pivots are cleared
            if (e != f.pivot && e <= B.A) CHECK_FALSE(B.has(static_cast<long>(to_ll(e))));
        }
    }
    set_cache_enabled(true);
}

TEST_CASE("Zagier lifts match the worked examples") {
    set_cache_enabled(false);
    ZagierLift z = zagier_lift(standard_input(2, 10), -4, 2, 24);
    CHECK(z.prefactor.to_string() == "1/4");
    const RSeries& s = z.cleared.scalar;
    CHECK(s.get(-4) == 1);
    CHECK(s.get(0) == -126);
    CHECK(s.get(1) == -1248);
    CHECK(s.get(4) == -111876);
    CHECK(s.get(5) == -362752);
    CHECK(s.get(-3) == 0);

    ZagierLift z1 = zagier_lift(standard_input(1, 10), 1, 1, 24);
    const RSeries& t = z1.cleared.scalar;
    std::vector<std::pair<long, long>> expect{{-1, 1},    {0, 10},     {3, -64},   {4, 108},   {7, -513},
                                              {8, 808},   {11, -2752}, {12, 4016}, {15, -11775}};
    for (auto& [e, c] : expect) CHECK(t.get(e) == c);
    CHECK_THROWS_AS(zagier_lift(standard_input(2, 10), 5, 2, 24), MathError);   // wrong sign
    CHECK_THROWS_AS(zagier_lift(standard_input(2, 10), -3, 1, 24), MathError);  // wrong weight
    set_cache_enabled(true);
}

TEST_CASE("zero input lifts to zero") {
    ScalarForm f{-4, RSeries::zero(Rational(10))};
    ZagierLift z = zagier_lift(f, -4, 2, 16);
    CHECK(z.cleared.scalar.is_zero_series());
}

TEST_CASE("vector avatar round trip") {
    set_cache_enabled(false);
    PlusBasis B = plus_space_basis(1, 8, 20);
    for (auto& f : B.forms) {
        VVSeries<Rational> v = f.vector_avatar();
        RSeries back = scalar_from_vector(v);
        for (long e = f.pivot; e < 20; ++e) CHECK(back.get(e) == f.scalar.get(e));
        // exponents are congruent to the norm mod 1, for the lattice or its negative
        std::set<int> signs;
        for (auto& [mu, c] : v.comp)
            for (auto& [e, x] : c.terms()) {
                if (frac_part(e - v.group->Q(mu)) == 0) signs.insert(1);
                else if (frac_part(e + v.group->Q(mu)) == 0) signs.insert(-1);
                else signs.insert(0);
            }
        CHECK(signs.count(0) == 0);
        CHECK(signs.size() == 1);
    }
    set_cache_enabled(true);
}

TEST_CASE("duality of the two bases") {
    set_cache_enabled(false);
    for (long j : {0L, 1L}) {
        DualityBases D = duality_bases(j, 16, 20);
        long pairs = 0;
        for (auto& f : D.f.forms)
            for (auto& g : D.g.forms) {
                long m = -f.pivot, n = -g.pivot;
                if (m >= 20 || n >= 20) continue;
                CHECK(D.a(m, n) == -D.b(n, m));
                ++pairs;
            }
        CHECK(pairs > 50);
    }
    set_cache_enabled(true);
}

TEST_CASE("basis cache round trip and corruption") {
    TempCache tc;
    PlusBasis a = plus_space_basis(2, 8, 16);
    auto path = cache_file(2, 8, 16);
    REQUIRE(std::filesystem::exists(path));
    auto loaded = cache_load(2, 8, 16);
    REQUIRE(loaded);
    REQUIRE(loaded->forms.size() == a.forms.size());
    for (size_t i = 0; i < a.forms.size(); ++i) CHECK(loaded->forms[i].scalar.terms() == a.forms[i].scalar.terms());

    // flip one coefficient: the checksum catches it and the basis is recomputed
    std::string text;
    {
        std::ifstream in(path);
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto pos = text.find("\"-1\"");
    if (pos == std::string::npos) pos = text.find("\"1\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 3, "\"7\"");
    {
        std::ofstream out(path);
        out << text;
    }
    CHECK_FALSE(cache_load(2, 8, 16));
    PlusBasis b = plus_space_basis(2, 8, 16);
    for (size_t i = 0; i < a.forms.size(); ++i) CHECK(b.forms[i].scalar.terms() == a.forms[i].scalar.terms());
    CHECK(cache_load(2, 8, 16));
}

TEST_CASE("surds") {
    Surd a = surd_sqrt(rat(21, 4));
    CHECK(a.q == rat(1, 2));
    CHECK(a.rad == 21);
    Surd b = surd_sqrt(Rational(12));
    CHECK(b.q == 2);
    CHECK(b.rad == 3);
    Surd c = a * surd_sqrt(Rational(21));
    CHECK(c.q == rat(21, 2));
    CHECK(c.rad == 1);
    CHECK_THROWS_AS(surd_sqrt(Rational(0)), MathError);
}

TEST_CASE("Shimura lift coefficient transform") {
    auto G = std::make_shared<DiscGroup>(EvenLattice([] {
        IntMatrix g(1, 1);
        g << 2;
        return g;
    }()));
    // random sparse coefficients on Z/2 with exponents m = Q(mu) mod 1
    std::mt19937 rng(7);
    VVSeries<Rational> g{G, {}, Rational(60)};
    std::map<std::pair<long, Rational>, Rational> b;
    for (long idx = 0; idx < 2; ++idx) {
        DiscVector mu = G->element(idx);
        RSeries s(4, 0, 240);
        for (long n = 0; n < 240; ++n) {
            Rational e = rat(n, 4);
            if (frac_part(e - G->Q(mu)) != 0 || rng() % 3) continue;
            Rational c(static_cast<long>(rng() % 19) - 9);
            s.at(n) = c;
            b[{idx, e}] = c;
        }
        g.comp.emplace(mu, s);
    }
    const Rational m0 = rat(1, 4);
    const DiscVector mu0 = G->element(1);
    const long long D0 = -4;  // -4 * m0 * 4 = -4
    auto B = shimura_lift(g, m0, mu0, D0, 1, 12);
    auto coef = [&](long idx, const Rational& e) {
        auto it = b.find({idx, e});
        return it == b.end() ? Rational(0) : it->second;
    };
    for (long n = 1; n <= 12; ++n) {
        Rational s = 0;
        for (long d = 1; d <= n; ++d) {
            if (n % d) continue;
            long e = n / d;
            s += Rational(d * d) * Rational(kronecker(D0, d)) * coef(e % 2, m0 * e * e);
        }
        REQUIRE(B[static_cast<size_t>(n)]);
        CHECK(*B[static_cast<size_t>(n)] == s);
    }
    CHECK(*B[1] == coef(1, m0));
    // beyond the truncation the coefficient is reported unknown
    auto far = shimura_lift(g, m0, mu0, D0, 1, 20);
    CHECK_FALSE(far[17]);
}

#include "support.hpp"

#include "qhecke/linalg.hpp"

#include <doctest.h>

using namespace qhecke;

namespace {

FMat from_ints(const Fp2Field& K, const std::vector<std::vector<i64>>& a) {
    FMat m(a.size(), std::vector<F2>(a[0].size()));
    for (size_t r = 0; r < a.size(); ++r)
        for (size_t c = 0; c < a[r].size(); ++c) m[r][c] = K.from_int(a[r][c]);
    return m;
}

F2 random_f2(const Fp2Field& K, testing::Rng& rng) { return K.make(rng.range(0, K.p - 1), rng.range(0, K.p - 1)); }

FMat random_fmat(const Fp2Field& K, size_t n, testing::Rng& rng) {
    FMat m = fmat_zero(n, n);
    for (auto& row : m)
        for (auto& x : row) x = random_f2(K, rng);
    return m;
}

// Horner evaluation of a polynomial at a square matrix.
FMat poly_at(const Fp2Field& K, const Poly& f, const FMat& M) {
    const size_t n = M.size();
    FMat acc = fmat_zero(n, n);
    for (size_t d = f.size(); d-- > 0;) {
        acc = fmat_mul(K, acc, M);
        for (size_t i = 0; i < n; ++i) acc[i][i] = K.add(acc[i][i], f[d]);
    }
    return acc;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("field axioms and Frobenius") {
    testing::Rng rng(1);
    for (i64 p : {2, 3, 5, 11, 13, 17, 41}) {
        const AlgebraParams A = build_algebra(p);
        const Fp2Field K(p, A.eps);
        CHECK(K.units().size() == static_cast<size_t>(p * p - 1));
        for (int it = 0; it < 1000; ++it) {
            const F2 x = random_f2(K, rng), y = random_f2(K, rng), z = random_f2(K, rng);
            CHECK(K.pow(x, p * p) == x);
            CHECK(K.mul(K.add(x, y), z) == K.add(K.mul(x, z), K.mul(y, z)));
            CHECK(K.mul(x, y) == K.mul(y, x));
            if (!x.is_zero()) {
                CHECK(K.mul(x, K.inv(x)) == K.from_int(1));
                CHECK(K.pow(x, p * p - 1) == K.from_int(1));
            }
        }
        CHECK_THROWS(K.inv(K.from_int(0)));
    }
}

TEST_CASE("unit indexing is lexicographic") {
    const Fp2Field K(11, 1);
    const auto units = K.units();
    for (size_t k = 0; k < units.size(); ++k) CHECK(K.unit_index(units[k]) == k);
    CHECK(units.front() == F2{0, 1});
    CHECK(K.unit_index(F2{1, 0}) == 10);
}

TEST_CASE("worked eigenvalues over F_11") {
    const Fp2Field K(11, 1);
    const FMat T2 = from_ints(K, {{6, 1}, {7, 0}});
    const FMat T3 = from_ints(K, {{8, 8}, {1, 4}});
    const Poly f = char_poly(K, T2);
    REQUIRE(f.size() == 3);
    CHECK(f[2] == K.from_int(1));
    CHECK(f[1] == K.from_int(-6));
    CHECK(f[0] == K.from_int(-7));
    // Roots by evaluation over all of F_11.
    std::vector<i64> roots;
    for (i64 x = 0; x < 11; ++x)
        if (poly_eval(K, f, K.from_int(x)).is_zero()) roots.push_back(x);
    CHECK(roots == std::vector<i64>{7, 10});

    auto e2 = eigenvalues(K, T2);
    REQUIRE(e2.size() == 2);
    CHECK(e2[0].value == K.from_int(7));
    CHECK(e2[1].value == K.from_int(10));
    auto e3 = eigenvalues(K, T3);
    REQUIRE(e3.size() == 2);
    CHECK(e3[0].value == K.from_int(5));
    CHECK(e3[1].value == K.from_int(7));

    const auto sys = simultaneous_eigensystems(K, {T2, T3});
    REQUIRE(sys.systems.size() == 2);
    CHECK(sys.unsplit_dimension == 0);
    CHECK(sys.systems[0].values == std::vector<F2>{K.from_int(7), K.from_int(5)});
    CHECK(sys.systems[1].values == std::vector<F2>{K.from_int(10), K.from_int(7)});
    for (const auto& s : sys.systems) {
        CHECK(s.multiplicity == 1);
        CHECK(s.diagonalizable);
    }
    // Eigenvectors (2, -3) and (1, 1).
    CHECK(fmat_mul(K, T2, from_ints(K, {{2}, {-3}})) == from_ints(K, {{20}, {-30}}));
    CHECK(fmat_mul(K, T3, from_ints(K, {{2}, {-3}})) == from_ints(K, {{-8}, {12}}));
    CHECK(fmat_mul(K, T2, from_ints(K, {{1}, {1}})) == from_ints(K, {{7}, {7}}));
    CHECK(fmat_mul(K, T3, from_ints(K, {{1}, {1}})) == from_ints(K, {{5}, {5}}));
}

TEST_CASE("identity, zero and duplicated inputs") {
    const Fp2Field K(13, 2);
    const FMat I = fmat_identity(4);
    const Poly f = char_poly(K, I);
    // (X - 1)^4 = X^4 - 4X^3 + 6X^2 - 4X + 1
    CHECK(f == Poly{K.from_int(1), K.from_int(-4), K.from_int(6), K.from_int(-4), K.from_int(1)});
    auto z = eigenvalues(K, fmat_zero(3, 3));
    REQUIRE(z.size() == 1);
    CHECK(z[0].value.is_zero());
    CHECK(z[0].multiplicity == 3);
    testing::Rng rng(2);
    const FMat M = random_fmat(K, 4, rng);
    const auto one = simultaneous_eigensystems(K, {M});
    const auto two = simultaneous_eigensystems(K, {M, M});
    REQUIRE(one.systems.size() == two.systems.size());
    for (size_t k = 0; k < one.systems.size(); ++k) {
        CHECK(two.systems[k].values[0] == one.systems[k].values[0]);
        CHECK(two.systems[k].values[1] == one.systems[k].values[0]);
        CHECK(two.systems[k].multiplicity == one.systems[k].multiplicity);
    }
    CHECK(two.unsplit_dimension == one.unsplit_dimension);
}

TEST_CASE("companion matrices recover their polynomial") {
    testing::Rng rng(3);
    const Fp2Field K(11, 1);
    for (int it = 0; it < 50; ++it) {
        const size_t n = rng.range(1, 6);
        Poly f(n + 1);
        for (size_t d = 0; d < n; ++d) f[d] = random_f2(K, rng);
        f[n] = K.from_int(1);
        FMat C = fmat_zero(n, n);
        for (size_t i = 1; i < n; ++i) C[i][i - 1] = K.from_int(1);
        for (size_t i = 0; i < n; ++i) C[i][n - 1] = K.neg(f[i]);
        CHECK(char_poly(K, C) == f);
    }
}

TEST_CASE("Cayley-Hamilton and kernel rank agreement") {
    testing::Rng rng(4);
    for (i64 p : {3, 7, 11}) {
        const Fp2Field K(p, build_algebra(p).eps);
        for (int it = 0; it < 30; ++it) {
            const FMat M = random_fmat(K, 4, rng);
            const FMat Z = poly_at(K, char_poly(K, M), M);
            CHECK(fmat_equal(Z, fmat_zero(4, 4)));
            size_t total = 0;
            for (const auto& e : eigenvalues(K, M)) {
                const FMat S = fmat_scalar_shift(K, M, e.value);
                CHECK(fmat_rank(K, S) < 4);
                const FMat ker = fmat_kernel(K, S);
                CHECK(fmat_equal(fmat_mul(K, S, ker), fmat_zero(4, ker[0].size())));
                CHECK(ker[0].size() == 4 - fmat_rank(K, S));
                total += e.multiplicity;
            }
            CHECK(total <= 4);
        }
    }
}

TEST_CASE("non-commuting input is rejected") {
    const Fp2Field K(5, 2);
    const FMat a = from_ints(K, {{1, 1}, {0, 1}});
    const FMat b = from_ints(K, {{1, 0}, {1, 1}});
    CHECK_FALSE(fmat_commute(K, a, b));
    CHECK_THROWS_AS(simultaneous_eigensystems(K, {a, b}), Error);
}

TEST_CASE("non-diagonalizable blocks are flagged") {
    const Fp2Field K(7, 1);
    const auto r = simultaneous_eigensystems(K, {from_ints(K, {{2, 1}, {0, 2}})});
    REQUIRE(r.systems.size() == 1);
    CHECK(r.systems[0].multiplicity == 2);
    CHECK_FALSE(r.systems[0].diagonalizable);
}

TEST_CASE("roots outside the base field but inside F_{p^2}") {
    const Fp2Field K(11, 1);
    // x^2 + 1 has roots +-i in F_121.
    const FMat M = from_ints(K, {{0, -1}, {1, 0}});
    auto e = eigenvalues(K, M);
    REQUIRE(e.size() == 2);
    CHECK(e[0].value == F2{0, 1});
    CHECK(e[1].value == F2{0, 10});
}

}

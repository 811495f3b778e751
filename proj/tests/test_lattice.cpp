#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace qhecke;
using testing::q;

namespace {

Gram random_definite(testing::Rng& rng) {
    for (;;) {
        std::array<std::array<i64, 4>, 4> B{};
        for (auto& row : B)
            for (auto& x : row) x = rng.range(-3, 3);
        Gram G(4, std::vector<mpq_class>(4));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                i64 s = 0;
                for (int k = 0; k < 4; ++k) s += B[k][a] * B[k][b];
                G[a][b] = s;
            }
        Mat4Q m;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) m[a][b] = G[a][b];
        if (det4(m) != 0) return G;
    }
}

// |v_a| <= sqrt(target * (G^-1)_aa) for every solution of v^T G v <= target.
long box_radius(const Gram& G, const mpq_class& target) {
    Mat4Q m;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m[a][b] = G[a][b];
    const Mat4Q inv = inverse4(m);
    double worst = 0;
    for (int a = 0; a < 4; ++a) worst = std::max(worst, mpq_class(target * inv[a][a]).get_d());
    return static_cast<long>(std::sqrt(worst)) + 1;
}

std::vector<std::array<Quat, 4>> bases11() { return testing::worked_bases_p11(); }

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("hermite normal form shape") {
    const Basis4 H = hnf({Vec4{2, 0, 0, 0}, Vec4{1, 3, 0, 0}, Vec4{5, 7, 4, 0}, Vec4{1, 1, 1, 6}, Vec4{0, 0, 2, 0}});
    for (int k = 0; k < 4; ++k) {
        CHECK(H[k][k] > 0);
        for (int c = 0; c < k; ++c) CHECK(H[k][c] == 0);
        for (int m = 0; m < k; ++m) {
            CHECK(H[m][k] >= 0);
            CHECK(H[m][k] < H[k][k]);
        }
    }
    CHECK_THROWS(hnf({Vec4{1, 0, 0, 0}, Vec4{0, 1, 0, 0}, Vec4{1, 1, 0, 0}}));
}

TEST_CASE("canonical form is invariant under recombination") {
    const Order O = maximal_order_basis(build_algebra(11));
    testing::Rng rng(3);
    const auto I2 = bases11()[1];
    const IdealLattice ref = lattice_from_generators(O, {I2.begin(), I2.end()});
    for (int it = 0; it < 100; ++it) {
        std::vector<Quat> g(I2.begin(), I2.end());
        for (int s = 0; s < 8; ++s) {
            const size_t a = rng.range(0, 3), b = rng.range(0, 3);
            if (a != b) g[a] = g[a] + g[b] * mpq_class(rng.range(-3, 3));
            std::swap(g[rng.range(0, 3)], g[rng.range(0, 3)]);
        }
        g.push_back(g[rng.range(0, 3)]);
        CHECK(lattice_from_generators(O, g) == ref);
    }
}

TEST_CASE("order and ideal lattices for p = 11") {
    const Order O = maximal_order_basis(build_algebra(11));
    const IdealLattice L = lattice_from_generators(O, {O.s.begin(), O.s.end()});
    CHECK(L == order_lattice(O));
    CHECK(L.den == 1);
    for (int k = 0; k < 4; ++k)
        for (int c = 0; c < 4; ++c) CHECK(L.b[k][c] == (k == c ? 1 : 0));
    CHECK(ideal_nrd(L) == 1);

    const auto I2b = bases11()[1];
    const IdealLattice I2 = lattice_from_generators(O, {I2b.begin(), I2b.end()});
    CHECK(lattice_index(I2) == 4);
    CHECK(ideal_nrd(I2) == 2);
    CHECK(is_left_ideal(O, I2));
    CHECK(conjugate_ideal(O, conjugate_ideal(O, I2)) == I2);
    CHECK(ideal_nrd(ideal_product(O, I2, conjugate_ideal(O, I2))) == 4);
    CHECK_THROWS(lattice_from_generators(O, {Quat::scalar(1), q("0", "1", "0", "0")}));
}

TEST_CASE("ideal norm matches the gcd of element norms") {
    const Order O = maximal_order_basis(build_algebra(11));
    const auto I2b = bases11()[1];
    const IdealLattice I2 = lattice_from_generators(O, {I2b.begin(), I2b.end()});
    mpz_class g = 0;
    for (int a = 0; a < 4; ++a) {
        g = gcd(g, nrd(O.params, I2b[a]).get_num());
        for (int b = a + 1; b < 4; ++b) g = gcd(g, nrd(O.params, I2b[a] + I2b[b]).get_num());
    }
    CHECK(mpq_class(g) == ideal_nrd(I2));
}

TEST_CASE("short vectors of the p = 11 norm form") {
    const Order O = maximal_order_basis(build_algebra(11));
    const Gram G = order_gram(O);
    const auto sols = short_vectors(G, 2);
    std::vector<IVec> expect{{-1, -1, 0, 0}, {-1, 1, 0, 0}, {1, -1, 0, 0}, {1, 1, 0, 0}};
    CHECK(sols == expect);
    CHECK(short_vectors(G, 0) == std::vector<IVec>{{0, 0, 0, 0}});
    CHECK(short_vectors(G, 1).size() == 4);
}

TEST_CASE("norm 12 with the worked congruences has no solution") {
    const Order O = maximal_order_basis(build_algebra(11));
    size_t passing = 0;
    for (const auto& v : short_vectors(order_gram(O), 12)) {
        const mpz_class t = v[0], x = v[1], y = v[2], z = v[3];
        const bool two = (t - y + z) % 2 == 0 && (t + y) % 2 == 0 && (x + y + z) % 4 == 0;
        const bool three = x % 3 == 0 && t % 3 == 0;
        if (two && three) ++passing;
    }
    CHECK(passing == 0);
}

TEST_CASE("short vectors agree with box search on random forms") {
    testing::Rng rng(17);
    for (int it = 0; it < 40; ++it) {
        Gram G;
        mpq_class target;
        // Redraw forms too skewed for an affordable box oracle.
        do {
            G = random_definite(rng);
            target = rng.range(1, 30);
        } while (box_radius(G, target) > 8);
        CAPTURE(it);
        CHECK(short_vectors(G, target) == short_vectors_box(G, target, box_radius(G, target)));
        const auto upto = vectors_up_to(G, target);
        size_t expect = 0;
        for (long t = 1; t <= mpz_class(target).get_si(); ++t) expect += short_vectors(G, t).size();
        CHECK(upto.size() == expect);
        CHECK(std::is_sorted(upto.begin(), upto.end()));
    }
}

TEST_CASE("indefinite forms are rejected") {
    Gram G(4, std::vector<mpq_class>(4, 0));
    G[0][0] = 1;
    G[1][1] = -1;
    G[2][2] = 1;
    G[3][3] = 1;
    CHECK_THROWS(short_vectors(G, 1));
    CHECK_THROWS(short_vectors(order_gram(maximal_order_basis(build_algebra(11))), -1));
}

TEST_CASE("reduced basis is unimodular and size reduced") {
    testing::Rng rng(5);
    for (int it = 0; it < 20; ++it) {
        const Gram G = random_definite(rng);
        const auto U = reduced_basis(G);
        REQUIRE(U.size() == 4);
        Mat4Q m;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) m[a][b] = U[a][b];
        CHECK(abs(det4(m)) == 1);
        std::vector<mpq_class> diag;
        for (const auto& u : U) diag.push_back(eval_form(G, u));
        CHECK(std::is_sorted(diag.begin(), diag.end()));
    }
}

TEST_CASE("impose form cuts the expected sublattice") {
    Basis4 L{};
    for (int k = 0; k < 4; ++k) L[k][k] = 1;
    const Basis4 S = impose_form(L, {1, 2, 0, 0}, 3, 2);
    Mat4Q m;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m[a][b] = mpq_class(S[a][b]);
    CHECK(det4(m) == 9);
    for (const auto& row : S) CHECK((row[0] + 2 * row[1]) % 9 == 0);
}

}

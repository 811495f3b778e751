#include "support.hpp"

#include <doctest.h>

using namespace qhecke;
using testing::q;

namespace {

// Independent epsilon rule: scans r and a directly from the defining conditions.
struct EpsOracle {
    i64 eps, r, a;
};

EpsOracle eps_oracle(i64 p) {
    if (p == 2 || p % 4 == 3) return {1, 0, 0};
    if (p % 8 == 5) return {2, 0, 0};
    for (i64 r = 3;; r += 4) {
        if (!testing::naive_prime(r)) continue;
        bool residue = false;
        for (i64 x = 1; x < r; ++x)
            if (x * x % r == p % r) residue = true;
        if (residue) continue;
        for (i64 a = 0; a < r; ++a)
            if ((a * a * p + 1) % r == 0) return {r, r, a};
    }
}

mpq_class det_bareiss(std::vector<std::vector<mpq_class>> m) {
    const size_t n = m.size();
    mpq_class d = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            d = -d;
        }
        d *= m[c][c];
        for (size_t r = c + 1; r < n; ++r) {
            mpq_class f = m[r][c] / m[c][c];
            for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return d;
}

mpq_class trace_pairing_det(const AlgebraParams& A, const std::array<Quat, 4>& s) {
    std::vector<std::vector<mpq_class>> g(4, std::vector<mpq_class>(4));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) g[a][b] = trd(mul(A, s[a], s[b]));
    return det_bareiss(g);
}

Quat random_quat(testing::Rng& rng) {
    Quat x;
    for (auto& c : x.c) c = mpq_class(rng.range(-20, 20), rng.range(1, 6));
    for (auto& c : x.c) c.canonicalize();
    return x;
}

}  // namespace

TEST_SUITE("quat") {

TEST_CASE("algebra parameters follow the residue rule") {
    CHECK(build_algebra(11).eps == 1);
    CHECK(build_algebra(2).eps == 1);
    const AlgebraParams A17 = build_algebra(17);
    CHECK(A17.eps == 3);
    REQUIRE(A17.r);
    REQUIRE(A17.a);
    CHECK(*A17.r == 3);
    CHECK(*A17.a == 1);
    for (i64 p : testing::primes_below(200)) {
        CAPTURE(p);
        const AlgebraParams A = build_algebra(p);
        const EpsOracle o = eps_oracle(p);
        CHECK(A.eps == o.eps);
        CHECK(A.r.has_value() == (o.r != 0));
        if (A.r) {
            CHECK(*A.r == o.r);
            CHECK(*A.a == o.a);
        }
    }
}

TEST_CASE("defining relations") {
    const AlgebraParams A = build_algebra(11);
    const Quat i = q("0", "1", "0", "0"), j = q("0", "0", "1", "0"), ij = q("0", "0", "0", "1");
    CHECK(mul(A, i, j) == ij);
    CHECK(mul(A, j, i) == -ij);
    CHECK(mul(A, i, i) == Quat::scalar(-1));
    CHECK(mul(A, j, j) == Quat::scalar(-11));
    CHECK(mul(A, q("1", "1", "0", "0"), q("1", "-1", "0", "0")) == Quat::scalar(2));
    CHECK(nrd(A, Quat::scalar(1)) == 1);
    CHECK(nrd(A, ij) == 11);
    const AlgebraParams A17 = build_algebra(17);
    CHECK(nrd(A17, q("0", "0", "0", "1")) == 3 * 17);
}

TEST_CASE("norm form on the p = 11 order coordinates") {
    const AlgebraParams A = build_algebra(11);
    const Order O = maximal_order_basis(A);
    for (i64 t = -3; t <= 3; ++t)
        for (i64 x = -3; x <= 3; ++x)
            for (i64 y = -3; y <= 3; ++y)
                for (i64 z = -3; z <= 3; ++z) {
                    const mpq_class tt(t), xx(x), yy(y), zz(z);
                    const mpq_class expect = (tt + zz / 2) * (tt + zz / 2) + (xx + yy / 2) * (xx + yy / 2) +
                                             mpq_class(11, 4) * yy * yy + mpq_class(11, 4) * zz * zz;
                    CHECK(nrd(A, O.element(Vec4{t, x, y, z})) == expect);
                }
}

TEST_CASE("multiplicativity and conjugation on random elements") {
    testing::Rng rng(11);
    for (i64 p : {2, 11, 13, 17, 41}) {
        const AlgebraParams A = build_algebra(p);
        for (int it = 0; it < 200; ++it) {
            const Quat x = random_quat(rng), y = random_quat(rng), z = random_quat(rng);
            CHECK(nrd(A, mul(A, x, y)) == nrd(A, x) * nrd(A, y));
            CHECK(Quat::scalar(trd(x)) == x + conj(x));
            CHECK(conj(mul(A, x, y)) == mul(A, conj(y), conj(x)));
            CHECK(mul(A, mul(A, x, y), z) == mul(A, x, mul(A, y, z)));
            if (!x.is_zero()) {
                CHECK(nrd(A, x) > 0);
                CHECK(mul(A, x, inverse(A, x)) == Quat::scalar(1));
            }
        }
    }
}

TEST_CASE("maximal order bases") {
    const Order O11 = maximal_order_basis(build_algebra(11));
    CHECK(O11.s[0] == q("1", "0", "0", "0"));
    CHECK(O11.s[1] == q("0", "1", "0", "0"));
    CHECK(O11.s[2] == q("0", "1/2", "0", "1/2"));
    CHECK(O11.s[3] == q("1/2", "0", "1/2", "0"));

    const Order O13 = maximal_order_basis(build_algebra(13));
    CHECK(O13.s[0] == q("1/2", "0", "1/2", "1/2"));
    CHECK(O13.s[1] == q("0", "1/4", "1/2", "1/4"));
    CHECK(O13.s[2] == q("0", "0", "1", "0"));
    CHECK(O13.s[3] == q("0", "0", "0", "1"));
    CHECK(nrd(O13.params, O13.s[1]) == 5);

    // The literal p = 2 basis is rejected and replaced by a validated one.
    const AlgebraParams A2 = build_algebra(2);
    CHECK_THROWS(make_order(A2, literal_order_basis(A2)));
    const Order O2 = maximal_order_basis(A2);
    CHECK(O2.s[0] == q("1/2", "1/2", "1/2", "0"));
    CHECK_FALSE(O2.notes.empty());
}

TEST_CASE("reduced discriminant") {
    const AlgebraParams A = build_algebra(11);
    std::array<Quat, 4> std_basis{q("1", "0", "0", "0"), q("0", "1", "0", "0"), q("0", "0", "1", "0"), q("0", "0", "0", "1")};
    CHECK(reduced_discriminant(A, std_basis) == 44);
    CHECK(trace_pairing_det(A, std_basis) == -44 * 44);
    CHECK(reduced_discriminant(A, maximal_order_basis(A).s) == 11);
    const AlgebraParams A13 = build_algebra(13);
    CHECK(reduced_discriminant(A13, maximal_order_basis(A13).s) == 13);
}

TEST_CASE("every maximal order below 200 validates") {
    for (i64 p : testing::primes_below(200)) {
        CAPTURE(p);
        const AlgebraParams A = build_algebra(p);
        const Order O = maximal_order_basis(A);
        // 1 in the span, closure, integral norms and traces of products.
        Vec4 one;
        CHECK(O.integral_coords(Quat::scalar(1), one));
        for (int a = 0; a < 4; ++a) {
            CHECK(nrd(A, O.s[a]).get_den() == 1);
            CHECK(trd(O.s[a]).get_den() == 1);
            for (int b = 0; b < 4; ++b) {
                Vec4 c;
                CHECK(O.integral_coords(mul(A, O.s[a], O.s[b]), c));
            }
        }
        const mpq_class d = trace_pairing_det(A, O.s);
        CHECK(abs(d) == mpq_class(p * p));
        CHECK(reduced_discriminant(A, O.s) == p);
    }
}

TEST_CASE("one-mod-eight primes use the corrected fourth element") {
    for (i64 p : {17, 41, 73, 89, 97, 113, 137, 193}) {
        CAPTURE(p);
        const AlgebraParams A = build_algebra(p);
        const i64 r = *A.r, a = *A.a;
        const Order O = maximal_order_basis(A);
        const Quat literal = Quat(0, 0, mpq_class(1, r), mpq_class(a, r));
        CHECK(nrd(A, literal).get_den() != 1);
        bool found = false;
        for (const auto& s : O.s)
            if (s == Quat(0, mpq_class(1, r), 0, mpq_class(a, r))) found = true;
        CHECK(found);
    }
}

}

#pragma once

#include "qhecke/arith.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qhecke {

// D = (-eps, -p / Q): i^2 = -eps, j^2 = -p, ij = -ji.
struct AlgebraParams {
    i64 p = 0;
    i64 eps = 0;
    std::optional<i64> r;
    std::optional<i64> a;
};

AlgebraParams build_algebra(i64 p);

struct Quat {
    std::array<mpq_class, 4> c;  // coefficients of 1, i, j, ij

    Quat() : c{0, 0, 0, 0} {}
    Quat(mpq_class c0, mpq_class c1, mpq_class c2, mpq_class c3) : c{c0, c1, c2, c3} {}
    static Quat scalar(const mpq_class& s) { return Quat(s, 0, 0, 0); }

    bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0; }
    bool operator==(const Quat& o) const { return c == o.c; }
    bool operator!=(const Quat& o) const { return !(*this == o); }
    Quat operator+(const Quat& o) const;
    Quat operator-(const Quat& o) const;
    Quat operator-() const;
    Quat operator*(const mpq_class& s) const;
    Quat operator/(const mpq_class& s) const;
};

Quat mul(const AlgebraParams& A, const Quat& x, const Quat& y);
Quat conj(const Quat& x);
mpq_class trd(const Quat& x);
mpq_class nrd(const AlgebraParams& A, const Quat& x);
Quat inverse(const AlgebraParams& A, const Quat& x);
std::string to_string(const Quat& x);

using Vec4 = std::array<mpz_class, 4>;
using QVec4 = std::array<mpq_class, 4>;
using Mat4Q = std::array<QVec4, 4>;

// Z-basis of an order together with its structure constants.
struct Order {
    AlgebraParams params;
    std::array<Quat, 4> s;
    Mat4Q from_std;                                      // row of x in std coords times from_std = coords
    std::array<std::array<std::array<i64, 4>, 4>, 4> mt; // s_a s_b = sum_k mt[a][b][k] s_k
    std::array<std::array<i64, 4>, 4> tr;                // trd(s_a conj(s_b))
    std::array<std::array<i64, 4>, 4> cj;                // conj(s_a) = sum_k cj[a][k] s_k
    Vec4 one;
    std::vector<std::string> notes;  // corrections applied during construction

    Quat element(const Vec4& v) const;
    Quat element(const QVec4& v) const;
    QVec4 coords(const Quat& x) const;
    bool integral_coords(const Quat& x, Vec4& out) const;
    Vec4 mul(const Vec4& x, const Vec4& y) const;
    Vec4 conj(const Vec4& x) const;
    mpz_class nrd(const Vec4& x) const;
    mpz_class trd(const Vec4& x) const;
};

// Throws with a diagnostic unless s contains 1, is closed under multiplication
// and has integral traces and norms.
Order make_order(const AlgebraParams& A, const std::array<Quat, 4>& s);

// Literal basis from the classical case list, before validation.
std::array<Quat, 4> literal_order_basis(const AlgebraParams& A);

// Validated maximal order; corrected (and noted) where the literal basis fails.
Order maximal_order_basis(const AlgebraParams& A);

// sqrt|det(trd(s_a conj s_b))|; throws if not a perfect square.
mpz_class reduced_discriminant(const AlgebraParams& A, const std::array<Quat, 4>& s);

mpq_class det4(Mat4Q m);
Mat4Q inverse4(const Mat4Q& m);

}  // namespace qhecke

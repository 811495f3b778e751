#pragma once

#include "qhecke/arith.hpp"

#include <vector>

namespace qhecke {

// s + t*u in F_p[u]/(u^2 - alpha - beta*u).
struct F2 {
    i64 s = 0, t = 0;
    bool operator==(const F2& o) const { return s == o.s && t == o.t; }
    bool operator!=(const F2& o) const { return !(*this == o); }
    bool operator<(const F2& o) const { return s != o.s ? s < o.s : t < o.t; }
    bool is_zero() const { return s == 0 && t == 0; }
};

// F_{p^2}. For odd p the generator is i with i^2 = -eps, matching the
// quaternion residue s + t*i; for p = 2 it is a root of u^2 + u + 1.
struct Fp2Field {
    i64 p = 0, alpha = 0, beta = 0;

    Fp2Field() = default;
    Fp2Field(i64 p_, i64 eps);

    F2 from_int(i64 a) const { return {mod(a, p), 0}; }
    F2 make(i64 s, i64 t) const { return {mod(s, p), mod(t, p)}; }
    F2 add(F2 x, F2 y) const { return {mod(x.s + y.s, p), mod(x.t + y.t, p)}; }
    F2 sub(F2 x, F2 y) const { return {mod(x.s - y.s, p), mod(x.t - y.t, p)}; }
    F2 neg(F2 x) const { return {mod(-x.s, p), mod(-x.t, p)}; }
    F2 mul(F2 x, F2 y) const;
    F2 pow(F2 x, std::uint64_t e) const;
    F2 inv(F2 x) const;  // throws on zero
    F2 div(F2 x, F2 y) const { return mul(x, inv(y)); }
    i64 order() const { return p * p; }
    // All elements, lexicographic in (s, t).
    std::vector<F2> elements() const;
    std::vector<F2> units() const;
    // Index of a unit in units(); (s, t) lexicographic.
    size_t unit_index(F2 x) const;
};

using Poly = std::vector<F2>;  // low degree first, monic where produced

F2 poly_eval(const Fp2Field& K, const Poly& f, F2 x);
bool poly_divide_linear(const Fp2Field& K, Poly& f, F2 root);  // f /= (X - root) if exact

}  // namespace qhecke

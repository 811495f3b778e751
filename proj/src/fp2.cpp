#include "qhecke/fp2.hpp"

namespace qhecke {

Fp2Field::Fp2Field(i64 p_, i64 eps) : p(p_) {
    if (p == 2) {
        alpha = 1;
        beta = 1;
    } else {
        alpha = mod(-eps, p);
        beta = 0;
        if (legendre(alpha, p) != -1) throw Error("Fp2Field: -eps is a square mod p");
    }
}

F2 Fp2Field::mul(F2 x, F2 y) const {
    // (s1 + t1 u)(s2 + t2 u) = s1 s2 + t1 t2 alpha + (s1 t2 + t1 s2 + t1 t2 beta) u
    i64 tt = mulmod(x.t, y.t, p);
    return {mod(mulmod(x.s, y.s, p) + mulmod(tt, alpha, p), p),
            mod(mulmod(x.s, y.t, p) + mulmod(x.t, y.s, p) + mulmod(tt, beta, p), p)};
}

F2 Fp2Field::pow(F2 x, std::uint64_t e) const {
    F2 r{1 % p, 0};
    while (e) {
        if (e & 1) r = mul(r, x);
        x = mul(x, x);
        e >>= 1;
    }
    return r;
}

F2 Fp2Field::inv(F2 x) const {
    if (x.is_zero()) throw Error("Fp2Field: inverse of zero");
    F2 r = pow(x, static_cast<std::uint64_t>(p * p - 2));
    if (mul(r, x) != F2{1, 0}) throw Error("Fp2Field: inverse check failed");
    return r;
}

std::vector<F2> Fp2Field::elements() const {
    std::vector<F2> out;
    for (i64 s = 0; s < p; ++s)
        for (i64 t = 0; t < p; ++t) out.push_back({s, t});
    return out;
}

std::vector<F2> Fp2Field::units() const {
    auto e = elements();
    e.erase(e.begin());
    return e;
}

size_t Fp2Field::unit_index(F2 x) const {
    if (x.is_zero()) throw Error("unit_index: zero");
    return static_cast<size_t>(x.s * p + x.t - 1);
}

F2 poly_eval(const Fp2Field& K, const Poly& f, F2 x) {
    F2 r{};
    for (size_t k = f.size(); k-- > 0;) r = K.add(K.mul(r, x), f[k]);
    return r;
}

bool poly_divide_linear(const Fp2Field& K, Poly& f, F2 root) {
    if (f.size() < 2 || !poly_eval(K, f, root).is_zero()) return false;
    Poly q(f.size() - 1);
    F2 carry{};
    for (size_t k = f.size() - 1; k-- > 0;) {
        carry = K.add(f[k + 1], K.mul(carry, root));
        q[k] = carry;
    }
    f = q;
    return true;
}

}  // namespace qhecke

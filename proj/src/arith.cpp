#include "qhecke/arith.hpp"

#include <limits>

namespace qhecke {

i64 powmod(i64 b, std::uint64_t e, i64 m) {
    i64 r = 1 % m;
    b = mod(b, m);
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

i64 gcd(i64 a, i64 b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

i64 invmod(i64 a, i64 m) {
    i64 g = m, x = 0, r = mod(a, m), y = 1;
    while (r) {
        i64 q = g / r;
        i64 t = g - q * r;
        g = r;
        r = t;
        t = x - q * y;
        x = y;
        y = t;
    }
    if (g != 1) throw Error("invmod: " + std::to_string(a) + " not invertible mod " + std::to_string(m));
    return mod(x, m);
}

i64 ipow(i64 b, int e) {
    i64 r = 1;
    for (int k = 0; k < e; ++k) {
        if (b != 0 && (r > std::numeric_limits<i64>::max() / (b < 0 ? -b : b)))
            throw Error("ipow overflow");
        r *= b;
    }
    return r;
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<i64> prime_factors(i64 n) {
    std::vector<i64> out;
    if (n < 0) n = -n;
    for (i64 d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        out.push_back(d);
        while (n % d == 0) n /= d;
    }
    if (n > 1) out.push_back(n);
    return out;
}

int legendre(i64 a, i64 p) {
    i64 r = powmod(a, static_cast<std::uint64_t>((p - 1) / 2), p);
    if (r == 0) return 0;
    return r == 1 ? 1 : -1;
}

int val(i64 n, i64 ell) {
    if (n == 0) throw Error("valuation of zero");
    int v = 0;
    while (n % ell == 0) {
        n /= ell;
        ++v;
    }
    return v;
}

int val(const mpz_class& n, i64 ell) {
    if (n == 0) throw Error("valuation of zero");
    mpz_class t = n;
    int v = 0;
    while (mpz_divisible_ui_p(t.get_mpz_t(), static_cast<unsigned long>(ell))) {
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(ell));
        ++v;
    }
    return v;
}

int val(const mpq_class& q, i64 ell) {
    return val(q.get_num(), ell) - val(q.get_den(), ell);
}

i64 residue(const mpz_class& z, i64 m) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(m));
    return r.get_si();
}

i64 residue(const mpq_class& q, i64 m) {
    i64 d = residue(q.get_den(), m);
    return mulmod(residue(q.get_num(), m), invmod(d, m), m);
}

bool rational_sqrt(const mpq_class& q, mpq_class& out) {
    if (q < 0) return false;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return false;
    mpz_class a, b;
    mpz_sqrt(a.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(b.get_mpz_t(), q.get_den_mpz_t());
    out = mpq_class(a, b);
    out.canonicalize();
    return true;
}

std::string to_string(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    return c.get_str();
}

mpq_class parse_rational(const std::string& s) {
    mpq_class q;
    if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0) throw Error("bad rational: '" + s + "'");
    q.canonicalize();
    return q;
}

}  // namespace qhecke

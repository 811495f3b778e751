#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qhecke {

using i64 = std::int64_t;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input rejected before any computation (bad prime, coprimality, ranges).
struct UsageError : Error {
    using Error::Error;
};

inline i64 mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline i64 mulmod(i64 a, i64 b, i64 m) {
    return static_cast<i64>(static_cast<__int128>(mod(a, m)) * mod(b, m) % m);
}

i64 powmod(i64 b, std::uint64_t e, i64 m);
i64 invmod(i64 a, i64 m);  // throws if gcd(a, m) != 1
i64 ipow(i64 b, int e);    // throws on overflow
i64 gcd(i64 a, i64 b);

bool is_prime(i64 n);
std::vector<i64> prime_factors(i64 n);  // distinct, ascending
int legendre(i64 a, i64 p);             // p odd prime

int val(i64 n, i64 ell);  // n != 0
int val(const mpz_class& n, i64 ell);
int val(const mpq_class& q, i64 ell);  // q != 0

// q mod m for q with denominator coprime to m.
i64 residue(const mpq_class& q, i64 m);
i64 residue(const mpz_class& z, i64 m);

// Exact rational square root, if any.
bool rational_sqrt(const mpq_class& q, mpq_class& out);

std::string to_string(const mpq_class& q);
mpq_class parse_rational(const std::string& s);

}  // namespace qhecke

#pragma once

#include "qhecke/classes.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace testing {

using qhecke::i64;

// xorshift64*, fixed seeds so failures reproduce.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        return s * 0x2545F4914F6CDD1DULL;
    }
    i64 range(i64 lo, i64 hi) { return lo + static_cast<i64>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
};

inline bool naive_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<i64> primes_below(i64 bound) {
    std::vector<i64> out;
    for (i64 n = 2; n < bound; ++n)
        if (naive_prime(n)) out.push_back(n);
    return out;
}

// Eichler's class number formula for the maximal order ramified at p.
inline i64 class_number_formula(i64 p) {
    if (p == 2 || p == 3) return 1;
    auto kron = [](i64 d, i64 q) {  // (d | q) for odd prime q via Euler's criterion
        i64 e = (q - 1) / 2, b = ((d % q) + q) % q, r = 1;
        while (e) {
            if (e & 1) r = r * b % q;
            b = b * b % q;
            e >>= 1;
        }
        return r == 1 ? 1 : -1;
    };
    // 12 h = (p - 1) + 3 (1 - (-4|p)) + 4 (1 - (-3|p))
    i64 twelve_h = (p - 1) + 3 * (1 - kron(-4, p)) + 4 * (1 - kron(-3, p));
    return twelve_h / 12;
}

inline qhecke::Quat q(const char* a, const char* b, const char* c, const char* d) {
    return qhecke::Quat(qhecke::parse_rational(a), qhecke::parse_rational(b), qhecke::parse_rational(c),
                        qhecke::parse_rational(d));
}

// Left ideal class bases for p = 11 as printed in the worked example.
inline std::vector<std::array<qhecke::Quat, 4>> worked_bases_p11() {
    return {
        {q("1", "0", "0", "0"), q("0", "-1", "0", "0"), q("0", "-1/2", "0", "-1/2"), q("1/2", "0", "-1/2", "0")},
        {q("2", "0", "0", "0"), q("0", "-2", "0", "0"), q("1", "-3/2", "0", "-1/2"), q("1/2", "-1", "-1/2", "0")},
    };
}

}  // namespace testing

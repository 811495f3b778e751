#include "qhecke/split.hpp"

#include <algorithm>
#include <functional>

namespace qhecke {

Mat2 mat_reduce(const Mat2& x, i64 m) { return {mod(x.a, m), mod(x.b, m), mod(x.c, m), mod(x.d, m)}; }

Mat2 mat_mul(const Mat2& x, const Mat2& y, i64 m) {
    return {mod(mulmod(x.a, y.a, m) + mulmod(x.b, y.c, m), m), mod(mulmod(x.a, y.b, m) + mulmod(x.b, y.d, m), m),
            mod(mulmod(x.c, y.a, m) + mulmod(x.d, y.c, m), m), mod(mulmod(x.c, y.b, m) + mulmod(x.d, y.d, m), m)};
}

Mat2 mat_add(const Mat2& x, const Mat2& y, i64 m) {
    return {mod(x.a + y.a, m), mod(x.b + y.b, m), mod(x.c + y.c, m), mod(x.d + y.d, m)};
}

Mat2 mat_scale(const Mat2& x, i64 s, i64 m) {
    return {mulmod(x.a, s, m), mulmod(x.b, s, m), mulmod(x.c, s, m), mulmod(x.d, s, m)};
}

Mat2 mat_adj(const Mat2& x, i64 m) { return {mod(x.d, m), mod(-x.b, m), mod(-x.c, m), mod(x.a, m)}; }

Mat2 mat_scalar(i64 s, i64 m) { return {mod(s, m), 0, 0, mod(s, m)}; }

i64 mat_det(const Mat2& x, i64 m) { return mod(mulmod(x.a, x.d, m) - mulmod(x.b, x.c, m), m); }

i64 mat_trace(const Mat2& x, i64 m) { return mod(x.a + x.d, m); }

bool mat_divisible(const Mat2& x, i64 d) { return x.a % d == 0 && x.b % d == 0 && x.c % d == 0 && x.d % d == 0; }

std::vector<PrecisionEntry> precision_plan(const ClassSet& C, i64 N, i64 ell0) {
    const i64 p = C.O.params.p;
    if (N < 1) throw UsageError("level N must be positive");
    if (!is_prime(ell0)) throw UsageError("ell0 = " + std::to_string(ell0) + " is not prime");
    if (gcd(p, N) != 1) throw UsageError("N must be coprime to p");
    if (ell0 == p || N % ell0 == 0) throw UsageError("ell0 must be coprime to pN");
    auto mv = max_valuations(C);
    std::vector<i64> V;
    for (auto [ell, m] : mv)
        if (ell != p && m > 0) V.push_back(ell);
    V.push_back(ell0);
    for (i64 ell : prime_factors(N)) V.push_back(ell);
    std::sort(V.begin(), V.end());
    V.erase(std::unique(V.begin(), V.end()), V.end());
    std::vector<PrecisionEntry> out;
    for (i64 ell : V) {
        PrecisionEntry pe;
        pe.ell = ell;
        pe.m = mv.count(ell) ? mv.at(ell) : 0;
        pe.vN = N % ell == 0 ? val(N, ell) : 0;
        pe.d = 0;
        for (const Quat& s : C.O.s)
            for (const mpq_class& c : s.c)
                if (mpz_divisible_ui_p(c.get_den_mpz_t(), static_cast<unsigned long>(ell)))
                    pe.d = std::max(pe.d, val(mpz_class(c.get_den()), ell));
        // Products of two basis images lose ell^(2d) to the division.
        pe.n = pe.work() + 2 * std::max(pe.d, 1);
        if (ell == 2) pe.n = std::max(7, pe.n);
        out.push_back(pe);
    }
    return out;
}

bool relations_hold(const AlgebraParams& A, const Mat2& X, const Mat2& Y, i64 m) {
    if (mat_trace(X, m) != 0 || mat_trace(Y, m) != 0) return false;
    if (mat_mul(X, X, m) != mat_scalar(-A.eps, m)) return false;
    if (mat_mul(Y, Y, m) != mat_scalar(-A.p, m)) return false;
    return mat_add(mat_mul(X, Y, m), mat_mul(Y, X, m), m) == Mat2{};
}

namespace {

struct Numerator {
    std::array<i64, 4> c;  // integer coefficients of 1, i, j, ij
    mpz_class d;           // common denominator
};

Numerator numerator_of(const Quat& s) {
    Numerator n;
    n.d = 1;
    for (const auto& x : s.c) n.d = lcm(n.d, x.get_den());
    for (int k = 0; k < 4; ++k) {
        mpz_class v = s.c[k].get_num() * (n.d / s.c[k].get_den());
        n.c[k] = v.get_si();
    }
    return n;
}

Mat2 numerator_image(const Numerator& n, const Mat2& X, const Mat2& Y, i64 m) {
    Mat2 XY = mat_mul(X, Y, m);
    Mat2 r = mat_scalar(n.c[0], m);
    r = mat_add(r, mat_scale(X, n.c[1], m), m);
    r = mat_add(r, mat_scale(Y, n.c[2], m), m);
    r = mat_add(r, mat_scale(XY, n.c[3], m), m);
    return r;
}

Mat2 from_tuple(i64 a, i64 b, i64 c, i64 m) { return mat_reduce({a, b, c, -a}, m); }

bool proportional_mod(const Mat2& X, const Mat2& Y, i64 ell) {
    // linearly dependent over F_ell as vectors (a, b, c)
    i64 u[3] = {mod(X.a, ell), mod(X.b, ell), mod(X.c, ell)};
    i64 v[3] = {mod(Y.a, ell), mod(Y.b, ell), mod(Y.c, ell)};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (mod(u[i] * v[j] - u[j] * v[i], ell) != 0) return false;
    return true;
}

// Root of x^2 == t mod ell^e (ell odd) lifted from the given root mod ell.
i64 hensel_sqrt_odd(i64 t, i64 x, i64 ell, int e) {
    i64 m = ell;
    for (int k = 1; k < e; ++k) {
        m *= ell;
        i64 f = mod(mulmod(x, x, m) - t, m);
        x = mod(x - mulmod(f, invmod(mulmod(2, x, m), m), m), m);
    }
    return x;
}

// All four roots of x^2 == t mod 2^e, t == 1 mod 8, e >= 3; ascending.
std::vector<i64> sqrt_2adic(i64 t, int e) {
    i64 x = 1;
    for (int k = 3; k < e; ++k) {
        i64 m = i64(1) << (k + 1);
        if (mod(x * x - t, m) != 0) x += i64(1) << (k - 1);
    }
    i64 M = i64(1) << e, h = M >> 1;
    std::vector<i64> r = {mod(x, M), mod(-x, M), mod(x + h, M), mod(-x + h, M)};
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

}  // namespace

bool condition_holds(const Order& O, i64 ell, const Mat2& X, const Mat2& Y, i64 m) {
    for (const auto& s : O.s) {
        Numerator n = numerator_of(s);
        if (!mpz_divisible_ui_p(n.d.get_mpz_t(), static_cast<unsigned long>(ell))) continue;
        i64 pe = ipow(ell, val(n.d, ell));
        if (m % pe != 0 || m == pe) throw Error("condition_holds: modulus too small");
        if (!mat_divisible(numerator_image(n, X, Y, m), pe)) return false;
    }
    return true;
}

namespace {

mpz_class zmod(const mpz_class& a, const mpz_class& m) {
    mpz_class r = a % m;
    if (r < 0) r += m;
    return r;
}

}  // namespace

bool relations_hold(const AlgebraParams& A, const TracelessZ& X, const TracelessZ& Y, const mpz_class& m) {
    const mpz_class f1 = X.a * X.a + X.b * X.c + A.eps;
    const mpz_class f2 = Y.a * Y.a + Y.b * Y.c + A.p;
    const mpz_class f3 = 2 * X.a * Y.a + X.b * Y.c + X.c * Y.b;
    return zmod(f1, m) == 0 && zmod(f2, m) == 0 && zmod(f3, m) == 0;
}

std::pair<TracelessZ, TracelessZ> lift_step_odd(const AlgebraParams& A, const TracelessZ& A0, const TracelessZ& B0, i64 ell,
                                                int m) {
    if (ell == 2) throw Error("lift_step_odd: ell must be odd");
    if (m < 2) throw Error("lift_step_odd: requires m >= 2");
    mpz_class lm;
    mpz_ui_pow_ui(lm.get_mpz_t(), static_cast<unsigned long>(ell), static_cast<unsigned long>(m));
    const mpz_class l1 = lm * ell;
    TracelessZ X0{zmod(A0.a, l1), zmod(A0.b, l1), zmod(A0.c, l1)};
    TracelessZ Y0{zmod(B0.a, l1), zmod(B0.b, l1), zmod(B0.c, l1)};
    if (!relations_hold(A, X0, Y0, lm)) throw Error("lift_step_odd: relations do not hold mod ell^m");
    const mpz_class L(ell);
    auto small = [&](const mpz_class& v) { return zmod(v, L).get_si(); };
    i64 u[3] = {small(X0.a), small(X0.b), small(X0.c)};
    i64 v[3] = {small(Y0.a), small(Y0.b), small(Y0.c)};
    bool dependent = true;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (mod(u[i] * v[j] - u[j] * v[i], ell) != 0) dependent = false;
    if (dependent) throw Error("lift_step_odd: A0 and B0 are proportional mod ell");
    const i64 r1 = small(zmod(X0.a * X0.a + X0.b * X0.c + A.eps, l1) / lm);
    const i64 r2 = small(zmod(Y0.a * Y0.a + Y0.b * Y0.c + A.p, l1) / lm);
    const i64 r3 = small(zmod(2 * X0.a * Y0.a + X0.b * Y0.c + X0.c * Y0.b, l1) / lm);
    const i64 a1 = u[0], a2 = u[1], a3 = u[2], b1 = v[0], b2 = v[1], b3 = v[2];
    // unknowns (x1, x2, x3, y1, y2, y3); X = (x1 x2; x3 -x1)
    i64 M[3][7] = {{2 * a1, a3, a2, 0, 0, 0, -r1}, {0, 0, 0, 2 * b1, b3, b2, -r2}, {2 * b1, b3, b2, 2 * a1, a3, a2, -r3}};
    for (auto& row : M)
        for (auto& x : row) x = mod(x, ell);
    int pivcol[3] = {-1, -1, -1};
    int row = 0;
    for (int col = 0; col < 6 && row < 3; ++col) {
        int piv = -1;
        for (int r = row; r < 3; ++r)
            if (M[r][col]) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(M[piv], M[row]);
        i64 inv = invmod(M[row][col], ell);
        for (int k = 0; k < 7; ++k) M[row][k] = mulmod(M[row][k], inv, ell);
        for (int r = 0; r < 3; ++r) {
            if (r == row || !M[r][col]) continue;
            i64 f = M[r][col];
            for (int k = 0; k < 7; ++k) M[r][k] = mod(M[r][k] - f * M[row][k], ell);
        }
        pivcol[row++] = col;
    }
    for (int r = row; r < 3; ++r)
        if (M[r][6]) throw Error("lift_step_odd: linear system inconsistent");
    i64 sol[6] = {0, 0, 0, 0, 0, 0};
    for (int r = 0; r < row; ++r) sol[pivcol[r]] = M[r][6];
    TracelessZ A1{zmod(X0.a + lm * sol[0], l1), zmod(X0.b + lm * sol[1], l1), zmod(X0.c + lm * sol[2], l1)};
    TracelessZ B1{zmod(Y0.a + lm * sol[3], l1), zmod(Y0.b + lm * sol[4], l1), zmod(Y0.c + lm * sol[5], l1)};
    if (!relations_hold(A, A1, B1, l1)) throw Error("lift_step_odd: lifted pair fails verification");
    return {A1, B1};
}

std::pair<Mat2, Mat2> lift_step_odd(const AlgebraParams& A, const Mat2& A0, const Mat2& B0, i64 ell, int m) {
    if (m < 2) throw Error("lift_step_odd: requires m >= 2");
    const i64 lm = ipow(ell, m), l1 = ipow(ell, m + 1);
    if (mat_trace(A0, lm) != 0 || mat_trace(B0, lm) != 0) throw Error("lift_step_odd: inputs are not trace-free");
    auto [X, Y] = lift_step_odd(A, TracelessZ{A0.a, A0.b, A0.c}, TracelessZ{B0.a, B0.b, B0.c}, ell, m);
    auto back = [&](const TracelessZ& t) { return from_tuple(t.a.get_si(), t.b.get_si(), t.c.get_si(), l1); };
    return {back(X), back(Y)};
}

bool tuple_holds(const AlgebraParams& A, const Tuple6& t, i64 m) {
    const auto [a, b, c, x, y, z] = t;
    __int128 f1 = (__int128)a * a + (__int128)b * c + A.eps;
    __int128 f2 = (__int128)x * x + (__int128)y * z + A.p;
    __int128 f3 = (__int128)2 * a * x + (__int128)b * z + (__int128)c * y;
    return f1 % m == 0 && f2 % m == 0 && f3 % m == 0;
}

Tuple6 lift_step_2adic(const AlgebraParams& A, const Tuple6& t0, int m) {
    if (m < 7) throw Error("lift_step_2adic: requires m >= 7");
    const i64 M0 = i64(1) << m, M1 = M0 << 1;
    Tuple6 t;
    for (int k = 0; k < 6; ++k) t[k] = mod(t0[k], M1);
    if (!tuple_holds(A, t, M0)) throw Error("lift_step_2adic: equations do not hold mod 2^m");
    if (tuple_holds(A, t, M1)) return t;
    const auto [a, b, c, x, y, z] = t;
    __int128 f[3] = {(__int128)a * a + (__int128)b * c + A.eps, (__int128)x * x + (__int128)y * z + A.p,
                     (__int128)2 * a * x + (__int128)b * z + (__int128)c * y};
    // Jacobian rows: d f_r / d (a, b, c, x, y, z)
    const i64 J[3][6] = {{2 * a, c, b, 0, 0, 0}, {0, 0, 0, 2 * x, z, y}, {2 * x, z, y, 2 * a, c, b}};
    struct Cand {
        int v;
        int idx[3];
    };
    std::vector<Cand> cands;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            for (int k = j + 1; k < 6; ++k) {
                __int128 m3[3][3];
                for (int r = 0; r < 3; ++r) {
                    m3[r][0] = J[r][i];
                    m3[r][1] = J[r][j];
                    m3[r][2] = J[r][k];
                }
                __int128 det = m3[0][0] * (m3[1][1] * m3[2][2] - m3[1][2] * m3[2][1]) -
                               m3[0][1] * (m3[1][0] * m3[2][2] - m3[1][2] * m3[2][0]) +
                               m3[0][2] * (m3[1][0] * m3[2][1] - m3[1][1] * m3[2][0]);
                if (det == 0) continue;
                int v = 0;
                while (det % 2 == 0) {
                    det /= 2;
                    ++v;
                }
                if (v <= 3 && m >= 2 * v + 1) cands.push_back({v, {i, j, k}});
            }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& p, const Cand& q) { return p.v < q.v; });
    for (const auto& cd : cands) {
        // Work modulo 2^(m+1+v) so the division by 2^v is exact.
        const i64 Mx = M1 << cd.v;
        i64 m3[3][3];
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) m3[r][s] = mod(J[r][cd.idx[s]], Mx);
        i64 adj[3][3];
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) {
                int r1 = (s + 1) % 3, r2 = (s + 2) % 3, c1 = (r + 1) % 3, c2 = (r + 2) % 3;
                adj[r][s] = mod(mulmod(m3[r1][c1], m3[r2][c2], Mx) - mulmod(m3[r1][c2], m3[r2][c1], Mx), Mx);
            }
        __int128 detf = 0;
        for (int s = 0; s < 3; ++s) detf += (__int128)m3[0][s] * adj[s][0];
        i64 det = static_cast<i64>(((detf % Mx) + Mx) % Mx);
        i64 u = det >> cd.v;
        Tuple6 nt = t;
        bool ok = true;
        for (int r = 0; r < 3 && ok; ++r) {
            i64 num = 0;
            for (int s = 0; s < 3; ++s) num = mod(num + mulmod(adj[r][s], static_cast<i64>(f[s] % Mx), Mx), Mx);
            if (num % (i64(1) << cd.v) != 0) {
                ok = false;
                break;
            }
            i64 delta = mulmod(num >> cd.v, invmod(u % M1, M1), M1);
            nt[cd.idx[r]] = mod(nt[cd.idx[r]] - delta, M1);
        }
        if (ok && tuple_holds(A, nt, M1)) return nt;
    }
    throw Error("lift_step_2adic: no admissible variable subset");
}

namespace {

Tuple6 to_tuple(const Mat2& X, const Mat2& Y) { return {X.a, X.b, X.c, Y.a, Y.b, Y.c}; }

// Lexicographic search over trace-free pairs mod ell, then extension to ell^2.
bool generic_odd_seed(const Order& O, i64 ell, Mat2& As, Mat2& Bs) {
    const AlgebraParams& A = O.params;
    const i64 l2 = ell * ell;
    Tuple6 t;
    std::function<bool(int)> outer = [&](int k) -> bool {
        if (k == 6) {
            Mat2 X = from_tuple(t[0], t[1], t[2], ell), Y = from_tuple(t[3], t[4], t[5], ell);
            if (!tuple_holds(A, t, ell) || proportional_mod(X, Y, ell)) return false;
            Tuple6 base = t, d{};
            for (long code = 0; code < ipow(ell, 6); ++code) {
                long cc = code;
                for (int q = 5; q >= 0; --q) {
                    d[q] = cc % ell;
                    cc /= ell;
                }
                Tuple6 u;
                for (int q = 0; q < 6; ++q) u[q] = base[q] + ell * d[q];
                if (!tuple_holds(A, u, l2)) continue;
                Mat2 X2 = from_tuple(u[0], u[1], u[2], l2), Y2 = from_tuple(u[3], u[4], u[5], l2);
                if (!condition_holds(O, ell, X2, Y2, l2)) continue;
                As = X2;
                Bs = Y2;
                return true;
            }
            return false;
        }
        for (i64 v = 0; v < ell; ++v) {
            t[k] = v;
            if (k == 2) {
                // prune on the first relation
                if (mod(t[0] * t[0] + t[1] * t[2] + A.eps, ell) != 0) continue;
            }
            if (outer(k + 1)) return true;
        }
        return false;
    };
    return outer(0);
}

bool companion_odd_seed(const Order& O, i64 ell, int e, Mat2& As, Mat2& Bs) {
    const AlgebraParams& A = O.params;
    const i64 me = ipow(ell, e);
    for (i64 y = 0; y < ell; ++y)
        for (i64 b1 = 1; b1 < ell; ++b1) {
            i64 t = mod(-A.p - A.eps * y * y, ell);
            if (mod(b1 * b1 - t, ell) != 0) continue;
            i64 tt = mod(-A.p - mulmod(A.eps, y * y, me), me);
            i64 r = hensel_sqrt_odd(tt, b1, ell, e);
            Mat2 X = mat_reduce({0, -A.eps, 1, 0}, me);
            Mat2 Y = mat_reduce({r, A.eps * y, y, -r}, me);
            if (relations_hold(A, X, Y, me) && condition_holds(O, ell, X, Y, me)) {
                As = X;
                Bs = Y;
                return true;
            }
        }
    return false;
}

bool companion_2_seed(const Order& O, int e, Mat2& As, Mat2& Bs) {
    const AlgebraParams& A = O.params;
    const i64 me = i64(1) << e;
    for (i64 y = 0; y < 64; ++y) {
        i64 t = mod(-A.p - A.eps * y * y, me);
        if (t % 8 != 1) continue;
        for (i64 r : sqrt_2adic(t, e)) {
            Mat2 X = mat_reduce({0, -A.eps, 1, 0}, me);
            Mat2 Y = mat_reduce({r, A.eps * y, y, -r}, me);
            if (relations_hold(A, X, Y, me) && condition_holds(O, 2, X, Y, me)) {
                As = X;
                Bs = Y;
                return true;
            }
        }
    }
    return false;
}

// Bit-by-bit lifting of trace-free solutions from mod 8 to mod 2^e.
bool dfs_2_seed(const Order& O, int e, Mat2& As, Mat2& Bs) {
    const AlgebraParams& A = O.params;
    std::function<bool(Tuple6&, int)> lift = [&](Tuple6& t, int k) -> bool {
        if (k == e) return true;
        const i64 m1 = i64(1) << (k + 1), bit = i64(1) << k;
        Tuple6 base = t;
        for (int mask = 0; mask < 64; ++mask) {
            for (int q = 0; q < 6; ++q) t[q] = base[q] + (((mask >> (5 - q)) & 1) ? bit : 0);
            if (!tuple_holds(A, t, m1)) continue;
            if (lift(t, k + 1)) return true;
        }
        t = base;
        return false;
    };
    Tuple6 t;
    for (long code = 0; code < (1L << 18); ++code) {
        for (int q = 0; q < 6; ++q) t[q] = (code >> (3 * (5 - q))) & 7;
        if (!tuple_holds(A, t, 8)) continue;
        Mat2 X = from_tuple(t[0], t[1], t[2], 8), Y = from_tuple(t[3], t[4], t[5], 8);
        if (!condition_holds(O, 2, X, Y, 8)) continue;
        Tuple6 u = t;
        if (!lift(u, 3)) continue;
        const i64 me = i64(1) << e;
        As = from_tuple(u[0], u[1], u[2], me);
        Bs = from_tuple(u[3], u[4], u[5], me);
        if (condition_holds(O, 2, As, Bs, me)) return true;
    }
    return false;
}

}  // namespace

std::pair<Mat2, Mat2> find_splitting_seed(const Order& O, i64 ell, int e) {
    const AlgebraParams& A = O.params;
    if (ell == A.p) throw Error("find_splitting_seed: D is ramified at p");
    if (!is_prime(ell)) throw Error("find_splitting_seed: ell not prime");
    Mat2 X, Y;
    if (ell == 2) {
        if (e < 7) throw Error("find_splitting_seed: need e >= 7 at ell = 2");
        if (companion_2_seed(O, e, X, Y) || dfs_2_seed(O, e, X, Y)) return {X, Y};
        throw Error("find_splitting_seed: search exhausted at ell = 2");
    }
    if (e < 2) throw Error("find_splitting_seed: need e >= 2");
    if (A.eps % ell != 0 && companion_odd_seed(O, ell, e, X, Y)) return {X, Y};
    if (!generic_odd_seed(O, ell, X, Y)) throw Error("find_splitting_seed: search exhausted at ell = " + std::to_string(ell));
    for (int m = 2; m < e; ++m) std::tie(X, Y) = lift_step_odd(A, X, Y, ell, m);
    return {X, Y};
}

std::pair<Mat2, Mat2> split_to(const Order& O, i64 ell, int n) {
    const AlgebraParams& A = O.params;
    Mat2 X, Y;
    if (ell == 2) {
        auto [X0, Y0] = find_splitting_seed(O, 2, 7);
        Tuple6 t = to_tuple(X0, Y0);
        for (int m = 7; m < n; ++m) t = lift_step_2adic(A, t, m);
        const i64 mn = i64(1) << std::max(n, 7);
        X = from_tuple(t[0], t[1], t[2], mn);
        Y = from_tuple(t[3], t[4], t[5], mn);
        if (n < 7) {
            X = mat_reduce(X, i64(1) << n);
            Y = mat_reduce(Y, i64(1) << n);
        }
    } else {
        std::tie(X, Y) = find_splitting_seed(O, ell, std::max(n, 2));
        if (n < 2) {
            X = mat_reduce(X, ell);
            Y = mat_reduce(Y, ell);
        }
    }
    const i64 mn = ipow(ell, n);
    if (!relations_hold(A, X, Y, mn)) throw Error("split_to: relations fail");
    return {X, Y};
}

std::array<Mat2, 4> basis_images(const Order& O, i64 ell, const Mat2& X, const Mat2& Y, int n, int out_exp) {
    const i64 mn = ipow(ell, n), mo = ipow(ell, out_exp);
    std::array<Mat2, 4> S;
    for (int k = 0; k < 4; ++k) {
        Numerator num = numerator_of(O.s[k]);
        int e = mpz_divisible_ui_p(num.d.get_mpz_t(), static_cast<unsigned long>(ell)) ? val(num.d, ell) : 0;
        if (n - e < out_exp) throw Error("basis_images: precision too low");
        const i64 pe = ipow(ell, e), rest = mn / pe;
        Mat2 img = numerator_image(num, X, Y, mn);
        if (!mat_divisible(img, pe)) throw Error("basis_images: Condition fails (non-integral image)");
        mpz_class u = num.d / pe;
        i64 uinv = invmod(residue(u, rest), rest);
        Mat2 q{img.a / pe, img.b / pe, img.c / pe, img.d / pe};
        S[k] = mat_reduce(mat_scale(q, uinv, rest), mo);
    }
    return S;
}

Mat2 image(const std::array<Mat2, 4>& S, const Vec4& x, i64 m) {
    Mat2 r{};
    for (int k = 0; k < 4; ++k) r = mat_add(r, mat_scale(S[k], residue(x[k], m), m), m);
    return r;
}

SplittingData compute_splitting(const ClassSet& C, const PrecisionEntry& pe, SplitStore* store) {
    SplittingData sd;
    sd.ell = pe.ell;
    sd.n = pe.n;
    sd.m = pe.m;
    sd.vN = pe.vN;
    sd.mod_n = ipow(pe.ell, pe.n);
    sd.mod_work = ipow(pe.ell, pe.work());
    const std::pair<i64, int> key{pe.ell, pe.n};
    if (store && store->count(key)) {
        std::tie(sd.A, sd.B) = store->at(key);
    } else {
        std::tie(sd.A, sd.B) = split_to(C.O, pe.ell, pe.n);
        if (store) (*store)[key] = {sd.A, sd.B};
    }
    sd.S = basis_images(C.O, pe.ell, sd.A, sd.B, pe.n, pe.work());
    for (size_t j = 0; j < C.h(); ++j) {
        Vec4 w;
        if (!C.O.integral_coords(C.local_gens[j].at(pe.ell), w)) throw Error("compute_splitting: local generator not in O");
        sd.wcoords.push_back(w);
        sd.W.push_back(image(sd.S, w, sd.mod_work));
    }
    verify_splitting(C, sd);
    return sd;
}

void verify_splitting(const ClassSet& C, const SplittingData& S) {
    const Order& O = C.O;
    if (!relations_hold(O.params, S.A, S.B, S.mod_n)) throw Error("splitting: relations fail at ell = " + std::to_string(S.ell));
    if (!condition_holds(O, S.ell, S.A, S.B, S.mod_n)) throw Error("splitting: Condition fails at ell = " + std::to_string(S.ell));
    for (int k = 0; k < 4; ++k)
        if (mat_det(S.S[k], S.mod_work) != residue(mpz_class(nrd(O.params, O.s[k]).get_num()), S.mod_work))
            throw Error("splitting: det(S) != nrd(s)");
    for (size_t j = 0; j < S.W.size(); ++j)
        if (mat_det(S.W[j], S.mod_work) != residue(O.nrd(S.wcoords[j]), S.mod_work))
            throw Error("splitting: det(W) != nrd(w)");
}

}  // namespace qhecke

#pragma once

#include "qhecke/classes.hpp"

#include <array>
#include <map>
#include <utility>
#include <vector>

namespace qhecke {

// 2x2 matrix with residues modulo a modulus kept alongside it.
struct Mat2 {
    i64 a = 0, b = 0, c = 0, d = 0;
    bool operator==(const Mat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
    bool operator!=(const Mat2& o) const { return !(*this == o); }
};

Mat2 mat_reduce(const Mat2& x, i64 m);
Mat2 mat_mul(const Mat2& x, const Mat2& y, i64 m);
Mat2 mat_add(const Mat2& x, const Mat2& y, i64 m);
Mat2 mat_scale(const Mat2& x, i64 s, i64 m);
Mat2 mat_adj(const Mat2& x, i64 m);
Mat2 mat_scalar(i64 s, i64 m);
i64 mat_det(const Mat2& x, i64 m);
i64 mat_trace(const Mat2& x, i64 m);
bool mat_divisible(const Mat2& x, i64 d);  // all entries divisible by d

struct PrecisionEntry {
    i64 ell;
    int m;   // max_j v_ell(nrd(w_ell^j))
    int vN;  // v_ell(N)
    int d;   // max v_ell of the order basis denominators
    int n;   // splitting precision exponent, work() + 2 max(d, 1)
    int work() const { return 2 * m + vN + 2; }
};

// V with precisions: primes where some class has a nontrivial local generator
// (excluding p), ell0 and the primes dividing N.
std::vector<PrecisionEntry> precision_plan(const ClassSet& C, i64 N, i64 ell0);

bool relations_hold(const AlgebraParams& A, const Mat2& X, const Mat2& Y, i64 mod);
// Integrality of every basis element's image (the case-split Condition).
bool condition_holds(const Order& O, i64 ell, const Mat2& X, const Mat2& Y, i64 mod);

// Trace-free pair satisfying the relations and the Condition mod ell^e
// (e >= 2, and e >= 7 at ell = 2).
std::pair<Mat2, Mat2> find_splitting_seed(const Order& O, i64 ell, int e);

// Trace-free (a b; c -a) with arbitrary-precision residues.
struct TracelessZ {
    mpz_class a, b, c;
};
bool relations_hold(const AlgebraParams& A, const TracelessZ& X, const TracelessZ& Y, const mpz_class& mod);
std::pair<TracelessZ, TracelessZ> lift_step_odd(const AlgebraParams& A, const TracelessZ& A0, const TracelessZ& B0, i64 ell,
                                                int m);
std::pair<Mat2, Mat2> lift_step_odd(const AlgebraParams& A, const Mat2& A0, const Mat2& B0, i64 ell, int m);

using Tuple6 = std::array<i64, 6>;  // (a, b, c, x, y, z): A = (a b; c -a), B = (x y; z -x)
bool tuple_holds(const AlgebraParams& A, const Tuple6& t, i64 mod);
Tuple6 lift_step_2adic(const AlgebraParams& A, const Tuple6& t, int m);

// A, B modulo ell^n satisfying relations and Condition.
std::pair<Mat2, Mat2> split_to(const Order& O, i64 ell, int n);

// Images of s^1..s^4 modulo ell^out_exp from A, B modulo ell^n.
std::array<Mat2, 4> basis_images(const Order& O, i64 ell, const Mat2& A, const Mat2& B, int n, int out_exp);
Mat2 image(const std::array<Mat2, 4>& S, const Vec4& x, i64 mod);

struct SplittingData {
    i64 ell = 0;
    int n = 0, m = 0, vN = 0;
    i64 mod_n = 1;     // ell^n
    i64 mod_work = 1;  // ell^(2m + vN + 2)
    Mat2 A, B;
    std::array<Mat2, 4> S;
    std::vector<Mat2> W;     // per class; identity where w_ell = 1
    std::vector<Vec4> wcoords;
};

// Splitting pairs (A, B) keyed by (ell, n), as kept in the cache.
using SplitStore = std::map<std::pair<i64, int>, std::pair<Mat2, Mat2>>;

// Uses the stored pair for (ell, n) when present, otherwise searches and records it.
SplittingData compute_splitting(const ClassSet& C, const PrecisionEntry& pe, SplitStore* store = nullptr);
// Re-checks relations, Condition, det/nrd compatibility; throws on failure.
void verify_splitting(const ClassSet& C, const SplittingData& S);

}  // namespace qhecke

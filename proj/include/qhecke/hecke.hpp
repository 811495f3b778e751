#pragma once

#include "qhecke/linalg.hpp"
#include "qhecke/split.hpp"

#include <iosfwd>
#include <map>
#include <vector>

namespace qhecke {

// (1 k; 0 ell0) for 0 <= k < ell0, then (ell0 0; 0 1).
std::vector<Mat2> hecke_cosets(i64 ell0);

struct HeckeContext {
    ClassSet C;
    i64 N = 1, ell0 = 0;
    std::map<i64, int> m;                    // m_ell over all classes, including ell = p
    std::map<i64, SplittingData> splitting;  // every ell in V
    std::vector<Mat2> cosets;
};

HeckeContext make_context(const ClassSet& C, i64 N, i64 ell0, SplitStore* store = nullptr);

// Primes other than p and ell0 where w^i or w^j is nontrivial, plus the primes dividing N.
std::vector<i64> v_ij(const HeckeContext& ctx, size_t i, size_t j);

struct MK {
    mpz_class M;
    mpq_class K;
    mpz_class target() const;  // K * M^2, checked integral
};

MK compute_MK(const HeckeContext& ctx, size_t i, size_t j);

// All coordinate vectors in the order basis with nrd == target, lexicographic.
std::vector<Vec4> solve_norm_equation(const Order& O, const mpz_class& target);

// Norm equation plus the congruences at every ell in V_ij and at ell0 for coset k.
bool check_congruences(const HeckeContext& ctx, const Vec4& sol, size_t i, size_t j, size_t k);

struct Witness {
    Vec4 coords;  // M * alpha in the order basis
    Quat alpha;
};

struct CellResult {
    bool hit = false;
    std::vector<Witness> witnesses;  // every passing solution
};

// e_{i,j,k} with its witnesses: the norm equation is solved inside the sublattice
// cut out by the congruences, then each solution is re-checked directly.
CellResult e_level1(const HeckeContext& ctx, size_t i, size_t j, size_t k);

// Image of w_p^i alpha (w_p^j)^{-1} modulo j, as an element of F_{p^2}^x.
F2 residue_Qp(const HeckeContext& ctx, const Fp2Field& K, const Quat& alpha, size_t i, size_t j);
// W^i (M alpha) adj(W^j) / (M nrd(w^j)) modulo ell^{v_ell(N)}.
Mat2 residue_Ql(const HeckeContext& ctx, const Witness& w, const mpz_class& M, size_t i, size_t j, i64 ell);

// Target class of every coset g_k applied to every class j, with witnesses.
struct CosetTarget {
    size_t i = 0;
    std::vector<Witness> witnesses;
};

struct HeckeData {
    HeckeContext ctx;
    std::vector<std::vector<CosetTarget>> target;  // [j][k]
};

// Throws if some coset does not land in exactly one class.
HeckeData compute_hecke_data(const ClassSet& C, i64 N, i64 ell0, unsigned threads = 0, SplitStore* store = nullptr);

struct LevelOneMatrix {
    i64 p = 0, ell0 = 0;
    std::vector<std::vector<i64>> counts;  // [j][i] = sum_k e_{i,j,k} (the integer companion ell0*T)
    std::vector<std::vector<i64>> mod_p;   // [j][i] = ell0^{-1} counts mod p
};

LevelOneMatrix hecke_matrix_level1(const HeckeData& D);
LevelOneMatrix hecke_matrix_level1(const ClassSet& C, i64 ell0, unsigned threads = 0);

// GL_2(Z/N), lexicographic in (a, b, c, d). N = 1 gives one element.
struct GLGroup {
    i64 N = 1;
    std::vector<Mat2> elems;
    std::vector<i64> lookup;  // encoded matrix -> index, -1 if not invertible

    explicit GLGroup(i64 N_ = 1);
    size_t size() const { return elems.size(); }
    size_t index_of(const Mat2& g) const;
    Mat2 mul(const Mat2& x, const Mat2& y) const { return mat_mul(x, y, N); }
    Mat2 inv(const Mat2& x) const;
};

struct PointIndex {
    size_t j;
    F2 mu;
    Mat2 gamma;
};

struct QPair {
    F2 qp;
    Mat2 qg;
    bool operator<(const QPair& o) const;
    bool operator==(const QPair& o) const { return qp == o.qp && qg == o.qg; }
};

struct SparseEntry {
    size_t row, col;
    F2 value;
};

// T_{ell0} on functions on the index set {(j, mu, gamma)}. A coset hitting class i
// with distinct residue pairs Q contributes (1/|Q|) per pair, which is T composed
// with averaging over the unit identifications. If some |Q| is divisible by p the
// matrix falls back to the first witness only.
struct GeneralHecke {
    i64 p = 0, N = 1, ell0 = 0;
    size_t h = 0;
    Fp2Field K;
    GLGroup G;
    std::vector<std::vector<size_t>> target;             // [j][k] class i
    std::vector<std::vector<std::vector<QPair>>> qs;     // [j][k] distinct pairs, sorted
    bool first_witness_only = false;

    size_t fiber() const { return static_cast<size_t>(p * p - 1) * G.size(); }
    size_t dim() const { return h * fiber(); }
    size_t index(size_t j, size_t mu_index, size_t g_index) const;
    PointIndex point(size_t idx) const;

    std::vector<F2> apply(const std::vector<F2>& f) const;
    std::vector<SparseEntry> materialize() const;  // row-major
    void stream_csv(std::ostream& os) const;       // ell0,row,col,s,t per nonzero entry, no header
    FMat dense() const;
    // Weight-k block on f_{i,gamma} = sum_mu mu^{-k} 1_{(i,mu,gamma)}, indexed (i, gamma).
    // Only k mod p^2 - 1 matters; negative k is rejected.
    FMat weight_k(i64 k) const;
};

GeneralHecke hecke_matrix_general(const HeckeData& D);
GeneralHecke hecke_matrix_general(const ClassSet& C, i64 N, i64 ell0, unsigned threads = 0);

FMat level1_as_fmat(const LevelOneMatrix& T);

}  // namespace qhecke

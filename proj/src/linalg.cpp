#include "qhecke/linalg.hpp"

#include <functional>

namespace qhecke {

FMat fmat_zero(size_t rows, size_t cols) { return FMat(rows, std::vector<F2>(cols)); }

FMat fmat_identity(size_t n) {
    FMat m = fmat_zero(n, n);
    for (size_t i = 0; i < n; ++i) m[i][i] = {1, 0};
    return m;
}

FMat fmat_mul(const Fp2Field& K, const FMat& a, const FMat& b) {
    size_t r = a.size(), inner = b.size(), c = b.empty() ? 0 : b[0].size();
    FMat out = fmat_zero(r, c);
    for (size_t i = 0; i < r; ++i)
        for (size_t k = 0; k < inner; ++k) {
            if (a[i][k].is_zero()) continue;
            for (size_t j = 0; j < c; ++j) out[i][j] = K.add(out[i][j], K.mul(a[i][k], b[k][j]));
        }
    return out;
}

FMat fmat_sub(const Fp2Field& K, const FMat& a, const FMat& b) {
    FMat out = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) out[i][j] = K.sub(a[i][j], b[i][j]);
    return out;
}

FMat fmat_scalar_shift(const Fp2Field& K, const FMat& a, F2 lambda) {
    FMat out = a;
    for (size_t i = 0; i < a.size(); ++i) out[i][i] = K.sub(out[i][i], lambda);
    return out;
}

bool fmat_equal(const FMat& a, const FMat& b) { return a == b; }

bool fmat_commute(const Fp2Field& K, const FMat& a, const FMat& b) {
    return fmat_mul(K, a, b) == fmat_mul(K, b, a);
}

// In-place reduced row echelon form; returns pivot columns.
static std::vector<size_t> rref(const Fp2Field& K, FMat& a, size_t ncols) {
    std::vector<size_t> piv;
    size_t row = 0;
    for (size_t c = 0; c < ncols && row < a.size(); ++c) {
        size_t sel = row;
        while (sel < a.size() && a[sel][c].is_zero()) ++sel;
        if (sel == a.size()) continue;
        std::swap(a[row], a[sel]);
        F2 inv = K.inv(a[row][c]);
        for (auto& x : a[row]) x = K.mul(x, inv);
        for (size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][c].is_zero()) continue;
            F2 f = a[r][c];
            for (size_t j = 0; j < a[r].size(); ++j) a[r][j] = K.sub(a[r][j], K.mul(f, a[row][j]));
        }
        piv.push_back(c);
        ++row;
    }
    return piv;
}

size_t fmat_rank(const Fp2Field& K, FMat a) {
    size_t cols = a.empty() ? 0 : a[0].size();
    return rref(K, a, cols).size();
}

FMat fmat_kernel(const Fp2Field& K, const FMat& a) {
    size_t n = a.empty() ? 0 : a[0].size();
    FMat r = a;
    auto piv = rref(K, r, n);
    std::vector<bool> is_piv(n, false);
    for (size_t c : piv) is_piv[c] = true;
    std::vector<std::vector<F2>> cols;
    for (size_t f = 0; f < n; ++f) {
        if (is_piv[f]) continue;
        std::vector<F2> v(n);
        v[f] = {1, 0};
        for (size_t k = 0; k < piv.size(); ++k) v[piv[k]] = K.neg(r[k][f]);
        cols.push_back(v);
    }
    FMat out = fmat_zero(n, cols.size());
    for (size_t j = 0; j < cols.size(); ++j)
        for (size_t i = 0; i < n; ++i) out[i][j] = cols[j][i];
    return out;
}

Poly char_poly(const Fp2Field& K, const FMat& M) {
    const size_t n = M.size();
    FMat H = M;
    for (size_t m = 1; m + 1 < n; ++m) {
        size_t i = m;
        while (i < n && H[i][m - 1].is_zero()) ++i;
        if (i == n) continue;
        if (i != m) {
            std::swap(H[i], H[m]);
            for (size_t r = 0; r < n; ++r) std::swap(H[r][i], H[r][m]);
        }
        F2 inv = K.inv(H[m][m - 1]);
        for (size_t j = m + 1; j < n; ++j) {
            F2 u = K.mul(H[j][m - 1], inv);
            if (u.is_zero()) continue;
            for (size_t c = 0; c < n; ++c) H[j][c] = K.sub(H[j][c], K.mul(u, H[m][c]));
            for (size_t r = 0; r < n; ++r) H[r][m] = K.add(H[r][m], K.mul(u, H[r][j]));
        }
    }
    // P[k] = char poly of the leading k x k block of H.
    std::vector<Poly> P(n + 1);
    P[0] = {{1 % K.p, 0}};
    for (size_t k = 1; k <= n; ++k) {
        Poly next(k + 1);
        const Poly& prev = P[k - 1];
        for (size_t d = 0; d < prev.size(); ++d) {
            next[d + 1] = K.add(next[d + 1], prev[d]);
            next[d] = K.sub(next[d], K.mul(H[k - 1][k - 1], prev[d]));
        }
        F2 prod{1 % K.p, 0};
        for (size_t i = k - 1; i >= 1; --i) {
            prod = K.mul(prod, H[i][i - 1]);
            F2 coef = K.mul(prod, H[i - 1][k - 1]);
            if (!coef.is_zero())
                for (size_t d = 0; d < P[i - 1].size(); ++d) next[d] = K.sub(next[d], K.mul(coef, P[i - 1][d]));
        }
        P[k] = next;
    }
    return P[n];
}

std::vector<Eigenvalue> eigenvalues(const Fp2Field& K, const FMat& M) {
    Poly f = char_poly(K, M);
    std::vector<Eigenvalue> out;
    for (F2 x : K.elements()) {
        size_t mult = 0;
        while (poly_divide_linear(K, f, x)) ++mult;
        if (mult) out.push_back({x, mult});
    }
    return out;
}

// Solve V R = T V for R, where V (n x d) has full column rank and span(V) is T-stable.
static FMat restrict_to(const Fp2Field& K, const FMat& T, const FMat& V) {
    const size_t n = V.size(), d = V.empty() ? 0 : V[0].size();
    FMat TV = fmat_mul(K, T, V);
    FMat aug = fmat_zero(n, 2 * d);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j) {
            aug[i][j] = V[i][j];
            aug[i][d + j] = TV[i][j];
        }
    auto piv = rref(K, aug, 2 * d);
    if (piv.size() != d) throw Error("restrict_to: subspace is not invariant");
    for (size_t k = 0; k < d; ++k)
        if (piv[k] != k) throw Error("restrict_to: basis is not independent");
    FMat R = fmat_zero(d, d);
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) R[i][j] = aug[i][d + j];
    return R;
}

EigensystemResult simultaneous_eigensystems(const Fp2Field& K, const std::vector<FMat>& mats) {
    if (mats.empty()) throw Error("simultaneous_eigensystems: no matrices");
    const size_t n = mats[0].size();
    for (const auto& m : mats)
        if (m.size() != n) throw Error("simultaneous_eigensystems: size mismatch");
    for (size_t a = 0; a < mats.size(); ++a)
        for (size_t b = a + 1; b < mats.size(); ++b)
            if (!fmat_commute(K, mats[a], mats[b]))
                throw Error("simultaneous_eigensystems: matrices " + std::to_string(a) + " and " + std::to_string(b) +
                            " do not commute");
    EigensystemResult res;
    std::vector<F2> cur;
    std::function<void(size_t, const FMat&)> rec = [&](size_t k, const FMat& V) {
        const size_t d = V.empty() ? 0 : V[0].size();
        if (d == 0) return;
        if (k == mats.size()) {
            Eigensystem e{cur, d, true};
            for (size_t t = 0; t < mats.size(); ++t) {
                FMat R = restrict_to(K, mats[t], V);
                FMat S = fmat_scalar_shift(K, R, cur[t]);
                for (const auto& row : S)
                    for (F2 x : row)
                        if (!x.is_zero()) e.diagonalizable = false;
            }
            res.systems.push_back(e);
            return;
        }
        FMat R = restrict_to(K, mats[k], V);
        size_t covered = 0;
        for (const auto& ev : eigenvalues(K, R)) {
            FMat S = fmat_scalar_shift(K, R, ev.value);
            FMat P = fmat_identity(d);
            for (size_t t = 0; t < ev.multiplicity; ++t) P = fmat_mul(K, P, S);
            FMat G = fmat_kernel(K, P);
            if (G[0].size() != ev.multiplicity) throw Error("simultaneous_eigensystems: generalized eigenspace dimension");
            covered += ev.multiplicity;
            cur.push_back(ev.value);
            rec(k + 1, fmat_mul(K, V, G));
            cur.pop_back();
        }
        res.unsplit_dimension += d - covered;
    };
    rec(0, fmat_identity(n));
    return res;
}

}  // namespace qhecke

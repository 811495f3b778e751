#include "qhecke/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qhecke {

Basis4 hnf(std::vector<Vec4> rows) {
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const Vec4& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0 && v[3] == 0; }),
               rows.end());
    size_t top = 0;
    for (int c = 0; c < 4; ++c) {
        for (;;) {
            size_t piv = rows.size();
            for (size_t i = top; i < rows.size(); ++i)
                if (rows[i][c] != 0 && (piv == rows.size() || abs(rows[i][c]) < abs(rows[piv][c]))) piv = i;
            if (piv == rows.size()) throw Error("hnf: generators have rank < 4");
            bool done = true;
            for (size_t i = top; i < rows.size(); ++i) {
                if (i == piv || rows[i][c] == 0) continue;
                mpz_class q = rows[i][c] / rows[piv][c];
                for (int k = c; k < 4; ++k) rows[i][k] -= q * rows[piv][k];
                if (rows[i][c] != 0) done = false;
            }
            std::swap(rows[piv], rows[top]);
            if (done) break;
        }
        if (rows[top][c] < 0)
            for (int k = c; k < 4; ++k) rows[top][k] = -rows[top][k];
        for (size_t m = 0; m < top; ++m) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), rows[m][c].get_mpz_t(), rows[top][c].get_mpz_t());
            if (q != 0)
                for (int k = c; k < 4; ++k) rows[m][k] -= q * rows[top][k];
        }
        ++top;
        size_t w = top;
        for (size_t i = top; i < rows.size(); ++i)
            if (rows[i][0] != 0 || rows[i][1] != 0 || rows[i][2] != 0 || rows[i][3] != 0) rows[w++] = rows[i];
        rows.resize(w);
    }
    return {rows[0], rows[1], rows[2], rows[3]};
}

Basis4 impose_form(const Basis4& L, const std::array<i64, 4>& f, i64 ell, int e) {
    const i64 m = ipow(ell, e);
    Basis4 b = L;
    std::array<i64, 4> fv;
    int best = -1, bestv = e;
    for (int a = 0; a < 4; ++a) {
        mpz_class t = 0;
        for (int k = 0; k < 4; ++k) t += b[a][k] * f[k];
        fv[a] = residue(t, m);
        if (fv[a] != 0) {
            int v = val(fv[a], ell);
            if (v < bestv) {
                bestv = v;
                best = a;
            }
        }
    }
    if (best < 0) return L;
    const i64 sm = ipow(ell, bestv), rest = m / sm;
    const i64 uinv = invmod((fv[best] / sm) % rest, rest);
    for (int c = 0; c < 4; ++c) {
        if (c == best || fv[c] == 0) continue;
        i64 q = mulmod(fv[c] / sm, uinv, rest);
        for (int k = 0; k < 4; ++k) b[c][k] -= q * b[best][k];
    }
    for (int k = 0; k < 4; ++k) b[best][k] *= rest;
    return hnf({b[0], b[1], b[2], b[3]});
}

QVec4 IdealLattice::vec(int k) const {
    QVec4 v;
    for (int c = 0; c < 4; ++c) {
        v[c] = mpq_class(b[k][c], den);
        v[c].canonicalize();
    }
    return v;
}

IdealLattice make_lattice(std::vector<Vec4> gens, const mpz_class& den) {
    if (den == 0) throw Error("make_lattice: zero denominator");
    IdealLattice I;
    I.b = hnf(std::move(gens));
    mpz_class g = abs(den);
    for (auto& row : I.b)
        for (auto& x : row) g = gcd(g, x);
    I.den = abs(den) / g;
    for (auto& row : I.b)
        for (auto& x : row) x /= g;
    return I;
}

static IdealLattice from_rational(const std::vector<QVec4>& qs) {
    mpz_class d = 1;
    for (const auto& q : qs)
        for (const auto& x : q) d = lcm(d, x.get_den());
    std::vector<Vec4> gens;
    for (const auto& q : qs) {
        Vec4 v;
        for (int k = 0; k < 4; ++k) v[k] = q[k].get_num() * (d / q[k].get_den());
        gens.push_back(v);
    }
    return make_lattice(gens, d);
}

IdealLattice lattice_from_generators(const Order& O, const std::vector<Quat>& gens) {
    std::vector<QVec4> qs;
    for (const auto& g : gens) qs.push_back(O.coords(g));
    return from_rational(qs);
}

IdealLattice order_lattice(const Order&) {
    IdealLattice I;
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) I.b[a][c] = (a == c) ? 1 : 0;
    I.den = 1;
    return I;
}

std::vector<Quat> lattice_basis(const Order& O, const IdealLattice& I) {
    std::vector<Quat> out;
    for (int k = 0; k < 4; ++k) out.push_back(O.element(I.vec(k)));
    return out;
}

IdealLattice ideal_product(const Order& O, const IdealLattice& I, const IdealLattice& J) {
    std::vector<Vec4> gens;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) gens.push_back(O.mul(I.b[a], J.b[b]));
    return make_lattice(gens, I.den * J.den);
}

IdealLattice conjugate_ideal(const Order& O, const IdealLattice& I) {
    std::vector<Vec4> gens;
    for (int a = 0; a < 4; ++a) gens.push_back(O.conj(I.b[a]));
    return make_lattice(gens, I.den);
}

IdealLattice right_multiply(const Order& O, const IdealLattice& I, const Quat& x) {
    std::vector<QVec4> qs;
    for (const auto& e : lattice_basis(O, I)) qs.push_back(O.coords(mul(O.params, e, x)));
    return from_rational(qs);
}

IdealLattice scale(const IdealLattice& I, const mpq_class& s) {
    if (s == 0) throw Error("scale by zero");
    std::vector<Vec4> gens;
    for (int a = 0; a < 4; ++a) {
        Vec4 v;
        for (int c = 0; c < 4; ++c) v[c] = I.b[a][c] * s.get_num();
        gens.push_back(v);
    }
    return make_lattice(gens, I.den * s.get_den());
}

mpq_class lattice_index(const IdealLattice& I) {
    mpz_class d = 1;
    for (int k = 0; k < 4; ++k) d *= I.b[k][k];
    mpz_class den4 = I.den * I.den * I.den * I.den;
    mpq_class q(d, den4);
    q.canonicalize();
    return q;
}

mpq_class ideal_nrd(const IdealLattice& I) {
    mpq_class r;
    if (!rational_sqrt(lattice_index(I), r))
        throw Error("ideal_nrd: index " + lattice_index(I).get_str() + " is not a rational square");
    return r;
}

bool contains(const IdealLattice& I, const QVec4& x) {
    Vec4 v;
    for (int k = 0; k < 4; ++k) {
        mpq_class t = x[k] * mpq_class(I.den);
        if (t.get_den() != 1) return false;
        v[k] = t.get_num();
    }
    for (int k = 0; k < 4; ++k) {
        if (!mpz_divisible_p(v[k].get_mpz_t(), I.b[k][k].get_mpz_t())) return false;
        mpz_class c = v[k] / I.b[k][k];
        for (int j = k; j < 4; ++j) v[j] -= c * I.b[k][j];
    }
    return true;
}

bool contains(const Order& O, const IdealLattice& I, const Quat& x) { return contains(I, O.coords(x)); }

bool is_left_ideal(const Order& O, const IdealLattice& I) {
    for (int a = 0; a < 4; ++a) {
        Vec4 e{0, 0, 0, 0};
        e[a] = 1;
        for (int k = 0; k < 4; ++k) {
            Vec4 prod = O.mul(e, I.b[k]);
            QVec4 q;
            for (int c = 0; c < 4; ++c) {
                q[c] = mpq_class(prod[c], I.den);
                q[c].canonicalize();
            }
            if (!contains(I, q)) return false;
        }
    }
    return true;
}

Gram norm_gram(const Order& O, const IdealLattice& I) {
    Gram G(4, std::vector<mpq_class>(4));
    mpz_class d2 = 2 * I.den * I.den;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            mpz_class t = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    if (O.tr[i][j]) t += I.b[a][i] * I.b[b][j] * O.tr[i][j];
            G[a][b] = mpq_class(t, d2);
            G[a][b].canonicalize();
        }
    return G;
}

Gram order_gram(const Order& O) { return norm_gram(O, order_lattice(O)); }

mpq_class eval_form(const Gram& G, const IVec& v) {
    mpq_class t = 0;
    for (size_t a = 0; a < v.size(); ++a)
        for (size_t b = 0; b < v.size(); ++b) t += G[a][b] * v[a] * v[b];
    return t;
}

namespace {

struct Enumerator {
    size_t n;
    Gram Q;                        // Cholesky-style coefficients
    std::vector<IVec> B;           // reduced basis rows (original coordinates)
    mpq_class bound;
    bool exact;
    IVec x;
    std::vector<IVec> out;

    void emit() {
        IVec v(n, 0);
        bool zero = true;
        for (size_t i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            zero = false;
            for (size_t k = 0; k < n; ++k) v[k] += x[i] * B[i][k];
        }
        if (zero && !exact) return;
        out.push_back(v);
    }

    bool fits(const mpz_class& xi, const mpq_class& c, const mpq_class& q, const mpq_class& R) const {
        mpq_class d = mpq_class(xi) - c;
        return q * d * d <= R;
    }

    void rec(size_t i, const mpq_class& R) {
        mpq_class c = 0;
        for (size_t j = i + 1; j < n; ++j)
            if (x[j] != 0) c -= Q[i][j] * x[j];
        const mpq_class& q = Q[i][i];
        if (i == 0 && exact) {
            mpq_class t = R / q, s;
            if (!rational_sqrt(t, s)) return;
            mpq_class lo = c - s, hi = c + s;
            if (lo.get_den() == 1) {
                x[0] = lo.get_num();
                emit();
            }
            if (s != 0 && hi.get_den() == 1) {
                x[0] = hi.get_num();
                emit();
            }
            x[0] = 0;
            return;
        }
        double cd = c.get_d(), sd = std::sqrt(std::max(0.0, mpq_class(R / q).get_d()));
        mpz_class lo(std::floor(cd - sd) - 1), hi(std::ceil(cd + sd) + 1);
        while (lo <= hi && !fits(lo, c, q, R)) ++lo;
        while (hi >= lo && !fits(hi, c, q, R)) --hi;
        if (lo > hi) return;
        while (fits(lo - 1, c, q, R)) --lo;
        while (fits(hi + 1, c, q, R)) ++hi;
        for (mpz_class v = lo; v <= hi; ++v) {
            x[i] = v;
            mpq_class d = mpq_class(v) - c;
            mpq_class R2 = R - q * d * d;
            if (i == 0) emit();
            else rec(i - 1, R2);
        }
        x[i] = 0;
    }
};

}  // namespace

std::vector<IVec> reduced_basis(const Gram& G) {
    const size_t n = G.size();
    Gram H = G;
    std::vector<IVec> B(n, IVec(n, 0));
    for (size_t i = 0; i < n; ++i) B[i][i] = 1;
    for (size_t i = 0; i < n; ++i)
        if (H[i][i] <= 0) throw Error("short_vectors: form is not positive definite");
    // Pairwise size reduction; each step strictly lowers a diagonal entry.
    for (bool changed = true; changed;) {
        changed = false;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                mpq_class a = H[i][j];
                if (2 * abs(a) <= H[j][j]) continue;
                mpq_class r = a / H[j][j] + mpq_class(1, 2);
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
                if (q == 0) continue;
                mpq_class qq(q);
                mpq_class hii = H[i][i] - 2 * qq * H[i][j] + qq * qq * H[j][j];
                for (size_t k = 0; k < n; ++k) {
                    if (k == i) continue;
                    H[i][k] -= qq * H[j][k];
                    H[k][i] = H[i][k];
                }
                H[i][i] = hii;
                for (size_t k = 0; k < n; ++k) B[i][k] -= q * B[j][k];
                changed = true;
            }
    }
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    std::stable_sort(perm.begin(), perm.end(), [&](size_t a, size_t b) { return H[a][a] < H[b][b]; });
    std::vector<IVec> out;
    for (size_t i : perm) out.push_back(B[i]);
    return out;
}

namespace {

std::vector<IVec> enumerate(const Gram& G, const mpq_class& bound, bool exact) {
    const size_t n = G.size();
    std::vector<IVec> B = reduced_basis(G);
    Enumerator E;
    E.n = n;
    E.Q.assign(n, std::vector<mpq_class>(n));
    E.B.resize(n);
    for (size_t a = 0; a < n; ++a) {
        E.B[a] = B[a];
        for (size_t b = 0; b < n; ++b) {
            E.Q[a][b] = 0;
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j)
                    if (B[a][i] != 0 && B[b][j] != 0) E.Q[a][b] += G[i][j] * B[a][i] * B[b][j];
        }
    }
    auto& Q = E.Q;
    for (size_t i = 0; i < n; ++i) {
        if (Q[i][i] <= 0) throw Error("short_vectors: form is not positive definite");
        for (size_t j = i + 1; j < n; ++j) {
            Q[j][i] = Q[i][j];
            Q[i][j] /= Q[i][i];
        }
        for (size_t k = i + 1; k < n; ++k)
            for (size_t l = k; l < n; ++l) Q[k][l] -= Q[k][i] * Q[i][l];
    }
    E.bound = bound;
    E.exact = exact;
    E.x.assign(n, 0);
    E.rec(n - 1, bound);
    std::sort(E.out.begin(), E.out.end());
    E.out.erase(std::unique(E.out.begin(), E.out.end()), E.out.end());
    return E.out;
}

}  // namespace

std::vector<IVec> short_vectors(const Gram& G, const mpq_class& target) {
    if (target < 0) throw Error("short_vectors: negative target");
    auto out = enumerate(G, target, true);
    for (const auto& v : out)
        if (eval_form(G, v) != target) throw Error("short_vectors: internal mismatch");
    return out;
}

std::vector<IVec> vectors_up_to(const Gram& G, const mpq_class& bound) {
    if (bound < 0) return {};
    return enumerate(G, bound, false);
}

std::vector<IVec> short_vectors_box(const Gram& G, const mpq_class& target, long radius) {
    const size_t n = G.size();
    std::vector<IVec> out;
    IVec v(n, -radius);
    for (;;) {
        if (eval_form(G, v) == target) out.push_back(v);
        size_t k = 0;
        while (k < n && v[k] == radius) v[k++] = -radius;
        if (k == n) break;
        v[k] += 1;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace qhecke

#include "qhecke/hecke.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

namespace qhecke {

std::vector<Mat2> hecke_cosets(i64 ell0) {
    std::vector<Mat2> g;
    for (i64 k = 0; k < ell0; ++k) g.push_back({1, k, 0, ell0});
    g.push_back({ell0, 0, 0, 1});
    return g;
}

HeckeContext make_context(const ClassSet& C, i64 N, i64 ell0, SplitStore* store) {
    HeckeContext ctx;
    ctx.C = C;
    ctx.N = N;
    ctx.ell0 = ell0;
    ctx.m = max_valuations(C);
    for (const auto& pe : precision_plan(C, N, ell0)) ctx.splitting.emplace(pe.ell, compute_splitting(C, pe, store));
    ctx.cosets = hecke_cosets(ell0);
    return ctx;
}

namespace {

int m_of(const HeckeContext& ctx, i64 ell) {
    auto it = ctx.m.find(ell);
    return it == ctx.m.end() ? 0 : it->second;
}

int vnrd(const HeckeContext& ctx, size_t j, i64 ell) {
    return val(nrd(ctx.C.O.params, ctx.C.local_gens[j].at(ell)), ell);
}

const SplittingData& split_at(const HeckeContext& ctx, i64 ell) {
    auto it = ctx.splitting.find(ell);
    if (it == ctx.splitting.end()) throw Error("missing splitting at ell = " + std::to_string(ell));
    return it->second;
}

// W^i * X * adj(W^j), optionally times adj(g), modulo the working precision.
Mat2 sandwich(const SplittingData& sd, size_t i, size_t j, const Mat2& X, const Mat2* g) {
    const i64 m = sd.mod_work;
    Mat2 P = mat_mul(mat_mul(sd.W[i], X, m), mat_adj(sd.W[j], m), m);
    if (g) P = mat_mul(P, mat_adj(mat_reduce(*g, m), m), m);
    return P;
}

struct Requirement {
    i64 ell;
    int e;            // entries must vanish modulo ell^e
    const Mat2* g;    // coset at ell0, else null
};

std::vector<Requirement> requirements(const HeckeContext& ctx, size_t i, size_t j, size_t k) {
    std::vector<Requirement> out;
    for (i64 ell : v_ij(ctx, i, j)) {
        int e = m_of(ctx, ell) + vnrd(ctx, j, ell);
        if (e > 0) out.push_back({ell, e, nullptr});
    }
    out.push_back({ctx.ell0, m_of(ctx, ctx.ell0) + vnrd(ctx, j, ctx.ell0) + 2, &ctx.cosets.at(k)});
    (void)i;
    return out;
}

Vec4 to_vec4(const IVec& v) { return {v[0], v[1], v[2], v[3]}; }

i64 crt_pair(i64 a, i64 m, i64 b, i64 n) {
    // x == a mod m, x == b mod n, gcd(m, n) = 1
    i64 t = mulmod(mod(b - a, n), invmod(mod(m, n), n), n);
    return mod(a + m * t, m * n);
}

template <class F>
void parallel_for(size_t n, unsigned threads, F f) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<size_t>(threads, std::max<size_t>(n, 1)));
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            size_t idx = next.fetch_add(1);
            if (idx >= n) return;
            try {
                f(idx);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
                next = n;
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace

std::vector<i64> v_ij(const HeckeContext& ctx, size_t i, size_t j) {
    std::vector<i64> out;
    for (const auto& [ell, sd] : ctx.splitting) {
        if (ell == ctx.ell0) continue;
        bool nontrivial = ctx.C.local_gens[i].w.count(ell) || ctx.C.local_gens[j].w.count(ell);
        if (nontrivial || ctx.N % ell == 0) out.push_back(ell);
    }
    return out;
}

mpz_class MK::target() const {
    mpq_class t = K * M * M;
    t.canonicalize();
    if (t.get_den() != 1 || t <= 0) throw Error("K*M^2 is not a positive integer");
    return t.get_num();
}

MK compute_MK(const HeckeContext& ctx, size_t i, size_t j) {
    std::vector<i64> primes = v_ij(ctx, i, j);
    primes.push_back(ctx.C.O.params.p);
    primes.push_back(ctx.ell0);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    MK r;
    r.M = ctx.ell0;
    r.K = ctx.ell0;
    for (i64 ell : primes) {
        for (int t = 0; t < m_of(ctx, ell); ++t) r.M *= ell;
        int d = vnrd(ctx, j, ell) - vnrd(ctx, i, ell);
        for (int t = 0; t < std::abs(d); ++t) {
            if (d > 0)
                r.K *= ell;
            else
                r.K /= ell;
        }
    }
    r.K.canonicalize();
    return r;
}

std::vector<Vec4> solve_norm_equation(const Order& O, const mpz_class& target) {
    std::vector<Vec4> out;
    if (target <= 0) return out;
    for (const auto& v : short_vectors(order_gram(O), target)) out.push_back(to_vec4(v));
    return out;
}

bool check_congruences(const HeckeContext& ctx, const Vec4& sol, size_t i, size_t j, size_t k) {
    MK mk = compute_MK(ctx, i, j);
    if (ctx.C.O.nrd(sol) != mk.target()) return false;
    for (const auto& rq : requirements(ctx, i, j, k)) {
        const SplittingData& sd = split_at(ctx, rq.ell);
        Mat2 X = image(sd.S, sol, sd.mod_work);
        if (!mat_divisible(sandwich(sd, i, j, X, rq.g), ipow(rq.ell, rq.e))) return false;
    }
    return true;
}

CellResult e_level1(const HeckeContext& ctx, size_t i, size_t j, size_t k) {
    const Order& O = ctx.C.O;
    MK mk = compute_MK(ctx, i, j);
    const mpz_class target = mk.target();
    Basis4 L;
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) L[a][c] = a == c ? 1 : 0;
    for (const auto& rq : requirements(ctx, i, j, k)) {
        const SplittingData& sd = split_at(ctx, rq.ell);
        const i64 me = ipow(rq.ell, rq.e);
        std::array<Mat2, 4> img;
        for (int a = 0; a < 4; ++a) img[a] = mat_reduce(sandwich(sd, i, j, sd.S[a], rq.g), me);
        L = impose_form(L, {img[0].a, img[1].a, img[2].a, img[3].a}, rq.ell, rq.e);
        L = impose_form(L, {img[0].b, img[1].b, img[2].b, img[3].b}, rq.ell, rq.e);
        L = impose_form(L, {img[0].c, img[1].c, img[2].c, img[3].c}, rq.ell, rq.e);
        L = impose_form(L, {img[0].d, img[1].d, img[2].d, img[3].d}, rq.ell, rq.e);
    }
    IdealLattice lam{L, 1};
    CellResult res;
    for (const auto& u : short_vectors(norm_gram(O, lam), target)) {
        Vec4 c{0, 0, 0, 0};
        for (int r = 0; r < 4; ++r)
            for (int a = 0; a < 4; ++a) c[a] += u[r] * L[r][a];
        if (!check_congruences(ctx, c, i, j, k)) throw Error("e_level1: sublattice solution fails the congruences");
        res.witnesses.push_back({c, O.element(c) / mpq_class(mk.M)});
    }
    std::sort(res.witnesses.begin(), res.witnesses.end(),
              [](const Witness& x, const Witness& y) { return x.coords < y.coords; });
    res.hit = !res.witnesses.empty();
    return res;
}

F2 residue_Qp(const HeckeContext& ctx, const Fp2Field& K, const Quat& alpha, size_t i, size_t j) {
    const AlgebraParams& A = ctx.C.O.params;
    const i64 p = A.p;
    Quat wi = ctx.C.local_gens[i].at(p), wj = ctx.C.local_gens[j].at(p);
    Quat Q = mul(A, mul(A, wi, alpha), inverse(A, wj));
    for (const auto& c : Q.c)
        if (c != 0 && val(c, p) < 0) throw Error("residue_Qp: Q_p is not p-integral");
    F2 r = K.make(residue(Q.c[0], p), residue(Q.c[1], p));
    if (r.is_zero()) throw Error("residue_Qp: reduction is zero (witness is not a p-adic unit)");
    return r;
}

Mat2 residue_Ql(const HeckeContext& ctx, const Witness& w, const mpz_class& M, size_t i, size_t j, i64 ell) {
    if (ctx.N % ell != 0) throw Error("residue_Ql: ell does not divide N");
    const SplittingData& sd = split_at(ctx, ell);
    const i64 mv = ipow(ell, val(ctx.N, ell));
    Mat2 P = sandwich(sd, i, j, image(sd.S, w.coords, sd.mod_work), nullptr);
    const int e = val(M, ell) + vnrd(ctx, j, ell);
    const i64 pe = ipow(ell, e);
    if (!mat_divisible(P, pe)) throw Error("residue_Ql: product not divisible by ell^(m+v)");
    Mat2 Pd{P.a / pe, P.b / pe, P.c / pe, P.d / pe};
    mpz_class u = M * nrd(ctx.C.O.params, ctx.C.local_gens[j].at(ell)).get_num();
    for (int t = 0; t < e; ++t) u /= ell;
    Mat2 Q = mat_scale(mat_reduce(Pd, mv), invmod(residue(u, mv), mv), mv);
    if (mat_det(Q, ell) == 0) throw Error("residue_Ql: result is not invertible");
    return Q;
}

HeckeData compute_hecke_data(const ClassSet& C, i64 N, i64 ell0, unsigned threads, SplitStore* store) {
    HeckeData D;
    D.ctx = make_context(C, N, ell0, store);
    const size_t h = C.h(), nk = D.ctx.cosets.size();
    D.target.assign(h, std::vector<CosetTarget>(nk));
    parallel_for(h * nk, threads, [&](size_t idx) {
        const size_t j = idx / nk, k = idx % nk;
        bool found = false;
        for (size_t i = 0; i < h; ++i) {
            CellResult r = e_level1(D.ctx, i, j, k);
            if (!r.hit) continue;
            if (found) throw Error("coset " + std::to_string(k) + " of class " + std::to_string(j) + " lands in two classes");
            found = true;
            D.target[j][k] = {i, std::move(r.witnesses)};
        }
        if (!found) throw Error("coset " + std::to_string(k) + " of class " + std::to_string(j) + " lands in no class");
    });
    return D;
}

LevelOneMatrix hecke_matrix_level1(const HeckeData& D) {
    const size_t h = D.ctx.C.h();
    LevelOneMatrix T;
    T.p = D.ctx.C.O.params.p;
    T.ell0 = D.ctx.ell0;
    T.counts.assign(h, std::vector<i64>(h, 0));
    for (size_t j = 0; j < h; ++j)
        for (const auto& t : D.target[j]) ++T.counts[j][t.i];
    const i64 inv = invmod(T.ell0, T.p);
    T.mod_p = T.counts;
    for (auto& row : T.mod_p)
        for (auto& x : row) x = mulmod(x, inv, T.p);
    return T;
}

LevelOneMatrix hecke_matrix_level1(const ClassSet& C, i64 ell0, unsigned threads) {
    return hecke_matrix_level1(compute_hecke_data(C, 1, ell0, threads));
}

FMat level1_as_fmat(const LevelOneMatrix& T) {
    FMat out = fmat_zero(T.mod_p.size(), T.mod_p.size());
    for (size_t r = 0; r < out.size(); ++r)
        for (size_t c = 0; c < out.size(); ++c) out[r][c] = {T.mod_p[r][c], 0};
    return out;
}

GLGroup::GLGroup(i64 N_) : N(N_) {
    if (N < 1) throw UsageError("GLGroup: N must be positive");
    if (N > 64) throw UsageError("GLGroup: N too large for an explicit GL_2(Z/N) index");
    const i64 total = N * N * N * N;
    lookup.assign(static_cast<size_t>(total), -1);
    for (i64 code = 0; code < total; ++code) {
        Mat2 g{code / (N * N * N), (code / (N * N)) % N, (code / N) % N, code % N};
        if (gcd(mat_det(g, N), N) != 1) continue;
        lookup[static_cast<size_t>(code)] = static_cast<i64>(elems.size());
        elems.push_back(g);
    }
}

size_t GLGroup::index_of(const Mat2& g) const {
    Mat2 r = mat_reduce(g, N);
    i64 code = ((r.a * N + r.b) * N + r.c) * N + r.d;
    i64 idx = lookup.at(static_cast<size_t>(code));
    if (idx < 0) throw Error("GLGroup: matrix is not invertible mod N");
    return static_cast<size_t>(idx);
}

Mat2 GLGroup::inv(const Mat2& x) const {
    if (N == 1) return Mat2{};
    return mat_scale(mat_adj(x, N), invmod(mat_det(x, N), N), N);
}

bool QPair::operator<(const QPair& o) const {
    return std::tie(qp.s, qp.t, qg.a, qg.b, qg.c, qg.d) < std::tie(o.qp.s, o.qp.t, o.qg.a, o.qg.b, o.qg.c, o.qg.d);
}

GeneralHecke hecke_matrix_general(const HeckeData& D) {
    const HeckeContext& ctx = D.ctx;
    const AlgebraParams& A = ctx.C.O.params;
    if (A.p == 2) throw UsageError("the level-N / weight-k path requires odd p");
    GeneralHecke T;
    T.p = A.p;
    T.N = ctx.N;
    T.ell0 = ctx.ell0;
    T.h = ctx.C.h();
    T.K = Fp2Field(A.p, A.eps);
    T.G = GLGroup(ctx.N);
    const auto Nprimes = prime_factors(ctx.N);
    const size_t nk = ctx.cosets.size();
    T.target.assign(T.h, std::vector<size_t>(nk));
    T.qs.assign(T.h, std::vector<std::vector<QPair>>(nk));
    std::vector<std::vector<QPair>> first(T.h, std::vector<QPair>(nk));
    for (size_t j = 0; j < T.h; ++j)
        for (size_t k = 0; k < nk; ++k) {
            const CosetTarget& ct = D.target[j][k];
            const size_t i = ct.i;
            T.target[j][k] = i;
            const mpz_class M = compute_MK(ctx, i, j).M;
            std::vector<QPair> pairs;
            for (const auto& w : ct.witnesses) {
                QPair q;
                q.qp = residue_Qp(ctx, T.K, w.alpha, i, j);
                i64 mcur = 1;
                for (i64 ell : Nprimes) {
                    const i64 mv = ipow(ell, val(ctx.N, ell));
                    Mat2 ql = residue_Ql(ctx, w, M, i, j, ell);
                    q.qg = {crt_pair(q.qg.a, mcur, ql.a, mv), crt_pair(q.qg.b, mcur, ql.b, mv),
                            crt_pair(q.qg.c, mcur, ql.c, mv), crt_pair(q.qg.d, mcur, ql.d, mv)};
                    mcur *= mv;
                }
                pairs.push_back(q);
            }
            first[j][k] = pairs.front();
            std::sort(pairs.begin(), pairs.end());
            pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
            if (static_cast<i64>(pairs.size()) % A.p == 0) T.first_witness_only = true;
            T.qs[j][k] = std::move(pairs);
        }
    if (T.first_witness_only)
        for (size_t j = 0; j < T.h; ++j)
            for (size_t k = 0; k < nk; ++k) T.qs[j][k] = {first[j][k]};
    return T;
}

GeneralHecke hecke_matrix_general(const ClassSet& C, i64 N, i64 ell0, unsigned threads) {
    return hecke_matrix_general(compute_hecke_data(C, N, ell0, threads));
}

size_t GeneralHecke::index(size_t j, size_t mu_index, size_t g_index) const {
    return (j * static_cast<size_t>(p * p - 1) + mu_index) * G.size() + g_index;
}

PointIndex GeneralHecke::point(size_t idx) const {
    const size_t g = idx % G.size(), rest = idx / G.size();
    const size_t nu = static_cast<size_t>(p * p - 1);
    return {rest / nu, K.units()[rest % nu], G.elems[g]};
}

namespace {

// For each stored pair: mu_index -> index of mu * qp^{-1}, g_index -> index of g * qg^{-1}.
struct PairAction {
    size_t i;
    i64 weight;
    std::vector<size_t> mu_back, g_back;
};

std::vector<std::vector<PairAction>> pair_actions(const GeneralHecke& T) {
    const auto units = T.K.units();
    const i64 linv = invmod(T.ell0, T.p);
    std::vector<std::vector<PairAction>> out(T.h);
    for (size_t j = 0; j < T.h; ++j)
        for (size_t k = 0; k < T.target[j].size(); ++k) {
            const auto& pairs = T.qs[j][k];
            const i64 w = mulmod(linv, invmod(static_cast<i64>(pairs.size()) % T.p, T.p), T.p);
            for (const auto& q : pairs) {
                PairAction a{T.target[j][k], w, {}, {}};
                F2 qinv = T.K.inv(q.qp);
                for (F2 mu : units) a.mu_back.push_back(T.K.unit_index(T.K.mul(mu, qinv)));
                Mat2 ginv = T.G.inv(q.qg);
                for (const auto& g : T.G.elems) a.g_back.push_back(T.G.index_of(T.G.mul(g, ginv)));
                out[j].push_back(std::move(a));
            }
        }
    return out;
}

}  // namespace

std::vector<F2> GeneralHecke::apply(const std::vector<F2>& f) const {
    if (f.size() != dim()) throw Error("GeneralHecke::apply: dimension mismatch");
    const auto acts = pair_actions(*this);
    const size_t nu = static_cast<size_t>(p * p - 1), ng = G.size();
    std::vector<F2> out(dim());
    for (size_t j = 0; j < h; ++j)
        for (const auto& a : acts[j]) {
            const F2 w{a.weight, 0};
            for (size_t mu = 0; mu < nu; ++mu)
                for (size_t g = 0; g < ng; ++g) {
                    F2 v = f[index(a.i, a.mu_back[mu], a.g_back[g])];
                    if (v.is_zero()) continue;
                    F2& o = out[index(j, mu, g)];
                    o = K.add(o, K.mul(w, v));
                }
        }
    return out;
}

std::vector<SparseEntry> GeneralHecke::materialize() const {
    const auto acts = pair_actions(*this);
    const size_t nu = static_cast<size_t>(p * p - 1), ng = G.size();
    std::vector<SparseEntry> out;
    std::vector<std::pair<size_t, i64>> row;
    for (size_t j = 0; j < h; ++j)
        for (size_t mu = 0; mu < nu; ++mu)
            for (size_t g = 0; g < ng; ++g) {
                row.clear();
                for (const auto& a : acts[j]) row.push_back({index(a.i, a.mu_back[mu], a.g_back[g]), a.weight});
                std::sort(row.begin(), row.end());
                const size_t r = index(j, mu, g);
                for (size_t t = 0; t < row.size();) {
                    size_t col = row[t].first;
                    i64 v = 0;
                    for (; t < row.size() && row[t].first == col; ++t) v = mod(v + row[t].second, p);
                    if (v) out.push_back({r, col, {v, 0}});
                }
            }
    return out;
}

void GeneralHecke::stream_csv(std::ostream& os) const {
    const auto acts = pair_actions(*this);
    const size_t nu = static_cast<size_t>(p * p - 1), ng = G.size();
    std::vector<std::pair<size_t, i64>> row;
    for (size_t j = 0; j < h; ++j)
        for (size_t mu = 0; mu < nu; ++mu)
            for (size_t g = 0; g < ng; ++g) {
                row.clear();
                for (const auto& a : acts[j]) row.push_back({index(a.i, a.mu_back[mu], a.g_back[g]), a.weight});
                std::sort(row.begin(), row.end());
                const size_t r = index(j, mu, g);
                for (size_t t = 0; t < row.size();) {
                    size_t col = row[t].first;
                    i64 v = 0;
                    for (; t < row.size() && row[t].first == col; ++t) v = mod(v + row[t].second, p);
                    if (v) os << ell0 << ',' << r << ',' << col << ',' << v << ",0\n";
                }
            }
}

FMat GeneralHecke::dense() const {
    if (dim() > 5000) throw UsageError("dense general matrix too large; use CSV streaming");
    FMat out = fmat_zero(dim(), dim());
    for (const auto& e : materialize()) out[e.row][e.col] = e.value;
    return out;
}

FMat GeneralHecke::weight_k(i64 k) const {
    if (k < 0) throw UsageError("weight must be non-negative");
    const i64 order = p * p - 1;
    const std::uint64_t kk = static_cast<std::uint64_t>(mod(k, order));
    const size_t ng = G.size(), n = h * ng;
    const i64 linv = invmod(ell0, p);
    FMat out = fmat_zero(n, n);
    for (size_t j = 0; j < h; ++j)
        for (size_t c = 0; c < target[j].size(); ++c) {
            const auto& pairs = qs[j][c];
            const size_t i = target[j][c];
            const F2 w{mulmod(linv, invmod(static_cast<i64>(pairs.size()) % p, p), p), 0};
            for (const auto& q : pairs) {
                const F2 v = K.mul(w, K.pow(q.qp, kk));
                for (size_t g = 0; g < ng; ++g) {
                    size_t g2 = G.index_of(G.mul(G.elems[g], q.qg));
                    F2& o = out[j * ng + g2][i * ng + g];
                    o = K.add(o, v);
                }
            }
        }
    return out;
}

}  // namespace qhecke

#include "qhecke/classes.hpp"

#include "qhecke/split.hpp"

namespace qhecke {

Quat AdelicPoint::at(i64 ell) const {
    auto it = w.find(ell);
    return it == w.end() ? Quat::scalar(1) : it->second;
}

mpq_class eichler_mass(i64 p) {
    mpq_class m(p - 1, 24);
    m.canonicalize();
    return m;
}

mpq_class ClassSet::mass() const {
    mpq_class m = 0;
    for (long u : unit_orders) m += mpq_class(1, u);
    m.canonicalize();
    return m;
}

std::pair<bool, std::optional<Quat>> is_isomorphic(const Order& O, const IdealLattice& I, const IdealLattice& J) {
    mpq_class nI = ideal_nrd(I), nJ = ideal_nrd(J);
    IdealLattice L = ideal_product(O, conjugate_ideal(O, I), J);
    auto vs = short_vectors(norm_gram(O, L), nI * nJ);
    for (const auto& v : vs) {
        QVec4 q{0, 0, 0, 0};
        for (int k = 0; k < 4; ++k)
            for (int c = 0; c < 4; ++c) q[c] += mpq_class(v[k]) * L.vec(k)[c];
        Quat alpha = O.element(q) / nI;
        if (right_multiply(O, I, alpha) == J) return {true, alpha};
        throw Error("is_isomorphic: norm vector found but J != I*alpha");
    }
    return {false, std::nullopt};
}

IdealLattice right_order(const Order& O, const IdealLattice& I) {
    IdealLattice R = scale(ideal_product(O, conjugate_ideal(O, I), I), 1 / ideal_nrd(I));
    auto b = lattice_basis(O, R);
    mpz_class d = reduced_discriminant(O.params, {b[0], b[1], b[2], b[3]});
    if (d != O.params.p) throw Error("right_order: discriminant " + d.get_str() + " != p (ideal not invertible)");
    if (!contains(O, R, Quat::scalar(1))) throw Error("right_order: 1 not in the right order");
    return R;
}

long unit_count(const Order& O, const IdealLattice& L) {
    return static_cast<long>(short_vectors(norm_gram(O, L), 1).size());
}

static Quat combine(const Order& O, const IdealLattice& I, const IVec& u) {
    QVec4 q{0, 0, 0, 0};
    for (int k = 0; k < 4; ++k) {
        if (u[k] == 0) continue;
        QVec4 v = I.vec(k);
        for (int c = 0; c < 4; ++c) q[c] += mpq_class(u[k]) * v[c];
    }
    return O.element(q);
}

IdealLattice reduce_ideal(const Order& O, const IdealLattice& J) {
    Gram G = norm_gram(O, J);
    auto U = reduced_basis(G);
    mpq_class bound = eval_form(G, U[0]);
    for (const auto& u : U) bound = std::min(bound, eval_form(G, u));
    auto vs = vectors_up_to(G, bound);
    const IVec* best = nullptr;
    mpq_class bv;
    for (const auto& v : vs) {
        mpq_class f = eval_form(G, v);
        if (!best || f < bv) {
            best = &v;
            bv = f;
        }
    }
    Quat x = combine(O, J, *best);
    return right_multiply(O, J, conj(x) / ideal_nrd(J));
}

static mpz_class norm_gcd(const AlgebraParams& A, const std::array<Quat, 4>& b) {
    mpz_class g = 0;
    for (const auto& e : b) {
        mpq_class n = nrd(A, e);
        if (n.get_den() != 1) throw Error("normalized_basis: non-integral norm");
        g = gcd(g, n.get_num());
    }
    return g;
}

std::array<Quat, 4> normalized_basis(const Order& O, const IdealLattice& I) {
    const AlgebraParams& A = O.params;
    mpq_class n = ideal_nrd(I);
    if (n.get_den() != 1) throw Error("normalized_basis: ideal is not integral");
    auto U = reduced_basis(norm_gram(O, I));
    std::array<Quat, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = combine(O, I, U[k]);
    mpz_class g = norm_gcd(A, b);
    for (int pass = 0; pass < 16 && g != n.get_num(); ++pass) {
        bool improved = false;
        for (int m = 0; m < 4 && !improved; ++m)
            for (int k = 0; k < 4 && !improved; ++k) {
                if (k == m) continue;
                for (int c = 1; c <= 12 && !improved; ++c)
                    for (int sgn : {1, -1}) {
                        auto t = b;
                        t[m] = b[m] + b[k] * mpq_class(sgn * c);
                        mpz_class g2 = norm_gcd(A, t);
                        if (g2 < g) {
                            b = t;
                            g = g2;
                            improved = true;
                            break;
                        }
                    }
            }
        if (!improved) break;
    }
    if (g != n.get_num()) throw Error("normalized_basis: could not reach norm gcd " + n.get_str());
    return b;
}

std::vector<AdelicPoint> local_generators(const Order& O, const std::vector<std::array<Quat, 4>>& bases) {
    std::vector<AdelicPoint> out;
    for (const auto& b : bases) {
        AdelicPoint pt;
        mpz_class g = norm_gcd(O.params, b);
        for (i64 ell : prime_factors(g.get_si())) {
            int best = -1, bv = 0;
            for (int k = 0; k < 4; ++k) {
                int v = val(nrd(O.params, b[k]), ell);
                if (best < 0 || v < bv) {
                    best = k;
                    bv = v;
                }
            }
            if (bv > 0) pt.w[ell] = b[best];
        }
        out.push_back(pt);
    }
    return out;
}

std::map<i64, int> max_valuations(const ClassSet& C) {
    std::map<i64, int> m;
    for (const auto& pt : C.local_gens)
        for (const auto& [ell, w] : pt.w) {
            int v = val(nrd(C.O.params, w), ell);
            m[ell] = std::max(m[ell], v);
        }
    return m;
}

namespace {

void add_rep(ClassSet& C, const IdealLattice& I, const std::array<Quat, 4>& basis) {
    mpq_class n = ideal_nrd(I);
    if (n.get_den() != 1) throw Error("class representative is not integral");
    C.reps.push_back(I);
    C.bases.push_back(basis);
    C.norms.push_back(n.get_num());
    C.unit_orders.push_back(unit_count(C.O, right_order(C.O, I)));
}

}  // namespace

ClassSet left_ideal_classes(const Order& O) {
    const i64 p = O.params.p;
    const i64 q = p == 2 ? 3 : 2;
    const int n = q == 2 ? 7 : 2;
    auto [X, Y] = split_to(O, q, n);
    auto Sq = basis_images(O, q, X, Y, n, 1);
    const mpq_class target = eichler_mass(p);

    ClassSet C;
    C.O = O;
    IdealLattice O1 = order_lattice(O);
    add_rep(C, O1, normalized_basis(O, O1));
    std::vector<std::pair<i64, i64>> lines;
    for (i64 t = 0; t < q; ++t) lines.push_back({1, t});
    lines.push_back({0, 1});

    for (size_t cur = 0; C.mass() < target; ++cur) {
        if (cur >= C.h()) throw Error("left_ideal_classes: neighbour graph exhausted below the mass");
        const auto basis = C.bases[cur];
        int xi = 0, xv = -1;
        for (int k = 0; k < 4; ++k) {
            int v = val(nrd(O.params, basis[k]), q);
            if (xv < 0 || v < xv) {
                xi = k;
                xv = v;
            }
        }
        const Quat xc = conj(basis[xi]);
        const mpz_class qv = [&] {
            mpz_class r = 1;
            for (int k = 0; k < xv; ++k) r *= q;
            return r;
        }();
        std::array<Mat2, 4> img;
        for (int a = 0; a < 4; ++a) {
            Vec4 y;
            if (!O.integral_coords(mul(O.params, basis[a], xc), y)) throw Error("left_ideal_classes: ideal not integral");
            for (auto& c : y) {
                if (!mpz_divisible_p(c.get_mpz_t(), qv.get_mpz_t())) throw Error("left_ideal_classes: bad local generator");
                c /= qv;
            }
            img[a] = image(Sq, y, q);
        }
        for (auto [v0, v1] : lines) {
            std::array<i64, 4> f1, f2;
            for (int a = 0; a < 4; ++a) {
                f1[a] = mod(img[a].a * v0 + img[a].b * v1, q);
                f2[a] = mod(img[a].c * v0 + img[a].d * v1, q);
            }
            Basis4 id;
            for (int a = 0; a < 4; ++a)
                for (int c = 0; c < 4; ++c) id[a][c] = a == c ? 1 : 0;
            Basis4 sub = impose_form(impose_form(id, f1, q, 1), f2, q, 1);
            std::vector<Quat> gens;
            for (const auto& row : sub) {
                Quat z;
                for (int a = 0; a < 4; ++a) z = z + basis[a] * mpq_class(row[a]);
                gens.push_back(z);
            }
            IdealLattice J = lattice_from_generators(O, gens);
            if (ideal_nrd(J) != mpq_class(C.norms[cur] * q)) throw Error("left_ideal_classes: neighbour has wrong norm");
            IdealLattice R = reduce_ideal(O, J);
            bool known = false;
            for (const auto& rep : C.reps)
                if (is_isomorphic(O, rep, R).first) {
                    known = true;
                    break;
                }
            if (known) continue;
            add_rep(C, R, normalized_basis(O, R));
            if (C.mass() > target) throw Error("left_ideal_classes: mass overshoot (duplicate class)");
            if (C.mass() == target) break;
        }
    }
    C.local_gens = local_generators(O, C.bases);
    return C;
}

ClassSet class_set_from_bases(const Order& O, const std::vector<std::array<Quat, 4>>& bases) {
    if (bases.empty()) throw Error("class_set_from_bases: no classes");
    ClassSet C;
    C.O = O;
    for (const auto& b : bases) {
        IdealLattice I = lattice_from_generators(O, {b[0], b[1], b[2], b[3]});
        if (!is_left_ideal(O, I)) throw Error("class_set_from_bases: not a left O-ideal");
        if (norm_gcd(O.params, b) != ideal_nrd(I)) throw Error("class_set_from_bases: basis norms do not have gcd nrd(I)");
        for (const auto& rep : C.reps)
            if (is_isomorphic(O, rep, I).first) throw Error("class_set_from_bases: isomorphic representatives");
        add_rep(C, I, b);
    }
    if (C.reps[0] != order_lattice(O)) throw Error("class_set_from_bases: first class must be O");
    if (C.mass() != eichler_mass(O.params.p))
        throw Error("class_set_from_bases: mass " + C.mass().get_str() + " != (p-1)/24");
    C.local_gens = local_generators(O, C.bases);
    return C;
}

}  // namespace qhecke

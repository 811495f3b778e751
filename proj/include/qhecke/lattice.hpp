#pragma once

#include "qhecke/quat.hpp"

#include <array>
#include <vector>

namespace qhecke {

using Basis4 = std::array<Vec4, 4>;

// Row-style Hermite normal form of a full-rank integer generating set:
// b[k][c] == 0 for c < k, b[k][k] > 0, 0 <= b[m][k] < b[k][k] for m < k.
Basis4 hnf(std::vector<Vec4> gens);

// Sublattice {v in L : sum_k f[k] v_k == 0 mod ell^e}, returned in HNF.
Basis4 impose_form(const Basis4& L, const std::array<i64, 4>& f, i64 ell, int e);

// Full-rank lattice in D written in coordinates of an order's basis:
// vectors b[k] / den. Canonical (HNF + minimal denominator).
struct IdealLattice {
    Basis4 b;
    mpz_class den = 1;

    bool operator==(const IdealLattice& o) const { return den == o.den && b == o.b; }
    bool operator!=(const IdealLattice& o) const { return !(*this == o); }
    QVec4 vec(int k) const;
};

IdealLattice make_lattice(std::vector<Vec4> gens, const mpz_class& den);
IdealLattice lattice_from_generators(const Order& O, const std::vector<Quat>& gens);
IdealLattice order_lattice(const Order& O);  // O itself

std::vector<Quat> lattice_basis(const Order& O, const IdealLattice& I);
IdealLattice ideal_product(const Order& O, const IdealLattice& I, const IdealLattice& J);
IdealLattice conjugate_ideal(const Order& O, const IdealLattice& I);
IdealLattice right_multiply(const Order& O, const IdealLattice& I, const Quat& a);
IdealLattice scale(const IdealLattice& I, const mpq_class& s);
mpq_class lattice_index(const IdealLattice& I);  // [O : I] as a rational
mpq_class ideal_nrd(const IdealLattice& I);     // sqrt of the index
bool contains(const IdealLattice& I, const QVec4& x);
bool contains(const Order& O, const IdealLattice& I, const Quat& x);
bool is_left_ideal(const Order& O, const IdealLattice& I);

using Gram = std::vector<std::vector<mpq_class>>;
using IVec = std::vector<mpz_class>;

// x^T G x = nrd of the corresponding lattice element.
Gram norm_gram(const Order& O, const IdealLattice& I);
Gram order_gram(const Order& O);

// All v with v^T G v == target, lexicographically sorted.
std::vector<IVec> short_vectors(const Gram& G, const mpq_class& target);
// All v with 0 < v^T G v <= bound, lexicographically sorted.
std::vector<IVec> vectors_up_to(const Gram& G, const mpq_class& bound);
// Brute-force reference: exhaustive box search |v_i| <= radius.
std::vector<IVec> short_vectors_box(const Gram& G, const mpq_class& target, long radius);

// Unimodular rows U with U G U^T pairwise size-reduced, sorted by diagonal.
std::vector<IVec> reduced_basis(const Gram& G);

mpq_class eval_form(const Gram& G, const IVec& v);

}  // namespace qhecke

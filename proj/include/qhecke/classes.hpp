#pragma once

#include "qhecke/lattice.hpp"

#include <map>
#include <optional>
#include <utility>

namespace qhecke {

// Local generators w_ell of an ideal; absent primes mean w_ell = 1.
struct AdelicPoint {
    std::map<i64, Quat> w;
    Quat at(i64 ell) const;
};

struct ClassSet {
    Order O;
    std::vector<IdealLattice> reps;              // reps[0] == O
    std::vector<std::array<Quat, 4>> bases;      // Z-bases of the reps
    std::vector<mpz_class> norms;                // nrd(I_j)
    std::vector<long> unit_orders;               // |O_r(I_j)^x|
    std::vector<AdelicPoint> local_gens;

    size_t h() const { return reps.size(); }
    mpq_class mass() const;
};

std::pair<bool, std::optional<Quat>> is_isomorphic(const Order& O, const IdealLattice& I, const IdealLattice& J);
IdealLattice right_order(const Order& O, const IdealLattice& I);
long unit_count(const Order& O, const IdealLattice& order_lat);

// Integral ideal of minimal norm in the class of J.
IdealLattice reduce_ideal(const Order& O, const IdealLattice& J);
// Z-basis of I whose norms have gcd nrd(I), so the first basis element of
// minimal ell-adic valuation generates I locally at every ell.
std::array<Quat, 4> normalized_basis(const Order& O, const IdealLattice& I);

// q-neighbour search from O, stopping when the Eichler mass (p-1)/24 is reached.
ClassSet left_ideal_classes(const Order& O);
// Class set from explicitly given Z-bases (first must span O); validated.
ClassSet class_set_from_bases(const Order& O, const std::vector<std::array<Quat, 4>>& bases);

std::vector<AdelicPoint> local_generators(const Order& O, const std::vector<std::array<Quat, 4>>& bases);
// m_ell = max_j v_ell(nrd(w_ell^j)) for every ell with a nontrivial generator.
std::map<i64, int> max_valuations(const ClassSet& C);

mpq_class eichler_mass(i64 p);

}  // namespace qhecke

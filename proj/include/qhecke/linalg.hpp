#pragma once

#include "qhecke/fp2.hpp"

#include <vector>

namespace qhecke {

using FMat = std::vector<std::vector<F2>>;  // row-major, square unless noted

FMat fmat_zero(size_t rows, size_t cols);
FMat fmat_identity(size_t n);
FMat fmat_mul(const Fp2Field& K, const FMat& a, const FMat& b);
FMat fmat_sub(const Fp2Field& K, const FMat& a, const FMat& b);
FMat fmat_scalar_shift(const Fp2Field& K, const FMat& a, F2 lambda);  // a - lambda*I
bool fmat_equal(const FMat& a, const FMat& b);
size_t fmat_rank(const Fp2Field& K, FMat a);
// Columns of the returned matrix (n x d) span the right kernel.
FMat fmat_kernel(const Fp2Field& K, const FMat& a);
bool fmat_commute(const Fp2Field& K, const FMat& a, const FMat& b);

// Characteristic polynomial det(X - M), monic, via Hessenberg reduction.
Poly char_poly(const Fp2Field& K, const FMat& M);

struct Eigenvalue {
    F2 value;
    size_t multiplicity;
};

// Roots of the characteristic polynomial in F_{p^2}, ascending, with algebraic
// multiplicity. Irreducible factors of degree > 1 are dropped.
std::vector<Eigenvalue> eigenvalues(const Fp2Field& K, const FMat& M);

struct Eigensystem {
    std::vector<F2> values;  // one per input matrix
    size_t multiplicity = 0;
    bool diagonalizable = true;  // every matrix acts as a scalar on the joint space
};

struct EigensystemResult {
    std::vector<Eigensystem> systems;  // lexicographic in values
    size_t unsplit_dimension = 0;      // dimension not accounted for over F_{p^2}
};

// Joint generalized eigenspaces of pairwise commuting matrices; throws Error otherwise.
EigensystemResult simultaneous_eigensystems(const Fp2Field& K, const std::vector<FMat>& mats);

}  // namespace qhecke

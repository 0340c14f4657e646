#pragma once

#include "nijhydro/fields.hpp"
#include "nijhydro/hierarchy.hpp"

namespace nijhydro {

/// Taylor coefficients of f(u^k + lambda u^{k-1} + ... + lambda^{k-1} u^1)
/// truncated at lambda^order: the entry generator for operator functions of
/// the Toeplitz block. ub holds the block coordinates (u^1..u^k).
Jet toeplitz_expansion(const Func1& f, const Vector& ub, int order);

/// h(U) at the block point: upper-triangular Toeplitz with superdiagonal d
/// equal to the lambda^d coefficient of the truncated expansion.
Matrix h_of_U(const Func1& h, const Vector& ub);

/// h(U) with exact partials: d h(U)/du^i = N^{k-i} h'(U).
OperatorEval h_of_U_with_partials(const Func1& h, const Vector& ub);

/// h(U) as an OperatorField on the block coordinates.
OperatorField h_of_U_field(Func1 h, int k);

/// M = f_1(U) N^{k-1} + f_2(U) N^{k-2} + ... + f_k(U) at a block point.
Matrix jordan_symmetry(const std::vector<Func1>& fs, const Vector& ub);
OperatorEval jordan_symmetry_with_partials(const std::vector<Func1>& fs, const Vector& ub);

/// The conservation law of the block symmetry: f = M^1_k (top-right corner),
/// with gradient and Hessian.
ScalarEval jordan_conservation_law(const std::vector<Func1>& fs, const Vector& ub);

/// Block-diagonal symmetry field for a composed operator. Jordan blocks take
/// k functions f_1..f_k; Diagonal1 blocks take one function (the diagonal
/// entry as a function of the block coordinate).
OperatorField compose_symmetry(const BlockSpec& spec,
                               std::vector<std::vector<Func1>> per_block);

/// Sum of per-block conservation laws as a ScalarField on the full space.
ScalarField compose_conservation_law(const BlockSpec& spec,
                                     std::vector<std::vector<Func1>> per_block);

/// Closed-form hierarchy for specs with blocks of size 1 and 2:
/// size-1 blocks contribute lambda(u^c)^i / i, size-2 blocks contribute
/// (u^b)^{i-1} u^a. Throws UnsupportedBlockSize for Jordan blocks of size > 2
/// (use hierarchy_from_seed instead).
Hierarchy standard_hierarchy(const BlockSpec& spec, const Vector& base);

}  // namespace nijhydro

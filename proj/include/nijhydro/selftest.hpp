#pragma once

#include <string>

#include "nijhydro/fields.hpp"

namespace nijhydro {

/// Two 3D operators with Jordan structure of geometric multiplicity two
/// (hence not gl-regular). The good properties of gl-regular symmetry
/// algebras (every symmetry strong, closure under products, closedness of
/// M* df) all fail on them; the self-test corpus pins explicit witnesses.

/// Constant [[0,1,0],[0,0,0],[0,0,0]]: nilpotent blocks of sizes 2 and 1 in
/// coordinates (x, y, z).
OperatorField counterexample1_operator();

/// [[z,0,0],[0,z,1],[0,0,z]]: two blocks sharing the non-constant eigenvalue z.
OperatorField counterexample2_operator();

/// Symmetry family of counterexample 1:
///   [[f, x f_y + g, x f_z + a], [0, f, 0], [0, b, c]],
/// f, g, a, b, c functions of (y, z) only (strong iff f_z = 0).
OperatorField counterexample1_symmetry(ScalarField f, ScalarField g, ScalarField a,
                                       ScalarField b, ScalarField c);

/// Symmetry family of counterexample 2:
///   [[f + a e^{-y}, 0, b e^{-y}], [f_x + c e^{-y}, f, f_z + g e^{-y}], [0, 0, f]],
/// f, g, a, b, c functions of (x, z) only (strong iff a = c = 0).
OperatorField counterexample2_symmetry(ScalarField f, ScalarField g, ScalarField a,
                                       ScalarField b, ScalarField c);

/// Conservation laws of counterexample 1: f = x u(y) + v(y, z).
ScalarField ce1_conservation_law(Func1 u, ScalarField v);

/// Conservation laws of counterexample 2: f = a(x, z) e^y + b(z).
ScalarField ce2_conservation_law(ScalarField a, Func1 b);

/// Simple exact scalar fields used to pick family members.
ScalarField constant_field(int n, double c);
ScalarField coordinate_field(int n, int index);
ScalarField zero_field(int n);

struct SelftestItem {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool expect_below = true;
    bool pass = false;
};

struct SelftestReport {
    std::vector<SelftestItem> items;
    bool all_pass = true;
};

/// The built-in corpus: counterexample witnesses, Jordan round-trips,
/// companion-coordinate identities, Cayley–Hamilton closures, and hierarchy
/// chain checks.
SelftestReport run_selftest();

}  // namespace nijhydro

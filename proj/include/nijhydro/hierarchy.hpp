#pragma once

#include "nijhydro/fields.hpp"
#include "nijhydro/quadrature.hpp"

namespace nijhydro {

/// Ordered chain of closed 1-forms omega_1..omega_n with L* omega_i =
/// omega_{i+1}, optionally with potentials f_i (d f_i = omega_i).
struct Hierarchy {
    std::vector<OneFormField> omega;
    std::vector<ScalarField> potentials;  // empty when not constructed
    Vector base;

    int n() const { return static_cast<int>(omega.size()); }
    bool has_potentials() const { return !potentials.empty(); }
};

/// (L* w)_j = L^s_j w_s with the Jacobian assembled by the product rule.
OneFormField pullback(const OperatorField& L, const OneFormField& w);

/// omega_i = (L*)^{i-1} df; potentials anchored at `base` with f_i(base) = 0.
/// The seed must be a conservation law: residual checked at the given probes
/// (or seeded points around base when none are given); throws
/// NotAConservationLaw.
Hierarchy hierarchy_from_seed(const OperatorField& L, const ScalarField& f, const Vector& base,
                              std::vector<Vector> probes = {}, double cl_tol = 1e-7);

/// |det(rows omega_i(u))| above the scale-invariant threshold
/// rank_tol * (max row norm)^n.
bool is_regular_hierarchy(const Hierarchy& H, const Vector& u, double rank_tol = 1e-10);

/// max_i ||L* omega_i - omega_{i+1}|| at u.
double hierarchy_chain_residual(const OperatorField& L, const Hierarchy& H, const Vector& u);

struct IntegrateOptions {
    QuadratureOptions quadrature;      // abs tol 1e-10, depth cap 14
    bool check_closedness = true;      // lattice pre-check on the bounding box
    double closedness_tol = 1e-6;
    std::vector<int> leg_order;        // axis permutation; empty = u^1, u^2, ...
};

/// Integral of a closed 1-form along the axis-parallel staircase path
/// p -> (u^1, p^2, ...) -> ... -> u. Throws NotClosed / QuadratureFailure.
double integrate_closed_1form(const OneFormField& w, const Vector& p, const Vector& u,
                              const IntegrateOptions& opts = {});

/// Shared-path variant: integrates several forms along one staircase walk.
Vector integrate_closed_1forms(const std::vector<OneFormField>& ws, const Vector& p,
                               const Vector& u, const IntegrateOptions& opts = {});

/// Potential of a closed form, anchored at p with value 0; gradient/Hessian
/// come from the form itself, the value from staircase integration.
ScalarField potential_of(const OneFormField& w, const Vector& p,
                         const IntegrateOptions& opts = {});

struct CompanionReport {
    double deviation = 0.0;   // max deviation of the structurally fixed entries
    Matrix transformed;       // J L J^{-1} at the base point
};

/// Companion-coordinate correspondences: a regular symmetry's commutant
/// coefficients are first companion coordinates; a regular hierarchy's
/// potentials are second companion coordinates. Verified by transforming L
/// with the exact coefficient Jacobian at the base point and at displaced
/// probes. Throws NotRegular.
CompanionReport companion_correspondence_first(const OperatorField& L, const OperatorField& M,
                                               const Vector& p);
CompanionReport companion_correspondence_second(const OperatorField& L, const Hierarchy& H,
                                                const Vector& p);

}  // namespace nijhydro

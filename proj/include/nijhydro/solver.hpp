#pragma once

#include "nijhydro/hydro.hpp"
#include "nijhydro/jordan.hpp"
#include "nijhydro/spline.hpp"

namespace nijhydro {

/// Pipeline tolerances; overridable from the CLI config.
struct Tolerances {
    double newton_tol = 1e-11;
    int newton_max_iter = 60;
    int newton_max_backtrack = 30;
    double quadrature_abs = 1e-12;   // per-leg absolute tolerance inside the g-hierarchy
    int quadrature_max_depth = 14;
    double extend_tol = 1e-6;        // on-curve ||M(gamma) gamma' - xi||
    double spline_consistency = 1e-6;
    int min_curve_samples = 32;
    int max_curve_samples = 8192;
    double symmetry_tol = 1e-6;      // symmetry residual of the extended M (times scale)
    double closedness_tol = 1e-6;
    double oncurve_tol = 1e-6;
    double frame_consistency = 1e-9;  // ||Mhat gamma' - xi|| at frames (times scale)
};

/// Data of the pipeline at one curve point: the velocity, the xi vector of
/// the delta-normalization, and the Krylov coefficients c of Mhat = sum c_k L^k.
struct CurveFrame {
    double x = 0.0;
    Vector gamma, gamma_prime, xi;
    std::vector<double> c;
    double cond = 0.0;  // condition number of the hierarchy matrix at gamma(x)
};

/// Solves rows(omega_i(gamma(x))) xi = e_n. Throws SingularHierarchyMatrix.
Vector xi_on_curve(const Hierarchy& H, const Curve& gamma, double x, double* cond = nullptr);

/// Builds the frame: checks gamma'(x) is cyclic for L(gamma(x)) (throws
/// NotCyclicVelocity with the offending x), solves krylov(L, gamma') c = xi.
CurveFrame mhat_on_curve(const OperatorField& L, const Hierarchy& H, const Curve& gamma,
                         double x);

/// Mhat = sum_k c_k L(gamma(x))^k; commutes with L by construction.
Matrix mhat_matrix(const OperatorField& L, const CurveFrame& frame);

/// Frame for an externally prescribed xi (round-trip and synthesis paths).
CurveFrame frame_from_xi(const OperatorField& L, const Curve& gamma, double x,
                         const Vector& xi);

struct ExtractedBlock {
    Block::Kind kind = Block::Kind::Diagonal1;
    int offset = 0;
    int size = 1;
    std::vector<SampledFunction> fs;  // 1 function for Diagonal1, k for Jordan
};

struct ExtractedSymmetryData {
    std::vector<ExtractedBlock> blocks;
    int samples_used = 0;
    std::vector<CurveFrame> frames;  // frames of the accepted sampling
};

/// Reads the block functions of the symmetry off the curve.
/// Diagonal1 blocks: the Mhat diagonal entry reparametrized by the
/// inverse eigenvalue coordinate. Jordan blocks: triangular extraction of
/// f_k, f_{k-1}, ..., f_1 using spline derivatives of the already-extracted
/// functions. Sample count doubles until spline self-consistency is reached.
ExtractedSymmetryData extract_block_functions(const BlockSpec& spec, const OperatorField& L,
                                              const Hierarchy& H, const Curve& gamma,
                                              const Tolerances& tol = {});

/// Extraction from prepared frames (no hierarchy required); each block's
/// derivative tables go up to block size + 1.
ExtractedSymmetryData extract_from_frames(const BlockSpec& spec, const OperatorField& L,
                                          std::vector<CurveFrame> frames, int curve_order);

/// The block functions extended off the curve as a symmetry field
/// (evaluation outside the sampled eigenvalue ranges throws OutOfSampledRange).
OperatorField extend_symmetry(const ExtractedSymmetryData& data, const BlockSpec& spec);

/// max over frames of ||M(gamma(x)) gamma'(x) - xi(x)||.
double extend_oncurve_residual(const OperatorField& M, const std::vector<CurveFrame>& frames);

/// The integrated hierarchy dg_i = M* omega_i, anchored at `base` with
/// g_i(base) = 0. values()/jacobian() evaluate all n potentials in one
/// staircase pass (the Newton hot path).
struct GHierarchy {
    OperatorField M;
    std::vector<OneFormField> source;  // the hierarchy forms omega_i
    std::vector<OneFormField> forms;   // M* omega_i with exact Jacobians
    std::vector<ScalarField> g;        // potentials anchored at base
    Vector base;
    QuadratureOptions quad;

    int n() const { return static_cast<int>(forms.size()); }
    Vector values(const Vector& u) const;
    Matrix jacobian(const Vector& u) const;  // rows dg_i(u)
};

/// Builds the g-hierarchy; asserts M is a symmetry at the probes and that
/// every M* omega_i is closed there (NotASymmetry / NotClosed).
GHierarchy build_g_hierarchy(const OperatorField& M, const OperatorField& L, const Hierarchy& H,
                             const Vector& base, const std::vector<Vector>& probes,
                             const Tolerances& tol = {});

struct OnCurveReport {
    double g_dev = 0.0;      // max |g_n(gamma(x)) - x| and |g_i(gamma(x))|, i < n
    double deriv_dev = 0.0;  // max |d/dx g_i(gamma(x)) - delta_{i n}|
};
OnCurveReport oncurve_normalization(const GHierarchy& gh, const Curve& gamma, int samples = 9);

/// Newton solve of g_1 = t_{n-1}, ..., g_{n-1} = t_1, g_n = x with analytic
/// Jacobian and half-step backtracking. Throws NewtonDiverged.
Vector solve_point(const GHierarchy& gh, const Vector& t, double x, const Vector& guess,
                   const Tolerances& tol = {});

/// Continuation over the grid: per x-node, marches t outward from the node
/// nearest t = 0 using neighbor solutions as guesses; non-converged nodes are
/// flagged. Parallelizes across x when threads > 1.
SolutionGrid solve_grid(const GHierarchy& gh, const Curve& gamma,
                        const std::vector<double>& x_nodes,
                        const std::vector<std::vector<double>>& t_axes,
                        const Tolerances& tol = {}, int threads = 1);

struct PipelineReport {
    int samples_used = 0;
    double max_frame_cond = 0.0;
    double extend_residual = 0.0;
    double symmetry_residual = 0.0;
    OnCurveReport oncurve;
    HydroResidual residual;
    double solve_seconds = 0.0;
};

/// End-to-end driver: frames -> extraction -> extension -> g-hierarchy ->
/// grid solve -> hydro residuals.
struct Pipeline {
    OperatorField L;
    Hierarchy H;
    ExtractedSymmetryData data;
    OperatorField M;
    GHierarchy g;
    SolutionGrid grid;
    PipelineReport report;
};

Pipeline run_pipeline(const BlockSpec& spec, const OperatorField& L, const Hierarchy& H,
                      const Curve& gamma, const std::vector<double>& x_nodes,
                      const std::vector<std::vector<double>>& t_axes,
                      const Tolerances& tol = {}, int threads = 1);

}  // namespace nijhydro

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nijhydro/jet.hpp"
#include "nijhydro/linalg.hpp"

namespace nijhydro {

/// Axis-aligned domain box. Fields evaluate only inside their box; evaluation
/// outside raises EvaluationError rather than extrapolating.
struct Box {
    Vector lo, hi;
    bool contains(const Vector& u) const {
        for (int i = 0; i < u.size(); ++i)
            if (u[i] < lo[i] || u[i] > hi[i]) return false;
        return true;
    }
    static Box cube(int n, double lo_v, double hi_v) {
        Box b;
        b.lo = Vector::Constant(n, lo_v);
        b.hi = Vector::Constant(n, hi_v);
        return b;
    }
};

struct ScalarEval {
    double value = 0.0;
    Vector grad;
    Matrix hess;
};

/// Real-valued function of u with exact gradient and Hessian.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int n, std::function<ScalarEval(const Vector&)> eval,
                std::optional<Box> domain = {})
        : n_(n), eval_(std::move(eval)), domain_(std::move(domain)) {}

    int dim() const { return n_; }
    ScalarEval eval(const Vector& u) const;
    double value(const Vector& u) const { return eval(u).value; }
    const std::optional<Box>& domain() const { return domain_; }

private:
    int n_ = 0;
    std::function<ScalarEval(const Vector&)> eval_;
    std::optional<Box> domain_;
};

struct OperatorEval {
    Matrix value;
    std::vector<Matrix> partial;  // partial[k] = dL/du^{k+1}
};

/// n x n matrix-valued function of u together with its exact first partials.
class OperatorField {
public:
    OperatorField() = default;
    OperatorField(int n, std::function<Matrix(const Vector&)> value_fn,
                  std::function<OperatorEval(const Vector&)> eval_fn,
                  std::optional<Box> domain = {})
        : n_(n), value_(std::move(value_fn)), eval_(std::move(eval_fn)),
          domain_(std::move(domain)) {}

    int dim() const { return n_; }
    Matrix value(const Vector& u) const;
    OperatorEval eval(const Vector& u) const;
    const std::optional<Box>& domain() const { return domain_; }

private:
    int n_ = 0;
    std::function<Matrix(const Vector&)> value_;
    std::function<OperatorEval(const Vector&)> eval_;
    std::optional<Box> domain_;
};

struct OneFormEval {
    Vector omega;
    Matrix jac;  // jac(j,k) = d omega_j / du^{k+1}
};

/// Covector-valued field with exact Jacobian; closedness residual is
/// max |jac - jac^T| and is computable at any point.
class OneFormField {
public:
    OneFormField() = default;
    OneFormField(int n, std::function<OneFormEval(const Vector&)> eval)
        : n_(n), eval_(std::move(eval)) {}

    int dim() const { return n_; }
    OneFormEval eval(const Vector& u) const;
    Vector value(const Vector& u) const { return eval(u).omega; }
    double closedness_residual(const Vector& u) const {
        OneFormEval e = eval(u);
        return max_abs(Matrix(e.jac - e.jac.transpose()));
    }

private:
    int n_ = 0;
    std::function<OneFormEval(const Vector&)> eval_;
};

/// gamma: [a,b] -> R^n with derivatives up to a declared order.
class Curve {
public:
    Curve() = default;
    Curve(std::vector<Func1> components, double a, double b, int order);

    int dim() const { return static_cast<int>(components_.size()); }
    int order() const { return order_; }
    double a() const { return a_; }
    double b() const { return b_; }

    Vector point(double x) const { return derivative(x, 0); }
    Vector derivative(double x, int k) const;

private:
    std::vector<Func1> components_;
    double a_ = 0.0, b_ = 0.0;
    int order_ = 0;
};

/// One block of a block-diagonal Nijenhuis normal form: either a 1x1 block
/// with eigenvalue function lambda, or a k x k Jordan–Toeplitz block.
struct Block {
    enum class Kind { Diagonal1, JordanToeplitz };
    Kind kind = Kind::Diagonal1;
    int size = 1;
    Func1 lambda;  // Diagonal1 only

    static Block diagonal(Func1 lam) {
        Block b;
        b.kind = Kind::Diagonal1;
        b.size = 1;
        b.lambda = std::move(lam);
        return b;
    }
    static Block jordan(int k) {
        Block b;
        b.kind = Kind::JordanToeplitz;
        b.size = k;
        return b;
    }
};

struct BlockSpec {
    std::vector<Block> blocks;

    int dimension() const {
        int n = 0;
        for (const auto& b : blocks) n += b.size;
        return n;
    }
    /// 0-based global index of the first coordinate of block b.
    int offset(size_t b) const {
        int o = 0;
        for (size_t i = 0; i < b; ++i) o += blocks[i].size;
        return o;
    }
    /// 0-based global index of the block's distinguished (eigenvalue)
    /// coordinate: the last coordinate of the block.
    int eigen_coordinate(size_t b) const { return offset(b) + blocks[b].size - 1; }
};

/// L(u) = diag(lambda_i(u^i)).
OperatorField make_diagonal(std::vector<Func1> lambdas, std::optional<Box> domain = {});

/// Upper-triangular Toeplitz normal form U on R^k: first row (u^k, ..., u^1).
OperatorField make_toeplitz(int k);

/// Direct sum of per-block operator fields acting on disjoint coordinate groups.
OperatorField make_block_diagonal(const BlockSpec& spec, std::vector<OperatorField> fields);

/// The operator defined by a BlockSpec (Toeplitz blocks + diagonal entries).
OperatorField make_operator(const BlockSpec& spec, std::optional<Box> domain = {});

/// First companion layout: first column sigma_1..sigma_n, superdiagonal ones.
OperatorField make_companion_first(std::vector<ScalarField> sigma);

/// Second companion layout: superdiagonal ones, last row sigma_n..sigma_1.
OperatorField make_companion_second(std::vector<ScalarField> sigma);

OperatorField make_constant_operator(const Matrix& L0);

/// Pointwise product field (AB)(u) = A(u) B(u) with product-rule partials.
OperatorField operator_product(const OperatorField& A, const OperatorField& B);

/// Wraps a raw matrix evaluator; partials by central differences with step
/// h*(1 + |u^k|) per coordinate (O(h^2) accurate).
OperatorField wrap_finite_difference(int n, std::function<Matrix(const Vector&)> raw,
                                     double h = 1e-5);

OneFormField one_form_from_scalar(const ScalarField& f);
OneFormField constant_one_form(const Vector& w);

/// Commutant expansion coefficients g_i of M(u) in powers of L(u), together
/// with the exact Jacobian dg_i/du^k obtained by implicit differentiation of
/// the Krylov system (uses the fields' exact partials).
struct CommutantFieldEval {
    std::vector<double> g;  // g[i-1] multiplies L^{n-i}
    Matrix jac;             // jac(i,k) = dg_{i+1}/du^{k+1}
};
CommutantFieldEval commutant_field_eval(const OperatorField& L, const OperatorField& M,
                                        const Vector& u);

/// Max deviation between stored partials and central finite differences of the
/// value evaluator, over all coordinates (consistency diagnostics).
double operator_fd_consistency(const OperatorField& L, const Vector& u, double h = 1e-5);
double scalar_fd_consistency(const ScalarField& f, const Vector& u, double h = 1e-5);

}  // namespace nijhydro

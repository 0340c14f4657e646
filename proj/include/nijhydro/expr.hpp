#pragma once

#include <memory>
#include <set>
#include <string>

#include "nijhydro/fields.hpp"

namespace nijhydro {

/// Parsed expression over the grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' factor)?          (exponent must be constant)
///   unary  := '-' unary | primary
///   primary:= number | ident | ident '(' expr ')' | '(' expr ')'
/// with the functions exp, log, sin, cos, sqrt. Identifiers that are not
/// function names are variables.
class Expression {
public:
    /// Throws ConfigError on malformed input.
    static Expression parse(const std::string& text);

    const std::set<std::string>& variables() const { return vars_; }

    /// One-variable evaluation on jets; every variable in the expression must
    /// equal `var` (ConfigError otherwise).
    Jet eval_jet(const std::string& var, double x, int order) const;
    Func1 as_func1(const std::string& var) const;

    /// n-variable evaluation with variables named u1..un: value, gradient and
    /// Hessian by second-order forward AD.
    ScalarEval eval_multi(const Vector& u) const;
    ScalarField as_scalar_field(int n) const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::set<std::string> vars_;
};

}  // namespace nijhydro

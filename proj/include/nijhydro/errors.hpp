#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nijhydro {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NotGlRegular : public Error {
public:
    using Error::Error;
};

class DoesNotCommute : public Error {
public:
    using Error::Error;
};

class CayleyHamiltonViolated : public Error {
public:
    using Error::Error;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InsufficientJetOrder : public Error {
public:
    using Error::Error;
};

class UnsupportedBlockSize : public Error {
public:
    using Error::Error;
};

class NotAConservationLaw : public Error {
public:
    using Error::Error;
};

class NotASymmetry : public Error {
public:
    using Error::Error;
};

class NotAHierarchy : public Error {
public:
    using Error::Error;
};

class NotClosed : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class NotRegular : public Error {
public:
    using Error::Error;
};

class GridTooCoarse : public Error {
public:
    using Error::Error;
};

class SingularHierarchyMatrix : public Error {
public:
    using Error::Error;
};

class NotCyclicVelocity : public Error {
public:
    NotCyclicVelocity(const std::string& what, double x) : Error(what), x_where(x) {}
    double x_where;
};

class NonMonotoneEigenvalueCoordinate : public Error {
public:
    using Error::Error;
};

class SmoothnessDeficit : public Error {
public:
    using Error::Error;
};

class OutOfSampledRange : public Error {
public:
    using Error::Error;
};

/// Newton iteration failed; carries the last iterate and its residual.
class NewtonDiverged : public Error {
public:
    NewtonDiverged(const std::string& what, std::vector<double> iterate, double res)
        : Error(what), last_iterate(std::move(iterate)), residual(res) {}
    std::vector<double> last_iterate;
    double residual;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nijhydro

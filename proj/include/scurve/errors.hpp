#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace scurve {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Malformed input: bad partition, bad polynomial, bad JSON shape, ...
class ValidationError : public Error {
    using Error::Error;
};

/// Inconsistent solver configuration (cut-off level too small, blocked joins, ...).
class ConfigurationError : public Error {
    using Error::Error;
};

/// Evaluation at a singular point (potential or Cauchy transform on a node).
class SingularEvaluationError : public Error {
    using Error::Error;
};

/// Pushforward step large enough to break injectivity on the support.
class StepTooLargeError : public Error {
    using Error::Error;
};

/// The discrete energy is not bounded below on the given contour.
class UnboundedEnergyError : public Error {
    using Error::Error;
};

/// A linear system is too ill-conditioned to trust at working precision.
class IllConditionedError : public Error {
    using Error::Error;
};

/// Root finder ran out of iterations; carries the best iterate seen.
class RootFindingError : public Error {
public:
    RootFindingError(const std::string& what_arg, std::vector<std::complex<double>> best)
        : Error(what_arg), best_iterate(std::move(best)) {}

    std::vector<std::complex<double>> best_iterate;
};

/// Iterative solver did not reach its tolerance; carries the residuals it got stuck at.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what_arg, double supp, double off, int iters)
        : Error(what_arg), residual_supp(supp), residual_off(off), iterations(iters) {}

    double residual_supp = 0.0;
    double residual_off = 0.0;
    int iterations = 0;
};

}  // namespace scurve

#ifndef SEMVOX_ERROR_HPP
#define SEMVOX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace semvox {

// Bad configuration, violated preconditions, malformed requests.
// The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failures while processing well-formed input: ingestion, data files,
// numerics, I/O. The CLI maps these to exit code 3.
class PipelineError : public std::runtime_error {
public:
    explicit PipelineError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative solver did not reach the requested tolerance.
class NumericalError : public PipelineError {
public:
    NumericalError(const std::string& msg, double residual)
        : PipelineError(msg), achieved_residual(residual) {}
    double achieved_residual;
};

} // namespace semvox

#endif

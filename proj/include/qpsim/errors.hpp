// errors.hpp
// Exception hierarchy for the qpsim library.

#pragma once

#include <stdexcept>
#include <string>

namespace qpsim {

// Base class; everything thrown by the library derives from this.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Amplitude would be shifted beyond the OAM truncation bound |m| <= m_max.
class TruncationError : public Error {
public:
    explicit TruncationError(const std::string& msg) : Error(msg) {}
};

// An operation precondition was violated (non-normalized input, support
// outside a required subspace, dimension mismatch, ...).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// Projection onto a logical subspace found no probability mass there.
class EmptySubspaceError : public Error {
public:
    explicit EmptySubspaceError(const std::string& msg) : Error(msg) {}
};

// Circuit description text could not be parsed.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& msg)
        : Error("line " + std::to_string(line) + ", col " +
                std::to_string(column) + ": " + msg),
          line(line), column(column), detail(msg) {}

    int line;
    int column;
    std::string detail;
};

// Iterative reconstruction failed to meet its convergence contract.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

// Structural tolerance for unitarity / hermiticity / trace checks.
inline constexpr double kStructuralTol = 1e-10;
// Below this squared-amplitude mass a component counts as empty.
inline constexpr double kEmptyTol = 1e-12;

}  // namespace qpsim

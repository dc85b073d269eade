#pragma once

#include <stdexcept>
#include <string>

namespace cuff {

/// Base class for all workbench errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad arguments or out-of-contract inputs (maps to CLI usage errors).
struct ValidationError : Error {
    using Error::Error;
};

/// Malformed files; carries the offending line when known.
struct ParseError : Error {
    explicit ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line(line) {}
    long line;
};

/// Regression / model fitting failures (rank deficiency, separation, non-convergence).
struct FitError : Error {
    using Error::Error;
};

/// Device procedures that did not complete (pretension timeout, arm too small).
struct ProcedureError : Error {
    using Error::Error;
};

/// The periodic exchange loop lost its peer.
struct LinkTimeout : Error {
    using Error::Error;
};

}  // namespace cuff

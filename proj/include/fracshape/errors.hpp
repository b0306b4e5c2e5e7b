// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fracshape {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration: bad grid sizes, malformed input, out-of-range flags.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("ConfigError: " + msg) {}
};

/// Parameter outside the mathematical domain of an operation.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("DomainError: " + msg) {}
};

/// The immersion condition |c_theta| >= eps failed.
struct ImmersionViolation : Error {
    explicit ImmersionViolation(const std::string& msg)
        : Error("ImmersionViolation: " + msg) {}
};

/// A rejection-sampling generator exhausted its retry budget.
struct GenerationFailure : Error {
    explicit GenerationFailure(const std::string& msg)
        : Error("GenerationFailure: " + msg) {}
};

/// The implicit step of the variational integrator did not converge.
struct InnerSolveFailure : Error {
    explicit InnerSolveFailure(const std::string& msg)
        : Error("InnerSolveFailure: " + msg) {}
};

}  // namespace fracshape

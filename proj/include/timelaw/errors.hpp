#pragma once

#include <stdexcept>
#include <string>

namespace timelaw {

/// Input violates a documented precondition (bad parameter, bad grid).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The curve has x'^2 + y'^2 below the regularity threshold at some parameter.
class SingularParameterization : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Integration produced a non-finite state.
class IntegrationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver failed to meet its tolerance.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace timelaw

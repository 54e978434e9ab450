#pragma once

#include <stdexcept>
#include <string>

namespace regretlab {

/// A constructor or operation received parameters outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A policy was evaluated against a class it does not belong to.
class ClassViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An operation was called outside the domain where it is defined
/// (e.g. a closed form whose precondition fails).
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace regretlab

// errors.hpp - exception types shared by every module
#pragma once

#include <stdexcept>
#include <string>

namespace thermostat {

// Malformed or inconsistent user input (model files, recipes, parameters).
class SpecificationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A valid request the library declines to carry out (dimension caps,
// insufficient trajectory coverage, failed validity preconditions).
class RefusalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Broken internal invariant: non-Hermitian Hamiltonian, negative rate,
// probability leaving [0, 1] during integration.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace thermostat

#pragma once

#include <stdexcept>
#include <string>

#include "igflow/types.hpp"

namespace igflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or malformed configuration documents.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A state outside the admissible region of a model, a singular vielbein, or
// mismatched supports.
class DomainError : public Error {
public:
    using Error::Error;
};

// The operation needs a closed form the model family does not have.
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

// Numerical integration stopped early. Carries the last accepted sample.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double last_param, Vector last_state)
        : Error(what), last_param_(last_param), last_state_(std::move(last_state)) {}

    [[nodiscard]] double last_param() const noexcept { return last_param_; }
    [[nodiscard]] const Vector& last_state() const noexcept { return last_state_; }

private:
    double last_param_;
    Vector last_state_;
};

// Formats a coordinate vector as "(x1, x2, ...)" for error messages.
std::string describe(const Vector& v);

}  // namespace igflow

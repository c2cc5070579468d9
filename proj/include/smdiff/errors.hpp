#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smd {

/// Base class of every exception thrown by smdiff.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A pointwise quantity (concentration, density) left its admissible range.
class DomainError : public Error {
public:
    DomainError(const std::string& what, int species) : Error(what), species_(species) {}
    int species() const noexcept { return species_; }

private:
    int species_;
};

/// An iterate dropped below the positivity floor at a quadrature point.
class PositivityError : public Error {
public:
    PositivityError(const std::string& what, int cell, int species, double value)
        : Error(what), cell_(cell), species_(species), value_(value) {}
    int cell() const noexcept { return cell_; }
    int species() const noexcept { return species_; }
    double value() const noexcept { return value_; }

private:
    int cell_;
    int species_;
    double value_;
};

/// Boundary, reaction or mass-flux data violate the compatibility conditions.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Factorization failure or loss of coercivity in the linear solve.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Configuration file rejected; `keys()` lists every offending key.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::vector<std::string> keys)
        : Error(what), keys_(std::move(keys)) {}
    const std::vector<std::string>& keys() const noexcept { return keys_; }

private:
    std::vector<std::string> keys_;
};

}  // namespace smd

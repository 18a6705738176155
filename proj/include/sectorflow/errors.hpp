#pragma once

#include <stdexcept>
#include <string>

namespace sectorflow {

// Invalid parameters, profiles, or scenario configuration.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values, powers out of range, and other numeric-domain failures.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Problem instance too large for an exact/brute-force routine.
class size_error : public std::runtime_error {
public:
    explicit size_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Time stepper could not keep the state positive at any admissible dt.
class stiffness_error : public numeric_error {
public:
    explicit stiffness_error(const std::string& msg) : numeric_error(msg) {}
};

// Least-squares fit requested on data that carry no usable signal.
class degenerate_fit_error : public std::runtime_error {
public:
    explicit degenerate_fit_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Rank-deficient regression design.
class collinearity_error : public std::runtime_error {
public:
    explicit collinearity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Convergence regression has non-negative slope: no mean reversion to invert.
class no_convergence_error : public std::runtime_error {
public:
    explicit no_convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Constrained deconvolution search failed to pin the noise parameters.
class unidentified_error : public std::runtime_error {
public:
    explicit unidentified_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sectorflow

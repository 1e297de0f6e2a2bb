#ifndef FEXP_ERRORS_HPP
#define FEXP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fexp {

/// Bad inputs or configuration (dimension mismatches, invalid bandwidths,
/// malformed files). CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown (singular normal equations, spectral pole,
/// exponent overflow cap). CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fexp

#endif  // FEXP_ERRORS_HPP

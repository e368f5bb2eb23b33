#ifndef MORREY_ERROR_HPP_
#define MORREY_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace morrey {

/// No cone exponent reproduces the requested aperture.
class UnattainableAperture : public std::domain_error {
 public:
  explicit UnattainableAperture(const std::string& what) : std::domain_error(what) {}
};

/// A numerical procedure failed (line search, factorization, corrupt data).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed checkpoint or field dump.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace morrey

#endif  // MORREY_ERROR_HPP_

#pragma once

#include <stdexcept>
#include <string>

namespace wvd {

/// Input or parameter violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Experiment setup cannot be realized (e.g. a shell level beyond jmax).
class ConfigurationError : public std::invalid_argument {
public:
    explicit ConfigurationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation produced a value that valid inputs should never produce.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wvd

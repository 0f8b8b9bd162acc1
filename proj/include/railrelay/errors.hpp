#pragma once

#include <stdexcept>
#include <string>

namespace railrelay {

/// Raised for out-of-range configuration or instance parameters.
class InvalidConfig : public std::invalid_argument {
public:
    explicit InvalidConfig(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a numeric routine is called outside its domain.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when the exhaustive search is asked to enumerate more flows than its guard allows.
class SizeGuardError : public std::length_error {
public:
    explicit SizeGuardError(const std::string& what) : std::length_error(what) {}
};

} // namespace railrelay

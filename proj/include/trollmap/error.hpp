#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace trollmap {

// Base for every error the library raises on bad input or configuration.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file does not carry the columns the reader needs. Fatal for the file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// An operation received an empty collection where at least one item is required.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Invalid run/stage configuration (bad span range, k out of bounds, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Values outside the domain of a numeric routine (zero vectors, negative features).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Data-level validation failure (unknown category, duplicate id, single-class labels).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Row-level failure that names the offending rows.
class RowError : public ValidationError {
 public:
  RowError(const std::string& what, std::vector<std::string> ids)
      : ValidationError(what), ids_(std::move(ids)) {}

  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

}  // namespace trollmap

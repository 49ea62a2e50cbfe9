#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace herald {

// Base of every error the library raises. Subclasses are grouped by the
// module that raises them; the CLI maps them onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed JSON / JSONL input. `where` is a JSON path ("$.declarations[3].kind")
// or a "line N" locator.
class SchemaError : public Error {
 public:
  SchemaError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class DuplicateDeclaration : public Error {
 public:
  explicit DuplicateDeclaration(const std::string& name)
      : Error("duplicate declaration: " + name) {}
};

class UnknownDeclaration : public Error {
 public:
  explicit UnknownDeclaration(const std::string& name)
      : Error("unknown declaration: " + name) {}
};

class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> cycle);
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(long expected, long got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("zero-norm vector") {}
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id) : Error("duplicate id: " + id) {}
};

class ProviderError : public Error {
 public:
  ProviderError(std::string provider, const std::string& what)
      : Error(provider + ": " + what), provider_(std::move(provider)) {}
  const std::string& provider() const noexcept { return provider_; }

 private:
  std::string provider_;
};

// Retryable provider failure (timeouts, 429, 5xx). The gateway retries these.
class TransientProviderError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class ProviderExhausted : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class NoTemplate : public Error {
 public:
  using Error::Error;
};

class MissingField : public Error {
 public:
  explicit MissingField(const std::string& field)
      : Error("required field missing: " + field) {}
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t expected, std::size_t got)
      : Error("expected " + std::to_string(expected) + " stepwise translations, got " +
              std::to_string(got)) {}
};

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class MixedK : public Error {
 public:
  using Error::Error;
};

class EmptyPool : public Error {
 public:
  explicit EmptyPool(const std::string& pool) : Error("empty pool: " + pool) {}
};

}  // namespace herald

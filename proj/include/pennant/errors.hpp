#pragma once

#include <stdexcept>
#include <string>

namespace pennant {

/// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stream could not be read or file could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  EmptyCorpusError() : Error("empty corpus") {}
};

class UnsupportedVersionError : public Error {
 public:
  UnsupportedVersionError() : Error("unsupported index version") {}
};

class CorruptIndexError : public Error {
 public:
  CorruptIndexError() : Error("corrupt index") {}
};

class SeedNotFoundError : public Error {
 public:
  SeedNotFoundError() : Error("seed not found") {}
};

/// A numeric precondition did not hold (for example tf > df).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A configuration value is out of range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pennant

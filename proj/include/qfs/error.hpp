#pragma once

#include <stdexcept>
#include <string>

namespace qfs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SizeError : public Error {
  public:
    using Error::Error;
};

class IndexError : public Error {
  public:
    using Error::Error;
};

class ArityError : public Error {
  public:
    using Error::Error;
};

class UnsupportedGateError : public Error {
  public:
    using Error::Error;
};

class DescriptorError : public Error {
  public:
    using Error::Error;
};

class RangeError : public Error {
  public:
    using Error::Error;
};

class DomainError : public Error {
  public:
    using Error::Error;
};

/// Grid too coarse to resolve the expected band limit.
class AliasingError : public Error {
  public:
    using Error::Error;
};

class NumericalGuardError : public Error {
  public:
    using Error::Error;
};

class ScalerError : public Error {
  public:
    using Error::Error;
};

class IntegrationError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

/// Non-finite loss during training; carries the (1-based) epoch.
class TrainingError : public Error {
  public:
    TrainingError(const std::string &what, int epoch)
        : Error(what), epoch_(epoch) {}
    [[nodiscard]] int epoch() const noexcept { return epoch_; }

  private:
    int epoch_;
};

} // namespace qfs

#pragma once

#include <stdexcept>
#include <string>

namespace stz {

// Violated precondition of a public operation (shape mismatch, invalid
// config value, non-orthogonal input where orthogonality is required).
class ContractError : public std::runtime_error {
  public:
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-finite intermediate, eigensolver non-convergence,
// solver divergence.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed serialized data. The kind distinguishes the failure so callers
// can map it to a stable exit code.
class FormatError : public std::runtime_error {
  public:
    enum class Kind {
        BadMagic,
        BadVersion,
        ChecksumMismatch,
        Truncated,
        BadLayout,
    };

    FormatError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stz

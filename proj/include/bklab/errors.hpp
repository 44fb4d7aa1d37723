#pragma once

#include <stdexcept>
#include <string>

namespace bklab {

/// Raised when an operation is mathematically undefined on its input
/// (division by zero, dlog of zero, Cartier on a non-closed form, ...).
class math_error : public std::domain_error {
 public:
  explicit math_error(const std::string& what) : std::domain_error(what) {}
};

/// Raised when the working precision (p-adic N or truncation window D) is too
/// small to decide a question. Callers surface this as "undecided at precision".
class precision_error : public std::runtime_error {
 public:
  explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bklab

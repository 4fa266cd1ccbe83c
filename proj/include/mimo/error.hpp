#pragma once

#include <stdexcept>
#include <string>

namespace mimo {

enum class Errc {
  invalid_order,
  invalid_rings,
  dimension,
  singular_matrix,
  search_space_too_large,
  constellation_mismatch,
  not_bracketed,
  invalid_config,
};

const char* to_string(Errc code) noexcept;

// Base exception for all library failures; `code()` identifies the contract
// that was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mimo

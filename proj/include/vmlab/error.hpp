#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vmlab {

enum class Errc {
  invalid_argument,
  invalid_spec,
  non_convex_region,
  unsupported_derivative,
  degenerate_schedule,
  singular_system,
  divergence,
  invalid_modulus,
  assumption_violated,
  degenerate_fit,
  alignment,
  degenerate_basis,
  numeric,
  underflow,
  config,
  io,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library. `index` carries the time-step
/// (singular systems, divergence) or the config line (parse errors) when
/// one is meaningful.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<long> index = std::nullopt)
      : std::runtime_error(what), code_(code), index_(index) {}

  Errc code() const noexcept { return code_; }
  std::optional<long> index() const noexcept { return index_; }

 private:
  Errc code_;
  std::optional<long> index_;
};

}  // namespace vmlab

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace afc {

enum class Errc {
  invalid_argument,
  grid_too_coarse,
  nonpositive_delta,
  non_finite,
  grid_mismatch,
  window_outside_trace,
  empty_comb,
  unnormalized_state,
  degenerate_design,
  zero_singles,
  zero_basis_total,
  target_unreachable,
  config,
  hash_mismatch,
  io,
};

std::string_view to_string(Errc code);

/// Library-wide exception. Every failure path named in the module contracts
/// maps onto one Errc value so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::grid_too_coarse: return "grid-too-coarse";
    case Errc::nonpositive_delta: return "nonpositive-delta";
    case Errc::non_finite: return "non-finite";
    case Errc::grid_mismatch: return "grid-mismatch";
    case Errc::window_outside_trace: return "window-outside-trace";
    case Errc::empty_comb: return "empty-comb";
    case Errc::unnormalized_state: return "unnormalized-state";
    case Errc::degenerate_design: return "degenerate-design";
    case Errc::zero_singles: return "zero-singles";
    case Errc::zero_basis_total: return "zero-basis-total";
    case Errc::target_unreachable: return "target-unreachable";
    case Errc::config: return "config";
    case Errc::hash_mismatch: return "hash-mismatch";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace afc

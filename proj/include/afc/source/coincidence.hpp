#pragma once

#include <cstdint>

#include "afc/source/detector.hpp"

namespace afc::source {

struct CoincidenceSet {
  std::uint64_t n_si = 0;
  std::uint64_t n_s = 0;
  std::uint64_t n_i = 0;
  std::uint64_t n_pulses = 0;
  double window = 1e-9;
};

struct CoincidenceOptions {
  /// With a pulse period > 0 the signal singles are gated to the same
  /// window around each pulse slot shifted by the expected delay, as a
  /// gated counter would see them. 0 counts every signal tag.
  double pulse_period = 0.0;
  std::uint64_t n_pulses = 0;
};

/// AND-gate coincidences: a herald and a signal tag match when
/// |t_s - t_h - expected_delay| <= window/2; greedy one-to-one in time order.
CoincidenceSet coincide(const TimeTagStream& herald, const TimeTagStream& signal, double window,
                        double expected_delay, const CoincidenceOptions& opts = {});

}  // namespace afc::source

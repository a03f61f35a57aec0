#pragma once

#include "drsync/instance.hpp"

namespace drsync {

enum class ClockVerdict { ok, continuous_steering, break_too_short, daily_steering, daily_working, overlap };

/// Hours-of-service bookkeeping for one driver. Any non-steering stretch of
/// at least t_b minutes between two steering legs is a break and resets the
/// continuous counter.
struct DutyClock {
  Minutes start = -1;           // first minute on duty
  Minutes end = -1;             // last minute on duty
  Minutes last_steer_end = -1;  // -1 before the first leg
  Minutes continuous = 0;
  Minutes total = 0;

  bool idle() const { return start < 0; }

  /// Continuous steering right before a leg starting at `from`.
  Minutes continuous_before(Minutes from, const LegalParams& legal) const {
    if (last_steer_end < 0 || from - last_steer_end >= legal.t_b) return 0;
    return continuous;
  }

  /// Would steering [from, to] be legal? `on_duty_from` is the minute the
  /// driver must already be on duty (boarding time), defaults to `from`.
  ClockVerdict check(Minutes from, Minutes to, const LegalParams& legal, Minutes on_duty_from = -1) const {
    if (on_duty_from < 0) on_duty_from = from;
    if (last_steer_end >= 0 && from < last_steer_end) return ClockVerdict::overlap;
    const Minutes d = to - from;
    if (continuous_before(from, legal) + d > legal.t_cs) {
      const bool rested = last_steer_end >= 0 && from > last_steer_end;
      return rested ? ClockVerdict::break_too_short : ClockVerdict::continuous_steering;
    }
    if (total + d > legal.t_ds) return ClockVerdict::daily_steering;
    const Minutes s = idle() ? on_duty_from : (on_duty_from < start ? on_duty_from : start);
    if (to - s > legal.t_dw) return ClockVerdict::daily_working;
    return ClockVerdict::ok;
  }

  bool can_steer(Minutes from, Minutes to, const LegalParams& legal, Minutes on_duty_from = -1) const {
    return check(from, to, legal, on_duty_from) == ClockVerdict::ok;
  }

  /// Record a leg without checking it.
  void steer(Minutes from, Minutes to, const LegalParams& legal, Minutes on_duty_from = -1) {
    if (on_duty_from < 0) on_duty_from = from;
    continuous = continuous_before(from, legal) + (to - from);
    total += to - from;
    last_steer_end = to;
    if (idle() || on_duty_from < start) start = on_duty_from;
    if (to > end) end = to;
  }

  /// Stay on duty (e.g. riding along) until `t`.
  void extend(Minutes t) {
    if (t > end) end = t;
  }

  Minutes span() const { return idle() ? 0 : end - start; }
};

}  // namespace drsync

#pragma once

namespace overage {

// Per-arrival-class expectations of the inter-departure quantities that follow
// a delivered packet i-1. Packets that are dropped contribute zero, so for the
// busy class these already include the Pr{X > W} delivery factor.
struct ConditionalTerms {
  double overage_time = 0.0;  // E[eps | class]
  double overage_area = 0.0;  // E[Q | class]
  double age_area = 0.0;      // E[Q | class] with H = 0
};

struct Mg11Terms {
  ConditionalTerms idle;
};

struct Mg12StarTerms {
  ConditionalTerms idle;
  ConditionalTerms busy;
  /// Pr*{T > H | B}: delivered with system time above H, given arrival in busy state.
  double stale_busy = 0.0;
};

}  // namespace overage

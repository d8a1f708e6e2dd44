#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "iflh/errors.hpp"

namespace iflh {

// Half-open expert lifetime [start, end_exclusive); the expert born at
// `start` is alive for rounds start .. end_exclusive - 1.
struct Segment {
  std::int64_t start = 0;
  std::int64_t end_exclusive = 0;

  friend bool operator==(const Segment& a, const Segment& b) {
    return a.start == b.start && a.end_exclusive == b.end_exclusive;
  }
};

// Base-K ending-time rule. Round indices are 64-bit and all digit
// manipulation is integer arithmetic.
class BaseKSchedule {
 public:
  explicit BaseKSchedule(std::int64_t k) : k_(k) {
    if (k < 2) throw InvalidParameter("base-K schedule requires K >= 2");
  }

  std::int64_t base() const { return k_; }

  // Zero the lowest nonzero base-K digit of t and add one to the digit
  // above it (carries ripple through ordinary addition). Always > t.
  std::int64_t ending_time(std::int64_t t) const {
    if (t < 1) throw InvalidParameter("round index must be >= 1");
    std::int64_t pow = 1;
    std::int64_t rest = t;
    while (rest % k_ == 0) {
      rest /= k_;
      pow *= k_;
    }
    const std::int64_t cleared = (rest / k_) * k_;
    return (cleared + k_) * pow;
  }

  // Birth times alive at round t: for each digit position i holding
  // digit a_i > 0, the births are {b * K^i + (digits of t above i)} for
  // b = 1 .. a_i. Returned sorted ascending.
  std::vector<std::int64_t> alive_set(std::int64_t t) const {
    if (t < 1) throw InvalidParameter("round index must be >= 1");
    std::vector<std::int64_t> births;
    std::int64_t pow = 1;
    for (std::int64_t rest = t; rest > 0; rest /= k_, pow *= k_) {
      const std::int64_t digit = rest % k_;
      const std::int64_t high = (rest / k_) * (k_ * pow);
      for (std::int64_t b = 1; b <= digit; ++b) {
        births.push_back(high + b * pow);
      }
    }
    std::sort(births.begin(), births.end());
    return births;
  }

  // (floor(log_K t) + 1) (K - 1), the alive-set size bound
  std::int64_t alive_bound(std::int64_t t) const {
    if (t < 1) throw InvalidParameter("round index must be >= 1");
    std::int64_t digits = 0;
    for (std::int64_t rest = t; rest > 0; rest /= k_) ++digits;
    return digits * (k_ - 1);
  }

  // Greedy cover of [r, s]: the next segment starts where the previous
  // one ends, so segments tile [r, ...] with no gaps and the chain
  // needs at most floor(log_K s) + 1 segments.
  std::vector<Segment> covering_segments(std::int64_t r, std::int64_t s) const {
    if (r < 1 || s < r) throw InvalidParameter("covering requires 1 <= r <= s");
    std::vector<Segment> segments;
    std::int64_t start = r;
    for (;;) {
      const std::int64_t e = ending_time(start);
      segments.push_back(Segment{start, e});
      if (e > s) break;
      start = e;
    }
    return segments;
  }

 private:
  std::int64_t k_;
};

}  // namespace iflh

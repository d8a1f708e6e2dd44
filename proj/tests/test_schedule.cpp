#include <catch2/catch_amalgamated.hpp>

#include "iflh/regret.hpp"
#include "iflh/rng.hpp"
#include "iflh/schedule.hpp"

using iflh::BaseKSchedule;
using iflh::Segment;

namespace {

// the definition itself, as the oracle: alive at t means born no later
// and not yet ended
std::vector<std::int64_t> brute_alive(const BaseKSchedule& sched, std::int64_t t) {
  std::vector<std::int64_t> out;
  for (std::int64_t j = 1; j <= t; ++j) {
    if (sched.ending_time(j) > t) out.push_back(j);
  }
  return out;
}

}  // namespace

TEST_CASE("decimal ending times reproduce the worked examples") {
  const BaseKSchedule dec(10);
  for (std::int64_t t = 1; t <= 9; ++t) REQUIRE(dec.ending_time(t) == 10);
  for (std::int64_t t = 11; t <= 19; ++t) REQUIRE(dec.ending_time(t) == 20);
  for (std::int64_t t = 10; t <= 90; t += 10) REQUIRE(dec.ending_time(t) == 100);
  REQUIRE(dec.ending_time(111) == 120);
  REQUIRE(dec.ending_time(120) == 200);
  REQUIRE(dec.ending_time(200) == 1000);
}

TEST_CASE("binary ending time zeroes the low bit and carries") {
  const BaseKSchedule bin(2);
  REQUIRE(bin.ending_time(3) == 4);  // 11 -> 100
  REQUIRE(bin.ending_time(1) == 2);
  REQUIRE(bin.ending_time(2) == 4);
  REQUIRE(bin.ending_time(4) == 8);
  REQUIRE(bin.ending_time(6) == 8);  // 110 -> 1000
}

TEST_CASE("ending time always moves forward") {
  for (std::int64_t k : {2, 3, 5, 10}) {
    const BaseKSchedule sched(k);
    for (std::int64_t t = 1; t <= 20000; ++t) {
      REQUIRE(sched.ending_time(t) > t);
    }
  }
}

TEST_CASE("alive set at the first round is the single newborn") {
  for (std::int64_t k : {2, 3, 7}) {
    const BaseKSchedule sched(k);
    REQUIRE(sched.alive_set(1) == std::vector<std::int64_t>{1});
  }
}

TEST_CASE("alive set matches the decimal worked example") {
  const BaseKSchedule dec(10);
  std::vector<std::int64_t> expected;
  for (std::int64_t j = 481; j <= 486; ++j) expected.push_back(j);
  for (std::int64_t j = 410; j <= 480; j += 10) expected.push_back(j);
  for (std::int64_t j = 100; j <= 400; j += 100) expected.push_back(j);
  std::sort(expected.begin(), expected.end());
  REQUIRE(dec.alive_set(486) == expected);
}

TEST_CASE("alive set equals the brute-force definition") {
  for (std::int64_t k : {2, 3, 5, 10}) {
    const BaseKSchedule sched(k);
    for (std::int64_t t = 1; t <= 2000; ++t) {
      REQUIRE(sched.alive_set(t) == brute_alive(sched, t));
    }
  }
}

TEST_CASE("alive set size respects the digit bound") {
  for (std::int64_t k : {2, 3, 5, 10}) {
    const BaseKSchedule sched(k);
    for (std::int64_t t = 1; t <= 20000; ++t) {
      const auto alive = sched.alive_set(t);
      REQUIRE(static_cast<std::int64_t>(alive.size()) <= sched.alive_bound(t));
      REQUIRE(sched.alive_bound(t) == iflh::digits_bound(k, t) * (k - 1));
    }
  }
}

TEST_CASE("membership is equivalent to birth <= t < ending") {
  iflh::Rng rng(3);
  for (std::int64_t k : {2, 5}) {
    const BaseKSchedule sched(k);
    for (int i = 0; i < 200; ++i) {
      const std::int64_t t = rng.uniform_int(1, 50000);
      const auto alive = sched.alive_set(t);
      for (std::int64_t j : alive) {
        REQUIRE(j <= t);
        REQUIRE(t < sched.ending_time(j));
      }
      // spot-check some non-members too
      for (int probe = 0; probe < 20; ++probe) {
        const std::int64_t j = rng.uniform_int(1, t);
        const bool member = std::binary_search(alive.begin(), alive.end(), j);
        REQUIRE(member == (sched.ending_time(j) > t));
      }
    }
  }
}

TEST_CASE("the decimal cover of [111, 832] is the worked chain") {
  const BaseKSchedule dec(10);
  const std::vector<Segment> segs = dec.covering_segments(111, 832);
  REQUIRE(segs.size() == 3);
  REQUIRE(segs[0] == Segment{111, 120});
  REQUIRE(segs[1] == Segment{120, 200});
  REQUIRE(segs[2] == Segment{200, 1000});
}

TEST_CASE("a degenerate interval is covered by one segment") {
  const BaseKSchedule sched(3);
  for (std::int64_t r : {1, 5, 9, 27, 100}) {
    const auto segs = sched.covering_segments(r, r);
    REQUIRE(segs.size() == 1);
    REQUIRE(segs[0].start == r);
    REQUIRE(segs[0].end_exclusive > r);
  }
}

TEST_CASE("random binary covers chain correctly and stay short") {
  const BaseKSchedule bin(2);
  iflh::Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t r = rng.uniform_int(1, 1 << 16);
    const std::int64_t s = rng.uniform_int(r, 1 << 16);
    const auto segs = bin.covering_segments(r, s);
    REQUIRE(segs.front().start == r);
    REQUIRE(segs.back().end_exclusive > s);
    REQUIRE(static_cast<std::int64_t>(segs.size()) <= iflh::digits_bound(2, s));
    for (std::size_t j = 0; j < segs.size(); ++j) {
      REQUIRE(segs[j].end_exclusive == bin.ending_time(segs[j].start));
      if (j + 1 < segs.size()) REQUIRE(segs[j + 1].start == segs[j].end_exclusive);
    }
  }
}

TEST_CASE("schedule rejects invalid parameters") {
  REQUIRE_THROWS_AS(BaseKSchedule(1), iflh::InvalidParameter);
  REQUIRE_THROWS_AS(BaseKSchedule(0), iflh::InvalidParameter);
  const BaseKSchedule sched(4);
  REQUIRE_THROWS_AS(sched.ending_time(0), iflh::InvalidParameter);
  REQUIRE_THROWS_AS(sched.alive_set(0), iflh::InvalidParameter);
  REQUIRE_THROWS_AS(sched.covering_segments(5, 4), iflh::InvalidParameter);
  REQUIRE_THROWS_AS(sched.covering_segments(0, 4), iflh::InvalidParameter);
}

#pragma once

namespace iflh {

// Central tolerance record. Every equality check, derivative check and
// inner solve in the library pulls its tolerance from here, so the
// whole build can be tightened or loosened from one place.
struct NumericPolicy {
  double equality_tol = 1e-9;
  double gradient_check_tol = 1e-5;
  double solver_tol = 1e-8;
};

inline const NumericPolicy& default_policy() {
  static const NumericPolicy policy{};
  return policy;
}

}  // namespace iflh

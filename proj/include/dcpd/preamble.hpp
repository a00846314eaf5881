#pragma once

// Double-chirp preamble construction and chirp-pair assignment.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dcpd/css.hpp"

namespace dcpd {

struct PreambleAssignment {
  int ed_id = 0;
  int kappa1 = 0;
  int kappa2 = 0;
  int delta = 0;
};

enum class AssignmentPolicy { sequential, seeded_random };

struct AssignmentPlan {
  std::vector<PreambleAssignment> assignments;
  int m = 0;
  int n_preamble = 8;
};

/// Pair distance reduced modulo M/2.
///
/// Uses the cyclic distance min(d, M - d) of the two indices before the
/// reduction so that jointly shifting both chirps (which is what a late
/// window does) leaves the value unchanged. For |kappa1 - kappa2| <= M/2 this
/// equals mod(|kappa1 - kappa2|, M/2).
int delta_of(int kappa1, int kappa2, int m);

PreambleAssignment make_assignment(int ed_id, int kappa1, int kappa2, int m);

/// (s_kappa1 + s_kappa2) / sqrt(2); energy M.
CVec build_preamble_symbol(const PreambleAssignment& assignment, const ChirpTable& table);

/// Plans up to M/2 - 1 EDs with pairwise distinct, nonzero deltas.
AssignmentPlan assign_preambles(int n_users, int m, AssignmentPolicy policy,
                                std::uint64_t seed, int n_preamble = 8);

int max_users(int m);

struct PlanViolation {
  enum class Kind { out_of_range, equal_chirps, zero_delta, duplicate_delta, duplicate_pair, capacity };
  Kind kind;
  int ed_a = 0;
  int ed_b = 0;
  std::string message;
};

/// Every violated constraint; empty iff the plan is valid.
std::vector<PlanViolation> validate_assignment(const AssignmentPlan& plan);

const char* to_string(AssignmentPolicy policy);
AssignmentPolicy parse_policy(std::string_view text);

/// Key-value text form:
///   m = 128
///   n_preamble = 8
///   ed.1 = 0, 30
std::string format_plan(const AssignmentPlan& plan);
AssignmentPlan parse_plan(std::string_view text);

}  // namespace dcpd

#include "dcpd/preamble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dcpd/error.hpp"
#include "dcpd/keyvalue.hpp"

namespace dcpd {

int delta_of(int kappa1, int kappa2, int m) {
  int d = (kappa1 - kappa2) % m;
  if (d < 0) d += m;
  d = std::min(d, m - d);
  return d % (m / 2);
}

int max_users(int m) { return m / 2 - 1; }

PreambleAssignment make_assignment(int ed_id, int kappa1, int kappa2, int m) {
  return {ed_id, kappa1, kappa2, delta_of(kappa1, kappa2, m)};
}

CVec build_preamble_symbol(const PreambleAssignment& a, const ChirpTable& table) {
  const int m = table.m();
  if (a.kappa1 < 0 || a.kappa1 >= m || a.kappa2 < 0 || a.kappa2 >= m) {
    fail(ErrorCode::config, "ED " + std::to_string(a.ed_id) + ": chirp index outside 0..M-1");
  }
  if (a.kappa1 == a.kappa2) {
    fail(ErrorCode::config, "ED " + std::to_string(a.ed_id) + ": preamble chirps must differ");
  }
  const double scale = 1.0 / std::sqrt(2.0);
  CVec out(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    out[static_cast<std::size_t>(i)] = (table.sample(a.kappa1, i) + table.sample(a.kappa2, i)) * scale;
  }
  return out;
}

AssignmentPlan assign_preambles(int n_users, int m, AssignmentPolicy policy, std::uint64_t seed,
                                int n_preamble) {
  if (m < 4 || (m & (m - 1)) != 0) fail(ErrorCode::config, "M must be a power of two >= 4");
  if (n_users < 1) fail(ErrorCode::config, "at least one ED is required");
  if (n_users > max_users(m)) {
    fail(ErrorCode::capacity, std::to_string(n_users) + " EDs exceed the assignment bound M/2 - 1 = " +
                                  std::to_string(max_users(m)));
  }
  if (n_preamble < 1) fail(ErrorCode::config, "preamble length must be positive");

  AssignmentPlan plan;
  plan.m = m;
  plan.n_preamble = n_preamble;
  switch (policy) {
    case AssignmentPolicy::sequential:
      for (int u = 1; u <= n_users; ++u) plan.assignments.push_back(make_assignment(u, 0, u, m));
      break;
    case AssignmentPolicy::seeded_random: {
      std::mt19937_64 rng(seed);
      std::vector<int> distances(static_cast<std::size_t>(max_users(m)));
      std::iota(distances.begin(), distances.end(), 1);
      std::shuffle(distances.begin(), distances.end(), rng);
      std::uniform_int_distribution<int> start(0, m - 1);
      std::bernoulli_distribution flip(0.5);
      for (int u = 1; u <= n_users; ++u) {
        const int k1 = start(rng);
        const int d = distances[static_cast<std::size_t>(u - 1)];
        const int k2 = ((flip(rng) ? k1 + d : k1 - d) % m + m) % m;
        plan.assignments.push_back(make_assignment(u, k1, k2, m));
      }
      break;
    }
  }
  return plan;
}

std::vector<PlanViolation> validate_assignment(const AssignmentPlan& plan) {
  using Kind = PlanViolation::Kind;
  std::vector<PlanViolation> out;
  const int m = plan.m;
  if (m < 4 || (m & (m - 1)) != 0) {
    out.push_back({Kind::out_of_range, 0, 0, "M = " + std::to_string(m) + " is not a power of two >= 4"});
    return out;
  }
  if (static_cast<int>(plan.assignments.size()) > max_users(m)) {
    out.push_back({Kind::capacity, 0, 0,
                   std::to_string(plan.assignments.size()) + " EDs exceed the bound M/2 - 1 = " +
                       std::to_string(max_users(m))});
  }
  std::map<int, int> first_with_delta;
  std::map<std::pair<int, int>, int> first_with_pair;
  for (const auto& a : plan.assignments) {
    const auto id = std::to_string(a.ed_id);
    if (a.kappa1 < 0 || a.kappa1 >= m || a.kappa2 < 0 || a.kappa2 >= m) {
      out.push_back({Kind::out_of_range, a.ed_id, 0, "ED " + id + ": chirp index outside 0.." + std::to_string(m - 1)});
      continue;
    }
    if (a.kappa1 == a.kappa2) {
      out.push_back({Kind::equal_chirps, a.ed_id, 0, "ED " + id + ": both preamble chirps are " + std::to_string(a.kappa1)});
      continue;
    }
    const int delta = delta_of(a.kappa1, a.kappa2, m);
    if (delta == 0) {
      out.push_back({Kind::zero_delta, a.ed_id, 0,
                     "ED " + id + ": chirps " + std::to_string(a.kappa1) + " and " + std::to_string(a.kappa2) +
                         " are M/2 apart (zero delta, self-resemblance)"});
    } else if (auto [it, fresh] = first_with_delta.emplace(delta, a.ed_id); !fresh) {
      out.push_back({Kind::duplicate_delta, it->second, a.ed_id,
                     "EDs " + std::to_string(it->second) + " and " + id + " share delta " + std::to_string(delta) +
                         " (inter-ED resemblance)"});
    }
    const auto key = std::minmax(a.kappa1, a.kappa2);
    if (auto [it, fresh] = first_with_pair.emplace(key, a.ed_id); !fresh) {
      out.push_back({Kind::duplicate_pair, it->second, a.ed_id,
                     "EDs " + std::to_string(it->second) + " and " + id + " use the same chirp pair"});
    }
  }
  return out;
}

const char* to_string(AssignmentPolicy policy) {
  return policy == AssignmentPolicy::sequential ? "sequential" : "seeded-random";
}

AssignmentPolicy parse_policy(std::string_view text) {
  if (text == "sequential") return AssignmentPolicy::sequential;
  if (text == "seeded-random") return AssignmentPolicy::seeded_random;
  fail(ErrorCode::config, "unknown assignment policy '" + std::string(text) + "'");
}

std::string format_plan(const AssignmentPlan& plan) {
  std::ostringstream out;
  out << "m = " << plan.m << "\n";
  out << "n_preamble = " << plan.n_preamble << "\n";
  for (const auto& a : plan.assignments) {
    out << "ed." << a.ed_id << " = " << a.kappa1 << ", " << a.kappa2 << "\n";
  }
  return out.str();
}

AssignmentPlan parse_plan(std::string_view text) {
  AssignmentPlan plan;
  plan.m = 0;
  std::vector<std::pair<int, std::pair<int, int>>> pairs;
  for (const auto& kv : parse_key_values(text)) {
    if (kv.key == "m") {
      plan.m = parse_int(kv);
    } else if (kv.key == "n_preamble") {
      plan.n_preamble = parse_int(kv);
    } else if (kv.key.starts_with("ed.")) {
      const KeyValue id_kv{kv.key, kv.key.substr(3), kv.line};
      const int id = parse_int(id_kv);
      const auto ks = parse_int_list(kv);
      if (ks.size() != 2) {
        fail(ErrorCode::config, "line " + std::to_string(kv.line) + ": " + kv.key + " needs two chirp indices");
      }
      pairs.push_back({id, {ks[0], ks[1]}});
    } else {
      fail(ErrorCode::config, "line " + std::to_string(kv.line) + ": unknown plan key '" + kv.key + "'");
    }
  }
  if (plan.m <= 0) fail(ErrorCode::config, "plan is missing 'm'");
  for (const auto& [id, ks] : pairs) {
    plan.assignments.push_back(make_assignment(id, ks.first, ks.second, plan.m));
  }
  return plan;
}

}  // namespace dcpd

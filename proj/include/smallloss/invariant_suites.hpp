#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "smallloss/core.hpp"
#include "smallloss/rng.hpp"

namespace smallloss {

struct SuiteReport {
  std::string suite;
  std::size_t trials = 0;
  std::uint64_t violations = 0;
  nlohmann::json details;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"freezing", "estimators", "concentration",
                                              "shifting-dp", "graph-tools"};
  return names;
}

// Throws InvalidArgument for an unknown suite name.
SuiteReport check_invariants(const std::string& suite, std::size_t trials, std::uint64_t seed);

// Random instances shared by the suites and tests.
FeedbackGraph random_graph(std::size_t n, double edge_prob, CounterRng& rng);
// Dirichlet(1,...,1) draw.
Distribution random_distribution(std::size_t n, CounterRng& rng);

nlohmann::json suite_json(const SuiteReport& r);

}  // namespace smallloss

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smallloss/core.hpp"
#include "smallloss/graph_tools.hpp"

namespace smallloss {

using ElementId = std::size_t;
using StrategyId = std::uint64_t;

// Element set E, strategy set F of element subsets, and m = max |f|.
// Strategies are either listed explicitly or implied by a layered chain
// (one edge per layer; ids are mixed-radix digits, layer 0 least significant).
class SemiBanditInstance {
 public:
  static SemiBanditInstance from_strategies(std::size_t n_elements,
                                            std::vector<std::vector<ElementId>> strategies);
  static SemiBanditInstance layered_paths(std::size_t layers, std::size_t width);

  std::size_t n_elements() const { return n_elements_; }
  std::size_t m() const { return m_; }
  std::uint64_t n_strategies() const { return n_strategies_; }
  bool is_layered() const { return layered_; }

  std::vector<ElementId> strategy_elements(StrategyId f) const;
  void strategy_elements(StrategyId f, std::vector<ElementId>& out) const;
  // Full strategy list; SizeCap beyond 10^6 strategies.
  std::vector<std::vector<ElementId>> strategies() const;

  // argmin over strategies avoiding `forbidden` of the summed element score;
  // ties go to the lowest id. nullopt when every strategy is forbidden.
  std::optional<StrategyId> min_cost(std::span<const double> scores,
                                     const ArmMask& forbidden) const;

 private:
  std::size_t n_elements_ = 0;
  std::size_t m_ = 0;
  std::uint64_t n_strategies_ = 0;
  bool layered_ = false;
  std::size_t layers_ = 0;
  std::size_t width_ = 0;
  std::vector<std::vector<ElementId>> explicit_;
};

}  // namespace smallloss

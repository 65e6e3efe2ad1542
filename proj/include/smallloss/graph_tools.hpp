#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smallloss/core.hpp"

namespace smallloss {

// Membership flags indexed by arm id; an empty mask means "no arm".
using ArmMask = std::vector<std::uint8_t>;

ArmMask make_mask(std::size_t n, std::span<const ArmId> ids);
std::vector<ArmId> mask_members(const ArmMask& mask);

// Sum of p_j over j in N_i with j not in `excluded`.
double observation_mass(const FeedbackGraph& g, const Distribution& p, ArmId i,
                        const ArmMask& excluded = {});

struct IndependentSet {
  std::vector<ArmId> members;  // ascending
  std::size_t graph_n = 0;

  std::size_t size() const { return members.size(); }
};

// Greedy by ascending id: a candidate joins unless it neighbors a member.
IndependentSet greedy_maximal_independent_set(const FeedbackGraph& g,
                                              std::span<const ArmId> candidates);

bool is_independent(const FeedbackGraph& g, std::span<const ArmId> members);

// Exact alpha(g) by branch and bound; throws TooLarge past 30 arms.
std::size_t exact_independence_number(const FeedbackGraph& g);

}  // namespace smallloss

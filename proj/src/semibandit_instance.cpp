#include "smallloss/semibandit_instance.hpp"

#include <algorithm>
#include <limits>

namespace smallloss {

namespace {
constexpr std::uint64_t kExplicitCap = 1'000'000;
}

SemiBanditInstance SemiBanditInstance::from_strategies(
    std::size_t n_elements, std::vector<std::vector<ElementId>> strategies) {
  require(!strategies.empty(), Errc::InvalidArgument, "no strategies");
  SemiBanditInstance inst;
  inst.n_elements_ = n_elements;
  std::vector<std::uint8_t> covered(n_elements, 0);
  for (auto& s : strategies) {
    require(!s.empty(), Errc::InvalidArgument, "empty strategy");
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (ElementId e : s) {
      require(e < n_elements, Errc::ArmOutOfRange, "strategy element out of range");
      covered[e] = 1;
    }
    inst.m_ = std::max(inst.m_, s.size());
  }
  require(std::all_of(covered.begin(), covered.end(), [](auto c) { return c != 0; }),
          Errc::InvalidArgument, "every element must belong to some strategy");
  inst.n_strategies_ = strategies.size();
  inst.explicit_ = std::move(strategies);
  return inst;
}

SemiBanditInstance SemiBanditInstance::layered_paths(std::size_t layers, std::size_t width) {
  require(layers >= 1 && width >= 1, Errc::InvalidArgument, "layers and width must be >= 1");
  SemiBanditInstance inst;
  inst.layered_ = true;
  inst.layers_ = layers;
  inst.width_ = width;
  inst.n_elements_ = layers * width;
  inst.m_ = layers;
  std::uint64_t count = 1;
  for (std::size_t l = 0; l < layers; ++l) {
    require(count <= std::numeric_limits<std::uint64_t>::max() / width, Errc::TooLarge,
            "too many paths to index");
    count *= width;
  }
  inst.n_strategies_ = count;
  return inst;
}

void SemiBanditInstance::strategy_elements(StrategyId f, std::vector<ElementId>& out) const {
  require(f < n_strategies_, Errc::ArmOutOfRange, "strategy id out of range");
  out.clear();
  if (!layered_) {
    out = explicit_[f];
    return;
  }
  for (std::size_t l = 0; l < layers_; ++l) {
    out.push_back(l * width_ + static_cast<std::size_t>(f % width_));
    f /= width_;
  }
}

std::vector<ElementId> SemiBanditInstance::strategy_elements(StrategyId f) const {
  std::vector<ElementId> out;
  strategy_elements(f, out);
  return out;
}

std::vector<std::vector<ElementId>> SemiBanditInstance::strategies() const {
  if (!layered_) return explicit_;
  require(n_strategies_ <= kExplicitCap, Errc::SizeCap, "too many strategies to enumerate");
  std::vector<std::vector<ElementId>> out(n_strategies_);
  for (StrategyId f = 0; f < n_strategies_; ++f) strategy_elements(f, out[f]);
  return out;
}

std::optional<StrategyId> SemiBanditInstance::min_cost(std::span<const double> scores,
                                                       const ArmMask& forbidden) const {
  require(scores.size() == n_elements_, Errc::LengthMismatch, "score vector size mismatch");
  auto is_forbidden = [&](ElementId e) { return !forbidden.empty() && forbidden[e]; };

  if (layered_) {
    // Layers are independent choices, so the shortest path is a per-layer argmin.
    StrategyId id = 0;
    StrategyId radix = 1;
    for (std::size_t l = 0; l < layers_; ++l) {
      std::size_t best = width_;
      for (std::size_t k = 0; k < width_; ++k) {
        const ElementId e = l * width_ + k;
        if (is_forbidden(e)) continue;
        if (best == width_ || scores[e] < scores[l * width_ + best]) best = k;
      }
      if (best == width_) return std::nullopt;
      id += radix * best;
      radix *= width_;
    }
    return id;
  }

  std::optional<StrategyId> best;
  double best_cost = 0.0;
  for (StrategyId f = 0; f < explicit_.size(); ++f) {
    double cost = 0.0;
    bool ok = true;
    for (ElementId e : explicit_[f]) {
      if (is_forbidden(e)) {
        ok = false;
        break;
      }
      cost += scores[e];
    }
    if (ok && (!best || cost < best_cost)) {
      best = f;
      best_cost = cost;
    }
  }
  return best;
}

}  // namespace smallloss

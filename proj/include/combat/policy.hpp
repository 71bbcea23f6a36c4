#pragma once

#include <string>
#include <utility>
#include <vector>

#include "combat/adversaries.hpp"
#include "combat/core_model.hpp"
#include "combat/random.hpp"

namespace combat {

/// A learner that commits to one combinatorial arm per batch and receives a
/// single feedback for the accumulated batch loss.
class BatchedPolicy {
 public:
  virtual ~BatchedPolicy() = default;

  virtual std::string id() const = 0;
  /// Feedback the policy needs at minimum.
  virtual Feedback required_feedback() const = 0;
  /// Arm to hold for the next batch.
  virtual CombinatorialArm select(SplitMixRng& rng) = 0;
  /// Feedback for the batch that just ended, for the most recently selected arm.
  virtual void observe(const FeedbackView& feedback) = 0;
  /// Tuning values worth recording next to results.
  virtual std::vector<std::pair<std::string, std::string>> metadata() const { return {}; }
};

}  // namespace combat

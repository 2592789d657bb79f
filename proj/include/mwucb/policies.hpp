#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwucb/solver.hpp"
#include "mwucb/topology.hpp"

namespace mwucb {

enum class PolicyKind { MwUcb, RestartUcb, IdealizedMw };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::MwUcb;
  std::optional<std::size_t> tau;     // default: ceil(T^(2/3))
  std::optional<std::size_t> window;  // default: from tau and alpha
  double alpha = 0.5;
};

struct Hyperparams {
  std::size_t tau = 1;
  std::size_t window = 1;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// tau = ceil(T^(2/3)); window = min(tau, 2 ceil(tau^((2/3)(1 - alpha))) + 150).
Hyperparams default_hyperparams(std::size_t horizon, double alpha);

/// Applies defaults and overrides; RestartUcb always gets window = tau.
/// Throws std::invalid_argument unless 1 <= window <= tau.
Hyperparams resolve_hyperparams(const PolicyConfig& config, std::size_t horizon);

/// Queue backlogs frozen at a restart point, normalized by the largest one.
struct FrameWeights {
  std::vector<double> w;
};

/// w_e = Q_e / max_e Q_e, with 0/0 = 0.
FrameWeights normalized_queue_weights(std::span<const double> queues);

/// What a slot reveals after the decision: the activation, the arrivals, and
/// the effective service b_e = x_e theta_e (zero on unactivated links).
struct Feedback {
  std::size_t slot = 0;
  ActivationVector activation;
  std::vector<std::uint64_t> arrivals;
  std::vector<double> service;
};

/// Windowed activation counts and observed-capacity sums over
/// [max(frame_start, t - window), t - 1], maintained recursively.
class SlidingWindowStats {
 public:
  SlidingWindowStats(std::size_t links, std::size_t window);

  /// Clears all counters and starts a new frame at `frame_start`.
  void reset(std::size_t frame_start);

  /// Folds in the feedback of slot t - 1 and evicts slot t - 1 - window.
  /// Throws std::invalid_argument on a slot mismatch.
  void update(const Feedback& feedback, std::size_t t);

  double phi(LinkId e) const { return phi_[e] + phi_carry_[e]; }
  std::size_t count(LinkId e) const { return count_[e]; }
  /// phi / count with 0/0 = 0.
  double mean(LinkId e) const;

  std::size_t links() const { return links_; }
  std::size_t window() const { return window_; }
  std::size_t frame_start() const { return frame_start_; }
  /// The slot whose feedback has been folded in last, plus one.
  std::size_t current_slot() const { return current_slot_; }

 private:
  std::size_t links_;
  std::size_t window_;
  std::size_t frame_start_ = 0;
  std::size_t current_slot_ = 0;
  std::vector<std::uint8_t> ring_activation_;
  std::vector<double> ring_service_;
  // phi is a compensated sum: value = phi_ + phi_carry_.
  std::vector<double> phi_;
  std::vector<double> phi_carry_;
  std::vector<std::size_t> count_;
};

/// Zeroes the statistics and freezes new weights at restart point t.
/// Throws std::invalid_argument when t is not a multiple of tau.
FrameWeights frame_reset(SlidingWindowStats& stats, std::span<const double> queues, std::size_t t,
                         std::size_t tau);

void window_update(SlidingWindowStats& stats, const Feedback& feedback, std::size_t t);

/// W_e = min(w_e * mean_e + sqrt(3 ln(tau) / (2 n_e)), 1), and 1 when n_e = 0.
WeightVector ucb_weights(const SlidingWindowStats& stats, const FrameWeights& w, std::size_t tau);
void ucb_weights(const SlidingWindowStats& stats, const FrameWeights& w, std::size_t tau,
                 std::span<double> out);

/// Inputs available to a policy when it decides slot t. `channel_means` is
/// populated only for policies that declare they use channel statistics.
struct SlotView {
  std::size_t t = 0;
  std::span<const double> queues;
  std::span<const double> channel_means;
};

class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;

  virtual PolicyKind kind() const = 0;
  /// Idealized policies see the true mean service rates.
  virtual bool uses_channel_statistics() const { return false; }
  virtual const ActivationVector& decide(const SlotView& view) = 0;
  virtual void observe(const Feedback& feedback) { (void)feedback; }
  virtual std::unique_ptr<SchedulingPolicy> clone() const = 0;
};

/// Max-Weight with sliding-window UCB, restarted every tau slots.
class MwUcbPolicy final : public SchedulingPolicy {
 public:
  MwUcbPolicy(std::shared_ptr<const ActivationSolver> solver, Hyperparams params,
              PolicyKind label = PolicyKind::MwUcb);

  PolicyKind kind() const override { return label_; }
  const ActivationVector& decide(const SlotView& view) override;
  void observe(const Feedback& feedback) override;
  std::unique_ptr<SchedulingPolicy> clone() const override;

  const Hyperparams& hyperparams() const { return params_; }
  const FrameWeights& frame_weights() const { return frame_weights_; }
  const WeightVector& last_ucb_weights() const { return ucb_; }
  const SlidingWindowStats& stats() const { return stats_; }

 private:
  std::shared_ptr<const ActivationSolver> solver_;
  Hyperparams params_;
  PolicyKind label_;
  SlidingWindowStats stats_;
  FrameWeights frame_weights_;
  WeightVector ucb_;
  Feedback pending_;
  bool has_pending_ = false;
  ActivationVector decision_;
};

/// Max-Weight on the true Q_e(t) mu_e(t).
class IdealizedMaxWeightPolicy final : public SchedulingPolicy {
 public:
  explicit IdealizedMaxWeightPolicy(std::shared_ptr<const ActivationSolver> solver);

  PolicyKind kind() const override { return PolicyKind::IdealizedMw; }
  bool uses_channel_statistics() const override { return true; }
  const ActivationVector& decide(const SlotView& view) override;
  std::unique_ptr<SchedulingPolicy> clone() const override;

 private:
  std::shared_ptr<const ActivationSolver> solver_;
  WeightVector weights_;
  ActivationVector decision_;
};

std::unique_ptr<SchedulingPolicy> make_policy(const PolicyConfig& config, std::size_t horizon,
                                              std::shared_ptr<const ActivationSolver> solver);

}  // namespace mwucb

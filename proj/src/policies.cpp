#include "mwucb/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mwucb {
namespace {

// Smallest integer >= x, treating values within round-off of an integer as
// that integer (pow(1000, 1/3) is 9.999999999999998).
std::size_t guarded_ceil(double x) {
  const double r = std::nearbyint(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

// ceil(T^(2/3)) exactly: the least tau with tau^3 >= T^2.
std::size_t ceil_two_thirds_power(std::size_t horizon) {
  const unsigned __int128 target = static_cast<unsigned __int128>(horizon) * horizon;
  auto tau = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(horizon), 2.0 / 3.0)));
  auto cube = [](std::size_t v) {
    const auto w = static_cast<unsigned __int128>(v);
    return w * w * w;
  };
  while (tau > 1 && cube(tau - 1) >= target) --tau;
  while (cube(tau) < target) ++tau;
  return std::max<std::size_t>(tau, 1);
}

void compensated_add(double& sum, double& carry, double value) {
  const double t = sum + value;
  if (std::abs(sum) >= std::abs(value))
    carry += (sum - t) + value;
  else
    carry += (value - t) + sum;
  sum = t;
}

}  // namespace

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::MwUcb: return "mw_ucb";
    case PolicyKind::RestartUcb: return "restart_ucb";
    case PolicyKind::IdealizedMw: return "idealized_mw";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "mw_ucb" || name == "mwucb") return PolicyKind::MwUcb;
  if (name == "restart_ucb") return PolicyKind::RestartUcb;
  if (name == "idealized_mw" || name == "mw") return PolicyKind::IdealizedMw;
  throw std::invalid_argument("unknown policy kind '" + name + "'");
}

Hyperparams default_hyperparams(std::size_t horizon, double alpha) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
  Hyperparams p;
  p.tau = ceil_two_thirds_power(horizon);
  const double exponent = (2.0 / 3.0) * (1.0 - alpha);
  const std::size_t window =
      2 * guarded_ceil(std::pow(static_cast<double>(p.tau), exponent)) + 150;
  p.window = std::min(p.tau, window);
  return p;
}

Hyperparams resolve_hyperparams(const PolicyConfig& config, std::size_t horizon) {
  Hyperparams p = default_hyperparams(horizon, config.alpha);
  if (config.tau) {
    if (*config.tau == 0) throw std::invalid_argument("tau must be at least 1");
    p.tau = *config.tau;
    // Re-derive the window for the overridden frame length.
    const double exponent = (2.0 / 3.0) * (1.0 - config.alpha);
    p.window = std::min(p.tau, 2 * guarded_ceil(std::pow(static_cast<double>(p.tau), exponent)) + 150);
  }
  if (config.window) p.window = *config.window;
  if (config.kind == PolicyKind::RestartUcb) p.window = p.tau;
  if (p.window == 0 || p.window > p.tau)
    throw std::invalid_argument("window " + std::to_string(p.window) + " must lie in [1, tau = " +
                                std::to_string(p.tau) + "]");
  return p;
}

FrameWeights normalized_queue_weights(std::span<const double> queues) {
  FrameWeights fw;
  fw.w.assign(queues.size(), 0.0);
  double peak = 0.0;
  for (double q : queues) {
    if (!(q >= 0.0)) throw std::invalid_argument("queue backlog must be non-negative");
    peak = std::max(peak, q);
  }
  if (peak == 0.0) return fw;
  for (std::size_t e = 0; e < queues.size(); ++e) fw.w[e] = queues[e] / peak;
  return fw;
}

SlidingWindowStats::SlidingWindowStats(std::size_t links, std::size_t window)
    : links_(links),
      window_(window),
      ring_activation_(links * window, 0),
      ring_service_(links * window, 0.0),
      phi_(links, 0.0),
      phi_carry_(links, 0.0),
      count_(links, 0) {
  if (window == 0) throw std::invalid_argument("window must be at least 1");
}

void SlidingWindowStats::reset(std::size_t frame_start) {
  frame_start_ = frame_start;
  current_slot_ = frame_start;
  std::fill(ring_activation_.begin(), ring_activation_.end(), 0);
  std::fill(ring_service_.begin(), ring_service_.end(), 0.0);
  std::fill(phi_.begin(), phi_.end(), 0.0);
  std::fill(phi_carry_.begin(), phi_carry_.end(), 0.0);
  std::fill(count_.begin(), count_.end(), 0);
}

void SlidingWindowStats::update(const Feedback& feedback, std::size_t t) {
  if (t != current_slot_ + 1 || feedback.slot + 1 != t || t <= frame_start_)
    throw std::invalid_argument("window update for slot " + std::to_string(t) +
                                " with feedback of slot " + std::to_string(feedback.slot) +
                                " (stats at slot " + std::to_string(current_slot_) + ")");
  if (feedback.activation.size() != links_ || feedback.service.size() != links_)
    throw std::invalid_argument("feedback dimension differs from links");

  const std::size_t newest = t - 1;
  const bool evict = newest >= frame_start_ + window_;
  const std::size_t slot = (newest - frame_start_) % window_;
  std::uint8_t* ring_x = &ring_activation_[slot * links_];
  double* ring_b = &ring_service_[slot * links_];
  for (LinkId e = 0; e < links_; ++e) {
    const bool x = feedback.activation[e];
    const double b = feedback.service[e];
    if (!x && b != 0.0)
      throw std::invalid_argument("feedback reports service on an unactivated link");
    if (evict && ring_x[e]) {
      --count_[e];
      compensated_add(phi_[e], phi_carry_[e], -ring_b[e]);
    }
    ring_x[e] = x ? 1 : 0;
    ring_b[e] = b;
    if (x) {
      ++count_[e];
      compensated_add(phi_[e], phi_carry_[e], b);
    }
    if (count_[e] == 0) phi_[e] = phi_carry_[e] = 0.0;
  }
  current_slot_ = t;
}

double SlidingWindowStats::mean(LinkId e) const {
  return count_[e] == 0 ? 0.0 : phi(e) / static_cast<double>(count_[e]);
}

FrameWeights frame_reset(SlidingWindowStats& stats, std::span<const double> queues, std::size_t t,
                         std::size_t tau) {
  if (tau == 0 || t % tau != 0)
    throw std::invalid_argument("slot " + std::to_string(t) + " is not a restart point");
  if (queues.size() != stats.links()) throw std::invalid_argument("queue dimension differs from links");
  stats.reset(t);
  return normalized_queue_weights(queues);
}

void window_update(SlidingWindowStats& stats, const Feedback& feedback, std::size_t t) {
  stats.update(feedback, t);
}

void ucb_weights(const SlidingWindowStats& stats, const FrameWeights& w, std::size_t tau,
                 std::span<double> out) {
  if (tau == 0) throw std::invalid_argument("tau must be at least 1");
  if (w.w.size() != stats.links() || out.size() != stats.links())
    throw std::invalid_argument("weight dimension differs from links");
  const double log_tau = std::log(static_cast<double>(tau));
  for (LinkId e = 0; e < stats.links(); ++e) {
    const std::size_t n = stats.count(e);
    if (n == 0) {
      out[e] = 1.0;
      continue;
    }
    const double bonus = std::sqrt(3.0 * log_tau / (2.0 * static_cast<double>(n)));
    out[e] = std::min(w.w[e] * stats.mean(e) + bonus, 1.0);
  }
}

WeightVector ucb_weights(const SlidingWindowStats& stats, const FrameWeights& w, std::size_t tau) {
  WeightVector out(stats.links());
  ucb_weights(stats, w, tau, out);
  return out;
}

MwUcbPolicy::MwUcbPolicy(std::shared_ptr<const ActivationSolver> solver, Hyperparams params,
                         PolicyKind label)
    : solver_(std::move(solver)),
      params_(params),
      label_(label),
      stats_(solver_ ? solver_->topology().link_count() : 0, params.window) {
  if (!solver_) throw std::invalid_argument("policy needs a solver");
  if (params_.tau == 0 || params_.window == 0 || params_.window > params_.tau)
    throw std::invalid_argument("MW-UCB needs 1 <= window <= tau");
  if (label_ == PolicyKind::IdealizedMw) throw std::invalid_argument("invalid MW-UCB label");
  const std::size_t links = solver_->topology().link_count();
  frame_weights_.w.assign(links, 0.0);
  ucb_.assign(links, 1.0);
}

const ActivationVector& MwUcbPolicy::decide(const SlotView& view) {
  const std::size_t t = view.t;
  if (t % params_.tau == 0) {
    frame_weights_ = frame_reset(stats_, view.queues, t, params_.tau);
  } else {
    if (!has_pending_) throw std::logic_error("MW-UCB decide without feedback of the previous slot");
    window_update(stats_, pending_, t);
  }
  has_pending_ = false;
  ucb_weights(stats_, frame_weights_, params_.tau, ucb_);
  decision_ = solver_->solve(ucb_);
  return decision_;
}

void MwUcbPolicy::observe(const Feedback& feedback) {
  pending_.slot = feedback.slot;
  pending_.activation = feedback.activation;
  pending_.service.assign(feedback.service.begin(), feedback.service.end());
  has_pending_ = true;
}

std::unique_ptr<SchedulingPolicy> MwUcbPolicy::clone() const {
  return std::make_unique<MwUcbPolicy>(*this);
}

IdealizedMaxWeightPolicy::IdealizedMaxWeightPolicy(std::shared_ptr<const ActivationSolver> solver)
    : solver_(std::move(solver)) {
  if (!solver_) throw std::invalid_argument("policy needs a solver");
  weights_.assign(solver_->topology().link_count(), 0.0);
}

const ActivationVector& IdealizedMaxWeightPolicy::decide(const SlotView& view) {
  const std::size_t links = weights_.size();
  if (view.queues.size() != links || view.channel_means.size() != links)
    throw std::invalid_argument("idealized Max-Weight needs queues and channel means per link");
  for (LinkId e = 0; e < links; ++e) weights_[e] = view.queues[e] * view.channel_means[e];
  decision_ = solver_->solve(weights_);
  return decision_;
}

std::unique_ptr<SchedulingPolicy> IdealizedMaxWeightPolicy::clone() const {
  return std::make_unique<IdealizedMaxWeightPolicy>(*this);
}

std::unique_ptr<SchedulingPolicy> make_policy(const PolicyConfig& config, std::size_t horizon,
                                              std::shared_ptr<const ActivationSolver> solver) {
  if (config.kind == PolicyKind::IdealizedMw)
    return std::make_unique<IdealizedMaxWeightPolicy>(std::move(solver));
  return std::make_unique<MwUcbPolicy>(std::move(solver), resolve_hyperparams(config, horizon),
                                       config.kind);
}

}  // namespace mwucb

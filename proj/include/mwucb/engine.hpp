#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwucb/policies.hpp"
#include "mwucb/solver.hpp"
#include "mwucb/stochastic.hpp"
#include "mwucb/topology.hpp"

namespace mwucb {

/// Per-link backlog Q_e(t), nonnegative.
struct QueueState {
  std::vector<double> q;

  QueueState() = default;
  explicit QueueState(std::size_t links) : q(links, 0.0) {}
  double total() const;
};

/// Q_e(t+1) = max(Q_e(t) + a_e(t) - b_e(t), 0). Throws std::invalid_argument
/// on dimension mismatch or negative inputs.
QueueState queue_update(const QueueState& q, std::span<const std::uint64_t> a,
                        std::span<const double> b);
void queue_update_inplace(std::span<double> q, std::span<const std::uint64_t> a,
                          std::span<const double> b);

struct SimConfig {
  std::shared_ptr<const NetworkTopology> topology;
  InterferenceModel interference = InterferenceModel::node_exclusive();
  ArrivalModel arrivals = ArrivalModel::fixed(0.1);
  DeltaSchedule delta = DeltaSchedule::time_invariant();
  std::array<double, 2> channel_levels = kDefaultChannelLevels;
  ChannelInit channel_init = ChannelInit::Random;
  PolicyConfig policy;
  std::size_t horizon = 1000;
  std::uint64_t seed = 1;
  /// Default: 100 when horizon >= 10^5, else 1.
  std::optional<std::size_t> stride;
  bool record_regret = false;
  std::optional<double> theta_cap;

  std::size_t effective_stride() const;
  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

/// Stable textual form of every field that influences a run.
std::string canonical_string(const SimConfig& config);
/// 64-bit FNV-1a of canonical_string, as 16 hex digits.
std::string config_hash(const SimConfig& config);

/// Channel, arrival and service processes of one run. Every draw comes from a
/// per-link stream, so the trajectory never depends on the decisions.
class Environment {
 public:
  Environment(const SimConfig& config);

  /// Advances the channel to slot t (no step at t = 0) and fixes lambda(t).
  void begin_slot(std::size_t t);
  /// Draws a(t) and theta(t) for every link.
  void realize();

  const ChannelState& channel() const { return channel_; }
  std::span<const double> means() const { return means_; }
  std::span<const double> arrival_rates() const { return lambda_; }
  std::span<const std::uint64_t> arrivals() const { return arrivals_; }
  std::span<const double> capacities() const { return theta_; }
  double last_variation_step() const { return last_step_; }

  /// Replaces one family of streams; used to probe causality.
  void reseed(StreamPurpose purpose, std::uint64_t seed);

 private:
  std::shared_ptr<const NetworkTopology> topology_;
  ArrivalModel arrival_model_;
  DeltaSchedule delta_;
  std::size_t horizon_;
  std::optional<double> theta_cap_;
  ChannelState channel_;
  LinkStreams channel_rng_;
  LinkStreams service_rng_;
  LinkStreams arrival_rng_;
  std::vector<double> means_;
  std::vector<double> lambda_;
  std::vector<std::uint64_t> arrivals_;
  std::vector<double> theta_;
  double last_step_ = 0.0;
};

/// Everything that happened in one slot.
struct SlotRecord {
  std::size_t t = 0;
  ActivationVector decision;
  std::vector<double> means;
  std::vector<std::uint64_t> arrivals;
  std::vector<double> capacities;
  std::vector<double> service;  // b = x theta
  std::vector<double> q_before;
  std::vector<double> q_after;
};

/// The slot loop: decide, realize, serve, update queues, deliver feedback.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config);
  Simulation(const Simulation& other);
  Simulation& operator=(const Simulation&) = delete;

  /// Runs slot slot() and advances to the next one.
  const SlotRecord& step();

  std::size_t slot() const { return t_; }
  const QueueState& queues() const { return queues_; }
  const SimConfig& config() const { return config_; }
  Environment& environment() { return env_; }
  const Environment& environment() const { return env_; }
  const SchedulingPolicy& policy() const { return *policy_; }
  const ActivationSolver& solver() const { return *solver_; }
  std::shared_ptr<const ActivationSolver> shared_solver() const { return solver_; }

 private:
  SimConfig config_;
  std::shared_ptr<const ActivationSolver> solver_;
  std::unique_ptr<SchedulingPolicy> policy_;
  Environment env_;
  QueueState queues_;
  std::size_t t_ = 0;
  SlotRecord record_;
  Feedback feedback_;
};

struct MetricSample {
  std::size_t t = 0;
  double total_backlog = 0.0;
  /// Frame of slot t - 1 and its regret accumulated through t - 1.
  std::size_t frame = 0;
  double frame_regret = 0.0;
  /// gamma(0, t - 1): the drift over the slots that shaped Q(t).
  double variation = 0.0;

  friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

struct FrameRegret {
  std::size_t index = 0;
  std::size_t start = 0;
  std::size_t length = 0;
  double regret = 0.0;

  friend bool operator==(const FrameRegret&, const FrameRegret&) = default;
};

struct MetricsLog {
  std::vector<MetricSample> samples;
  double q_T = 0.0;
  std::size_t horizon = 0;
  std::size_t frame_length = 0;
  std::vector<FrameRegret> frames;  // filled when regret is recorded
  double variation = 0.0;           // gamma(0, T - 1)
  std::string config_hash;
  std::uint64_t seed = 0;
  bool has_regret = false;

  double q_T_over_T() const { return q_T / static_cast<double>(horizon); }

  friend bool operator==(const MetricsLog&, const MetricsLog&) = default;
};

/// Frame length used for regret bookkeeping: the policy's tau, or the
/// default tau for policies without frames.
std::size_t regret_frame_length(const SimConfig& config);

/// Runs config.horizon slots. Deterministic given the config.
MetricsLog run(const SimConfig& config);

/// sum_t max_{x in M} sum_e w_e mu_e(t) x_e - sum_t sum_e w_e mu_e(t) x_e(t)
/// over the slots [frame_start, frame_end) of the traces, which are indexed
/// by slot.
double frame_regret(std::span<const std::vector<double>> mu_trace, const FrameWeights& w,
                    std::span<const ActivationVector> decisions, const ActivationSolver& solver,
                    std::size_t frame_start, std::size_t frame_end);

struct CouplingViolation {
  enum class Kind { Sandwich, LipschitzOriginal, LipschitzImaginary };
  Kind kind = Kind::Sandwich;
  std::size_t slot = 0;
  LinkId link = 0;
  double q = 0.0;
  double q_imaginary = 0.0;
  double bound = 0.0;
  std::string describe() const;
};

struct CoupledRun {
  MetricsLog original;
  MetricsLog imaginary;
  std::size_t slots_checked = 0;
  bool lipschitz_checked = false;
  std::size_t violation_count = 0;
  std::vector<CouplingViolation> violations;  // the first few, for reporting
  double shed_total = 0.0;
};

/// Runs the policy on the original system and replays its decisions on an
/// imaginary system fed a thinned arrival stream (each packet kept with
/// probability r), checking the sandwich bound every slot and the per-slot
/// Lipschitz bounds when arrivals and services are bounded.
CoupledRun coupled_run(const SimConfig& config, double keep_probability);

/// `# config_hash=<hash> seed=<seed>`, the header, then one row per sample.
void write_csv(std::ostream& out, const MetricsLog& log);

}  // namespace mwucb

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mwucb/topology.hpp"

namespace mwucb {

/// What a random stream is used for. Part of the stream key, so the values
/// are frozen: changing one reshuffles every trajectory.
enum class StreamPurpose : std::uint64_t {
  ChannelInit = 1,
  Channel = 2,
  Service = 3,
  Arrival = 4,
  Shed = 5,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic stream keyed by (seed, purpose, index).
///
/// Uses std::mt19937_64 (whose output sequence is fixed by the standard) and
/// portable transforms, so a given key yields the same draws everywhere.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Rayleigh with the given scale, by inversion.
  double rayleigh(double scale);
  /// Poisson(mean) count.
  std::uint64_t poisson(double mean);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t poisson_ptrs(double mean);
  std::mt19937_64 engine_;
};

/// One stream per link for a given purpose.
class LinkStreams {
 public:
  LinkStreams(std::uint64_t seed, StreamPurpose purpose, std::size_t links);
  RngStream& operator[](LinkId e) { return streams_[e]; }
  std::size_t size() const { return streams_.size(); }

 private:
  std::vector<RngStream> streams_;
};

/// Two-level mean service rate per link: mu_e in {low, high}.
class ChannelState {
 public:
  ChannelState() = default;
  ChannelState(std::array<double, 2> levels, std::vector<std::uint8_t> high);

  std::size_t size() const { return high_.size(); }
  double mu(LinkId e) const { return levels_[high_[e]]; }
  bool is_high(LinkId e) const { return high_[e] != 0; }
  void flip(LinkId e) { high_[e] ^= 1; }
  const std::array<double, 2>& levels() const { return levels_; }
  std::vector<double> means() const;
  void means(std::span<double> out) const;

  friend bool operator==(const ChannelState&, const ChannelState&) = default;

 private:
  std::array<double, 2> levels_{0.25, 0.75};
  std::vector<std::uint8_t> high_;
};

inline constexpr std::array<double, 2> kDefaultChannelLevels{0.25, 0.75};

enum class ChannelInit { Random, Low, High };

ChannelState initial_channel(std::size_t links, std::array<double, 2> levels, ChannelInit init,
                             std::uint64_t seed);

/// Per-slot flip probability of every link's channel chain.
struct DeltaSchedule {
  enum class Kind { TimeInvariant, TimeVarying, Constant };
  Kind kind = Kind::TimeInvariant;
  /// Only used by Kind::Constant.
  double value = 0.0;

  static DeltaSchedule time_invariant() { return {Kind::TimeInvariant, 0.0}; }
  static DeltaSchedule time_varying() { return {Kind::TimeVarying, 0.0}; }
  static DeltaSchedule constant(double p);
};

/// TimeInvariant: 0.5/sqrt(T). TimeVarying: 0.5/sqrt(t+1). Constant: value.
double delta_at(const DeltaSchedule& schedule, std::size_t t, std::size_t horizon);

/// Each link flips level independently with probability delta. Consumes
/// exactly one draw per link.
ChannelState channel_step(const ChannelState& state, double delta, LinkStreams& rng);
void channel_step_inplace(ChannelState& state, double delta, LinkStreams& rng);

/// Rayleigh scale giving mean mu.
double rayleigh_scale(double mu);

/// Service capacity theta ~ Rayleigh(sqrt(2/pi) mu), optionally clipped.
double sample_service(double mu, RngStream& rng, std::optional<double> theta_cap = std::nullopt);

struct ArrivalModel {
  enum class Kind { FixedPoisson, AdaptivePoisson };
  Kind kind = Kind::FixedPoisson;
  double lambda = 0.0;
  std::optional<std::uint64_t> a_max;

  static ArrivalModel fixed(double lambda, std::optional<std::uint64_t> a_max = std::nullopt);
  static ArrivalModel adaptive(std::optional<std::uint64_t> a_max = std::nullopt);
};

/// Independent Poisson(lambda_e) per link, truncated at a_max if set.
std::vector<std::uint64_t> sample_arrivals(const ArrivalModel& model,
                                           std::span<const double> lambda, LinkStreams& rng);
void sample_arrivals(const ArrivalModel& model, std::span<const double> lambda, LinkStreams& rng,
                     std::span<std::uint64_t> out);

/// min over nodes v with links of 1 / sum_{e in A(v)} 1/mu_e.
double adaptive_rate(const NetworkTopology& topology, const ChannelState& state);

/// sum_{t=t1+1}^{t2} max_e |mu_e(t) - mu_e(t-1)| over a trace indexed by slot.
double total_variation(std::span<const ChannelState> trace, std::size_t t1, std::size_t t2);

/// Sup-norm step |mu(t) - mu(t-1)|_inf.
double sup_norm_change(const ChannelState& before, const ChannelState& after);

}  // namespace mwucb

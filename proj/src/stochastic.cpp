#include "mwucb/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mwucb {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index) {
  const std::uint64_t k1 = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(purpose)));
  const std::uint64_t k2 = splitmix64(k1 ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(k2), static_cast<std::uint32_t>(k2 >> 32),
                    static_cast<std::uint32_t>(k1), static_cast<std::uint32_t>(k1 >> 32)};
  return std::mt19937_64(seq);
}

constexpr double kPoissonInversionLimit = 30.0;

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index)
    : engine_(make_engine(seed, purpose, index)) {}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::rayleigh(double scale) {
  return scale * std::sqrt(-2.0 * std::log1p(-uniform()));
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("Poisson mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  if (mean >= kPoissonInversionLimit) return poisson_ptrs(mean);
  // Sequential-search inversion.
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    if (p <= 0.0) break;  // remaining tail below double resolution
    cdf += p;
  }
  return k;
}

// Transformed rejection with squeeze (Hormann 1993), for large means.
std::uint64_t RngStream::poisson_ptrs(double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

LinkStreams::LinkStreams(std::uint64_t seed, StreamPurpose purpose, std::size_t links) {
  streams_.reserve(links);
  for (std::size_t e = 0; e < links; ++e) streams_.emplace_back(seed, purpose, e);
}

ChannelState::ChannelState(std::array<double, 2> levels, std::vector<std::uint8_t> high)
    : levels_(levels), high_(std::move(high)) {
  if (!(levels_[0] > 0.0) || !(levels_[1] > 0.0) || !std::isfinite(levels_[0]) ||
      !std::isfinite(levels_[1]))
    throw std::invalid_argument("channel levels must be positive and finite");
  for (auto& h : high_) h = h != 0 ? 1 : 0;
}

std::vector<double> ChannelState::means() const {
  std::vector<double> out(size());
  means(out);
  return out;
}

void ChannelState::means(std::span<double> out) const {
  for (LinkId e = 0; e < size(); ++e) out[e] = mu(e);
}

ChannelState initial_channel(std::size_t links, std::array<double, 2> levels, ChannelInit init,
                             std::uint64_t seed) {
  std::vector<std::uint8_t> high(links, init == ChannelInit::High ? 1 : 0);
  if (init == ChannelInit::Random) {
    for (LinkId e = 0; e < links; ++e)
      high[e] = RngStream(seed, StreamPurpose::ChannelInit, e).bernoulli(0.5) ? 1 : 0;
  }
  return ChannelState(levels, std::move(high));
}

DeltaSchedule DeltaSchedule::constant(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("constant delta must lie in [0, 1]");
  return {Kind::Constant, p};
}

double delta_at(const DeltaSchedule& schedule, std::size_t t, std::size_t horizon) {
  switch (schedule.kind) {
    case DeltaSchedule::Kind::TimeInvariant:
      if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
      return 0.5 / std::sqrt(static_cast<double>(horizon));
    case DeltaSchedule::Kind::TimeVarying:
      return 0.5 / std::sqrt(static_cast<double>(t) + 1.0);
    case DeltaSchedule::Kind::Constant:
      return schedule.value;
  }
  return 0.0;
}

void channel_step_inplace(ChannelState& state, double delta, LinkStreams& rng) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  if (rng.size() != state.size()) throw std::invalid_argument("stream count differs from links");
  for (LinkId e = 0; e < state.size(); ++e)
    if (rng[e].uniform() < delta) state.flip(e);
}

ChannelState channel_step(const ChannelState& state, double delta, LinkStreams& rng) {
  ChannelState next = state;
  channel_step_inplace(next, delta, rng);
  return next;
}

double rayleigh_scale(double mu) { return std::sqrt(2.0 / std::numbers::pi) * mu; }

double sample_service(double mu, RngStream& rng, std::optional<double> theta_cap) {
  if (!(mu > 0.0)) throw std::invalid_argument("mean service rate must be positive");
  const double theta = rng.rayleigh(rayleigh_scale(mu));
  return theta_cap ? std::min(theta, *theta_cap) : theta;
}

ArrivalModel ArrivalModel::fixed(double lambda, std::optional<std::uint64_t> a_max) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("arrival rate must be finite and non-negative");
  return {Kind::FixedPoisson, lambda, a_max};
}

ArrivalModel ArrivalModel::adaptive(std::optional<std::uint64_t> a_max) {
  return {Kind::AdaptivePoisson, 0.0, a_max};
}

void sample_arrivals(const ArrivalModel& model, std::span<const double> lambda, LinkStreams& rng,
                     std::span<std::uint64_t> out) {
  if (lambda.size() != rng.size() || out.size() != rng.size())
    throw std::invalid_argument("arrival rate vector dimension differs from links");
  for (LinkId e = 0; e < lambda.size(); ++e) {
    std::uint64_t a = rng[e].poisson(lambda[e]);
    if (model.a_max) a = std::min(a, *model.a_max);
    out[e] = a;
  }
}

std::vector<std::uint64_t> sample_arrivals(const ArrivalModel& model,
                                           std::span<const double> lambda, LinkStreams& rng) {
  std::vector<std::uint64_t> out(lambda.size());
  sample_arrivals(model, lambda, rng, out);
  return out;
}

double adaptive_rate(const NetworkTopology& topology, const ChannelState& state) {
  if (state.size() != topology.link_count())
    throw std::invalid_argument("channel state dimension differs from links");
  double rate = std::numeric_limits<double>::infinity();
  for (NodeId v = 0; v < topology.node_count(); ++v) {
    const auto adj = topology.adjacent_links(v);
    if (adj.empty()) continue;
    double inverse_sum = 0.0;
    for (LinkId e : adj) inverse_sum += 1.0 / state.mu(e);
    rate = std::min(rate, 1.0 / inverse_sum);
  }
  if (!std::isfinite(rate)) throw std::invalid_argument("topology has no links");
  return rate;
}

double sup_norm_change(const ChannelState& before, const ChannelState& after) {
  double m = 0.0;
  for (LinkId e = 0; e < before.size(); ++e)
    m = std::max(m, std::abs(after.mu(e) - before.mu(e)));
  return m;
}

double total_variation(std::span<const ChannelState> trace, std::size_t t1, std::size_t t2) {
  if (!(t1 < t2) || t2 >= trace.size())
    throw std::out_of_range("variation window [" + std::to_string(t1) + "," + std::to_string(t2) +
                            "] outside trace of length " + std::to_string(trace.size()));
  double total = 0.0;
  for (std::size_t t = t1 + 1; t <= t2; ++t) total += sup_norm_change(trace[t - 1], trace[t]);
  return total;
}

}  // namespace mwucb

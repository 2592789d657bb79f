#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mwucb/stochastic.hpp"

using namespace mwucb;

TEST_CASE("delta schedules") {
  CHECK(delta_at(DeltaSchedule::time_invariant(), 0, 1'000'000) == doctest::Approx(5e-4));
  CHECK(delta_at(DeltaSchedule::time_invariant(), 777, 1'000'000) == doctest::Approx(5e-4));
  CHECK(delta_at(DeltaSchedule::time_varying(), 0, 10) == 0.5);
  CHECK(delta_at(DeltaSchedule::time_varying(), 3, 10) == 0.25);
  CHECK(delta_at(DeltaSchedule::constant(0.0), 5, 10) == 0.0);
  CHECK_THROWS_AS(DeltaSchedule::constant(1.5), std::invalid_argument);
  for (std::size_t t = 0; t < 1000; ++t) {
    const double d = delta_at(DeltaSchedule::time_varying(), t, 1000);
    CHECK((d >= 0.0 && d <= 1.0));
  }
}

TEST_CASE("streams are keyed and reproducible") {
  RngStream a(42, StreamPurpose::Service, 3);
  RngStream b(42, StreamPurpose::Service, 3);
  RngStream c(42, StreamPurpose::Arrival, 3);
  RngStream d(42, StreamPurpose::Service, 4);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);

  // Frozen first draw guards the stream key derivation against silent change.
  RngStream frozen(1, StreamPurpose::Channel, 0);
  const double u = frozen.uniform();
  RngStream again(1, StreamPurpose::Channel, 0);
  CHECK(again.uniform() == u);
  CHECK((u >= 0.0 && u < 1.0));
}

TEST_CASE("channel step extremes") {
  ChannelState s(kDefaultChannelLevels, {0, 1, 0, 1});
  LinkStreams rng(7, StreamPurpose::Channel, 4);
  CHECK(channel_step(s, 0.0, rng) == s);
  auto flipped = channel_step(s, 1.0, rng);
  for (LinkId e = 0; e < 4; ++e) CHECK(flipped.is_high(e) != s.is_high(e));
  CHECK_THROWS_AS(channel_step(s, -0.1, rng), std::invalid_argument);
}

TEST_CASE("two-state chain occupancy at delta one half") {
  ChannelState s(kDefaultChannelLevels, {0});
  LinkStreams rng(99, StreamPurpose::Channel, 1);
  std::size_t high = 0;
  const std::size_t steps = 100'000;
  for (std::size_t t = 0; t < steps; ++t) {
    channel_step_inplace(s, 0.5, rng);
    high += s.is_high(0);
  }
  const double frac = static_cast<double>(high) / steps;
  CHECK(std::abs(frac - 0.5) <= 0.01);
  CHECK(std::abs((1.0 - frac) - 0.5) <= 0.01);
}

TEST_CASE("channel levels stay in the state set") {
  ChannelState s = initial_channel(12, kDefaultChannelLevels, ChannelInit::Random, 5);
  LinkStreams rng(5, StreamPurpose::Channel, 12);
  for (int t = 0; t < 2000; ++t) {
    channel_step_inplace(s, 0.3, rng);
    for (LinkId e = 0; e < 12; ++e) CHECK((s.mu(e) == 0.25 || s.mu(e) == 0.75));
  }
  CHECK(initial_channel(3, kDefaultChannelLevels, ChannelInit::High, 0).mu(2) == 0.75);
  CHECK(initial_channel(3, kDefaultChannelLevels, ChannelInit::Low, 0).mu(0) == 0.25);
}

TEST_CASE("Rayleigh service normalization") {
  CHECK(rayleigh_scale(0.75) == doctest::Approx(0.59841342).epsilon(1e-7));
  RngStream rng(2026, StreamPurpose::Service, 0);
  const int n = 1'000'000;
  double sum = 0.0;
  double min_value = 1.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_service(0.25, rng);
    sum += x;
    min_value = std::min(min_value, x);
  }
  CHECK(std::abs(sum / n - 0.25) <= 0.002);
  CHECK(min_value >= 0.0);

  RngStream capped(1, StreamPurpose::Service, 0);
  for (int i = 0; i < 10'000; ++i) CHECK(sample_service(0.75, capped, 1.0) <= 1.0);
  CHECK_THROWS_AS(sample_service(0.0, capped), std::invalid_argument);
}

TEST_CASE("Poisson arrivals") {
  LinkStreams rng(3, StreamPurpose::Arrival, 3);
  std::vector<double> zero(3, 0.0);
  CHECK(sample_arrivals(ArrivalModel::fixed(0.0), zero, rng) == std::vector<std::uint64_t>(3, 0));

  LinkStreams one(8, StreamPurpose::Arrival, 1);
  std::vector<double> lam{0.11};
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_arrivals(ArrivalModel::fixed(0.11), lam, one)[0]);
  CHECK(std::abs(sum / n - 0.11) <= 0.002);

  std::vector<double> ten(3, 10.0);
  auto capped = ArrivalModel::fixed(10.0, 3);
  for (int i = 0; i < 1000; ++i)
    for (auto a : sample_arrivals(capped, ten, rng)) CHECK(a <= 3);
}

TEST_CASE("Poisson large-mean branch") {
  RngStream rng(4, StreamPurpose::Arrival, 0);
  const int n = 200'000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(rng.poisson(50.0));
    sum += k;
    sq += k * k;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean - 50.0) < 0.1);
  CHECK(std::abs(var - 50.0) < 1.5);
  CHECK_THROWS_AS(rng.poisson(-1.0), std::invalid_argument);
}

TEST_CASE("adaptive rate") {
  // Node 1 has links to 0 and 2.
  NetworkTopology path(3, {{0, 1}, {1, 2}});
  CHECK(adaptive_rate(path, ChannelState(kDefaultChannelLevels, {0, 1})) ==
        doctest::Approx(1.0 / (4.0 + 4.0 / 3.0)));
  CHECK(adaptive_rate(path, ChannelState(kDefaultChannelLevels, {0, 1})) == doctest::Approx(0.1875));

  auto grid = build_grid(3, 3);
  CHECK(adaptive_rate(grid, ChannelState(kDefaultChannelLevels, std::vector<std::uint8_t>(12, 1))) ==
        doctest::Approx(0.1875));

  NetworkTopology single(2, {{0, 1}});
  CHECK(adaptive_rate(single, ChannelState(kDefaultChannelLevels, {0})) == doctest::Approx(0.25));

  // An isolated node does not constrain the rate.
  NetworkTopology with_isolated(3, {{0, 1}});
  CHECK(adaptive_rate(with_isolated, ChannelState(kDefaultChannelLevels, {1})) ==
        doctest::Approx(0.75));
}

TEST_CASE("total variation") {
  const ChannelState lo(kDefaultChannelLevels, {0, 0});
  const ChannelState hi0(kDefaultChannelLevels, {1, 0});
  const ChannelState hi1(kDefaultChannelLevels, {0, 1});
  std::vector<ChannelState> constant(5, lo);
  CHECK(total_variation(constant, 0, 4) == 0.0);
  std::vector<ChannelState> one_flip{lo, lo, hi0, hi0};
  CHECK(total_variation(one_flip, 0, 3) == doctest::Approx(0.5));
  std::vector<ChannelState> two_flips{lo, hi0, hi0, hi0, lo};
  CHECK(total_variation(two_flips, 0, 4) == doctest::Approx(1.0));
  // Two links changing in the same slot contribute only the sup-norm.
  std::vector<ChannelState> joint{hi0, hi1};
  CHECK(total_variation(joint, 0, 1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(total_variation(constant, 2, 2), std::out_of_range);
  CHECK_THROWS_AS(total_variation(constant, 0, 5), std::out_of_range);
}

TEST_CASE("Markov variation bound at desk scale") {
  // E[gamma(0,t)] <= 0.5 |E| sum_{s=1}^t delta_s, checked with a smaller
  // ensemble than the acceptance run.
  const std::size_t links = 12, horizon = 2000, runs = 100;
  for (auto schedule : {DeltaSchedule::time_invariant(), DeltaSchedule::time_varying()}) {
    double bound = 0.0;
    for (std::size_t s = 1; s <= horizon; ++s) bound += delta_at(schedule, s, horizon);
    bound *= 0.5 * links;
    double sum = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      ChannelState state = initial_channel(links, kDefaultChannelLevels, ChannelInit::Random, r);
      LinkStreams rng(1000 + r, StreamPurpose::Channel, links);
      double gamma = 0.0;
      for (std::size_t t = 1; t <= horizon; ++t) {
        ChannelState next = channel_step(state, delta_at(schedule, t, horizon), rng);
        gamma += sup_norm_change(state, next);
        state = std::move(next);
      }
      sum += gamma;
      sq += gamma * gamma;
    }
    const double mean = sum / runs;
    const double se = std::sqrt((sq / runs - mean * mean) / (runs - 1));
    CHECK(mean <= bound + 3 * se);
  }
}

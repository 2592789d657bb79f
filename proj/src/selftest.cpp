#include "mwucb/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>

#include "mwucb/engine.hpp"

namespace mwucb {
namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

SimConfig grid(std::size_t horizon, double lambda, PolicyKind kind, std::uint64_t seed) {
  SimConfig c;
  c.topology = std::make_shared<const NetworkTopology>(build_grid(3, 3));
  c.arrivals = ArrivalModel::fixed(lambda);
  c.policy.kind = kind;
  c.horizon = horizon;
  c.seed = seed;
  return c;
}

Outcome solver_optimality() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int g = 0; g < 200; ++g) {
    const std::size_t nodes = 2 + rng() % 7;
    std::vector<Link> links;
    for (NodeId u = 0; u < nodes; ++u)
      for (NodeId v = 0; v < nodes; ++v)
        if (u != v && links.size() < 12 && unit(rng) < 0.3) links.push_back({u, v});
    if (links.empty()) links.push_back({0, 1});
    NetworkTopology t(nodes, links);
    std::vector<double> w(t.link_count());
    for (auto& x : w) x = unit(rng);
    const auto model = InterferenceModel::node_exclusive();
    double best = 0.0;
    for (const auto& x : enumerate_activations(model, t)) best = std::max(best, activation_value(w, x));
    const auto x = max_weight_activation(w, model, t);
    if (!is_admissible(model, x, t) || activation_value(w, x) != best)
      return {false, "graph " + std::to_string(g) + " is not solved optimally"};
  }
  return {true, "200 graphs"};
}

Outcome window_recursion() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> theta(0.0, 2.0);
  const std::size_t links = 4, tau = 97, window = 31;
  SlidingWindowStats stats(links, window);
  std::vector<std::vector<std::uint8_t>> xs;
  std::vector<std::vector<double>> bs;
  Feedback fb;
  for (std::size_t t = 0; t < 10'000; ++t) {
    if (t % tau == 0) stats.reset(t);
    else window_update(stats, fb, t);
    const std::size_t lo = std::max(t - t % tau, t >= window ? t - window : 0);
    for (LinkId e = 0; e < links; ++e) {
      std::size_t n = 0;
      double phi = 0.0;
      for (std::size_t s = lo; s < t; ++s) {
        n += xs[s][e];
        phi += bs[s][e];
      }
      if (stats.count(e) != n || std::abs(stats.phi(e) - phi) > 1e-12 * std::max(1.0, std::abs(phi)))
        return {false, "mismatch at slot " + std::to_string(t)};
    }
    std::vector<std::uint8_t> x(links);
    std::vector<double> b(links);
    for (LinkId e = 0; e < links; ++e) {
      x[e] = rng() % 2;
      b[e] = x[e] ? theta(rng) : 0.0;
    }
    xs.push_back(x);
    bs.push_back(b);
    fb.slot = t;
    fb.activation = ActivationVector(x);
    fb.service = b;
  }
  return {true, "10000 slots"};
}

Outcome weight_bounds() {
  Simulation sim(grid(10'000, 0.11, PolicyKind::MwUcb, 3));
  for (std::size_t t = 0; t < 10'000; ++t) {
    sim.step();
    const auto& p = dynamic_cast<const MwUcbPolicy&>(sim.policy());
    for (double v : p.last_ucb_weights())
      if (!(v >= 0.0 && v <= 1.0)) return {false, "UCB weight outside [0,1] at slot " + std::to_string(t)};
    for (double v : p.frame_weights().w)
      if (!(v >= 0.0 && v <= 1.0)) return {false, "frame weight outside [0,1] at slot " + std::to_string(t)};
  }
  return {true, "10000 slots"};
}

Outcome coupling() {
  for (double r : {0.0, 0.5, 1.0}) {
    const auto res = coupled_run(grid(10'000, 0.12, PolicyKind::MwUcb, 4), r);
    if (res.violation_count) return {false, res.violations.front().describe()};
  }
  return {true, "r = 0, 0.5, 1"};
}

Outcome lipschitz() {
  auto c = grid(10'000, 0.5, PolicyKind::MwUcb, 5);
  c.arrivals.a_max = 3;
  c.theta_cap = 1.0;
  const auto res = coupled_run(c, 0.5);
  if (!res.lipschitz_checked) return {false, "bounded regime not detected"};
  if (res.violation_count) return {false, res.violations.front().describe()};
  return {true, "A_max = 3, theta_cap = 1"};
}

Outcome restart_equivalence() {
  auto a = grid(10'000, 0.11, PolicyKind::RestartUcb, 6);
  auto b = a;
  b.policy.kind = PolicyKind::MwUcb;
  const auto hp = resolve_hyperparams(a.policy, a.horizon);
  b.policy.window = hp.tau;
  Simulation sa(a), sb(b);
  for (std::size_t t = 0; t < a.horizon; ++t)
    if (!(sa.step().decision == sb.step().decision))
      return {false, "decisions differ at slot " + std::to_string(t)};
  return {true, "10000 slots"};
}

Outcome determinism() {
  auto c = grid(5000, 0.12, PolicyKind::MwUcb, 8);
  c.record_regret = true;
  if (!(run(c) == run(c))) return {false, "two runs differ"};
  return {true, "bit-identical logs"};
}

Outcome samplers() {
  RngStream s(11, StreamPurpose::Service, 0);
  double sum = 0.0;
  for (int i = 0; i < 1'000'000; ++i) sum += s.rayleigh(rayleigh_scale(0.25));
  const double rayleigh = sum / 1e6;
  RngStream a(11, StreamPurpose::Arrival, 0);
  double arrivals = 0.0;
  for (int i = 0; i < 1'000'000; ++i) arrivals += static_cast<double>(a.poisson(0.11));
  const double poisson = arrivals / 1e6;
  const bool ok = std::abs(rayleigh - 0.25) <= 0.002 && std::abs(poisson - 0.11) <= 0.002;
  return {ok, "Rayleigh mean " + std::to_string(rayleigh) + ", Poisson mean " + std::to_string(poisson)};
}

}  // namespace

bool run_selftest(std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"solver optimality", solver_optimality}, {"window recursion", window_recursion},
      {"UCB weight bounds", weight_bounds},     {"coupling sandwich", coupling},
      {"Lipschitz bound", lipschitz},           {"restart equivalence", restart_equivalence},
      {"determinism", determinism},             {"sampler means", samplers}};
  bool all = true;
  for (const auto& [name, check] : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out << (o.ok ? "PASS " : "FAIL ") << name << " (" << o.detail << ", " << secs << " s)\n";
    all = all && o.ok;
  }
  return all;
}

}  // namespace mwucb

#include "mwucb/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mwucb {
namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Round-off allowance for comparisons between independently accumulated
// queue recursions.
bool within(double lhs, double rhs) {
  return lhs <= rhs + 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

std::size_t policy_frame_length(const PolicyConfig& policy, std::size_t horizon) {
  if (policy.kind == PolicyKind::IdealizedMw) return default_hyperparams(horizon, policy.alpha).tau;
  return resolve_hyperparams(policy, horizon).tau;
}

// Samples Q(t) at multiples of the stride and at T, and accumulates the
// per-frame regret against the omniscient per-slot maximizer.
class Recorder {
 public:
  Recorder(const SimConfig& config, const ActivationSolver* solver)
      : stride_(config.effective_stride()),
        horizon_(config.horizon),
        tau_(regret_frame_length(config)),
        solver_(config.record_regret ? solver : nullptr) {
    log_.horizon = config.horizon;
    log_.frame_length = tau_;
    log_.config_hash = config_hash(config);
    log_.seed = config.seed;
    log_.has_regret = solver_ != nullptr;
    log_.samples.push_back(MetricSample{});
    const std::size_t links = config.topology->link_count();
    weighted_.assign(links, 0.0);
    frame_w_.w.assign(links, 0.0);
  }

  // Called after slot rec.t completed; `variation` is gamma(0, rec.t).
  void after_slot(const SlotRecord& rec, double total_after, double variation) {
    const std::size_t t = rec.t;
    if (solver_) {
      if (t % tau_ == 0) {
        frame_w_ = normalized_queue_weights(rec.q_before);
        frame_ = t / tau_;
        frame_regret_ = 0.0;
        cached_means_.clear();
      }
      frame_regret_ += slot_regret(rec.means, rec.decision);
      if ((t + 1) % tau_ == 0 || t + 1 == horizon_)
        log_.frames.push_back({frame_, frame_ * tau_, t + 1 - frame_ * tau_, frame_regret_});
    }
    const std::size_t s = t + 1;
    if (s % stride_ == 0 || s == horizon_)
      log_.samples.push_back({s, total_after, frame_, frame_regret_, variation});
    if (s == horizon_) {
      log_.q_T = total_after;
      log_.variation = variation;
    }
  }

  MetricsLog& log() { return log_; }

 private:
  double slot_regret(const std::vector<double>& means, const ActivationVector& x) {
    // The per-slot maximum depends only on w (fixed in the frame) and mu(t).
    if (means != cached_means_) {
      for (LinkId e = 0; e < means.size(); ++e) weighted_[e] = frame_w_.w[e] * means[e];
      cached_best_ = activation_value(weighted_, solver_->solve(weighted_));
      cached_means_ = means;
    }
    const double achieved = activation_value(weighted_, x);
    return std::max(cached_best_, achieved) - achieved;
  }

  std::size_t stride_;
  std::size_t horizon_;
  std::size_t tau_;
  const ActivationSolver* solver_;
  MetricsLog log_;
  FrameWeights frame_w_;
  std::size_t frame_ = 0;
  double frame_regret_ = 0.0;
  std::vector<double> weighted_;
  std::vector<double> cached_means_;
  double cached_best_ = 0.0;
};

}  // namespace

double QueueState::total() const {
  double s = 0.0;
  for (double v : q) s += v;
  return s;
}

void queue_update_inplace(std::span<double> q, std::span<const std::uint64_t> a,
                          std::span<const double> b) {
  if (a.size() != q.size() || b.size() != q.size())
    throw std::invalid_argument("queue update dimensions differ");
  for (std::size_t e = 0; e < q.size(); ++e) {
    if (!(b[e] >= 0.0)) throw std::invalid_argument("effective service must be non-negative");
    q[e] = std::max(q[e] + static_cast<double>(a[e]) - b[e], 0.0);
  }
}

QueueState queue_update(const QueueState& q, std::span<const std::uint64_t> a,
                        std::span<const double> b) {
  QueueState next = q;
  queue_update_inplace(next.q, a, b);
  return next;
}

std::size_t SimConfig::effective_stride() const {
  if (stride) return *stride;
  return horizon >= 100'000 ? 100 : 1;
}

void SimConfig::validate() const {
  if (!topology) throw std::invalid_argument("config has no topology");
  if (topology->link_count() == 0) throw std::invalid_argument("topology has no links");
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  if (stride && *stride == 0) throw std::invalid_argument("stride must be at least 1");
  if (theta_cap && !(*theta_cap > 0.0)) throw std::invalid_argument("theta_cap must be positive");
  if (delta.kind == DeltaSchedule::Kind::Constant && !(delta.value >= 0.0 && delta.value <= 1.0))
    throw std::invalid_argument("constant delta must lie in [0, 1]");
  if (arrivals.kind == ArrivalModel::Kind::FixedPoisson &&
      (!(arrivals.lambda >= 0.0) || !std::isfinite(arrivals.lambda)))
    throw std::invalid_argument("arrival rate must be finite and non-negative");
  ChannelState(channel_levels, {});
  interference.validate(*topology);
  if (policy.kind != PolicyKind::IdealizedMw) resolve_hyperparams(policy, horizon);
  else default_hyperparams(horizon, policy.alpha);
}

std::string canonical_string(const SimConfig& c) {
  std::ostringstream s;
  s << "nodes=" << c.topology->node_count() << ";links=";
  for (const auto& l : c.topology->links()) s << l.tail << '>' << l.head << ',';
  s << ";interference=" << c.interference.name();
  if (const auto* cg = std::get_if<ConflictGraph>(&c.interference.kind()))
    for (auto [a, b] : cg->conflicts) s << ',' << a << '-' << b;
  if (const auto* es = std::get_if<ExplicitSet>(&c.interference.kind())) {
    for (const auto& x : es->members()) {
      s << ',';
      for (LinkId e = 0; e < x.size(); ++e) s << (x[e] ? '1' : '0');
    }
  }
  s << ";arrivals="
    << (c.arrivals.kind == ArrivalModel::Kind::FixedPoisson ? "fixed:" + fmt_double(c.arrivals.lambda)
                                                            : std::string("adaptive"));
  s << ";a_max=" << (c.arrivals.a_max ? std::to_string(*c.arrivals.a_max) : "none");
  switch (c.delta.kind) {
    case DeltaSchedule::Kind::TimeInvariant: s << ";delta=time_invariant"; break;
    case DeltaSchedule::Kind::TimeVarying: s << ";delta=time_varying"; break;
    case DeltaSchedule::Kind::Constant: s << ";delta=constant:" << fmt_double(c.delta.value); break;
  }
  s << ";levels=" << fmt_double(c.channel_levels[0]) << ',' << fmt_double(c.channel_levels[1]);
  s << ";init=" << static_cast<int>(c.channel_init);
  s << ";policy=" << to_string(c.policy.kind) << ",tau="
    << (c.policy.tau ? std::to_string(*c.policy.tau) : "auto")
    << ",window=" << (c.policy.window ? std::to_string(*c.policy.window) : "auto")
    << ",alpha=" << fmt_double(c.policy.alpha);
  s << ";horizon=" << c.horizon << ";seed=" << c.seed << ";stride=" << c.effective_stride();
  s << ";regret=" << (c.record_regret ? 1 : 0);
  s << ";theta_cap=" << (c.theta_cap ? fmt_double(*c.theta_cap) : "none");
  return s.str();
}

std::string config_hash(const SimConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_string(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Environment::Environment(const SimConfig& config)
    : topology_(config.topology),
      arrival_model_(config.arrivals),
      delta_(config.delta),
      horizon_(config.horizon),
      theta_cap_(config.theta_cap),
      channel_(initial_channel(config.topology->link_count(), config.channel_levels,
                               config.channel_init, config.seed)),
      channel_rng_(config.seed, StreamPurpose::Channel, config.topology->link_count()),
      service_rng_(config.seed, StreamPurpose::Service, config.topology->link_count()),
      arrival_rng_(config.seed, StreamPurpose::Arrival, config.topology->link_count()) {
  const std::size_t links = topology_->link_count();
  means_.assign(links, 0.0);
  lambda_.assign(links, 0.0);
  arrivals_.assign(links, 0);
  theta_.assign(links, 0.0);
}

void Environment::begin_slot(std::size_t t) {
  last_step_ = 0.0;
  if (t > 0) {
    const double delta = delta_at(delta_, t, horizon_);
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
    const double jump = std::abs(channel_.levels()[1] - channel_.levels()[0]);
    // One draw per link, exactly as channel_step_inplace.
    for (LinkId e = 0; e < channel_.size(); ++e) {
      if (channel_rng_[e].uniform() < delta) {
        channel_.flip(e);
        last_step_ = jump;
      }
    }
  }
  channel_.means(means_);
  const double rate = arrival_model_.kind == ArrivalModel::Kind::AdaptivePoisson
                          ? adaptive_rate(*topology_, channel_)
                          : arrival_model_.lambda;
  std::fill(lambda_.begin(), lambda_.end(), rate);
}

void Environment::realize() {
  sample_arrivals(arrival_model_, lambda_, arrival_rng_, arrivals_);
  for (LinkId e = 0; e < theta_.size(); ++e)
    theta_[e] = sample_service(means_[e], service_rng_[e], theta_cap_);
}

void Environment::reseed(StreamPurpose purpose, std::uint64_t seed) {
  const std::size_t links = topology_->link_count();
  switch (purpose) {
    case StreamPurpose::Channel: channel_rng_ = LinkStreams(seed, purpose, links); break;
    case StreamPurpose::Service: service_rng_ = LinkStreams(seed, purpose, links); break;
    case StreamPurpose::Arrival: arrival_rng_ = LinkStreams(seed, purpose, links); break;
    default: throw std::invalid_argument("environment has no stream of that purpose");
  }
}

Simulation::Simulation(const SimConfig& config)
    : config_((config.validate(), config)),
      solver_(std::make_shared<const ActivationSolver>(config.topology, config.interference)),
      policy_(make_policy(config.policy, config.horizon, solver_)),
      env_(config),
      queues_(config.topology->link_count()) {
  const std::size_t links = config.topology->link_count();
  record_.service.assign(links, 0.0);
  feedback_.service.assign(links, 0.0);
}

Simulation::Simulation(const Simulation& other)
    : config_(other.config_),
      solver_(other.solver_),
      policy_(other.policy_->clone()),
      env_(other.env_),
      queues_(other.queues_),
      t_(other.t_),
      record_(other.record_),
      feedback_(other.feedback_) {}

const SlotRecord& Simulation::step() {
  const std::size_t t = t_;
  env_.begin_slot(t);
  SlotView view{t, queues_.q, {}};
  if (policy_->uses_channel_statistics()) view.channel_means = env_.means();
  record_.decision = policy_->decide(view);
  env_.realize();

  const auto a = env_.arrivals();
  const auto theta = env_.capacities();
  for (LinkId e = 0; e < theta.size(); ++e) record_.service[e] = record_.decision[e] ? theta[e] : 0.0;

  record_.t = t;
  record_.means.assign(env_.means().begin(), env_.means().end());
  record_.arrivals.assign(a.begin(), a.end());
  record_.capacities.assign(theta.begin(), theta.end());
  record_.q_before = queues_.q;
  queue_update_inplace(queues_.q, a, record_.service);
  record_.q_after = queues_.q;

  feedback_.slot = t;
  feedback_.activation = record_.decision;
  feedback_.arrivals = record_.arrivals;
  feedback_.service = record_.service;
  policy_->observe(feedback_);
  ++t_;
  return record_;
}

std::size_t regret_frame_length(const SimConfig& config) {
  return policy_frame_length(config.policy, config.horizon);
}

MetricsLog run(const SimConfig& config) {
  Simulation sim(config);
  Recorder recorder(config, &sim.solver());
  double gamma = 0.0;
  for (std::size_t t = 0; t < config.horizon; ++t) {
    const SlotRecord& rec = sim.step();
    gamma += sim.environment().last_variation_step();
    recorder.after_slot(rec, sim.queues().total(), gamma);
  }
  return std::move(recorder.log());
}

double frame_regret(std::span<const std::vector<double>> mu_trace, const FrameWeights& w,
                    std::span<const ActivationVector> decisions, const ActivationSolver& solver,
                    std::size_t frame_start, std::size_t frame_end) {
  if (frame_start > frame_end || frame_end > mu_trace.size() || frame_end > decisions.size())
    throw std::out_of_range("frame outside the traces");
  const std::size_t links = solver.topology().link_count();
  if (w.w.size() != links) throw std::invalid_argument("weight dimension differs from links");
  std::vector<double> weighted(links);
  double total = 0.0;
  for (std::size_t t = frame_start; t < frame_end; ++t) {
    if (mu_trace[t].size() != links) throw std::invalid_argument("mu dimension differs from links");
    for (LinkId e = 0; e < links; ++e) weighted[e] = w.w[e] * mu_trace[t][e];
    const double best = activation_value(weighted, solver.solve(weighted));
    const double achieved = activation_value(weighted, decisions[t]);
    total += std::max(best, achieved) - achieved;
  }
  return total;
}

std::string CouplingViolation::describe() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::Sandwich: s << "sandwich"; break;
    case Kind::LipschitzOriginal: s << "lipschitz(Q)"; break;
    case Kind::LipschitzImaginary: s << "lipschitz(Q~)"; break;
  }
  s << " violated at slot " << slot << ", link " << link << ": Q=" << fmt_double(q)
    << " Q~=" << fmt_double(q_imaginary) << " bound=" << fmt_double(bound);
  return s.str();
}

CoupledRun coupled_run(const SimConfig& config, double keep_probability) {
  if (!(keep_probability >= 0.0 && keep_probability <= 1.0))
    throw std::invalid_argument("keep probability must lie in [0, 1]");
  Simulation sim(config);
  SimConfig imaginary_config = config;
  imaginary_config.record_regret = false;
  Recorder original(config, &sim.solver());
  Recorder imaginary(imaginary_config, nullptr);

  const std::size_t links = config.topology->link_count();
  LinkStreams shed_rng(config.seed, StreamPurpose::Shed, links);
  std::vector<double> q_tilde(links, 0.0);
  std::vector<double> shed(links, 0.0);
  std::vector<std::uint64_t> kept(links, 0);

  CoupledRun out;
  out.lipschitz_checked = config.arrivals.a_max.has_value() && config.theta_cap.has_value();
  const double lipschitz =
      out.lipschitz_checked ? static_cast<double>(*config.arrivals.a_max) + *config.theta_cap : 0.0;
  auto report = [&](CouplingViolation v) {
    ++out.violation_count;
    if (out.violations.size() < 16) out.violations.push_back(v);
  };

  double gamma = 0.0;
  for (std::size_t t = 0; t < config.horizon; ++t) {
    const SlotRecord& rec = sim.step();
    gamma += sim.environment().last_variation_step();
    for (LinkId e = 0; e < links; ++e) {
      std::uint64_t k = 0;
      for (std::uint64_t p = 0; p < rec.arrivals[e]; ++p)
        if (shed_rng[e].bernoulli(keep_probability)) ++k;
      kept[e] = k;
      shed[e] += static_cast<double>(rec.arrivals[e] - k);
    }
    const std::vector<double> q_tilde_before = q_tilde;
    queue_update_inplace(q_tilde, kept, rec.service);

    for (LinkId e = 0; e < links; ++e) {
      const double q = rec.q_after[e];
      if (!within(q_tilde[e], q) || !within(q, q_tilde[e] + shed[e]))
        report({CouplingViolation::Kind::Sandwich, t + 1, e, q, q_tilde[e], q_tilde[e] + shed[e]});
      if (out.lipschitz_checked) {
        if (!within(std::abs(q - rec.q_before[e]), lipschitz))
          report({CouplingViolation::Kind::LipschitzOriginal, t + 1, e, q, q_tilde[e], lipschitz});
        if (!within(std::abs(q_tilde[e] - q_tilde_before[e]), lipschitz))
          report({CouplingViolation::Kind::LipschitzImaginary, t + 1, e, q, q_tilde[e], lipschitz});
      }
    }
    ++out.slots_checked;
    double total_tilde = 0.0;
    for (double v : q_tilde) total_tilde += v;
    original.after_slot(rec, sim.queues().total(), gamma);
    imaginary.after_slot(rec, total_tilde, gamma);
  }
  for (double s : shed) out.shed_total += s;
  out.original = std::move(original.log());
  out.imaginary = std::move(imaginary.log());
  return out;
}

void write_csv(std::ostream& out, const MetricsLog& log) {
  out << "# config_hash=" << log.config_hash << " seed=" << log.seed << '\n';
  out << (log.has_regret ? "t,total_backlog,frame,regret,gamma\n" : "t,total_backlog\n");
  for (const auto& s : log.samples) {
    out << s.t << ',' << fmt_double(s.total_backlog);
    if (log.has_regret)
      out << ',' << s.frame << ',' << fmt_double(s.frame_regret) << ',' << fmt_double(s.variation);
    out << '\n';
  }
}

}  // namespace mwucb

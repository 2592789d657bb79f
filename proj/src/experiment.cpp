#include "mwucb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>
#include <toml.hpp>

namespace mwucb {
namespace fs = std::filesystem;
namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("config: " + what); }

void check_keys(const toml::table& t, const std::string& where, std::set<std::string> allowed) {
  for (const auto& [k, v] : t) {
    (void)v;
    if (!allowed.count(std::string(k.str())))
      bad("unknown key '" + (where.empty() ? "" : where + ".") + std::string(k.str()) + "'");
  }
}

double number(const toml::node& n, const std::string& key) {
  if (auto v = n.value<double>()) return *v;
  bad("'" + key + "' must be a number");
}

std::uint64_t count(const toml::node& n, const std::string& key) {
  auto v = n.value<std::int64_t>();
  if (!v || *v < 0) bad("'" + key + "' must be a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

std::string text(const toml::node& n, const std::string& key) {
  if (auto v = n.value<std::string>()) return *v;
  bad("'" + key + "' must be a string");
}

std::vector<std::uint64_t> count_list(const toml::node& n, const std::string& key) {
  const auto* arr = n.as_array();
  if (!arr) bad("'" + key + "' must be an array");
  std::vector<std::uint64_t> out;
  for (const auto& item : *arr) out.push_back(count(item, key));
  return out;
}

const toml::table& sub_table(const toml::table& root, const std::string& key) {
  const auto* t = root[key].as_table();
  if (!t) bad("'" + key + "' must be a table");
  return *t;
}

NetworkTopology parse_topology(const toml::table& root) {
  const bool has_grid = root.contains("grid");
  const bool has_edges = root.contains("edges") || root.contains("nodes");
  if (has_grid == has_edges) bad("give either 'grid = [rows, cols]' or 'nodes' and 'edges'");
  if (has_grid) {
    const auto dims = count_list(*root.get("grid"), "grid");
    if (dims.size() != 2) bad("'grid' must be [rows, cols]");
    try {
      return build_grid(dims[0], dims[1]);
    } catch (const std::invalid_argument& e) {
      bad(std::string("grid: ") + e.what());
    }
  }
  if (!root.contains("nodes") || !root.contains("edges")) bad("'nodes' and 'edges' go together");
  const std::size_t nodes = count(*root.get("nodes"), "nodes");
  const auto* edges = root.get("edges")->as_array();
  if (!edges) bad("'edges' must be an array of [tail, head] pairs");
  std::vector<Link> links;
  for (const auto& e : *edges) {
    const auto pair = count_list(e, "edges");
    if (pair.size() != 2) bad("every edge must be [tail, head]");
    links.push_back({pair[0], pair[1]});
  }
  try {
    return NetworkTopology(nodes, std::move(links));
  } catch (const std::exception& e) {
    bad(std::string("edges: ") + e.what());
  }
}

InterferenceModel parse_interference(const toml::table& root, const NetworkTopology& topology) {
  if (!root.contains("interference")) return InterferenceModel::node_exclusive();
  const auto& node = *root.get("interference");
  std::string kind;
  const toml::table* t = node.as_table();
  if (t) {
    check_keys(*t, "interference", {"kind", "conflicts", "activations"});
    if (!t->contains("kind")) bad("'interference.kind' is required");
    kind = text(*t->get("kind"), "interference.kind");
  } else {
    kind = text(node, "interference");
  }
  if (kind == "node_exclusive") return InterferenceModel::node_exclusive();
  if (kind == "conflict_graph") {
    if (!t || !t->contains("conflicts")) bad("conflict_graph needs 'conflicts'");
    std::vector<std::pair<LinkId, LinkId>> pairs;
    for (const auto& p : *t->get("conflicts")->as_array()) {
      const auto ab = count_list(p, "interference.conflicts");
      if (ab.size() != 2) bad("every conflict must be [link, link]");
      pairs.emplace_back(ab[0], ab[1]);
    }
    return InterferenceModel::conflict_graph(std::move(pairs));
  }
  if (kind == "explicit") {
    if (!t || !t->contains("activations")) bad("explicit interference needs 'activations'");
    std::vector<ActivationVector> members;
    for (const auto& row : *t->get("activations")->as_array()) {
      std::vector<std::uint8_t> bits;
      for (auto b : count_list(row, "interference.activations")) {
        if (b > 1) bad("activation entries must be 0 or 1");
        bits.push_back(static_cast<std::uint8_t>(b));
      }
      members.emplace_back(std::move(bits));
    }
    try {
      return InterferenceModel::explicit_set(topology.link_count(), std::move(members));
    } catch (const std::exception& e) {
      bad(std::string("interference: ") + e.what());
    }
  }
  bad("unknown interference kind '" + kind + "'");
}

std::string lambda_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SimConfig preset_grid(std::size_t horizon) {
  SimConfig c;
  c.topology = std::make_shared<const NetworkTopology>(build_grid(3, 3));
  c.interference = InterferenceModel::node_exclusive();
  c.channel_levels = kDefaultChannelLevels;
  c.channel_init = ChannelInit::Random;
  c.horizon = horizon;
  return c;
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) c = '_';
  return s;
}

}  // namespace

SimConfig parse_config(const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: " << e.description() << " at line " << e.source().begin.line;
    throw std::invalid_argument(msg.str());
  }
  check_keys(root, "",
             {"grid", "nodes", "edges", "interference", "delta", "channel", "arrivals", "policy",
              "seed", "horizon", "stride", "a_max", "theta_cap", "regret"});

  SimConfig c;
  c.topology = std::make_shared<const NetworkTopology>(parse_topology(root));
  c.interference = parse_interference(root, *c.topology);

  if (root.contains("delta")) {
    const auto& d = sub_table(root, "delta");
    check_keys(d, "delta", {"kind", "value"});
    const std::string kind = d.contains("kind") ? text(*d.get("kind"), "delta.kind") : "time_invariant";
    if (kind == "time_invariant") c.delta = DeltaSchedule::time_invariant();
    else if (kind == "time_varying") c.delta = DeltaSchedule::time_varying();
    else if (kind == "constant") {
      if (!d.contains("value")) bad("constant delta needs 'value'");
      const double p = number(*d.get("value"), "delta.value");
      if (!(p >= 0.0 && p <= 1.0)) bad("'delta.value' must lie in [0, 1]");
      c.delta = DeltaSchedule::constant(p);
    } else bad("unknown delta kind '" + kind + "'");
  }

  if (root.contains("channel")) {
    const auto& ch = sub_table(root, "channel");
    check_keys(ch, "channel", {"states", "initial"});
    if (ch.contains("states")) {
      const auto* arr = ch.get("states")->as_array();
      if (!arr || arr->size() != 2) bad("'channel.states' must be [low, high]");
      c.channel_levels = {number(*arr->get(0), "channel.states"), number(*arr->get(1), "channel.states")};
      if (!(c.channel_levels[0] > 0.0 && c.channel_levels[1] > 0.0))
        bad("'channel.states' must be positive");
    }
    if (ch.contains("initial")) {
      const std::string init = text(*ch.get("initial"), "channel.initial");
      if (init == "random") c.channel_init = ChannelInit::Random;
      else if (init == "low") c.channel_init = ChannelInit::Low;
      else if (init == "high") c.channel_init = ChannelInit::High;
      else bad("unknown channel.initial '" + init + "'");
    }
  }

  std::optional<std::uint64_t> a_max;
  if (root.contains("a_max")) a_max = count(*root.get("a_max"), "a_max");
  if (root.contains("arrivals")) {
    const auto& a = sub_table(root, "arrivals");
    check_keys(a, "arrivals", {"kind", "lambda"});
    const std::string kind = a.contains("kind") ? text(*a.get("kind"), "arrivals.kind") : "fixed";
    if (kind == "adaptive") {
      if (a.contains("lambda")) bad("adaptive arrivals take no 'lambda'");
      c.arrivals = ArrivalModel::adaptive(a_max);
    } else if (kind == "fixed") {
      if (!a.contains("lambda")) bad("fixed arrivals need 'arrivals.lambda'");
      const double lambda = number(*a.get("lambda"), "arrivals.lambda");
      if (!(lambda >= 0.0) || !std::isfinite(lambda)) bad("'arrivals.lambda' must be non-negative");
      c.arrivals = ArrivalModel::fixed(lambda, a_max);
    } else bad("unknown arrivals kind '" + kind + "'");
  } else {
    c.arrivals.a_max = a_max;
  }

  if (root.contains("policy")) {
    const auto& p = sub_table(root, "policy");
    check_keys(p, "policy", {"kind", "tau", "d", "alpha"});
    try {
      if (p.contains("kind")) c.policy.kind = parse_policy_kind(text(*p.get("kind"), "policy.kind"));
    } catch (const std::invalid_argument& e) {
      bad(e.what());
    }
    if (p.contains("tau")) c.policy.tau = count(*p.get("tau"), "policy.tau");
    if (p.contains("d")) c.policy.window = count(*p.get("d"), "policy.d");
    if (p.contains("alpha")) c.policy.alpha = number(*p.get("alpha"), "policy.alpha");
  }

  if (root.contains("seed")) c.seed = count(*root.get("seed"), "seed");
  if (root.contains("horizon")) c.horizon = count(*root.get("horizon"), "horizon");
  if (root.contains("stride")) c.stride = count(*root.get("stride"), "stride");
  if (root.contains("theta_cap")) c.theta_cap = number(*root.get("theta_cap"), "theta_cap");
  if (root.contains("regret")) {
    auto v = root.get("regret")->value<bool>();
    if (!v) bad("'regret' must be a boolean");
    c.record_regret = *v;
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    bad(e.what());
  }
  return c;
}

SimConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string Cell::lambda_label() const {
  if (config.arrivals.kind == ArrivalModel::Kind::AdaptivePoisson) return "adaptive";
  return lambda_text(config.arrivals.lambda);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig4a",         "fig4b",           "fig5a",
                                              "fig5b",         "sweep_logqt",     "adaptive_uniform",
                                              "adaptive_varying", "custom"};
  return names;
}

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& preset,
                        const std::string& lambda_label, std::size_t replicate) {
  const std::string key = preset + "|" + lambda_label + "|" + std::to_string(replicate);
  return splitmix64(base_seed ^ splitmix64(fnv1a(key)));
}

std::vector<Cell> expand_preset(const std::string& name, const Overrides& o,
                                const std::optional<SimConfig>& custom) {
  if (o.horizon && *o.horizon == 0) throw std::invalid_argument("horizon override must be at least 1");
  if (o.seeds && *o.seeds == 0) throw std::invalid_argument("seed count must be at least 1");
  const std::size_t replicates = o.seeds.value_or(1);
  const std::uint64_t base = o.base_seed.value_or(1);

  std::vector<Cell> cells;
  auto add = [&](const std::string& preset, SimConfig c, std::size_t r) {
    Cell cell;
    cell.preset = preset;
    cell.replicate = r;
    c.record_regret = c.record_regret || o.regret;
    cell.config = std::move(c);
    cell.id = sanitize(preset + "_" + to_string(cell.config.policy.kind) + "_lam" +
                       cell.lambda_label() + "_r" + std::to_string(r));
    cells.push_back(std::move(cell));
  };

  if (name == "custom") {
    if (!custom) throw std::invalid_argument("preset 'custom' needs a config file");
    // Replicate 0 keeps the configured seed unless a base seed overrides it.
    const std::uint64_t seed = o.base_seed.value_or(custom->seed);
    for (std::size_t r = 0; r < replicates; ++r) {
      SimConfig c = *custom;
      if (o.horizon) c.horizon = *o.horizon;
      c.seed = r == 0 ? seed : cell_seed(seed, "custom", "", r);
      add("custom", c, r);
    }
    return cells;
  }

  struct Plan {
    std::vector<PolicyKind> policies;
    std::vector<std::optional<double>> lambdas;  // nullopt: adaptive
    DeltaSchedule delta;
    std::size_t horizon;
  };
  const std::vector<PolicyKind> all{PolicyKind::MwUcb, PolicyKind::RestartUcb, PolicyKind::IdealizedMw};
  Plan plan;
  if (name == "fig4a") plan = {all, {0.11}, DeltaSchedule::time_invariant(), 1'000'000};
  else if (name == "fig4b") plan = {all, {0.12}, DeltaSchedule::time_invariant(), 1'000'000};
  else if (name == "fig5a") plan = {all, {0.11}, DeltaSchedule::time_varying(), 1'000'000};
  else if (name == "fig5b") plan = {all, {0.12}, DeltaSchedule::time_varying(), 1'000'000};
  else if (name == "adaptive_uniform")
    plan = {all, {std::nullopt}, DeltaSchedule::time_invariant(), 1'000'000};
  else if (name == "adaptive_varying")
    plan = {all, {std::nullopt}, DeltaSchedule::time_varying(), 1'000'000};
  else if (name == "sweep_logqt") {
    plan = {{PolicyKind::MwUcb, PolicyKind::IdealizedMw}, {}, DeltaSchedule::time_invariant(), 1'500'000};
    for (int k = 3; k <= 22; ++k) plan.lambdas.push_back(k / 100.0);
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }

  for (const auto& lambda : plan.lambdas) {
    for (PolicyKind kind : plan.policies) {
      for (std::size_t r = 0; r < replicates; ++r) {
        SimConfig c = preset_grid(o.horizon.value_or(plan.horizon));
        c.delta = plan.delta;
        c.arrivals = lambda ? ArrivalModel::fixed(*lambda) : ArrivalModel::adaptive();
        c.policy.kind = kind;
        c.seed = cell_seed(base, name, lambda ? lambda_text(*lambda) : "adaptive", r);
        add(name, c, r);
      }
    }
  }
  return cells;
}

std::size_t RunManifest::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return !c.ok; }));
}

std::string format_number(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunManifest run_experiment(const std::vector<Cell>& cells, std::size_t parallelism,
                           const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  std::set<std::string> ids;
  for (const auto& c : cells)
    if (!ids.insert(c.id).second) throw std::invalid_argument("duplicate cell id " + c.id);

  RunManifest manifest;
  manifest.out_dir = out_dir;
  manifest.cells.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      CellResult& r = manifest.cells[i];
      r.id = cell.id;
      r.preset = cell.preset;
      r.policy = to_string(cell.config.policy.kind);
      r.lambda = cell.lambda_label();
      r.replicate = cell.replicate;
      r.seed = cell.config.seed;
      r.horizon = cell.config.horizon;
      r.csv = cell.id + ".csv";
      const auto t0 = std::chrono::steady_clock::now();
      try {
        r.config_hash = config_hash(cell.config);
        const MetricsLog log = run(cell.config);
        std::ofstream out(out_dir / r.csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (out_dir / r.csv).string());
        write_csv(out, log);
        out.close();
        if (!out) throw std::runtime_error("write failed for " + (out_dir / r.csv).string());
        r.q_T = log.q_T;
        r.ok = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ofstream summary(out_dir / manifest.summary, std::ios::binary);
  summary << "cell,preset,policy,lambda,replicate,seed,horizon,config_hash,Q_T,Q_T_over_T,"
             "log_Q_T_over_T\n";
  for (const auto& r : manifest.cells) {
    if (!r.ok) continue;
    const double ratio = r.q_T / static_cast<double>(r.horizon);
    summary << r.id << ',' << r.preset << ',' << r.policy << ',' << r.lambda << ',' << r.replicate
            << ',' << r.seed << ',' << r.horizon << ',' << r.config_hash << ','
            << format_number(r.q_T) << ',' << format_number(ratio) << ','
            << format_number(ratio > 0.0 ? std::log(ratio) : -std::numeric_limits<double>::infinity())
            << '\n';
  }
  summary.close();
  if (!summary) throw std::runtime_error("cannot write " + (out_dir / manifest.summary).string());

  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

void write_manifest(const RunManifest& m, const fs::path& path) {
  nlohmann::json j;
  j["tool_version"] = m.tool_version;
  j["out_dir"] = fs::absolute(m.out_dir).string();
  j["summary"] = m.summary;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : m.cells) {
    nlohmann::json cj{{"id", c.id},           {"preset", c.preset},
                      {"policy", c.policy},   {"lambda", c.lambda},
                      {"replicate", c.replicate}, {"seed", c.seed},
                      {"horizon", c.horizon}, {"config_hash", c.config_hash},
                      {"csv", c.csv},         {"ok", c.ok},
                      {"seconds", c.seconds}};
    if (!c.ok) cj["error"] = c.error;
    j["cells"].push_back(std::move(cj));
  }
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

RunManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest " + path.string());
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    // Files are resolved next to the manifest, so a moved run stays readable.
    m.out_dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.summary = j.at("summary").get<std::string>();
    m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    for (const auto& cj : j.at("cells")) {
      CellResult c;
      c.id = cj.at("id").get<std::string>();
      c.preset = cj.at("preset").get<std::string>();
      c.policy = cj.at("policy").get<std::string>();
      c.lambda = cj.at("lambda").get<std::string>();
      c.replicate = cj.at("replicate").get<std::size_t>();
      c.seed = cj.at("seed").get<std::uint64_t>();
      c.horizon = cj.at("horizon").get<std::size_t>();
      c.config_hash = cj.at("config_hash").get<std::string>();
      c.csv = cj.at("csv").get<std::string>();
      c.ok = cj.at("ok").get<bool>();
      c.seconds = cj.value("seconds", 0.0);
      c.error = cj.value("error", std::string());
      m.cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupt manifest " + path.string() + ": " + e.what());
  }
  return m;
}

CsvTotals read_csv_totals(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing CSV " + path.string());
  auto corrupt = [&](const std::string& why) -> std::runtime_error {
    return std::runtime_error("corrupt CSV " + path.string() + ": " + why);
  };
  CsvTotals totals;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# config_hash=", 0) != 0) throw corrupt("no header comment");
  {
    std::istringstream meta(line.substr(2));
    std::string field;
    while (meta >> field) {
      if (field.rfind("config_hash=", 0) == 0) totals.config_hash = field.substr(12);
      else if (field.rfind("seed=", 0) == 0) totals.seed = std::stoull(field.substr(5));
    }
  }
  if (!std::getline(in, line) || line.rfind("t,total_backlog", 0) != 0) throw corrupt("bad column header");
  std::string last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  if (last.empty()) throw corrupt("no samples");
  const auto c1 = last.find(',');
  if (c1 == std::string::npos) throw corrupt("bad row '" + last + "'");
  const auto c2 = last.find(',', c1 + 1);
  try {
    std::size_t used = 0;
    totals.horizon = std::stoull(last.substr(0, c1), &used);
    if (used != c1) throw corrupt("bad slot in '" + last + "'");
    const std::string backlog = last.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1);
    totals.q_T = std::stod(backlog, &used);
    if (used != backlog.size()) throw corrupt("bad backlog in '" + last + "'");
  } catch (const std::logic_error&) {
    throw corrupt("bad row '" + last + "'");
  }
  if (totals.horizon == 0) throw corrupt("final row at slot 0");
  return totals;
}

Stat mean_std(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() < 2 || std::isinf(s.mean)) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

std::vector<SummaryRow> summarize(const RunManifest& manifest) {
  struct Acc {
    std::vector<double> q, ratio, logs;
    std::set<std::size_t> horizons;
  };
  std::vector<std::tuple<std::string, std::string, std::string>> order;
  std::map<std::tuple<std::string, std::string, std::string>, Acc> groups;
  for (const auto& cell : manifest.cells) {
    if (!cell.ok) continue;
    const auto totals = read_csv_totals(manifest.out_dir / cell.csv);
    const auto key = std::make_tuple(cell.preset, cell.policy, cell.lambda);
    if (!groups.count(key)) order.push_back(key);
    auto& acc = groups[key];
    const double ratio = totals.q_T / static_cast<double>(totals.horizon);
    acc.q.push_back(totals.q_T);
    acc.ratio.push_back(ratio);
    acc.logs.push_back(ratio > 0.0 ? std::log(ratio) : -std::numeric_limits<double>::infinity());
    acc.horizons.insert(totals.horizon);
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const auto& acc = groups[key];
    SummaryRow row;
    std::tie(row.preset, row.policy, row.lambda) = key;
    row.seeds = acc.q.size();
    row.horizon = *acc.horizons.rbegin();
    row.q_T = mean_std(acc.q);
    row.q_T_over_T = mean_std(acc.ratio);
    row.log_mean_q_T_over_T = row.q_T_over_T.mean > 0.0 ? std::log(row.q_T_over_T.mean)
                                                        : -std::numeric_limits<double>::infinity();
    row.log_q_T_over_T = mean_std(acc.logs);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "preset,policy,lambda,seeds,horizon,Q_T_mean,Q_T_std,Q_T_over_T_mean,Q_T_over_T_std,"
         "log_Q_T_over_T,log_Q_T_over_T_seed_mean,log_Q_T_over_T_seed_std\n";
  for (const auto& r : rows) {
    out << r.preset << ',' << r.policy << ',' << r.lambda << ',' << r.seeds << ',' << r.horizon << ','
        << format_number(r.q_T.mean) << ',' << format_number(r.q_T.std) << ','
        << format_number(r.q_T_over_T.mean) << ',' << format_number(r.q_T_over_T.std) << ','
        << format_number(r.log_mean_q_T_over_T) << ',' << format_number(r.log_q_T_over_T.mean) << ','
        << format_number(r.log_q_T_over_T.std) << '\n';
  }
}

}  // namespace mwucb

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mwucb/experiment.hpp"

using namespace mwucb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("mwucb_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("config file parsing") {
  const auto c = parse_config(R"(
horizon = 1000
seed = 7
stride = 10
a_max = 3
theta_cap = 1.5
grid = [3, 3]
[delta]
kind = "constant"
value = 0.01
[channel]
states = [0.2, 0.9]
initial = "high"
[arrivals]
kind = "fixed"
lambda = 0.05
[policy]
kind = "restart_ucb"
tau = 100
alpha = 0.25
)");
  CHECK(c.topology->node_count() == 9);
  CHECK(c.topology->link_count() == 12);
  CHECK(c.interference.is_node_exclusive());
  CHECK(c.horizon == 1000);
  CHECK(c.seed == 7);
  CHECK(c.effective_stride() == 10);
  CHECK(c.arrivals.lambda == 0.05);
  CHECK(c.arrivals.a_max == 3u);
  CHECK(c.theta_cap == 1.5);
  CHECK(c.delta.kind == DeltaSchedule::Kind::Constant);
  CHECK(c.delta.value == 0.01);
  CHECK(c.channel_levels == std::array<double, 2>{0.2, 0.9});
  CHECK(c.channel_init == ChannelInit::High);
  CHECK(c.policy.kind == PolicyKind::RestartUcb);
  CHECK(c.policy.tau == 100u);
  CHECK(c.policy.alpha == 0.25);

  const auto edges = parse_config(R"(
nodes = 3
edges = [[0, 1], [1, 2]]
interference = { kind = "conflict_graph", conflicts = [[0, 1]] }
[arrivals]
kind = "adaptive"
)");
  CHECK(edges.topology->link_count() == 2);
  CHECK_FALSE(edges.interference.is_node_exclusive());
  CHECK(edges.arrivals.kind == ArrivalModel::Kind::AdaptivePoisson);
}

TEST_CASE("malformed configs are rejected with the key") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("accepted");
  };
  CHECK(message("grid = [3, 3]\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(message("horizon = 10\n").find("grid") != std::string::npos);
  CHECK(message("grid = [3]\n").find("grid") != std::string::npos);
  CHECK(message("grid = [3, 3]\nhorizon = 0\n").find("horizon") != std::string::npos);
  CHECK(message("grid = [3, 3]\n[arrivals]\nkind = \"fixed\"\n").find("lambda") != std::string::npos);
  CHECK(message("grid = [3, 3]\n[policy]\nkind = \"greedy\"\n").find("greedy") != std::string::npos);
  CHECK(message("grid = [3, 3]\n[policy]\ntau = 10\nd = 20\n").find("window") != std::string::npos);
  CHECK(message("grid = [3, 3\n") != "accepted");
  CHECK(message("nodes = 2\nedges = [[0, 0]]\n") != "accepted");
}

TEST_CASE("preset expansion") {
  const auto fig4a = expand_preset("fig4a", {});
  REQUIRE(fig4a.size() == 3);
  std::set<PolicyKind> kinds;
  for (const auto& c : fig4a) {
    CHECK(c.config.arrivals.lambda == 0.11);
    CHECK(c.config.horizon == 1'000'000);
    CHECK(c.config.delta.kind == DeltaSchedule::Kind::TimeInvariant);
    CHECK(c.config.topology->link_count() == 12);
    kinds.insert(c.config.policy.kind);
  }
  CHECK(kinds.size() == 3);
  // Policies share the environment of a (lambda, replicate) pair.
  CHECK(fig4a[0].config.seed == fig4a[1].config.seed);
  CHECK(fig4a[1].config.seed == fig4a[2].config.seed);

  CHECK(expand_preset("fig4b", {})[0].config.arrivals.lambda == 0.12);
  CHECK(expand_preset("fig5a", {})[0].config.delta.kind == DeltaSchedule::Kind::TimeVarying);
  CHECK(expand_preset("adaptive_varying", {})[0].config.arrivals.kind ==
        ArrivalModel::Kind::AdaptivePoisson);

  const auto sweep = expand_preset("sweep_logqt", {});
  CHECK(sweep.size() == 40);
  CHECK(sweep.front().config.horizon == 1'500'000);
  CHECK(sweep.front().config.arrivals.lambda == 0.03);
  CHECK(sweep.back().config.arrivals.lambda == 0.22);
  std::set<std::string> ids;
  for (const auto& c : sweep) ids.insert(c.id);
  CHECK(ids.size() == 40);

  Overrides o;
  o.horizon = 5000;
  o.seeds = 4;
  const auto reps = expand_preset("fig5b", o);
  CHECK(reps.size() == 12);
  std::set<std::uint64_t> seeds;
  for (const auto& c : reps) {
    CHECK(c.config.horizon == 5000);
    seeds.insert(c.config.seed);
  }
  CHECK(seeds.size() == 4);
  CHECK(expand_preset("fig5b", o)[5].config.seed == reps[5].config.seed);
  CHECK(expand_preset("fig4b", o)[0].config.seed != reps[0].config.seed);

  CHECK_THROWS_AS(expand_preset("fig7", {}), std::invalid_argument);
  CHECK_THROWS_AS(expand_preset("custom", {}), std::invalid_argument);
  Overrides zero;
  zero.horizon = 0;
  CHECK_THROWS_AS(expand_preset("fig4a", zero), std::invalid_argument);
}

TEST_CASE("custom preset passes the config through") {
  const auto c = parse_config("grid = [2, 2]\nhorizon = 1000\nseed = 9\n[arrivals]\nlambda = 0.1\n");
  const auto cells = expand_preset("custom", {}, c);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].config.horizon == 1000);
  CHECK(cells[0].config.seed == 9);
  CHECK(config_hash(cells[0].config) == config_hash(c));
}

TEST_CASE("running an experiment writes every listed file") {
  const auto dir = scratch("run");
  Overrides o;
  o.horizon = 10'000;
  const auto cells = expand_preset("fig4a", o);
  const auto m = run_experiment(cells, 2, dir);
  CHECK(m.failures() == 0);
  REQUIRE(m.cells.size() == 3);
  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(dir)) csvs += e.path().extension() == ".csv";
  CHECK(csvs == 4);  // three cells and the summary
  CHECK(fs::exists(dir / "manifest.json"));
  for (const auto& c : m.cells) {
    CHECK(fs::exists(dir / c.csv));
    const auto totals = read_csv_totals(dir / c.csv);
    CHECK(totals.q_T == c.q_T);
    CHECK(totals.horizon == 10'000);
    CHECK(totals.config_hash == c.config_hash);
    CHECK(totals.seed == c.seed);
  }

  const auto again = scratch("run_again");
  run_experiment(cells, 1, again);
  for (const auto& c : m.cells) CHECK(slurp(dir / c.csv) == slurp(again / c.csv));
  CHECK(slurp(dir / "summary.csv") == slurp(again / "summary.csv"));

  const auto loaded = load_manifest(dir / "manifest.json");
  REQUIRE(loaded.cells.size() == 3);
  CHECK(loaded.cells[1].id == m.cells[1].id);
  const auto rows = summarize(loaded);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i].seeds == 1);
    CHECK(rows[i].q_T.std == 0.0);
    CHECK(rows[i].q_T.mean == m.cells[i].q_T);
    CHECK(rows[i].log_mean_q_T_over_T == doctest::Approx(std::log(m.cells[i].q_T / 10'000)));
  }
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("an empty experiment") {
  const auto dir = scratch("empty");
  const auto m = run_experiment({}, 4, dir);
  CHECK(m.cells.empty());
  CHECK(m.failures() == 0);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(summarize(load_manifest(dir / "manifest.json")).empty());
  fs::remove_all(dir);
}

TEST_CASE("failing cells are reported") {
  const auto dir = scratch("fail");
  Cell bad;
  bad.id = "broken";
  bad.preset = "custom";
  bad.config.topology = std::make_shared<const NetworkTopology>(build_grid(2, 2));
  bad.config.horizon = 0;
  const auto m = run_experiment({bad}, 1, dir);
  CHECK(m.failures() == 1);
  CHECK_FALSE(m.cells[0].error.empty());
  CHECK(load_manifest(dir / "manifest.json").cells[0].ok == false);
  fs::remove_all(dir);
}

TEST_CASE("summaries are recomputed from the raw files") {
  const auto dir = scratch("summary");
  fs::create_directories(dir);
  RunManifest m;
  m.out_dir = dir;
  auto add = [&](const std::string& id, const std::string& lambda, std::size_t rep, double q_T) {
    write_file(dir / (id + ".csv"), "# config_hash=0123456789abcdef seed=" + std::to_string(rep) +
                                        "\nt,total_backlog\n0,0\n50,3\n100," + format_number(q_T) + "\n");
    CellResult c;
    c.id = id;
    c.preset = "p";
    c.policy = "mw_ucb";
    c.lambda = lambda;
    c.replicate = rep;
    c.horizon = 100;
    c.csv = id + ".csv";
    c.ok = true;
    m.cells.push_back(c);
  };
  add("a0", "0.1", 0, 10.0);
  add("a1", "0.1", 1, 20.0);
  add("z0", "0", 0, 0.0);
  write_manifest(m, dir / "manifest.json");
  const auto rows = summarize(load_manifest(dir / "manifest.json"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].seeds == 2);
  CHECK(rows[0].q_T_over_T.mean == doctest::Approx(0.15));
  CHECK(rows[0].q_T.mean == doctest::Approx(15.0));
  CHECK(rows[0].q_T.std == doctest::Approx(std::sqrt(50.0)));
  CHECK(rows[0].log_mean_q_T_over_T == doctest::Approx(std::log(0.15)));
  CHECK(rows[1].q_T_over_T.mean == 0.0);
  CHECK(std::isinf(rows[1].log_mean_q_T_over_T));
  CHECK(rows[1].log_mean_q_T_over_T < 0);
  CHECK(rows[1].q_T.std == 0.0);
  std::ostringstream table;
  write_summary_table(table, rows);
  CHECK(table.str().find(",-inf,") != std::string::npos);

  write_file(dir / "a1.csv", "t,total_backlog\n100,oops\n");
  CHECK_THROWS_AS(summarize(load_manifest(dir / "manifest.json")), std::runtime_error);
  write_file(dir / "a1.csv", "# config_hash=x seed=1\nt,total_backlog\n100,oops\n");
  CHECK_THROWS_AS(summarize(load_manifest(dir / "manifest.json")), std::runtime_error);
  fs::remove(dir / "a1.csv");
  CHECK_THROWS_AS(summarize(load_manifest(dir / "manifest.json")), std::runtime_error);
  write_file(dir / "manifest.json", "{not json");
  CHECK_THROWS_AS(load_manifest(dir / "manifest.json"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("mean and sample deviation") {
  CHECK(mean_std({}).mean == 0.0);
  CHECK(mean_std({4.0}).std == 0.0);
  const auto s = mean_std({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(format_number(-INFINITY) == "-inf");
}

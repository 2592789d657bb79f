#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "mwucb/engine.hpp"
#include "mwucb/experiment.hpp"
#include "mwucb/selftest.hpp"

namespace py = pybind11;
using namespace mwucb;

namespace {

std::vector<int> bits(const ActivationVector& x) {
  return {x.bits().begin(), x.bits().end()};
}

ActivationVector from_bits(const std::vector<int>& b) {
  std::vector<std::uint8_t> v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) v[i] = b[i] != 0;
  return ActivationVector(std::move(v));
}

InterferenceModel model_from(const std::optional<std::vector<std::pair<LinkId, LinkId>>>& conflicts) {
  return conflicts ? InterferenceModel::conflict_graph(*conflicts) : InterferenceModel::node_exclusive();
}

py::dict to_dict(const MetricsLog& log) {
  py::list t, backlog, frame, frame_regret, variation, frames;
  for (const auto& s : log.samples) {
    t.append(s.t);
    backlog.append(s.total_backlog);
    frame.append(s.frame);
    frame_regret.append(s.frame_regret);
    variation.append(s.variation);
  }
  for (const auto& f : log.frames)
    frames.append(py::dict(py::arg("index") = f.index, py::arg("start") = f.start,
                           py::arg("length") = f.length, py::arg("regret") = f.regret));
  py::dict d;
  d["t"] = t;
  d["total_backlog"] = backlog;
  d["frame"] = frame;
  d["frame_regret"] = frame_regret;
  d["variation_trace"] = variation;
  d["frames"] = frames;
  d["q_T"] = log.q_T;
  d["q_T_over_T"] = log.q_T_over_T();
  d["horizon"] = log.horizon;
  d["frame_length"] = log.frame_length;
  d["variation"] = log.variation;
  d["config_hash"] = log.config_hash;
  d["seed"] = log.seed;
  d["has_regret"] = log.has_regret;
  return d;
}

Overrides overrides(std::optional<std::size_t> horizon, std::optional<std::size_t> seeds,
                    std::optional<std::uint64_t> base_seed, bool regret) {
  Overrides o;
  o.horizon = horizon;
  o.seeds = seeds;
  o.base_seed = base_seed;
  o.regret = regret;
  return o;
}

}  // namespace

PYBIND11_MODULE(_mwucb, m) {
  m.doc() = "MW-UCB scheduling simulator";
  m.attr("__version__") = kToolVersion;

  py::class_<NetworkTopology, std::shared_ptr<NetworkTopology>>(m, "Topology")
      .def(py::init([](std::size_t nodes, const std::vector<std::pair<NodeId, NodeId>>& links) {
             std::vector<Link> l;
             for (auto [a, b] : links) l.push_back({a, b});
             return std::make_shared<NetworkTopology>(nodes, std::move(l));
           }),
           py::arg("nodes"), py::arg("links"))
      .def_static("grid", [](std::size_t r, std::size_t c) {
        return std::make_shared<NetworkTopology>(build_grid(r, c));
      })
      .def_property_readonly("node_count", &NetworkTopology::node_count)
      .def_property_readonly("link_count", &NetworkTopology::link_count)
      .def_property_readonly("links", [](const NetworkTopology& t) {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (const auto& l : t.links()) out.emplace_back(l.tail, l.head);
        return out;
      });

  m.def(
      "max_weight_activation",
      [](const NetworkTopology& t, const std::vector<double>& w,
         const std::optional<std::vector<std::pair<LinkId, LinkId>>>& conflicts) {
        return bits(max_weight_activation(w, model_from(conflicts), t));
      },
      py::arg("topology"), py::arg("weights"), py::arg("conflicts") = py::none(),
      "Exact max-weight admissible activation as a 0/1 list.");
  m.def(
      "enumerate_activations",
      [](const NetworkTopology& t, const std::optional<std::vector<std::pair<LinkId, LinkId>>>& conflicts) {
        std::vector<std::vector<int>> out;
        for (const auto& x : enumerate_activations(model_from(conflicts), t)) out.push_back(bits(x));
        return out;
      },
      py::arg("topology"), py::arg("conflicts") = py::none());
  m.def(
      "is_admissible",
      [](const NetworkTopology& t, const std::vector<int>& x,
         const std::optional<std::vector<std::pair<LinkId, LinkId>>>& conflicts) {
        return is_admissible(model_from(conflicts), from_bits(x), t);
      },
      py::arg("topology"), py::arg("x"), py::arg("conflicts") = py::none());

  m.def(
      "default_hyperparams",
      [](std::size_t horizon, double alpha) {
        const auto h = default_hyperparams(horizon, alpha);
        return std::make_pair(h.tau, h.window);
      },
      py::arg("horizon"), py::arg("alpha") = 0.5, "(tau, window) for a horizon.");

  py::class_<SimConfig>(m, "Config")
      .def_property(
          "horizon", [](const SimConfig& c) { return c.horizon; },
          [](SimConfig& c, std::size_t v) { c.horizon = v; })
      .def_property(
          "seed", [](const SimConfig& c) { return c.seed; },
          [](SimConfig& c, std::uint64_t v) { c.seed = v; })
      .def_property(
          "policy", [](const SimConfig& c) { return to_string(c.policy.kind); },
          [](SimConfig& c, const std::string& v) { c.policy.kind = parse_policy_kind(v); })
      .def_property(
          "tau", [](const SimConfig& c) { return c.policy.tau; },
          [](SimConfig& c, std::optional<std::size_t> v) { c.policy.tau = v; })
      .def_property(
          "window", [](const SimConfig& c) { return c.policy.window; },
          [](SimConfig& c, std::optional<std::size_t> v) { c.policy.window = v; })
      .def_property(
          "alpha", [](const SimConfig& c) { return c.policy.alpha; },
          [](SimConfig& c, double v) { c.policy.alpha = v; })
      .def_property(
          "record_regret", [](const SimConfig& c) { return c.record_regret; },
          [](SimConfig& c, bool v) { c.record_regret = v; })
      .def_property_readonly("topology", [](const SimConfig& c) {
        return std::make_shared<NetworkTopology>(*c.topology);
      })
      .def("canonical", &canonical_string)
      .def("hash", &config_hash)
      .def("copy", [](const SimConfig& c) { return SimConfig(c); })
      .def("validate", &SimConfig::validate);

  m.def("parse_config", &parse_config, py::arg("text"), "Config from TOML text.");
  m.def("load_config", &load_config, py::arg("path"));

  m.def(
      "run",
      [](const SimConfig& c) {
        MetricsLog log;
        {
          py::gil_scoped_release release;
          log = run(c);
        }
        return to_dict(log);
      },
      py::arg("config"),
      "Runs one simulation and returns its metrics.");
  m.def(
      "coupled_run",
      [](const SimConfig& c, double r) {
        CoupledRun res;
        {
          py::gil_scoped_release release;
          res = coupled_run(c, r);
        }
        py::list violations;
        for (const auto& v : res.violations) violations.append(v.describe());
        py::dict d;
        d["original"] = to_dict(res.original);
        d["imaginary"] = to_dict(res.imaginary);
        d["slots_checked"] = res.slots_checked;
        d["lipschitz_checked"] = res.lipschitz_checked;
        d["violation_count"] = res.violation_count;
        d["violations"] = violations;
        d["shed_total"] = res.shed_total;
        return d;
      },
      py::arg("config"), py::arg("keep_probability"));

  m.def("preset_names", &preset_names);
  m.def(
      "expand_preset",
      [](const std::string& name, std::optional<std::size_t> horizon, std::optional<std::size_t> seeds,
         std::optional<std::uint64_t> base_seed, bool regret) {
        std::vector<std::pair<std::string, SimConfig>> out;
        for (auto& cell : expand_preset(name, overrides(horizon, seeds, base_seed, regret)))
          out.emplace_back(cell.id, std::move(cell.config));
        return out;
      },
      py::arg("name"), py::arg("horizon") = py::none(), py::arg("seeds") = py::none(),
      py::arg("base_seed") = py::none(), py::arg("regret") = false, "[(cell id, Config)].");
  m.def(
      "run_experiment",
      [](const std::vector<std::string>& presets, const std::filesystem::path& out_dir,
         std::size_t parallel, std::optional<std::size_t> horizon, std::optional<std::size_t> seeds,
         std::optional<std::uint64_t> base_seed, bool regret) {
        std::vector<Cell> cells;
        for (const auto& p : presets)
          for (auto& c : expand_preset(p, overrides(horizon, seeds, base_seed, regret)))
            cells.push_back(std::move(c));
        RunManifest manifest;
        {
          py::gil_scoped_release release;
          manifest = run_experiment(cells, parallel, out_dir);
        }
        py::list rows;
        for (const auto& c : manifest.cells)
          rows.append(py::dict(py::arg("id") = c.id, py::arg("policy") = c.policy,
                               py::arg("lambda") = c.lambda, py::arg("seed") = c.seed,
                               py::arg("ok") = c.ok, py::arg("error") = c.error,
                               py::arg("q_T") = c.q_T, py::arg("csv") = c.csv));
        return py::dict(py::arg("out_dir") = manifest.out_dir, py::arg("cells") = rows,
                        py::arg("failures") = manifest.failures(),
                        py::arg("manifest") = manifest.out_dir / "manifest.json");
      },
      py::arg("presets"), py::arg("out_dir"), py::arg("parallel") = 1, py::arg("horizon") = py::none(),
      py::arg("seeds") = py::none(), py::arg("base_seed") = py::none(), py::arg("regret") = false);
  m.def(
      "summarize",
      [](const std::filesystem::path& manifest_path) {
        std::ostringstream out;
        write_summary_table(out, summarize(load_manifest(manifest_path)));
        return out.str();
      },
      py::arg("manifest"), "Summary table (CSV text) of a finished run.");
  m.def("selftest", [] {
    std::ostringstream out;
    const bool ok = run_selftest(out);
    return std::make_pair(ok, out.str());
  });
}

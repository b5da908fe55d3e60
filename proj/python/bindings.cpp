#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rjpois/chain.hpp"
#include "rjpois/cli.hpp"
#include "rjpois/data.hpp"
#include "rjpois/diagnostics.hpp"
#include "rjpois/io.hpp"
#include "rjpois/model.hpp"
#include "rjpois/rjmoves.hpp"
#include "rjpois/summary.hpp"

namespace py = pybind11;
using namespace rjpois;

namespace {

py::dict record_dict(const TraceRecord& r) {
  py::dict d;
  d["sweep"] = r.sweep;
  d["k"] = r.k;
  d["move"] = std::string(to_string(r.move));
  d["accepted"] = r.accepted;
  d["loglik"] = r.loglik;
  d["rates"] = r.rates;
  d["weights"] = r.weights;
  d["alloc"] = r.alloc;
  return d;
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli_main(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_rjpois, m) {
  m.doc() = "Reversible jump MCMC for exposure-weighted Poisson mixtures";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<InsufficientSamples>(m, "InsufficientSamples", PyExc_RuntimeError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<std::vector<std::int64_t>, std::vector<double>, std::vector<std::string>>(),
           py::arg("counts"), py::arg("exposures"), py::arg("class_ids") = std::vector<std::string>{})
      .def("__len__", &Dataset::size)
      .def_property_readonly("counts", [](const Dataset& d) {
        return std::vector<std::int64_t>(d.counts().begin(), d.counts().end());
      })
      .def_property_readonly("exposures", [](const Dataset& d) {
        return std::vector<double>(d.exposures().begin(), d.exposures().end());
      })
      .def_property_readonly("class_ids", [](const Dataset& d) {
        return std::vector<std::string>(d.class_ids().begin(), d.class_ids().end());
      })
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  m.def("load_csv", [](const std::string& path) { return load_csv(path); }, py::arg("path"));
  m.def(
      "write_csv", [](const Dataset& data, const std::string& path) { write_csv(data, path); },
      py::arg("data"), py::arg("path"));

  m.def(
      "simulate",
      [](std::vector<double> rates, std::vector<double> weights, std::size_t n,
         std::uint64_t seed, double exposure_lo, double exposure_hi) {
        SyntheticSpec spec;
        spec.rates = std::move(rates);
        spec.weights = std::move(weights);
        spec.n = n;
        spec.seed = seed;
        spec.exposure = UniformExposures{exposure_lo, exposure_hi};
        auto sim = simulate(spec);
        return py::make_tuple(std::move(sim.data), std::move(sim.allocations));
      },
      py::arg("rates"), py::arg("weights"), py::arg("n") = 72, py::arg("seed") = 1,
      py::arg("exposure_lo") = 5.0, py::arg("exposure_hi") = 50.0,
      "Returns (dataset, true 0-based allocations).");

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init<>())
      .def_readwrite("alpha", &Hyperparams::alpha)
      .def_readwrite("beta", &Hyperparams::beta)
      .def_readwrite("delta", &Hyperparams::delta)
      .def_readwrite("k_max", &Hyperparams::k_max)
      .def_readwrite("move_mix", &Hyperparams::move_mix);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("sweeps", &RunConfig::sweeps)
      .def_readwrite("burn_in", &RunConfig::burn_in)
      .def_readwrite("thin", &RunConfig::thin)
      .def_readwrite("n_chains", &RunConfig::n_chains)
      .def_readwrite("seeds", &RunConfig::seeds)
      .def_readwrite("base_seed", &RunConfig::base_seed)
      .def_readwrite("init_k", &RunConfig::init_k)
      .def_readwrite("store_alloc", &RunConfig::store_alloc)
      .def_property(
          "scheme", [](const RunConfig& c) { return std::string(to_string(c.scheme)); },
          [](RunConfig& c, const std::string& s) { c.scheme = scheme_from_string(s); });

  py::class_<ChainTrace>(m, "ChainTrace")
      .def_readonly("chain_index", &ChainTrace::chain_index)
      .def_readonly("seed", &ChainTrace::seed)
      .def("__len__", [](const ChainTrace& t) { return t.records.size(); })
      .def("record", [](const ChainTrace& t, std::size_t i) { return record_dict(t.records.at(i)); })
      .def_property_readonly("k", [](const ChainTrace& t) {
        std::vector<int> ks;
        for (const auto& r : t.records) ks.push_back(r.k);
        return ks;
      })
      .def_property_readonly("tally", [](const ChainTrace& t) {
        py::dict d;
        for (auto kind : {MoveKind::split, MoveKind::merge, MoveKind::birth, MoveKind::death}) {
          d[py::str(std::string(to_string(kind)))] =
              py::make_tuple(t.tally.attempts(kind), t.tally.accepts(kind));
        }
        return d;
      })
      .def("__eq__", [](const ChainTrace& a, const ChainTrace& b) { return a == b; });

  m.def(
      "run",
      [](const Dataset& data, const RunConfig& config, const Hyperparams& hyper, double up_prob,
         bool parallel) {
        const auto probs = MoveProbs::standard(hyper.k_max, up_prob);
        py::gil_scoped_release release;
        return run_multichain(config, data, hyper, probs, parallel);
      },
      py::arg("data"), py::arg("config") = RunConfig{}, py::arg("hyper") = Hyperparams{},
      py::arg("up_prob") = 0.5, py::arg("parallel") = true);

  m.def("read_traces", [](const std::string& dir) { return read_traces(dir); }, py::arg("dir"));

  m.def("model_probabilities", [](const std::vector<ChainTrace>& traces) {
    return model_probabilities(traces);
  });

  m.def(
      "conditional_estimates",
      [](const std::vector<ChainTrace>& traces, int k, double level) {
        const auto est = conditional_estimates(traces, k, level);
        py::dict out;
        for (const auto& p : est.parameters) {
          out[py::str(p.name)] = py::make_tuple(p.mean, p.hpd.lo, p.hpd.hi);
        }
        return out;
      },
      py::arg("traces"), py::arg("k"), py::arg("level") = 0.95,
      "Maps parameter name to (mean, hpd_lo, hpd_hi).");

  m.def(
      "hpd_interval",
      [](std::vector<double> samples, double level) {
        const auto h = hpd_interval(std::move(samples), level);
        return py::make_tuple(h.lo, h.hi);
      },
      py::arg("samples"), py::arg("level") = 0.95);

  m.def("acceptance_rates", [](const std::vector<ChainTrace>& traces) {
    const auto r = acceptance_rates(traces);
    py::dict d;
    d["birth_death"] = r.birth_death;
    d["split_merge"] = r.split_merge;
    d["combined"] = r.combined;
    return d;
  });

  m.def("summary_json", [](const std::vector<ChainTrace>& traces, double level) {
    return summary_json(traces, level).dump(2) + "\n";
  }, py::arg("traces"), py::arg("level") = 0.95);

  m.def("cli", &cli, py::arg("args"),
        "Runs a command-line invocation in process; returns (exit code, stdout, stderr).");
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "reuse_assort/bench.hpp"
#include "reuse_assort/dp.hpp"
#include "reuse_assort/errors.hpp"
#include "reuse_assort/experiment.hpp"
#include "reuse_assort/instance_io.hpp"
#include "reuse_assort/lp.hpp"
#include "reuse_assort/policies.hpp"
#include "reuse_assort/sim.hpp"

namespace py = pybind11;
namespace ra = reuse_assort;

namespace {

// Instance plus its LP and value tables, built once and shared by policies.
class Prepared {
 public:
  explicit Prepared(const ra::Instance& inst) {
    in_.instance = std::make_shared<const ra::Instance>(inst);
    in_.lp = std::make_shared<const ra::LpSolution>(ra::solve_expected_lp(inst));
    in_.tables = std::make_shared<const ra::ValueTables>(ra::build_value_tables(inst, *in_.lp));
  }

  double lp_objective() const { return in_.lp->objective; }
  const ra::LpSolution& lp() const { return *in_.lp; }

  ra::MCStats evaluate(const std::string& policy, int n_runs, std::uint64_t seed,
                       std::optional<double> gamma, int switch_period, int mc_iters,
                       int threads) const {
    ra::PolicyConfig cfg;
    cfg.gamma = gamma;
    cfg.switch_period = switch_period;
    cfg.mc_iters = mc_iters;
    const auto p = ra::prepare(ra::parse_policy_kind(policy), in_, cfg);
    ra::MCStats st;
    {
      py::gil_scoped_release release;
      st = ra::monte_carlo(*in_.instance, *p, n_runs, seed, threads, true);
    }
    return st;
  }

 private:
  ra::PreparedInputs in_;
};

py::list report_rows(const ra::Report& r) {
  py::list rows;
  for (const auto& c : r.checks) rows.append(py::make_tuple(c.name, c.passed, c.detail));
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Assortment policies for reusable products with finite inventory.";

  py::register_exception<ra::Error>(m, "ReuseAssortError", PyExc_RuntimeError);

  py::class_<ra::Instance>(m, "Instance")
      .def_static("from_json", [](const std::string& text) { return ra::instance_from_json(text); },
                  py::arg("text"))
      .def_static("load", [](const std::string& path) { return ra::load_instance(path); },
                  py::arg("path"))
      .def("to_json", [](const ra::Instance& i) { return ra::instance_to_json(i); })
      .def_property_readonly("horizon", &ra::Instance::horizon)
      .def_property_readonly("num_products", &ra::Instance::num_products)
      .def_property_readonly("num_types", &ra::Instance::num_types)
      .def_property_readonly("inventories", &ra::Instance::inventories)
      .def("check", [](const ra::Instance& i) {
        py::list rows;
        for (const auto& c : i.check()) rows.append(py::make_tuple(c.name, c.passed, c.detail));
        return rows;
      });

  py::class_<ra::LpSolution>(m, "LpSolution")
      .def_readonly("objective", &ra::LpSolution::objective)
      .def_readonly("iterations", &ra::LpSolution::iterations)
      .def_readonly("inventory_rows", &ra::LpSolution::inventory_rows)
      .def_readonly("theta", &ra::LpSolution::theta)
      .def_readonly("lambda_", &ra::LpSolution::lambda)
      .def("dual_objective", &ra::LpSolution::dual_objective, py::arg("instance"))
      .def("columns", [](const ra::LpSolution& s) {
        py::list cols;
        for (const auto& c : s.columns()) cols.append(py::make_tuple(c.t, c.type, c.set.to_vector(), c.y));
        return cols;
      })
      .def("to_json", [](const ra::LpSolution& s) { return ra::lp_solution_to_json(s); });

  py::class_<ra::MCStats>(m, "MCStats")
      .def_readonly("policy", &ra::MCStats::policy)
      .def_readonly("revenues", &ra::MCStats::revenues)
      .def_readonly("mean", &ra::MCStats::mean)
      .def_readonly("se", &ra::MCStats::se)
      .def_readonly("median", &ra::MCStats::median)
      .def_readonly("q1", &ra::MCStats::q1)
      .def_readonly("q3", &ra::MCStats::q3)
      .def_readonly("min", &ra::MCStats::min)
      .def_readonly("max", &ra::MCStats::max)
      .def_readonly("infeasible_offers", &ra::MCStats::infeasible_offers)
      .def_readonly("inconsistent_states", &ra::MCStats::inconsistent_states);

  py::class_<Prepared>(m, "Prepared")
      .def(py::init<const ra::Instance&>(), py::arg("instance"))
      .def_property_readonly("lp_objective", &Prepared::lp_objective)
      .def_property_readonly("lp", &Prepared::lp, py::return_value_policy::reference_internal)
      .def("evaluate", &Prepared::evaluate, py::arg("policy"), py::arg("n_runs"),
           py::arg("seed") = 1, py::arg("gamma") = py::none(), py::arg("switch_period") = 10,
           py::arg("mc_iters") = 20, py::arg("threads") = 0);

  m.def("gen_ec8",
        [](double kappa, const std::string& scenario, std::uint64_t seed, int horizon,
           std::optional<int> inventory) {
          ra::Ec8Options opts;
          opts.horizon = horizon;
          opts.inventory = inventory;
          return ra::gen_ec8(kappa, ra::parse_scenario(scenario), seed, opts);
        },
        py::arg("kappa"), py::arg("scenario"), py::arg("seed"), py::arg("horizon") = 300,
        py::arg("inventory") = py::none());
  m.def("gen_footnote9", &ra::gen_footnote9, py::arg("eps"));
  m.def("gen_ec21", &ra::gen_ec21, py::arg("horizon"));

  m.def("solve_expected_lp",
        [](const ra::Instance& inst) {
          py::gil_scoped_release release;
          return ra::solve_expected_lp(inst);
        },
        py::arg("instance"));
  m.def("full_enumeration_lp", &ra::full_enumeration_lp, py::arg("instance"));
  m.def("find_solution_violation", &ra::find_solution_violation, py::arg("instance"),
        py::arg("solution"));

  m.def("epsilon_star", &ra::epsilon_star, py::arg("c"),
        "Returns (epsilon*, gamma*) for inventory level c.");
  m.def("ratio_curve", &ra::emit_ratio_curve, py::arg("lo"), py::arg("hi"), py::arg("step"));
  m.def("policy_names", [] {
    std::vector<std::string> names;
    for (auto k : {ra::PolicyKind::kSimRandom, ra::PolicyKind::kSimInfusion,
                   ra::PolicyKind::kSimOptDis, ra::PolicyKind::kHybridI, ra::PolicyKind::kHybridII,
                   ra::PolicyKind::kIB, ra::PolicyKind::kGR}) {
      names.push_back(ra::policy_name(k));
    }
    return names;
  });

  m.def("run_experiment",
        [](const std::string& config_json) {
          const auto cfg = ra::parse_experiment_config(config_json);
          ra::ExperimentResult res;
          {
            py::gil_scoped_release release;
            res = ra::run_experiment(cfg);
          }
          py::dict out;
          out["summary_csv"] = res.summary_csv;
          out["per_run_csv"] = res.per_run_csv;
          out["failures"] = res.failures;
          return out;
        },
        py::arg("config_json"));
  m.def("validate_instance_file", [](const std::string& path) {
    return report_rows(ra::validate_instance_file(path));
  }, py::arg("path"));
  m.def("run_canonical_suite", [] { return report_rows(ra::run_canonical_suite()); });
}

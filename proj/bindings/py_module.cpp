#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "meanreflect/errors.hpp"
#include "meanreflect/grid_path.hpp"
#include "meanreflect/mean_map.hpp"
#include "meanreflect/mean_sp.hpp"
#include "meanreflect/sde.hpp"
#include "meanreflect/skorokhod.hpp"

namespace py = pybind11;
using namespace meanreflect;

namespace {

GridPath path_from_values(std::vector<double> points, std::vector<double> values) {
    auto grid = std::make_shared<TimeGrid>(std::move(points));
    return GridPath(std::move(grid), std::move(values));
}

BarrierPair make_barriers(std::optional<GridPath> lower, std::optional<GridPath> upper) {
    BarrierPair b{std::move(lower), std::move(upper)};
    b.validate();
    return b;
}

ConstraintFunction h_by_name(const std::string& name, const py::dict& params) {
    auto num = [&](const char* key, double fallback) {
        return params.contains(key) ? params[key].cast<double>() : fallback;
    };
    if (name == "identity") return make_identity();
    if (name == "affine") return make_affine(num("a", 1.0), num("b", 0.0));
    if (name == "soft") return make_soft(num("beta", 0.5));
    if (name == "concave") return make_concave(num("beta", 0.5));
    if (name == "time_tilt") return make_time_tilt(num("gamma", 0.5), num("t_max", 10.0));
    throw InvalidArgumentError("unknown constraint function '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_meanreflect, m) {
    m.doc() = "Reflection problems and SDEs with mean constraints";

    py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError",
                                                 PyExc_ValueError);
    py::register_exception<ConstraintViolationError>(m, "ConstraintViolationError",
                                                     PyExc_ValueError);
    py::register_exception<NumericalFailureError>(m, "NumericalFailureError",
                                                  PyExc_RuntimeError);

    m.def("uniform_grid_points",
          [](long n, double q) { return TimeGrid::uniform(n, q)->points(); },
          py::arg("n"), py::arg("q"));

    py::class_<GridPath>(m, "GridPath")
        .def(py::init(&path_from_values), py::arg("points"), py::arg("values"))
        .def_property_readonly("values",
                               [](const GridPath& p) { return p.values(); })
        .def_property_readonly(
            "points", [](const GridPath& p) { return p.grid()->points(); })
        .def("__call__", [](const GridPath& p, double t) { return p(t); });

    py::class_<BarrierPair>(m, "BarrierPair")
        .def(py::init(&make_barriers), py::arg("lower") = std::nullopt,
             py::arg("upper") = std::nullopt)
        .def_readonly("lower", &BarrierPair::lower)
        .def_readonly("upper", &BarrierPair::upper);

    m.def("discretize",
          [](const GridPath& p, long n, double q) { return discretize(p, n, q); },
          py::arg("path"), py::arg("n"), py::arg("q"));
    m.def("total_variation", &total_variation, py::arg("path"), py::arg("q"));
    m.def("count_oscillations", &count_oscillations, py::arg("path"), py::arg("eta"),
          py::arg("q"));

    py::class_<SkorokhodSolution>(m, "SkorokhodSolution")
        .def_readonly("x", &SkorokhodSolution::x)
        .def_readonly("k", &SkorokhodSolution::k);

    m.def("solve_two_barrier", &solve_two_barrier, py::arg("y"), py::arg("barriers"));
    m.def("solve_two_barrier_explicit", &solve_two_barrier_explicit, py::arg("y"),
          py::arg("barriers"));
    m.def("solve_lower", &solve_lower, py::arg("y"), py::arg("l"));
    m.def("solve_upper", &solve_upper, py::arg("y"), py::arg("u"));
    m.def("variation_bound", &variation_bound, py::arg("y"), py::arg("l"), py::arg("u"),
          py::arg("eta"), py::arg("q"));

    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("lhs_k", &StabilityReport::lhs_k)
        .def_readonly("lhs_x", &StabilityReport::lhs_x)
        .def_readonly("rhs_k", &StabilityReport::rhs_k)
        .def_readonly("rhs_x", &StabilityReport::rhs_x)
        .def_readonly("k_bound_holds", &StabilityReport::k_bound_holds)
        .def_readonly("x_bound_holds", &StabilityReport::x_bound_holds);
    m.def("stability_bound_check", &stability_bound_check, py::arg("y1"), py::arg("y2"),
          py::arg("b1"), py::arg("b2"), py::arg("q"));

    py::class_<ConstraintFunction>(m, "ConstraintFunction")
        .def(py::init(&h_by_name), py::arg("name"), py::arg("params") = py::dict())
        .def_readonly("name", &ConstraintFunction::name)
        .def_readonly("lower_slope", &ConstraintFunction::lower_slope)
        .def_readonly("upper_slope", &ConstraintFunction::upper_slope)
        .def_readonly("time_lipschitz", &ConstraintFunction::time_lipschitz)
        .def("__call__", [](const ConstraintFunction& h, double t, double x) {
            return h(t, x);
        });

    py::class_<Ensemble>(m, "Ensemble")
        .def(py::init<std::vector<double>>())
        .def_property_readonly("particles", &Ensemble::particles)
        .def_property_readonly("mean", &Ensemble::mean);

    py::class_<EnsemblePath>(m, "EnsemblePath")
        .def(py::init([](std::vector<double> points, std::vector<Ensemble> slices) {
                 EnsemblePath law{std::make_shared<TimeGrid>(std::move(points)),
                                  std::move(slices)};
                 law.validate();
                 return law;
             }),
             py::arg("points"), py::arg("slices"))
        .def_readonly("slices", &EnsemblePath::slices)
        .def("mean_path", &EnsemblePath::mean_path);

    m.def("mean_level", &mean_level, py::arg("h"), py::arg("t"), py::arg("z"),
          py::arg("ensemble"));
    m.def("mean_level_inverse", &mean_level_inverse, py::arg("h"), py::arg("t"),
          py::arg("target"), py::arg("ensemble"), py::arg("tol") = 1e-10);
    m.def("transform_barriers", &transform_barriers, py::arg("h"), py::arg("barriers"),
          py::arg("law"), py::arg("tol") = 1e-10);

    py::class_<MeanProblem>(m, "MeanProblem")
        .def(py::init([](EnsemblePath law, ConstraintFunction h, BarrierPair barriers,
                         double tol) {
                 MeanProblem p{std::move(law), std::move(h), std::move(barriers), tol};
                 p.validate();
                 return p;
             }),
             py::arg("law"), py::arg("h"), py::arg("barriers"), py::arg("tol") = 1e-10);

    py::class_<MeanSolution>(m, "MeanSolution")
        .def_readonly("y", &MeanSolution::y)
        .def_readonly("k", &MeanSolution::k)
        .def_readonly("eh", &MeanSolution::eh)
        .def_readonly("x_mean", &MeanSolution::x_mean)
        .def_readonly("x_std", &MeanSolution::x_std)
        .def_readonly("transformed", &MeanSolution::transformed);

    m.def("solve_mean_two_barrier", &solve_mean_two_barrier, py::arg("problem"));
    m.def("solve_mean_lower", &solve_mean_lower, py::arg("problem"));
    m.def("solve_mean_upper", &solve_mean_upper, py::arg("problem"));
    m.def("solve_discretized", &solve_discretized, py::arg("problem"));
    m.def("mean_variation_bound", &mean_variation_bound, py::arg("solution"),
          py::arg("eta"), py::arg("q"));

    py::class_<MinimalityReport>(m, "MinimalityReport")
        .def_readonly("all_ok", &MinimalityReport::all_ok)
        .def_readonly("integral_eps", &MinimalityReport::integral_eps);
    m.def("verify_minimality", &verify_minimality, py::arg("solution"));

    py::class_<JumpLaw>(m, "JumpLaw")
        .def_static("constant", &JumpLaw::constant, py::arg("value"))
        .def_static("uniform", &JumpLaw::uniform, py::arg("lo"), py::arg("hi"));

    py::class_<CompoundPoissonSpec>(m, "CompoundPoissonSpec")
        .def(py::init([](double rate, JumpLaw law) {
                 return CompoundPoissonSpec{rate, law};
             }),
             py::arg("rate"), py::arg("law"));

    py::class_<Driver>(m, "Driver")
        .def_static("brownian", &Driver::brownian, py::arg("scale") = 1.0)
        .def_static("deterministic_clock", &Driver::deterministic_clock)
        .def_static("compensated_poisson", &Driver::compensated_poisson, py::arg("rate"),
                    py::arg("law"))
        .def_static("pii", &Driver::pii, py::arg("brownian_scale"), py::arg("clock"),
                    py::arg("cpois") = std::nullopt)
        .def("m_slope", &Driver::m_slope);

    py::class_<CoeffSpec>(m, "CoeffSpec")
        .def(py::init([](std::string kind, double a, double b) {
                 return CoeffSpec{std::move(kind), a, b};
             }),
             py::arg("kind"), py::arg("a") = 0.0, py::arg("b") = 0.0);
    m.def("make_coefficients", &make_coefficients, py::arg("f"), py::arg("g"),
          py::arg("t_max") = 10.0);
    py::class_<Coefficients>(m, "Coefficients")
        .def_readonly("growth", &Coefficients::growth)
        .def_readonly("lipschitz", &Coefficients::lipschitz);

    py::class_<X0Sampler>(m, "X0Sampler")
        .def_static("constant", &X0Sampler::constant, py::arg("value"))
        .def_static("uniform", &X0Sampler::uniform, py::arg("lo"), py::arg("hi"))
        .def_static("gaussian", &X0Sampler::gaussian, py::arg("mean"), py::arg("stddev"));

    py::class_<SimulationConfig>(m, "SimulationConfig")
        .def(py::init<>())
        .def_readwrite("x0", &SimulationConfig::x0)
        .def_readwrite("steps_per_unit", &SimulationConfig::steps_per_unit)
        .def_readwrite("horizon", &SimulationConfig::horizon)
        .def_readwrite("particles", &SimulationConfig::particles)
        .def_readwrite("seed", &SimulationConfig::seed)
        .def_readwrite("tol", &SimulationConfig::tol)
        .def_readwrite("picard_tol", &SimulationConfig::picard_tol)
        .def_readwrite("coefficients", &SimulationConfig::coefficients)
        .def_readwrite("driver", &SimulationConfig::driver)
        .def_readwrite("additive", &SimulationConfig::additive)
        .def_readwrite("h", &SimulationConfig::h)
        .def_readwrite("barriers", &SimulationConfig::barriers)
        .def_readwrite("keep_particles", &SimulationConfig::keep_particles);

    py::class_<StepDiagnostics>(m, "StepDiagnostics")
        .def_readonly("wall_seconds", &StepDiagnostics::wall_seconds);
    py::class_<SimResult>(m, "SimResult")
        .def_readonly("solution", &SimResult::solution)
        .def_readonly("diagnostics", &SimResult::diagnostics);
    m.def("euler_mean_reflected",
          [](const SimulationConfig& cfg) { return euler_mean_reflected(cfg); },
          py::arg("config"));

    py::class_<PicardIntervalLog>(m, "PicardIntervalLog")
        .def_readonly("t_begin", &PicardIntervalLog::t_begin)
        .def_readonly("t_end", &PicardIntervalLog::t_end)
        .def_readonly("iterations", &PicardIntervalLog::iterations)
        .def_readonly("max_ratio", &PicardIntervalLog::max_ratio);
    py::class_<PicardResult>(m, "PicardResult")
        .def_readonly("solution", &PicardResult::solution)
        .def_readonly("intervals", &PicardResult::intervals);
    m.def("picard_solve", &picard_solve, py::arg("config"));

    py::class_<MartingaleSupReport>(m, "MartingaleSupReport")
        .def_readonly("lhs", &MartingaleSupReport::lhs)
        .def_readonly("rhs", &MartingaleSupReport::rhs)
        .def_readonly("mc_slack", &MartingaleSupReport::mc_slack)
        .def_readonly("holds", &MartingaleSupReport::holds);
    m.def("martingale_sup_check", &martingale_sup_check, py::arg("driver"), py::arg("t"),
          py::arg("n"), py::arg("particles"), py::arg("seed"));

    py::class_<ConvergenceRow>(m, "ConvergenceRow")
        .def_readonly("n", &ConvergenceRow::n)
        .def_readonly("err_k", &ConvergenceRow::err_k)
        .def_readonly("err_x", &ConvergenceRow::err_x);
    py::class_<ConvergenceTable>(m, "ConvergenceTable")
        .def_readonly("rows", &ConvergenceTable::rows)
        .def_readonly("monotone_ok", &ConvergenceTable::monotone_ok);
    m.def("convergence_study", &convergence_study, py::arg("config"), py::arg("n_list"),
          py::arg("reference_n"));
}

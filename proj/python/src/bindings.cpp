#include "smdiff/app.hpp"
#include "smdiff/config.hpp"
#include "smdiff/errors.hpp"
#include "smdiff/transport.hpp"
#include "smdiff/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace smd;

namespace {

TransportCoefficients coefficients(const Eigen::MatrixXd& d, const Eigen::VectorXd& m, double rt, double gamma)
{
    return TransportCoefficients::create(d, m, rt, gamma);
}

py::dict study_dict(const ConvergenceStudy& s, const ManufacturedCase& mc)
{
    py::list rows;
    for (const auto& r : s.rows) {
        py::dict d;
        d["N"] = r.n;
        d["h"] = r.h;
        d["E1"] = r.e1;
        d["E2"] = r.e2;
        d["E3"] = r.e3;
        d["E4"] = r.e4;
        d["iterations"] = r.iterations;
        d["gibbs_duhem_l2"] = r.gibbs_duhem_l2;
        d["gibbs_duhem_max"] = r.gibbs_duhem_max;
        d["increments"] = r.report.increments;
        d["wall_time_s"] = r.wall_time_s;
        rows.append(d);
    }
    py::dict out;
    out["order"] = s.order;
    out["rows"] = rows;
    out["slopes"] = std::vector<double>(s.slopes.begin(), s.slopes.end());
    out["complete"] = s.complete;
    out["failure"] = s.failure;
    out["velocity_reading"] = mc.reading.name();
    out["csv"] = s.to_csv();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Steady multicomponent Stefan-Maxwell diffusion solver";

    // Exception types live for the whole interpreter session.
    static PyObject* error_type = PyErr_NewException("smdiff._core.Error", PyExc_RuntimeError, nullptr);
    static PyObject* config_type = PyErr_NewException("smdiff._core.ConfigError", error_type, nullptr);
    m.attr("Error") = py::handle(error_type);
    m.attr("ConfigError") = py::handle(config_type);

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::object exc = py::handle(config_type)(e.what());
            exc.attr("keys") = e.keys();
            PyErr_SetObject(config_type, exc.ptr());
        } catch (const InvalidArgument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const Error& e) {
            PyErr_SetString(error_type, e.what());
        }
    });

    m.def(
        "onsager_matrix",
        [](const Eigen::VectorXd& c, const Eigen::MatrixXd& d, const Eigen::VectorXd& mm, double rt) {
            const auto co = coefficients(d, mm, rt, 1.0);
            return onsager_matrix(PointState::make(c, co), co);
        },
        py::arg("c"), py::arg("diffusivity"), py::arg("molar_mass"), py::arg("rt") = 1.0,
        "Onsager transport matrix M at concentrations c.");

    m.def(
        "augmented_matrix",
        [](const Eigen::VectorXd& c, const Eigen::MatrixXd& d, const Eigen::VectorXd& mm, double rt, double gamma) {
            const auto co = coefficients(d, mm, rt, gamma);
            return augmented_matrix(PointState::make(c, co), co);
        },
        py::arg("c"), py::arg("diffusivity"), py::arg("molar_mass"), py::arg("rt") = 1.0, py::arg("gamma") = 1.0,
        "M + gamma L at concentrations c.");

    m.def(
        "spectral_report",
        [](const Eigen::VectorXd& c, const Eigen::MatrixXd& d, const Eigen::VectorXd& mm, double rt, double gamma) {
            const auto co = coefficients(d, mm, rt, gamma);
            const SpectralReport r = smd::spectral_report(PointState::make(c, co), co);
            py::dict out;
            out["onsager_eigenvalues"] = r.onsager_eigenvalues;
            out["augmented_min_eigenvalue"] = r.augmented_min_eigenvalue;
            out["coercivity_bound"] = r.coercivity_bound;
            return out;
        },
        py::arg("c"), py::arg("diffusivity"), py::arg("molar_mass"), py::arg("rt") = 1.0, py::arg("gamma") = 1.0);

    m.def(
        "check_config",
        [](const std::string& text) { return parse_config(text).experiment; }, py::arg("text"),
        "Validates a JSON configuration document and returns its experiment name.");

    m.def(
        "run_experiment",
        [](const std::string& config_path, const std::string& out, int threads, bool strict) {
            const RunConfig cfg = load_config(config_path);
            RunOptions opt;
            opt.out = out;
            opt.threads = threads;
            opt.force_strict = strict;
            py::gil_scoped_release release;
            return smd::run_experiment(cfg, opt);
        },
        py::arg("config"), py::arg("out"), py::arg("threads") = 1, py::arg("strict") = false,
        "Runs the experiment described by a configuration file and writes its artifacts into `out`.");

    m.def(
        "manufactured_convergence",
        [](const std::vector<int>& meshes, int order, double epsilon, double gamma, int threads) {
            ManufacturedCase mc;
            ConvergenceStudy s;
            {
                py::gil_scoped_release release;
                mc = build_reference_case();
                PicardSettings st;
                st.epsilon = epsilon;
                st.gamma = gamma;
                StudyOptions opt;
                opt.threads = threads;
                s = convergence_study(mc, meshes, order, st, opt);
            }
            return study_dict(s, mc);
        },
        py::arg("meshes") = std::vector<int>{8, 16, 32, 64}, py::arg("order") = 1, py::arg("epsilon") = 1e-13,
        py::arg("gamma") = 1.0, py::arg("threads") = 1,
        "Four-species manufactured convergence study on unit-square meshes.");

    m.def(
        "lung_demo",
        [](int n, double epsilon, int max_iterations) {
            DemoConfig cfg = DemoConfig::lung_air();
            cfg.n = n;
            cfg.settings.epsilon = epsilon;
            cfg.settings.max_iterations = max_iterations;
            DemoResult r;
            {
                py::gil_scoped_release release;
                r = mixed_bc_demo(cfg);
            }
            const FiniteSpace& sp = *r.spaces.concentration;
            Eigen::MatrixXd points(sp.num_nodes(), 2);
            Eigen::MatrixXd fractions(sp.num_nodes(), static_cast<Eigen::Index>(r.solution.concentrations.size()));
            for (int k = 0; k < sp.num_nodes(); ++k) points.row(k) = sp.node_point(k).transpose();
            for (std::size_t i = 0; i < r.solution.concentrations.size(); ++i) {
                fractions.col(static_cast<Eigen::Index>(i)) = r.solution.concentrations[i].coeffs;
            }
            py::dict out;
            out["report"] = r.to_json();
            out["names"] = cfg.names;
            out["points"] = points;
            out["mole_fractions"] = fractions;
            return out;
        },
        py::arg("n") = 64, py::arg("epsilon") = 1e-11, py::arg("max_iterations") = 50,
        "Mixed-boundary demo: inspired air against alveolar air on a 1 x 0.25 channel.");
}

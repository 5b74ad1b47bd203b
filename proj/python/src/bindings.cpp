#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "steinpairs/bounds.hpp"
#include "steinpairs/experiments.hpp"
#include "steinpairs/family.hpp"
#include "steinpairs/haar.hpp"
#include "steinpairs/matrix.hpp"
#include "steinpairs/pairs.hpp"
#include "steinpairs/stein.hpp"
#include "steinpairs/transport.hpp"
#include "steinpairs/version.hpp"

namespace py = pybind11;
using namespace steinpairs;

namespace {

VectorLaw law_by_name(const std::string& name, int dim) {
    if (name == "gaussian") return gaussian_law(dim);
    if (name == "rademacher") return rademacher_law(dim);
    if (name == "sphere") return sphere_law(dim);
    throw std::invalid_argument("unknown law '" + name + "' (gaussian, rademacher, sphere)");
}

SampleCloud cloud_of(const Eigen::MatrixXd& points) {
    SampleCloud c;
    c.points = points;
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multivariate normal approximation by exchangeable pairs";
    m.attr("__version__") = kVersion;

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
        .def("uniform", &RngStream::uniform)
        .def("normal", &RngStream::normal);

    // matrix core
    m.def("hs_inner",
          py::overload_cast<const RealMatrix&, const RealMatrix&>(&hs_inner), py::arg("a"),
          py::arg("b"));
    m.def("hs_inner_complex",
          py::overload_cast<const ComplexMatrix&, const ComplexMatrix&>(&hs_inner));
    m.def("op_norm", py::overload_cast<const RealMatrix&>(&op_norm));
    m.def("op_norm_complex", py::overload_cast<const ComplexMatrix&>(&op_norm));
    m.def("qr_decompose", [](const RealMatrix& a) { return qr_decompose(a); });
    m.def("gram_schmidt_hs", [](const std::vector<RealMatrix>& fam, double target) {
        const auto res = gram_schmidt_hs(fam, target);
        return py::make_tuple(res.family, res.d);
    });

    // haar
    m.def("sample_orthogonal", &sample_orthogonal, py::arg("n"), py::arg("rng"));
    m.def("sample_unitary", &sample_unitary, py::arg("n"), py::arg("rng"));
    m.def("moment_oracle",
          [](const std::string& query) { return moment_oracle(parse_moment_query(query)); });
    m.def(
        "mc_moment_estimate",
        [](const std::string& query, std::int64_t samples, std::uint64_t seed, int threads) {
            const MomentEstimate est =
                mc_moment_estimate(parse_moment_query(query), samples, seed, threads);
            py::dict d;
            d["estimate"] = est.estimate;
            d["se"] = est.se;
            d["samples"] = est.samples;
            return d;
        },
        py::arg("query"), py::arg("samples"), py::arg("seed"), py::arg("threads") = 4);
    m.def("haar_battery_queries", &haar_battery_queries);

    // pair models
    py::class_<PairModel>(m, "PairModel")
        .def_property_readonly("k", &PairModel::k)
        .def_property_readonly("n", &PairModel::ambient)
        .def_property_readonly("dim", &PairModel::statistic_dim)
        .def_property_readonly("continuous", &PairModel::continuous)
        .def_property_readonly("sigma2", &PairModel::sigma2)
        .def("draw_statistic", &PairModel::draw_statistic, py::arg("rng"));
    m.def(
        "make_iid_sum_pair",
        [](const std::string& law, int k, int n) -> std::unique_ptr<PairModel> {
            return make_iid_sum_pair(law_by_name(law, k), n);
        },
        py::arg("law"), py::arg("k"), py::arg("n"));
    m.def(
        "make_spherical_pair",
        [](const std::string& law, int k, int n) -> std::unique_ptr<PairModel> {
            return make_spherical_pair(law_by_name(law, n), k);
        },
        py::arg("law"), py::arg("k"), py::arg("n"));
    m.def(
        "make_orthogonal_projection_pair",
        [](const std::vector<RealMatrix>& mats) -> std::unique_ptr<PairModel> {
            return make_orthogonal_projection_pair(make_family(mats));
        },
        py::arg("mats"));
    m.def(
        "make_unitary_projection_pair",
        [](const std::vector<ComplexMatrix>& mats) -> std::unique_ptr<PairModel> {
            return make_unitary_projection_pair(make_family(mats));
        },
        py::arg("mats"));
    m.def(
        "random_orthonormal_family",
        [](int k, int n, std::uint64_t seed) {
            RngStream rng(seed);
            return random_orthonormal_family(k, n, rng).mats;
        },
        py::arg("k"), py::arg("n"), py::arg("seed"));
    m.def(
        "audit_pair",
        [](const PairModel& model, std::int64_t samples, double epsilon, std::uint64_t seed,
           int threads) { return audit_to_json(audit_pair(model, samples, epsilon, seed, threads)); },
        py::arg("model"), py::arg("samples"), py::arg("epsilon"), py::arg("seed"),
        py::arg("threads") = 4);

    // bounds: each returns the report as a JSON string
    m.def("bound_discrete", [](double sigma, double m1, double m2, double lambda, double e_norm,
                               double third) {
        return bound_report_to_json(bound_discrete(sigma, m1, m2, lambda, e_norm, third));
    });
    m.def("bound_cont",
          [](double sigma, double f_norm) { return bound_report_to_json(bound_cont(sigma, f_norm)); });
    m.def("bound_complex", [](double gamma_norm, double lambda_norm) {
        return bound_report_to_json(bound_complex(gamma_norm, lambda_norm));
    });
    m.def("bound_basic", [](long n, long k, double m1, double m2, double fourth, double third) {
        return bound_report_to_json(bound_basic(n, k, m1, m2, fourth, third));
    });
    m.def("bound_ksphere",
          [](long k, long n, double a) { return bound_report_to_json(bound_ksphere(k, n, a)); });
    m.def("bound_mix", [](long k, long n, const Eigen::MatrixXd& gram, double scale) {
        GramData g;
        g.gram = gram;
        g.scale = scale;
        return bound_report_to_json(bound_mix(k, n, g));
    });
    m.def("bound_uthm", [](long k, long n) { return bound_report_to_json(bound_uthm(k, n)); });

    // stein machinery
    py::class_<SteinSolution>(m, "SteinSolution");
    m.def(
        "make_stein_solution",
        [](const std::string& g, int k, int nodes, std::int64_t samples, std::uint64_t seed) {
            return make_stein_solution(builtin_test_function(g, k), nodes, samples, seed);
        },
        py::arg("g"), py::arg("k"), py::arg("nodes"), py::arg("samples"), py::arg("seed"));
    m.def("stein_evaluate", [](const SteinSolution& sol, const Eigen::VectorXd& x) {
        const SteinValue v = stein_evaluate(sol, x);
        return py::make_tuple(v.h, v.grad, v.hess);
    });
    m.def("stein_residual", &stein_residual, py::arg("solution"), py::arg("points"));
    m.def(
        "characterizing_check",
        [](const std::string& g, int k, std::int64_t samples, std::uint64_t seed) {
            const CharacterizingCheck c =
                characterizing_check(builtin_test_function(g, k), samples, seed);
            return py::make_tuple(c.estimate, c.se);
        },
        py::arg("g"), py::arg("k"), py::arg("samples"), py::arg("seed"));

    // transport
    m.def("w1_exact", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return w1_exact(cloud_of(a), cloud_of(b));
    });
    m.def(
        "w1_sliced_lb",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int directions, std::uint64_t seed) {
            RngStream rng(seed);
            return w1_sliced_lb(cloud_of(a), cloud_of(b), directions, rng);
        },
        py::arg("a"), py::arg("b"), py::arg("directions"), py::arg("seed"));
    m.def(
        "gaussian_self_distance",
        [](int k, int m, int reps, std::uint64_t seed) {
            RngStream rng(seed);
            const SelfDistance d = self_distance(
                [k](int mm, RngStream& r) { return gaussian_cloud(mm, k, r); }, m, reps, rng);
            return py::make_tuple(d.mean, d.se);
        },
        py::arg("k"), py::arg("m"), py::arg("reps"), py::arg("seed"));

    // experiment runner
    m.def(
        "run_experiment",
        [](const std::string& config_text) {
            const ExperimentResult res = run_experiment(parse_config(config_text));
            return py::make_tuple(report_to_string(res.report), res.pass);
        },
        py::arg("config_text"));
}

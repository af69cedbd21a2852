#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "soulcurv/connection.hpp"
#include "soulcurv/curvature.hpp"
#include "soulcurv/metric.hpp"
#include "soulcurv/report.hpp"
#include "soulcurv/rigidity.hpp"
#include "soulcurv/suites.hpp"
#include "soulcurv/transport.hpp"

namespace py = pybind11;
using namespace soulcurv;

namespace {

Chart chart_from_string(const std::string& s) {
    if (s == "north" || s == "north-stereographic") return Chart::North;
    if (s == "south" || s == "south-stereographic") return Chart::South;
    throw DomainError("chart must be 'north' or 'south'");
}

ChartPoint make_chart_point(const std::string& chart, const std::array<double, 2>& u, const std::array<double, 3>& v) {
    return ChartPoint{chart_from_string(chart), u, v};
}

std::vector<std::vector<double>> mat5_to_list(const Mat5& m) {
    std::vector<std::vector<double>> out(5, std::vector<double>(5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return out;
}

struct PyModel {
    MetricModel model;

    PyModel(const std::string& family, double scale, const std::vector<double>& warp) {
        model.family = family_from_name(family);
        model.scale = scale;
        model.warp.coeffs = warp;
    }

    std::vector<std::vector<double>> metric(const std::string& chart, const std::array<double, 2>& u,
                                            const std::array<double, 3>& v) const {
        return mat5_to_list(metric_value(model, make_chart_point(chart, u, v)));
    }

    double metric_min_eigenvalue(const std::string& chart, const std::array<double, 2>& u,
                                 const std::array<double, 3>& v) const {
        return metric_smallest_eigenvalue(model, make_chart_point(chart, u, v));
    }

    double soul_gauss(const std::string& chart, const std::array<double, 2>& u) const {
        return soul_geometry(model, make_chart_point(chart, u, {0.0, 0.0, 0.0})).gauss;
    }

    double soul_second_fundamental(const std::string& chart, const std::array<double, 2>& u) const {
        return soul_geometry(model, make_chart_point(chart, u, {0.0, 0.0, 0.0})).second_fundamental_norm;
    }

    double sectional(const std::string& chart, const std::array<double, 2>& u, const std::array<double, 3>& v,
                     const std::array<double, 5>& x, const std::array<double, 5>& y) const {
        const CurvaturePacket pk = curvature_at(model, make_chart_point(chart, u, v), 2);
        Vec5 xv, yv;
        for (int i = 0; i < 5; ++i) {
            xv[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
            yv[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)];
        }
        return pk.sectional(xv, yv);
    }

    std::pair<double, std::array<double, 3>> normal_curvature_py(const std::string& chart,
                                                                 const std::array<double, 2>& u) const {
        const ChartPoint pt = make_chart_point(chart, u, {0.0, 0.0, 0.0});
        const NormalCurvature nc = normal_curvature(model, soul_frame(model, pt));
        return {nc.norm, {nc.axis[0], nc.axis[1], nc.axis[2]}};
    }

    double min_sectional_py(const std::string& chart, const std::array<double, 2>& u, const std::array<double, 3>& v,
                            int restarts, std::uint64_t seed) const {
        Rng rng(seed);
        return min_sectional(model, make_chart_point(chart, u, v), restarts, rng).value;
    }

    py::dict soul_scalars_py(const std::string& chart, const std::array<double, 2>& u,
                             const std::array<double, 2>& x_seed) const {
        const ChartPoint pt = make_chart_point(chart, u, {0.0, 0.0, 0.0});
        const Mat5 g = metric_value(model, pt);
        const auto on = gram_schmidt<5>(g, {Vec5{x_seed[0], x_seed[1], 0.0, 0.0, 0.0}});
        const SoulScalars sc = soul_scalars(model, pt, on[0]);
        py::dict d;
        d["F"] = sc.F;
        d["a"] = sc.a;
        d["g0"] = sc.g0;
        d["g1"] = sc.g1;
        return d;
    }

    py::dict gap_values(const std::string& chart, const std::array<double, 2>& u,
                        const std::array<double, 2>& x_seed) const {
        const ChartPoint pt = make_chart_point(chart, u, {0.0, 0.0, 0.0});
        const Mat5 g = metric_value(model, pt);
        const auto on = gram_schmidt<5>(g, {Vec5{x_seed[0], x_seed[1], 0.0, 0.0, 0.0}});
        const SoulScalars sc = soul_scalars(model, pt, on[0]);
        const CurvaturePacket pk = curvature_at(model, pt, 4);
        py::dict d;
        d["G_WV"] = rigidity_gap(pk, sc.X, sc.Y, sc.W, sc.V).gap_normal;
        d["G_UV"] = rigidity_gap(pk, sc.X, sc.Y, sc.U, sc.V).gap_normal;
        return d;
    }

    std::array<double, 5> geodesic_end(const std::string& chart, const std::array<double, 2>& u,
                                       const std::array<double, 3>& v, const std::array<double, 5>& vel,
                                       double T) const {
        Vec5 w;
        for (int i = 0; i < 5; ++i) w[static_cast<std::size_t>(i)] = vel[static_cast<std::size_t>(i)];
        const Curve c = geodesic(model, make_chart_point(chart, u, v), w, T);
        return c.end().coords();
    }

    std::pair<double, std::array<double, 3>> equator_holonomy() const {
        const ChartPoint start = point_from_ambient({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
        const Curve eq = soul_arc(start, {0.0, 1.0, 0.0}, 2.0 * M_PI);
        const HolonomyElement he = holonomy_loop(model, eq);
        const double angle = norm<3>(he.log);
        // axis in ambient fiber coordinates
        const SoulFrame fr = soul_frame(model, start);
        Vec3 axis{};
        const std::array<Vec5, 3> nb = {fr.W, fr.U, fr.V};
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 3; ++i)
                axis[static_cast<std::size_t>(i)] += he.log[static_cast<std::size_t>(a)] / angle *
                                                     nb[static_cast<std::size_t>(a)][static_cast<std::size_t>(2 + i)];
        return {angle, {axis[0], axis[1], axis[2]}};
    }

    int holonomy_dimension(int loop_count, double seed_offset) const {
        return holonomy_algebra(model, triangle_basket(loop_count, seed_offset)).dimension;
    }
};

} // namespace

PYBIND11_MODULE(soulcurv, m) {
    m.doc() = "numerical curvature engine for nonnegatively curved metrics on S^2 x R^3";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "SoulcurvError");

    py::class_<PyModel>(m, "Model", "a configured metric family on S^2 x R^3")
        .def(py::init<const std::string&, double, const std::vector<double>&>(), py::arg("family") = "cheeger_so3",
             py::arg("scale") = 1.0, py::arg("warp") = std::vector<double>{})
        .def("metric", &PyModel::metric, py::arg("chart"), py::arg("u"), py::arg("v"),
             "5x5 metric matrix at chart coordinates")
        .def("metric_min_eigenvalue", &PyModel::metric_min_eigenvalue, py::arg("chart"), py::arg("u"), py::arg("v"))
        .def("soul_gauss", &PyModel::soul_gauss, py::arg("chart"), py::arg("u"),
             "Gauss curvature of the soul at a chart point")
        .def("soul_second_fundamental", &PyModel::soul_second_fundamental, py::arg("chart"), py::arg("u"))
        .def("sectional", &PyModel::sectional, py::arg("chart"), py::arg("u"), py::arg("v"), py::arg("x"),
             py::arg("y"), "sectional curvature of span{x, y}")
        .def("normal_curvature", &PyModel::normal_curvature_py, py::arg("chart"), py::arg("u"),
             "(operator norm, axis) of the normal curvature at a soul point")
        .def("min_sectional", &PyModel::min_sectional_py, py::arg("chart"), py::arg("u"), py::arg("v"),
             py::arg("restarts") = 8, py::arg("seed") = 1,
             "minimum sectional curvature over 2-planes at the point")
        .def("soul_scalars", &PyModel::soul_scalars_py, py::arg("chart"), py::arg("u"),
             py::arg("x_seed") = std::array<double, 2>{1.0, 0.0},
             "nullity scalars {F, a, g0, g1} at a soul point")
        .def("gap_values", &PyModel::gap_values, py::arg("chart"), py::arg("u"),
             py::arg("x_seed") = std::array<double, 2>{1.0, 0.0},
             "soul-inequality gaps on the two distinguished normal planes")
        .def("geodesic_end", &PyModel::geodesic_end, py::arg("chart"), py::arg("u"), py::arg("v"), py::arg("velocity"),
             py::arg("T"), "chart coordinates of the geodesic endpoint")
        .def("equator_holonomy", &PyModel::equator_holonomy,
             "(rotation angle, ambient axis) of the normal holonomy around the soul equator")
        .def("holonomy_dimension", &PyModel::holonomy_dimension, py::arg("loops") = 12,
             py::arg("seed_offset") = 0.5);

    m.def(
        "closed_form_metric",
        [](double theta, double radius) { return mat5_to_list(closed_form_metric(theta, radius)); },
        py::arg("theta"), py::arg("radius") = 1.0,
        "frame-basis metric matrix of the quotient metric at angle theta");

    m.def(
        "connection_curvature_norm",
        [](double lam) {
            ConnectionFamily fam;
            fam.lambda = lam;
            const Vec3 p = normalized<3>(Vec3{0.3, -0.5, 0.8});
            const Vec3 x = normalized<3>(cross(p, {0.0, 0.0, 1.0}));
            const Vec3 y = cross(p, x);
            return curvature_closed_form(fam, p, x, y).norm;
        },
        py::arg("lam"), "curvature norm of the bundle connection family at orthonormal directions");

    m.def(
        "connection_holonomy_dimension",
        [](double lam, int loops) {
            ConnectionFamily fam;
            fam.lambda = lam;
            return family_holonomy(fam, loops, 0.4).dimension;
        },
        py::arg("lam"), py::arg("loops") = 10);

    m.def(
        "run_suite",
        [](const std::string& command, const std::string& config_text) {
            SuiteConfig cfg = config_text.empty() ? SuiteConfig{} : parse_config_text(config_text);
            const SuiteOutput out = run_suite(command, cfg);
            return report_to_json(out.report);
        },
        py::arg("command") = "verify-example", py::arg("config_text") = "",
        "run a verification suite, returning the JSON report");

    m.def("default_config", []() { return print_config(SuiteConfig{}); });
}

#include "soulcurv/metric.hpp"

namespace soulcurv {

Family family_from_name(const std::string& s) {
    if (s == "product") return Family::Product;
    if (s == "cheeger_so3") return Family::CheegerSO3;
    if (s == "closed_form_reference") return Family::ClosedFormReference;
    throw ConfigError("unknown metric family '" + s + "'");
}

SmallMat<Jet4, 5> metric_at(const MetricModel& model, const ChartPoint& pt) {
    return metric_jets<4>(model, pt);
}

Mat5 metric_value(const MetricModel& model, const ChartPoint& pt) {
    return metric_matrix<double>(model, pt.chart, pt.u, pt.v);
}

Mat5 closed_form_metric(double theta, double radius) {
    if (!(theta > 0.0 && theta < M_PI))
        throw FrameError("adapted frame degenerates at theta in {0, pi}; use the chart metric instead");
    if (!(radius > 0.0)) throw DomainError("closed-form metric needs radius > 0");
    return detail_metric::frame_expression_matrix<double>(theta, radius);
}

std::array<Vec5, 2> horizontal_space(const MetricModel& model, const ChartPoint& pt) {
    if (model.scale != 1.0 || !model.warp.flat())
        throw DomainError("horizontal-space display holds for scale 1 and the flat fiber");
    double theta{}, r{};
    const auto frame = detail_metric::adapted_frame<double>(pt.chart, pt.u, pt.v, theta, r);
    Vec5 h1{}, h2{};
    const double c = std::cos(theta);
    for (int i = 0; i < 5; ++i) {
        h1[static_cast<std::size_t>(i)] = frame[0][static_cast<std::size_t>(i)] + 0.5 * frame[2][static_cast<std::size_t>(i)];
        h2[static_cast<std::size_t>(i)] = frame[1][static_cast<std::size_t>(i)] + 0.5 * c * frame[3][static_cast<std::size_t>(i)];
    }
    return {h1, h2};
}

SoulFrame soul_frame(const MetricModel& model, const ChartPoint& pt, const std::array<double, 2>& seed_tangent,
                     const std::array<double, 3>& seed_normal) {
    const double voff = std::sqrt(pt.v[0] * pt.v[0] + pt.v[1] * pt.v[1] + pt.v[2] * pt.v[2]);
    if (voff > 1e-9) throw DomainError("soul frame requested off the soul (|V| > 0)");
    const double nseed = std::sqrt(seed_normal[0] * seed_normal[0] + seed_normal[1] * seed_normal[1] +
                                   seed_normal[2] * seed_normal[2]);
    if (nseed < 1e-10) throw FrameError("normal seed direction is numerically tangent to the soul");

    const Mat5 g = metric_value(model, pt);

    // tangent pair: X from the seed, Y oriented so (Xbar, Ybar, p) is
    // right-handed for the sphere factor's outward orientation
    const Vec5 xseed = {seed_tangent[0], seed_tangent[1], 0.0, 0.0, 0.0};
    const auto p = embed_sphere<double>(pt.chart, pt.u);
    const auto xbar = chart_tangent_to_sphere<double>(pt.chart, pt.u, {seed_tangent[0], seed_tangent[1]});
    const Vec3 ybar = cross(p, xbar);
    const auto yt = sphere_tangent_to_chart<double>(pt.chart, pt.u, ybar);
    const Vec5 yseed = {yt[0], yt[1], 0.0, 0.0, 0.0};
    const auto tangent = gram_schmidt<5>(g, {xseed, yseed});

    // normal triple: W from the seed, V completes, U = V x W in fiber coords
    const Vec5 wseed = {0.0, 0.0, seed_normal[0], seed_normal[1], seed_normal[2]};
    Vec3 t = {1.0, 0.0, 0.0};
    if (std::abs(seed_normal[0]) > 0.9 * nseed) t = {0.0, 1.0, 0.0};
    const Vec5 vseed = {0.0, 0.0, t[0], t[1], t[2]};
    const auto wv = gram_schmidt<5>(g, {wseed, vseed});
    const Vec3 w3 = {wv[0][2], wv[0][3], wv[0][4]};
    const Vec3 v3 = {wv[1][2], wv[1][3], wv[1][4]};
    const Vec3 u3 = cross(v3, w3);
    const auto un = gram_schmidt<5>(g, {wv[0], wv[1], Vec5{0.0, 0.0, u3[0], u3[1], u3[2]}});

    SoulFrame f;
    f.point = pt;
    f.X = tangent[0];
    f.Y = tangent[1];
    f.W = un[0];
    f.V = un[1];
    f.U = un[2];
    f.theta = 0.0;
    return f;
}

double metric_smallest_eigenvalue(const MetricModel& model, const ChartPoint& pt) {
    return smallest_eigenvalue<5>(metric_value(model, pt));
}

} // namespace soulcurv

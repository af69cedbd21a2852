#pragma once

#include <functional>
#include <vector>

#include "soulcurv/chart.hpp"
#include "soulcurv/linalg.hpp"
#include "soulcurv/metric.hpp"

namespace soulcurv {

// Sign conventions, fixed once:
//   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
//   R(i,j,k,l) = < R(d_i, d_j) d_k , d_l >
//   sectional(X,Y) = R(X,Y,Y,X) for orthonormal X, Y  (round sphere -> +1)
// dR(e; i,j,k,l) is the covariant derivative nabla_e R, d2R(f,e; ...) the full
// second covariant derivative (Christoffel corrections on every slot).
struct CurvaturePacket {
    ChartPoint point;
    int order = 2; // 1: Christoffels, 2: +R, 3: +dR, 4: +d2R
    Mat5 g;
    Mat5 ginv;
    std::vector<double> gamma; // [k][i][j] -> k*25 + i*5 + j
    std::vector<double> riem;  // [i][j][k][l]
    std::vector<double> driem; // [e][i][j][k][l]
    std::vector<double> d2riem; // [f][e][i][j][k][l]

    double Gamma(int k, int i, int j) const { return gamma[static_cast<std::size_t>((k * 5 + i) * 5 + j)]; }
    double R(int i, int j, int k, int l) const {
        return riem[static_cast<std::size_t>(((i * 5 + j) * 5 + k) * 5 + l)];
    }
    double dR(int e, int i, int j, int k, int l) const {
        return driem[static_cast<std::size_t>((((e * 5 + i) * 5 + j) * 5 + k) * 5 + l)];
    }
    double d2R(int f, int e, int i, int j, int k, int l) const {
        return d2riem[static_cast<std::size_t>(((((f * 5 + e) * 5 + i) * 5 + j) * 5 + k) * 5 + l)];
    }

    // contractions
    double R4(const Vec5& x, const Vec5& y, const Vec5& z, const Vec5& w) const;
    double dR5(const Vec5& e, const Vec5& x, const Vec5& y, const Vec5& z, const Vec5& w) const;
    double d2R6(const Vec5& f, const Vec5& e, const Vec5& x, const Vec5& y, const Vec5& z, const Vec5& w) const;
    // sectional curvature of span{x, y} (not assumed orthonormal)
    double sectional(const Vec5& x, const Vec5& y) const;
    // the vector R(x,y)z, chart components
    Vec5 apply(const Vec5& x, const Vec5& y, const Vec5& z) const;
    double inner_g(const Vec5& x, const Vec5& y) const { return inner<double, 5>(g, x, y); }
};

CurvaturePacket curvature_at(const MetricModel& model, const ChartPoint& pt, int order = 2);

// Finite-difference backend: curvature tensor only, assembled from central
// differences of the double-precision metric. Independent of the jet path.
CurvaturePacket fd_curvature_at(const MetricModel& model, const ChartPoint& pt, double step = 1e-3);

struct SoulGeometry {
    Mat2 induced;      // induced metric at the point in u-coordinates
    double gauss;      // Gauss curvature from the induced metric's own pipeline
    double second_fundamental_norm;
};

SoulGeometry soul_geometry(const MetricModel& model, const ChartPoint& pt);

// skew operator of the normal connection's curvature on the normal space at a
// soul point, in the orthonormal normal frame of `frame`; matrix * z applies
// R(X,Y) to z.
struct NormalCurvature {
    Mat3 matrix;
    double norm;  // operator norm = |axis|
    Vec3 axis;    // matrix z = axis x z
    SoulFrame frame;
};

NormalCurvature normal_curvature(const MetricModel& model, const ChartPoint& pt, const Vec5& X, const Vec5& Y);
NormalCurvature normal_curvature(const MetricModel& model, const SoulFrame& frame);

// Sectional curvature of the vertical plane making angle `angle` with the
// normal seed axis at a soul point.
double vertical_sectional(const MetricModel& model, const SoulFrame& frame, double angle);

} // namespace soulcurv

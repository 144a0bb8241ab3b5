#include "coniwave/potential.hpp"

#include <Eigen/SVD>

namespace coniwave {

Mat2 trace_free(const Vec2& w) {
    Mat2 a;
    a << w(0), w(1), w(1), -w(0);
    return a;
}

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::minus: return "minus";
        case Mode::plus: return "plus";
        default: return "reference";
    }
}

QuadScalar QuadScalar::zero(int d) {
    QuadScalar s;
    s.g = Vec::Zero(d);
    s.H = Mat::Zero(d, d);
    return s;
}

PotentialModel::PotentialModel(QuadScalar v, QuadScalar w1, QuadScalar w2, std::string label)
    : d_(static_cast<int>(v.g.size())), v_(std::move(v)), w1_(std::move(w1)),
      w2_(std::move(w2)), label_(std::move(label)) {
    if (d_ < 2)
        throw std::invalid_argument("PotentialModel: spatial dimension must be >= 2");
    for (const QuadScalar* s : {&v_, &w1_, &w2_}) {
        if (s->g.size() != d_ || s->H.rows() != d_ || s->H.cols() != d_)
            throw std::invalid_argument("PotentialModel: inconsistent coefficient dimensions");
        if ((s->H - s->H.transpose()).cwiseAbs().maxCoeff() > 1e-14)
            throw std::invalid_argument("PotentialModel: Hessian coefficients must be symmetric");
    }
}

Vec2 PotentialModel::w(const Vec& x) const {
    return Vec2(w1_(x), w2_(x));
}

Mat2X PotentialModel::dw(const Vec& x) const {
    Mat2X j(2, d_);
    j.row(0) = w1_.grad(x).transpose();
    j.row(1) = w2_.grad(x).transpose();
    return j;
}

const Mat& PotentialModel::hess_w(int comp) const {
    return comp == 0 ? w1_.H : w2_.H;
}

double PotentialModel::lambda(const Vec& x, Mode m) const {
    return v_(x) + mode_sign(m) * w(x).norm();
}

Vec PotentialModel::grad_lambda(const Vec& x, Mode m) const {
    Vec g = v_.grad(x);
    int s = mode_sign(m);
    if (s != 0) {
        Vec2 wx = w(x);
        double n = wx.norm();
        if (n < kTolGap)
            throw OnCrossingSet("grad_lambda: |w(x)| below tol_gap");
        g += s * dw(x).transpose() * (wx / n);
    }
    return g;
}

Mat PotentialModel::hess_lambda(const Vec& x, Mode m) const {
    Mat h = v_.H;
    int s = mode_sign(m);
    if (s != 0) {
        Vec2 wx = w(x);
        double n = wx.norm();
        if (n < kTolGap)
            throw OnCrossingSet("hess_lambda: |w(x)| below tol_gap");
        Mat2X j = dw(x);
        Vec u = j.transpose() * wx;  // d-vector, (d_i w . w)
        Mat hw = (wx(0) / n) * w1_.H + (wx(1) / n) * w2_.H;
        hw += (j.transpose() * j) / n - u * u.transpose() / (n * n * n);
        h += s * hw;
    }
    return h;
}

Mat2 eval_potential(const PotentialModel& model, const Vec& x) {
    return model.v(x) * Mat2::Identity() + trace_free(model.w(x));
}

EigenData eigen_at(const PotentialModel& model, const Vec& x) {
    Vec2 wx = model.w(x);
    double n = wx.norm();
    if (n < kTolGap)
        throw OnCrossingSet("eigen_at: point lies on the crossing set");
    EigenData e;
    double vx = model.v(x);
    e.lambda_plus = vx + n;
    e.lambda_minus = vx - n;
    e.gap = 2.0 * n;
    Mat2 a = trace_free(wx) / n;
    e.pi_plus = 0.5 * (Mat2::Identity() + a);
    e.pi_minus = 0.5 * (Mat2::Identity() - a);
    return e;
}

CrossingGeometry crossing_geometry(const PotentialModel& model, double t_flat,
                                   const PhasePoint& z_flat) {
    Vec2 wq = model.w(z_flat.q);
    if (wq.norm() > kTolGap)
        throw std::invalid_argument("crossing_geometry: q_flat is not on the crossing set");

    CrossingGeometry geom;
    geom.t_flat = t_flat;
    geom.q_flat = z_flat.q;
    geom.p_flat = z_flat.p;
    geom.dw = model.dw(z_flat.q);

    Eigen::JacobiSVD<Mat> svd(geom.dw);
    if (svd.singularValues().size() < 2 || svd.singularValues()(1) < kTolNondeg)
        throw DegenerateCrossing("crossing_geometry: rank dw(q_flat) < 2");

    Vec2 e = geom.dw * z_flat.p;
    geom.r = e.norm();
    if (geom.r < kTolNondeg)
        throw DegenerateCrossing("crossing_geometry: dw(q_flat) p_flat vanishes");
    geom.omega = e / geom.r;
    geom.omega_perp = Vec2(-geom.omega(1), geom.omega(0));

    Mat2 proj = Mat2::Identity() - geom.omega * geom.omega.transpose();
    geom.gamma0 = geom.dw.transpose() * proj * geom.dw / geom.r;
    return geom;
}

Vec2 eta_of(const CrossingGeometry& geom, const Vec& y) {
    Vec2 e = geom.dw * y;
    return Vec2(geom.omega.dot(e), geom.omega_perp.dot(e));
}

PotentialModel linear_isotropic(int d) {
    if (d < 2)
        throw std::invalid_argument("linear_isotropic: spatial dimension must be >= 2");
    QuadScalar v = QuadScalar::zero(d);
    QuadScalar w1 = QuadScalar::zero(d);
    QuadScalar w2 = QuadScalar::zero(d);
    w1.g(0) = 1.0;
    w2.g(1) = 1.0;
    return PotentialModel(v, w1, w2, "linear-isotropic");
}

PotentialModel tilted(const Vec& kappa, const Mat2X& G, const Vec2& c) {
    int d = static_cast<int>(kappa.size());
    QuadScalar v = QuadScalar::zero(d);
    v.g = kappa;
    QuadScalar w1 = QuadScalar::zero(d);
    QuadScalar w2 = QuadScalar::zero(d);
    w1.c0 = c(0);
    w1.g = G.row(0).transpose();
    w2.c0 = c(1);
    w2.g = G.row(1).transpose();
    return PotentialModel(v, w1, w2, "tilted");
}

} // namespace coniwave

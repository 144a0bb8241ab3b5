#ifndef CONIWAVE_POTENTIAL_HPP
#define CONIWAVE_POTENTIAL_HPP

#include <Eigen/Dense>
#include <string>

#include "coniwave/errors.hpp"

namespace coniwave {

using Vec  = Eigen::VectorXd;
using Mat  = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat2X = Eigen::Matrix<double, 2, Eigen::Dynamic>;

inline constexpr double kTolGap    = 1e-10;  // |w| below this counts as "on the crossing set"
inline constexpr double kTolNondeg = 1e-8;   // lower bound on |dw(q)p| at a crossing

// A(w) = (w1 w2; w2 -w1), the trace-free symmetric matrix of w in R^2.
Mat2 trace_free(const Vec2& w);

struct PhasePoint {
    Vec q, p;
};

enum class Mode : int { minus = -1, reference = 0, plus = +1 };

inline int mode_sign(Mode m) { return static_cast<int>(m); }
const char* mode_name(Mode m);

// Scalar polynomial of degree <= 2: c0 + g.x + x'Hx/2.
struct QuadScalar {
    double c0 = 0.0;
    Vec g;
    Mat H;

    static QuadScalar zero(int d);
    double operator()(const Vec& x) const { return c0 + g.dot(x) + 0.5 * x.dot(H * x); }
    Vec grad(const Vec& x) const { return g + H * x; }
};

// Matrix potential V(x) = v(x) Id + A(w(x)) with polynomial v, w of degree <= 2.
// Keeping the coefficients exact makes every derivative exact, and degree <= 2
// satisfies the subquadraticity bound by construction.
class PotentialModel {
public:
    PotentialModel(QuadScalar v, QuadScalar w1, QuadScalar w2, std::string label);

    int dim() const { return d_; }
    const std::string& label() const { return label_; }

    double v(const Vec& x) const { return v_(x); }
    Vec grad_v(const Vec& x) const { return v_.grad(x); }
    const Mat& hess_v() const { return v_.H; }

    Vec2 w(const Vec& x) const;
    Mat2X dw(const Vec& x) const;           // 2 x d Jacobian
    const Mat& hess_w(int comp) const;      // Hessian of w_comp, constant

    double gap(const Vec& x) const { return 2.0 * w(x).norm(); }

    // Eigenvalue branch lambda_m = v + m|w| (m = -1, 0, +1; 0 is the scalar part alone).
    double lambda(const Vec& x, Mode m) const;
    Vec grad_lambda(const Vec& x, Mode m) const;   // singular on the crossing set
    Mat hess_lambda(const Vec& x, Mode m) const;

private:
    int d_;
    QuadScalar v_, w1_, w2_;
    std::string label_;
};

Mat2 eval_potential(const PotentialModel& model, const Vec& x);

struct EigenData {
    double lambda_minus = 0, lambda_plus = 0;
    Mat2 pi_minus, pi_plus;
    double gap = 0;
};

// Eigenvalues and projectors of V(x); throws OnCrossingSet when |w(x)| < kTolGap.
EigenData eigen_at(const PotentialModel& model, const Vec& x);

// All crossing-local constants of a conical point: r*omega = dw(q)p and
// Gamma0 = dw'(Id - omega x omega) dw / r.
struct CrossingGeometry {
    double t_flat = 0;
    Vec q_flat, p_flat;
    Mat2X dw;
    double r = 0;
    Vec2 omega, omega_perp;
    Mat gamma0;
};

CrossingGeometry crossing_geometry(const PotentialModel& model, double t_flat,
                                   const PhasePoint& z_flat);

// eta(y) = (omega . dw y, omega_perp . dw y).
Vec2 eta_of(const CrossingGeometry& geom, const Vec& y);

// Built-in catalogue.
PotentialModel linear_isotropic(int d);
PotentialModel tilted(const Vec& kappa, const Mat2X& G, const Vec2& c);

} // namespace coniwave

#endif

#include "coniwave/grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace coniwave {

namespace {

std::mutex g_plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> g_plans;

fftw_plan plan_for(const BoxSpec& box, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_tuple(box.d, box.n, sign);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    std::vector<int> dims(box.d, box.n);
    std::vector<fftw_complex> buf(box.size());
    fftw_plan p = fftw_plan_dft(box.d, dims.data(), buf.data(), buf.data(), sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    g_plans[key] = p;
    return p;
}

} // namespace

double ComplexGrid::mass() const {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return s * cell_volume();
}

cplx ComplexGrid::inner(const ComplexGrid& other) const {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * other.v[i];
    return s * cell_volume();
}

void ComplexGrid::unravel(std::size_t idx, int* out) const {
    for (int ax = box.d - 1; ax >= 0; --ax) {
        out[ax] = static_cast<int>(idx % box.n);
        idx /= box.n;
    }
}

double ComplexGrid::boundary_mass_fraction() const {
    double total = 0.0, shell = 0.0;
    int lo = box.n / 10, hi = box.n - 1 - box.n / 10;
    std::vector<int> ix(box.d);
    for (std::size_t i = 0; i < v.size(); ++i) {
        double m = std::norm(v[i]);
        total += m;
        unravel(i, ix.data());
        for (int ax = 0; ax < box.d; ++ax)
            if (ix[ax] < lo || ix[ax] > hi) {
                shell += m;
                break;
            }
    }
    return total > 0.0 ? shell / total : 0.0;
}

void ComplexGrid::scale_pointwise(const std::function<cplx(const Vec&)>& f) {
    std::vector<int> ix(box.d);
    Vec y(box.d);
    for (std::size_t i = 0; i < v.size(); ++i) {
        unravel(i, ix.data());
        for (int ax = 0; ax < box.d; ++ax) y(ax) = box.coord(ix[ax]);
        v[i] *= f(y);
    }
}

void ComplexGrid::fft_forward() {
    fftw_plan p = plan_for(box, FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(v.data()),
                     reinterpret_cast<fftw_complex*>(v.data()));
}

void ComplexGrid::fft_backward() {
    fftw_plan p = plan_for(box, FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(v.data()),
                     reinterpret_cast<fftw_complex*>(v.data()));
    double s = 1.0 / static_cast<double>(size());
    for (cplx& z : v) z *= s;
}

void apply_fourier_multiplier(ComplexGrid& g, const std::function<cplx(const Vec&)>& f) {
    g.fft_forward();
    std::vector<int> ix(g.box.d);
    Vec k(g.box.d);
    for (std::size_t i = 0; i < g.v.size(); ++i) {
        g.unravel(i, ix.data());
        for (int ax = 0; ax < g.box.d; ++ax) k(ax) = g.box.wavenumber(ix[ax]);
        g.v[i] *= f(k);
    }
    g.fft_backward();
}

double Field2::boundary_mass_fraction() const {
    double m1 = c1.mass(), m2 = c2.mass();
    double f1 = c1.boundary_mass_fraction(), f2 = c2.boundary_mass_fraction();
    double tot = m1 + m2;
    return tot > 0 ? (f1 * m1 + f2 * m2) / tot : 0.0;
}

double l2_distance(const ComplexGrid& a, const ComplexGrid& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += std::norm(a.v[i] - b.v[i]);
    return std::sqrt(s * a.cell_volume());
}

double l2_distance(const Field2& a, const Field2& b) {
    double s1 = l2_distance(a.c1, b.c1), s2 = l2_distance(a.c2, b.c2);
    return std::sqrt(s1 * s1 + s2 * s2);
}

std::vector<cplx> resample_tensor(const ComplexGrid& g,
                                  const std::vector<std::vector<double>>& targets) {
    const BoxSpec& b = g.box;
    ComplexGrid hat = g;
    hat.fft_forward();

    // per-axis evaluation matrices E[t][m] = exp(i k_m (y_t + L)) / n
    std::vector<Eigen::MatrixXcd> mats(b.d);
    for (int ax = 0; ax < b.d; ++ax) {
        const auto& ts = targets[ax];
        Eigen::MatrixXcd E(ts.size(), b.n);
        for (std::size_t t = 0; t < ts.size(); ++t)
            for (int m = 0; m < b.n; ++m)
                E(static_cast<Eigen::Index>(t), m) =
                    std::exp(cplx(0.0, b.wavenumber(m) * (ts[t] + b.L))) / double(b.n);
        mats[ax] = std::move(E);
    }

    // contract axis by axis (row-major: last axis fastest)
    std::vector<cplx> cur = hat.v;
    std::vector<std::size_t> shape(b.d, static_cast<std::size_t>(b.n));
    for (int ax = b.d - 1; ax >= 0; --ax) {
        std::size_t n_in = shape[ax];
        std::size_t n_out = mats[ax].rows();
        std::size_t inner = 1;
        for (int j = ax + 1; j < b.d; ++j) inner *= shape[j];
        std::size_t outer = cur.size() / (n_in * inner);
        std::vector<cplx> next(outer * n_out * inner);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t t = 0; t < n_out; ++t)
                for (std::size_t in = 0; in < inner; ++in) {
                    cplx s(0.0, 0.0);
                    const cplx* src = cur.data() + o * n_in * inner + in;
                    for (std::size_t m = 0; m < n_in; ++m)
                        s += mats[ax](static_cast<Eigen::Index>(t),
                                      static_cast<Eigen::Index>(m)) * src[m * inner];
                    next[(o * n_out + t) * inner + in] = s;
                }
        cur = std::move(next);
        shape[ax] = n_out;
    }
    return cur;
}

} // namespace coniwave

#ifndef KRAICHNAN_SPECTRUM_HPP
#define KRAICHNAN_SPECTRUM_HPP

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "kraichnan/errors.hpp"
#include "kraichnan/fft.hpp"
#include "kraichnan/grid.hpp"
#include "kraichnan/rng.hpp"

namespace kraichnan {

// Small-scale cutoff profile rho: rho(0)=1, strictly decreasing, vanishing
// faster than any polynomial.
enum class CutoffProfile { gaussian, exponential };

inline double cutoff_rho(CutoffProfile p, double t) {
    switch (p) {
        case CutoffProfile::gaussian: return std::exp(-t * t);
        case CutoffProfile::exponential: return std::exp(-t);
    }
    return 0.0;
}

inline std::string cutoff_name(CutoffProfile p) {
    return p == CutoffProfile::gaussian ? "gaussian" : "exponential";
}

inline CutoffProfile cutoff_from_name(const std::string& s) {
    if (s == "gaussian") return CutoffProfile::gaussian;
    if (s == "exponential") return CutoffProfile::exponential;
    throw ConfigError("rho", "unknown cutoff profile '" + s + "'");
}

// Parameters of the isotropic drift covariance
//   D_hat_ij(k) = (delta_ij - k_i k_j/|k|^2) |k|^-(d+2*alpha) rho(eta|k|), k != 0
// truncated to |k|_inf <= kmax.
struct SpectrumConfig {
    int dim = 2;
    double alpha = 0.5;
    double eta = 0.0;
    CutoffProfile rho = CutoffProfile::gaussian;
    int kmax = 32;

    void validate() const {
        if (dim != 2 && dim != 3) throw ConfigError("d", "dimension must be 2 or 3");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must lie in (0,1)");
        if (!(eta >= 0.0)) throw ConfigError("eta", "must be >= 0");
        if (kmax < 1) throw ConfigError("kmax", "must be >= 1");
    }
    // Smallest valid even grid for alias-free sampling/assembly.
    int min_grid() const { return 2 * kmax + 2; }
};

// 1D shear profile spectrum c_hat(k) = 1/|k|^(1+2*alpha), k != 0.
struct ShearSpectrum {
    double alpha = 0.5;
    int kmax = 16;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must lie in (0,1)");
        if (kmax < 1) throw ConfigError("kmax", "must be >= 1");
    }
    double coefficient(int k) const {
        if (k == 0) return 0.0;
        return std::pow(std::abs(double(k)), -(1.0 + 2.0 * alpha));
    }
    int min_grid() const { return 2 * kmax + 2; }
};

// Symmetric d x d matrix, d in {2,3}; packed components.
struct SymMat {
    int dim = 2;
    double xx = 0, yy = 0, zz = 0, xy = 0, xz = 0, yz = 0;

    static SymMat identity(int d, double s = 1.0) {
        SymMat m;
        m.dim = d;
        m.xx = m.yy = s;
        m.zz = (d == 3) ? s : 0.0;
        return m;
    }
    double quad_form(const double* w) const {
        double q = xx * w[0] * w[0] + yy * w[1] * w[1] + 2.0 * xy * w[0] * w[1];
        if (dim == 3)
            q += zz * w[2] * w[2] + 2.0 * xz * w[0] * w[2] + 2.0 * yz * w[1] * w[2];
        return q;
    }
    double trace() const { return xx + yy + (dim == 3 ? zz : 0.0); }
    SymMat operator+(const SymMat& o) const {
        SymMat r = *this;
        r.xx += o.xx; r.yy += o.yy; r.zz += o.zz;
        r.xy += o.xy; r.xz += o.xz; r.yz += o.yz;
        return r;
    }
    SymMat operator-(const SymMat& o) const {
        SymMat r = *this;
        r.xx -= o.xx; r.yy -= o.yy; r.zz -= o.zz;
        r.xy -= o.xy; r.xz -= o.xz; r.yz -= o.yz;
        return r;
    }
};

namespace detail {
inline double norm_k(const int* k, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += double(k[d]) * k[d];
    return std::sqrt(s);
}
}  // namespace detail

// Scalar spectral density |k|^-(d+2a) rho(eta|k|); the nonzero eigenvalue of
// the spectral tensor (multiplicity d-1).
inline double spectral_amplitude(const SpectrumConfig& cfg, const int* k) {
    const double kn = detail::norm_k(k, cfg.dim);
    if (kn == 0.0) return 0.0;
    return std::pow(kn, -(double(cfg.dim) + 2.0 * cfg.alpha)) * cutoff_rho(cfg.rho, cfg.eta * kn);
}

// Incompressible projection of the covariance density at wavevector k.
inline SymMat eval_spectral_tensor(const SpectrumConfig& cfg, const int* k) {
    cfg.validate();
    for (int d = 0; d < cfg.dim; ++d)
        if (std::abs(k[d]) > cfg.kmax)
            throw ConfigError("k", "wavevector outside |k|_inf <= kmax truncation");
    SymMat m;
    m.dim = cfg.dim;
    const double kn2 = [&] {
        double s = 0;
        for (int d = 0; d < cfg.dim; ++d) s += double(k[d]) * k[d];
        return s;
    }();
    if (kn2 == 0.0) return m;  // k = 0 branch
    const double amp = spectral_amplitude(cfg, k);
    const double kx = k[0], ky = k[1], kz = cfg.dim == 3 ? k[2] : 0.0;
    m.xx = amp * (1.0 - kx * kx / kn2);
    m.yy = amp * (1.0 - ky * ky / kn2);
    m.xy = amp * (-kx * ky / kn2);
    if (cfg.dim == 3) {
        m.zz = amp * (1.0 - kz * kz / kn2);
        m.xz = amp * (-kx * kz / kn2);
        m.yz = amp * (-ky * kz / kn2);
    }
    return m;
}

// D(x) = sum_{k != 0, |k|_inf <= kmax} cos(k.x) D_hat(k), evaluated directly.
inline SymMat eval_real_covariance(const SpectrumConfig& cfg, const double* x) {
    cfg.validate();
    SymMat acc;
    acc.dim = cfg.dim;
    int k[3] = {0, 0, 0};
    const int kzlo = cfg.dim == 3 ? -cfg.kmax : 0;
    const int kzhi = cfg.dim == 3 ? cfg.kmax : 0;
    for (k[0] = -cfg.kmax; k[0] <= cfg.kmax; ++k[0])
        for (k[1] = -cfg.kmax; k[1] <= cfg.kmax; ++k[1])
            for (k[2] = kzlo; k[2] <= kzhi; ++k[2]) {
                if (k[0] == 0 && k[1] == 0 && k[2] == 0) continue;
                double phase = k[0] * x[0] + k[1] * x[1];
                if (cfg.dim == 3) phase += k[2] * x[2];
                const double c = std::cos(phase);
                const SymMat t = eval_spectral_tensor(cfg, k);
                acc.xx += c * t.xx;
                acc.yy += c * t.yy;
                acc.xy += c * t.xy;
                if (cfg.dim == 3) {
                    acc.zz += c * t.zz;
                    acc.xz += c * t.xz;
                    acc.yz += c * t.yz;
                }
            }
    return acc;
}

// D evaluated on the full n^d node grid via inverse DFTs of the spectral
// tensor, one transform per independent component. Exact (same lattice sum as
// eval_real_covariance) as long as n >= 2*kmax+2.
struct CovarianceGrid {
    int dim = 2;
    int n = 0;
    // Component order: xx, yy, xy (dim 2) plus zz, xz, yz (dim 3).
    std::array<std::vector<double>, 6> comp;
    SymMat at(std::size_t idx) const {
        SymMat m;
        m.dim = dim;
        m.xx = comp[0][idx];
        m.yy = comp[1][idx];
        m.xy = comp[2][idx];
        if (dim == 3) {
            m.zz = comp[3][idx];
            m.xz = comp[4][idx];
            m.yz = comp[5][idx];
        }
        return m;
    }
};

inline CovarianceGrid covariance_grid(const SpectrumConfig& cfg, int n) {
    cfg.validate();
    if (n < cfg.min_grid() || n % 2 != 0)
        throw ConfigError("grid", "grid must be even and >= 2*kmax+2 (aliasing)");
    CovarianceGrid out;
    out.dim = cfg.dim;
    out.n = n;
    const int ncomp = cfg.dim == 2 ? 3 : 6;
    Fft fft(n, cfg.dim);
    std::vector<std::complex<double>> spec(fft.size());
    const int kzlo = cfg.dim == 3 ? -cfg.kmax : 0;
    const int kzhi = cfg.dim == 3 ? cfg.kmax : 0;
    for (int c = 0; c < ncomp; ++c) {
        std::fill(spec.begin(), spec.end(), std::complex<double>(0.0, 0.0));
        int k[3] = {0, 0, 0};
        for (k[0] = -cfg.kmax; k[0] <= cfg.kmax; ++k[0])
            for (k[1] = -cfg.kmax; k[1] <= cfg.kmax; ++k[1])
                for (k[2] = kzlo; k[2] <= kzhi; ++k[2]) {
                    if (k[0] == 0 && k[1] == 0 && k[2] == 0) continue;
                    const SymMat t = eval_spectral_tensor(cfg, k);
                    const double val = (c == 0) ? t.xx
                                     : (c == 1) ? t.yy
                                     : (c == 2) ? t.xy
                                     : (c == 3) ? t.zz
                                     : (c == 4) ? t.xz
                                                : t.yz;
                    std::size_t idx = std::size_t(dft_index(k[0], n)) * n + dft_index(k[1], n);
                    if (cfg.dim == 3) idx = idx * n + dft_index(k[2], n);
                    spec[idx] = val;
                }
        std::vector<std::complex<double>> work = spec;
        fft.backward(work);
        out.comp[c].resize(fft.size());
        for (std::size_t i = 0; i < fft.size(); ++i) out.comp[c][i] = work[i].real();
    }
    return out;
}

// Real synthesis convention: over one representative k of each +/-k pair and
// each transverse eigenvector e_m(k),
//   u += sqrt(2*lambda(k)) * e_m * (a cos(k.x) + b sin(k.x)),  a,b iid N(0,1),
// which reproduces E u(x) u(y)^T = D(x-y) exactly on the truncated lattice and
// keeps k.u_hat(k) = 0 identically. Mode iteration order is lexicographic in
// (k_0, k_1[, k_2]) and is part of the seed contract.
namespace detail {

inline bool half_lattice(const int* k, int dim) {
    for (int d = 0; d < dim; ++d) {
        if (k[d] > 0) return true;
        if (k[d] < 0) return false;
    }
    return false;  // k = 0
}

inline void transverse_basis(const int* k, int dim, double e1[3], double e2[3]) {
    const double kn = norm_k(k, dim);
    if (dim == 2) {
        e1[0] = -k[1] / kn;
        e1[1] = k[0] / kn;
        e1[2] = 0.0;
        return;
    }
    // Cross with the axis least aligned with k.
    int axis = 0;
    for (int d = 1; d < 3; ++d)
        if (std::abs(k[d]) < std::abs(k[axis])) axis = d;
    double a[3] = {0, 0, 0};
    a[axis] = 1.0;
    const double kd[3] = {double(k[0]), double(k[1]), double(k[2])};
    e1[0] = kd[1] * a[2] - kd[2] * a[1];
    e1[1] = kd[2] * a[0] - kd[0] * a[2];
    e1[2] = kd[0] * a[1] - kd[1] * a[0];
    const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    e1[0] /= n1; e1[1] /= n1; e1[2] /= n1;
    e2[0] = (kd[1] * e1[2] - kd[2] * e1[1]) / kn;
    e2[1] = (kd[2] * e1[0] - kd[0] * e1[2]) / kn;
    e2[2] = (kd[0] * e1[1] - kd[1] * e1[0]) / kn;
}

}  // namespace detail

// Sample the d=2 divergence-free Gaussian field on an n-grid.
inline VelocityField sample_gaussian_field2(const SpectrumConfig& cfg, int n, std::uint64_t seed) {
    cfg.validate();
    if (cfg.dim != 2) throw ConfigError("d", "sample_gaussian_field2 requires d=2");
    if (n < cfg.min_grid() || n % 2 != 0)
        throw ConfigError("grid", "grid must be even and >= 2*kmax+2 (aliasing)");
    Fft fft(n, 2);
    std::vector<std::complex<double>> sx(fft.size()), sy(fft.size());
    Rng rng(seed);
    int k[2];
    for (k[0] = -cfg.kmax; k[0] <= cfg.kmax; ++k[0])
        for (k[1] = -cfg.kmax; k[1] <= cfg.kmax; ++k[1]) {
            if (!detail::half_lattice(k, 2)) continue;
            const double lambda = spectral_amplitude(cfg, k);
            const double a = rng.normal();
            const double b = rng.normal();
            const double kn = detail::norm_k(k, 2);
            const double ex = -k[1] / kn, ey = k[0] / kn;
            // coefficient of exp(+i k.x); conjugate at -k
            const std::complex<double> c0 = std::sqrt(2.0 * lambda) * std::complex<double>(a, -b) * 0.5;
            const std::size_t ip = std::size_t(dft_index(k[0], n)) * n + dft_index(k[1], n);
            const std::size_t im = std::size_t(dft_index(-k[0], n)) * n + dft_index(-k[1], n);
            sx[ip] += c0 * ex;
            sx[im] += std::conj(c0) * ex;
            sy[ip] += c0 * ey;
            sy[im] += std::conj(c0) * ey;
        }
    VelocityField u;
    u.ux = fft.backward_real_sum(std::move(sx));
    u.uy = fft.backward_real_sum(std::move(sy));
    return u;
}

struct Field3 {
    int n = 0;
    std::array<std::vector<double>, 3> comp;
};

inline Field3 sample_gaussian_field3(const SpectrumConfig& cfg, int n, std::uint64_t seed) {
    cfg.validate();
    if (cfg.dim != 3) throw ConfigError("d", "sample_gaussian_field3 requires d=3");
    if (n < cfg.min_grid() || n % 2 != 0)
        throw ConfigError("grid", "grid must be even and >= 2*kmax+2 (aliasing)");
    Fft fft(n, 3);
    std::array<std::vector<std::complex<double>>, 3> spec;
    for (auto& s : spec) s.assign(fft.size(), {0.0, 0.0});
    Rng rng(seed);
    int k[3];
    for (k[0] = -cfg.kmax; k[0] <= cfg.kmax; ++k[0])
        for (k[1] = -cfg.kmax; k[1] <= cfg.kmax; ++k[1])
            for (k[2] = -cfg.kmax; k[2] <= cfg.kmax; ++k[2]) {
                if (!detail::half_lattice(k, 3)) continue;
                const double lambda = spectral_amplitude(cfg, k);
                double e1[3], e2[3];
                detail::transverse_basis(k, 3, e1, e2);
                const std::size_t ip =
                    (std::size_t(dft_index(k[0], n)) * n + dft_index(k[1], n)) * n + dft_index(k[2], n);
                const std::size_t im =
                    (std::size_t(dft_index(-k[0], n)) * n + dft_index(-k[1], n)) * n + dft_index(-k[2], n);
                for (const double* e : {e1, e2}) {
                    const double a = rng.normal();
                    const double b = rng.normal();
                    const std::complex<double> c0 =
                        std::sqrt(2.0 * lambda) * std::complex<double>(a, -b) * 0.5;
                    for (int d = 0; d < 3; ++d) {
                        spec[d][ip] += c0 * e[d];
                        spec[d][im] += std::conj(c0) * e[d];
                    }
                }
            }
    Field3 out;
    out.n = n;
    for (int d = 0; d < 3; ++d) {
        fft.backward(spec[d]);
        out.comp[d].resize(fft.size());
        for (std::size_t i = 0; i < fft.size(); ++i) out.comp[d][i] = spec[d][i].real();
    }
    return out;
}

// 1D shear profile with covariance D_f(x) = sum_k c_hat(k) e^{ikx}:
//   f(x) = sum_{k=1..kmax} sqrt(2 c_hat(k)) (a_k cos kx + b_k sin kx).
// Gaussian coefficients by default; set rademacher for the bounded +/-1
// variant (same covariance, |f| <= K).
inline std::vector<double> sample_shear_profile(const ShearSpectrum& sp, int n, std::uint64_t seed,
                                                bool rademacher = false) {
    sp.validate();
    if (n < sp.min_grid() || n % 2 != 0)
        throw ConfigError("grid", "grid must be even and >= 2*kmax+2 (aliasing)");
    Rng rng(seed);
    std::vector<double> amp_cos(sp.kmax + 1), amp_sin(sp.kmax + 1);
    for (int k = 1; k <= sp.kmax; ++k) {
        const double c = std::sqrt(2.0 * sp.coefficient(k));
        const double a = rademacher ? rng.sign() : rng.normal();
        const double b = rademacher ? rng.sign() : rng.normal();
        amp_cos[k] = c * a;
        amp_sin[k] = c * b;
    }
    std::vector<double> f(n, 0.0);
    const double h = 2.0 * M_PI / n;
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 1; k <= sp.kmax; ++k)
            s += amp_cos[k] * std::cos(k * j * h) + amp_sin[k] * std::sin(k * j * h);
        f[j] = s;
    }
    return f;
}

// K = sum_j |c_j| over the sine/cosine coefficient sequence; bounds |f|.
inline double shear_profile_bound(const ShearSpectrum& sp) {
    double K = 0.0;
    for (int k = 1; k <= sp.kmax; ++k) K += 2.0 * std::sqrt(2.0 * sp.coefficient(k));
    return K;
}

// D_f evaluated at a point.
inline double shear_covariance(const ShearSpectrum& sp, double x) {
    double s = 0.0;
    for (int k = 1; k <= sp.kmax; ++k) s += 2.0 * sp.coefficient(k) * std::cos(k * x);
    return s;
}

}  // namespace kraichnan

#endif

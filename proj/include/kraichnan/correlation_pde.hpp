#ifndef KRAICHNAN_CORRELATION_PDE_HPP
#define KRAICHNAN_CORRELATION_PDE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "kraichnan/errors.hpp"
#include "kraichnan/fft.hpp"
#include "kraichnan/grid.hpp"
#include "kraichnan/tensor.hpp"

namespace kraichnan {

// Discrete spatial autocorrelation g0(x) = (1/|T^2|) int theta(y) theta(y+x) dy.
// g0(0) = (2pi)^-2 ||theta||_L2^2, g0 even, mean(g0) = mean(theta)^2.
inline GridField autocorrelation(const GridField& theta) {
    const int n = theta.n();
    Fft fft(n, 2);
    auto spec = fft.forward_real(theta);
    for (auto& c : spec) c = std::norm(c);
    GridField g = fft.backward_real_sum(std::move(spec));
    const double inv = 1.0 / (double(g.size()) * double(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= inv;
    return g;
}

// Divergence-form operator K ~ -div(a grad .) assembled from periodic Q1
// elements with per-element coefficient = arithmetic mean of the 4 corner
// node tensors and exact elementwise integration. K is symmetric positive
// semidefinite with kernel = constants for pointwise-PSD a, and 1^T K = 0,
// which is what makes implicit Euler mean-conserving and L2-dissipative.
class DiffusionOperator {
  public:
    DiffusionOperator(const TensorField& a) : n_(a.n), h_(2.0 * M_PI / a.n) {
        if (a.dim != 2) throw ConfigError("d", "the correlation solver supports d=2 only");
        build_element_matrices();
        for (auto& s : stencil_) s.assign(std::size_t(n_) * n_, 0.0);
        // local nodes 0..3 = (0,0), (1,0), (1,1), (0,1) in element coords
        static constexpr int loc_di[4] = {0, 1, 1, 0};
        static constexpr int loc_dj[4] = {0, 0, 1, 1};
        for (int i = 0; i < n_; ++i) {
            const int ip = (i + 1) % n_;
            for (int j = 0; j < n_; ++j) {
                const int jp = (j + 1) % n_;
                const std::size_t c00 = idx(i, j), c10 = idx(ip, j), c11 = idx(ip, jp),
                                  c01 = idx(i, jp);
                const double p = 0.25 * (a.comp[0][c00] + a.comp[0][c10] + a.comp[0][c11] +
                                         a.comp[0][c01]);
                const double q = 0.25 * (a.comp[1][c00] + a.comp[1][c10] + a.comp[1][c11] +
                                         a.comp[1][c01]);
                const double s = 0.25 * (a.comp[2][c00] + a.comp[2][c10] + a.comp[2][c11] +
                                         a.comp[2][c01]);
                double ke[4][4];
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c)
                        ke[r][c] = p * P_[r][c] + q * Q_[r][c] + s * S_[r][c];
                const int gi[4] = {i, ip, ip, i};
                const int gj[4] = {j, j, jp, jp};
                for (int r = 0; r < 4; ++r) {
                    const std::size_t node = idx(gi[r], gj[r]);
                    for (int c = 0; c < 4; ++c) {
                        int di = loc_di[c] - loc_di[r];
                        int dj = loc_dj[c] - loc_dj[r];
                        stencil_[offset_slot(di, dj)][node] += ke[r][c];
                    }
                }
            }
        }
        wrap_minus_.resize(n_);
        wrap_plus_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            wrap_minus_[i] = (i + n_ - 1) % n_;
            wrap_plus_[i] = (i + 1) % n_;
        }
    }

    int n() const { return n_; }
    double spacing() const { return h_; }

    // y = K g
    void apply(const std::vector<double>& g, std::vector<double>& y) const {
        for (int i = 0; i < n_; ++i) {
            const int im = wrap_minus_[i], ip = wrap_plus_[i];
            for (int j = 0; j < n_; ++j) {
                const int jm = wrap_minus_[j], jp = wrap_plus_[j];
                const std::size_t c = idx(i, j);
                double acc = stencil_[4][c] * g[c];
                acc += stencil_[0][c] * g[idx(im, jm)];
                acc += stencil_[1][c] * g[idx(im, j)];
                acc += stencil_[2][c] * g[idx(im, jp)];
                acc += stencil_[3][c] * g[idx(i, jm)];
                acc += stencil_[5][c] * g[idx(i, jp)];
                acc += stencil_[6][c] * g[idx(ip, jm)];
                acc += stencil_[7][c] * g[idx(ip, j)];
                acc += stencil_[8][c] * g[idx(ip, jp)];
                y[c] = acc;
            }
        }
    }

    // Stencil of the a = I operator (position-independent), slot-ordered as
    // offsets (di,dj) in row-major {-1,0,1}^2; used for the preconditioner
    // symbol and available to the tests.
    static std::array<double, 9> identity_stencil() {
        build_element_matrices();
        std::array<double, 9> s{};
        static constexpr int loc_di[4] = {0, 1, 1, 0};
        static constexpr int loc_dj[4] = {0, 0, 1, 1};
        // Four elements touch a node; sum their contributions.
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                int di = loc_di[c] - loc_di[r];
                int dj = loc_dj[c] - loc_dj[r];
                s[offset_slot(di, dj)] += P_[r][c] + Q_[r][c];
            }
        return s;
    }

    std::size_t idx(int i, int j) const { return std::size_t(i) * n_ + j; }

  private:
    static int offset_slot(int di, int dj) { return (di + 1) * 3 + (dj + 1); }

    static void build_element_matrices() {
        static bool built = false;
        if (built) return;
        // 2x2 Gauss is exact for products of bilinear shape gradients.
        const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) P_[r][c] = Q_[r][c] = S_[r][c] = 0.0;
        auto dxi = [](int a, double v) {
            switch (a) {
                case 0: return -(1.0 - v);
                case 1: return 1.0 - v;
                case 2: return v;
                default: return -v;
            }
        };
        auto dnu = [](int a, double x) {
            switch (a) {
                case 0: return -(1.0 - x);
                case 1: return -x;
                case 2: return x;
                default: return 1.0 - x;
            }
        };
        for (double x : gp)
            for (double v : gp) {
                const double w = 0.25;
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c) {
                        P_[r][c] += w * dxi(r, v) * dxi(c, v);
                        Q_[r][c] += w * dnu(r, x) * dnu(c, x);
                        S_[r][c] += w * (dxi(r, v) * dnu(c, x) + dnu(r, x) * dxi(c, v));
                    }
            }
        built = true;
    }

    int n_;
    double h_;
    std::array<std::vector<double>, 9> stencil_;
    std::vector<int> wrap_minus_, wrap_plus_;
    inline static double P_[4][4];
    inline static double Q_[4][4];
    inline static double S_[4][4];
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
};

// Implicit Euler for dg/dt = -(K/h^2) g: solves (h^2 I + dt K) g_new = h^2 g
// by preconditioned CG. The preconditioner is the constant-coefficient
// operator h^2 I + dt c K_I inverted in Fourier space.
class CorrelationSolver {
  public:
    CorrelationSolver(const TensorField& a, double dt, double tol = 1e-10)
        : op_(a), dt_(dt), tol_(tol), fft_(a.n, 2) {
        if (!(dt > 0.0)) throw ConfigError("dt", "must be > 0");
        max_iters_ = 10 * a.n * a.n;
        const int n = a.n;
        // Coefficient scale for the preconditioner.
        double mean_tr = 0.0;
        for (std::size_t i = 0; i < a.points(); ++i) mean_tr += a.comp[0][i] + a.comp[1][i];
        mean_tr /= double(a.points()) * 2.0;
        const double cbar = std::max(mean_tr, 1e-30);
        const auto st = DiffusionOperator::identity_stencil();
        const double h = op_.spacing();
        symbol_.assign(std::size_t(n) * n, 0.0);
        for (int m1 = 0; m1 < n; ++m1)
            for (int m2 = 0; m2 < n; ++m2) {
                const double k1 = 2.0 * M_PI * m1 / n;  // k * h
                const double k2 = 2.0 * M_PI * m2 / n;
                double sig = 0.0;
                for (int di = -1; di <= 1; ++di)
                    for (int dj = -1; dj <= 1; ++dj)
                        sig += st[(di + 1) * 3 + (dj + 1)] * std::cos(k1 * di + k2 * dj);
                symbol_[std::size_t(m1) * n + m2] = 1.0 / (h * h + dt_ * cbar * sig);
            }
        work_.assign(std::size_t(n) * n, 0.0);
    }

    const DiffusionOperator& op() const { return op_; }
    double dt() const { return dt_; }
    SolveStats last_stats() const { return stats_; }

    GridField step(const GridField& g) {
        const int n = op_.n();
        const double h2 = op_.spacing() * op_.spacing();
        const std::size_t npts = g.size();
        std::vector<double> b(npts);
        for (std::size_t i = 0; i < npts; ++i) b[i] = h2 * g[i];
        std::vector<double> x = g.data();  // warm start
        std::vector<double> r(npts), z(npts), p(npts), ap(npts);
        apply_system(x, ap);
        double bnorm = 0.0;
        for (std::size_t i = 0; i < npts; ++i) {
            r[i] = b[i] - ap[i];
            bnorm += b[i] * b[i];
        }
        bnorm = std::sqrt(bnorm);
        if (bnorm == 0.0) bnorm = 1.0;
        precondition(r, z);
        p = z;
        double rz = dot(r, z);
        double rnorm = std::sqrt(dot(r, r));
        int it = 0;
        while (rnorm > tol_ * bnorm) {
            if (it >= max_iters_)
                throw SolveError("correlation step: CG hit iteration cap, relative residual " +
                                 std::to_string(rnorm / bnorm));
            apply_system(p, ap);
            const double alpha = rz / dot(p, ap);
            for (std::size_t i = 0; i < npts; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            precondition(r, z);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < npts; ++i) p[i] = z[i] + beta * p[i];
            rnorm = std::sqrt(dot(r, r));
            ++it;
        }
        stats_ = {it, rnorm / bnorm};
        GridField out(n);
        out.data() = std::move(x);
        return out;
    }

  private:
    void apply_system(const std::vector<double>& v, std::vector<double>& out) {
        op_.apply(v, out);
        const double h2 = op_.spacing() * op_.spacing();
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = h2 * v[i] + dt_ * out[i];
    }
    void precondition(const std::vector<double>& r, std::vector<double>& z) {
        const std::size_t npts = r.size();
        std::vector<std::complex<double>> c(npts);
        for (std::size_t i = 0; i < npts; ++i) c[i] = r[i];
        fft_.forward(c);
        for (std::size_t i = 0; i < npts; ++i) c[i] *= symbol_[i];
        fft_.backward(c);
        const double inv = 1.0 / double(npts);
        for (std::size_t i = 0; i < npts; ++i) z[i] = c[i].real() * inv;
    }
    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }

    DiffusionOperator op_;
    double dt_;
    double tol_;
    int max_iters_;
    Fft fft_;
    std::vector<double> symbol_;
    std::vector<double> work_;
    SolveStats stats_{};
};

// One implicit step without keeping solver state (convenience; prefer
// CorrelationSolver in loops).
inline GridField correlation_step(const GridField& g, const TensorField& a, double dt) {
    CorrelationSolver solver(a, dt);
    return solver.step(g);
}

struct CorrelationTrace {
    std::vector<double> t;
    std::vector<double> g_at_0;
    std::vector<double> l2_norm;
    std::vector<double> linf_norm;
    std::vector<int> linf_at_origin;
    std::vector<std::pair<double, GridField>> snapshots;
    bool warned_nonzero_mean = false;
};

inline CorrelationTrace solve_correlation(const GridField& g0, const TensorField& a, double T,
                                          double dt, const std::vector<double>& snapshot_times = {}) {
    if (!(T > 0.0)) throw ConfigError("tmax", "must be > 0");
    CorrelationSolver solver(a, dt);
    CorrelationTrace trace;
    trace.warned_nonzero_mean = std::abs(g0.mean()) > 1e-10 * std::max(1.0, g0.linf_norm());
    GridField g = g0;
    double t = 0.0;
    auto record = [&](double time, const GridField& f) {
        trace.t.push_back(time);
        trace.g_at_0.push_back(f[0]);
        trace.l2_norm.push_back(f.l2_norm());
        trace.linf_norm.push_back(f.linf_norm());
        trace.linf_at_origin.push_back(f.linf_at_origin() ? 1 : 0);
    };
    record(0.0, g);
    std::size_t next_snap = 0;
    auto maybe_snapshot = [&](double time, const GridField& f) {
        while (next_snap < snapshot_times.size() && time >= snapshot_times[next_snap] - 1e-12) {
            trace.snapshots.emplace_back(snapshot_times[next_snap], f);
            ++next_snap;
        }
    };
    maybe_snapshot(0.0, g);
    const long nsteps = std::lround(std::ceil(T / dt - 1e-9));
    for (long s = 0; s < nsteps; ++s) {
        g = solver.step(g);
        t = double(s + 1) * dt;
        record(t, g);
        maybe_snapshot(t, g);
    }
    return trace;
}

struct DecayFit {
    double rate = 0.0;
    double prefactor = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double residual = 0.0;
};

// Default transient discard mirroring the 1/(1-alpha) waiting time.
inline double default_fit_discard(double alpha) { return std::max(1.0, 2.0 / (1.0 - alpha)); }

// Least-squares exponential fit on the window [t_lo, t_hi]: regress log v on
// t; rate = -slope, prefactor = exp(intercept). Residual is the max
// |log v - fit| over the window (~ max relative error).
inline DecayFit fit_decay_window(const std::vector<double>& t, const std::vector<double>& v,
                                 double t_lo, double t_hi) {
    if (t.size() != v.size()) throw ConfigError("trace", "time/value size mismatch");
    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo - 1e-12 || t[i] > t_hi + 1e-12) continue;
        if (!(v[i] > 0.0))
            throw SolveError("fit_decay: non-positive value in fit window at t=" +
                             std::to_string(t[i]));
        ts.push_back(t[i]);
        ls.push_back(std::log(v[i]));
    }
    if (ts.size() < 10) throw ConfigError("trace", "fewer than 10 trace points in fit window");
    const double m = double(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += ls[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * ls[i];
    }
    const double denom = m * stt - st * st;
    const double slope = (m * stl - st * sl) / denom;
    const double intercept = (sl - slope * st) / m;
    DecayFit fit;
    fit.rate = -slope;
    fit.prefactor = std::exp(intercept);
    fit.t_lo = ts.front();
    fit.t_hi = ts.back();
    double res = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
        res = std::max(res, std::abs(ls[i] - (intercept + slope * ts[i])));
    fit.residual = res;
    return fit;
}

inline DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& v,
                          double discard) {
    if (t.empty()) throw ConfigError("trace", "empty trace");
    return fit_decay_window(t, v, discard, t.back());
}

// L2 profile from near-delta data (1/cell-volume at the origin node).
inline CorrelationTrace nash_profile(const TensorField& a, double dt, double t_end) {
    GridField g0(a.n);
    const double h = 2.0 * M_PI / a.n;
    g0[0] = 1.0 / (h * h);
    return solve_correlation(g0, a, t_end, dt);
}

}  // namespace kraichnan

#endif

#ifndef KRAICHNAN_FLOWS_HPP
#define KRAICHNAN_FLOWS_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kraichnan/errors.hpp"
#include "kraichnan/grid.hpp"
#include "kraichnan/rng.hpp"
#include "kraichnan/spectrum.hpp"

namespace kraichnan {

enum class FlowModel {
    smooth_mode,
    oriented_shear,
    bounded_shear_drift,
    white_kraichnan,
    white_shear,
};

inline std::string flow_model_name(FlowModel m) {
    switch (m) {
        case FlowModel::smooth_mode: return "smooth_mode";
        case FlowModel::oriented_shear: return "oriented_shear";
        case FlowModel::bounded_shear_drift: return "bounded_shear_drift";
        case FlowModel::white_kraichnan: return "white_kraichnan";
        case FlowModel::white_shear: return "white_shear";
    }
    return "?";
}

inline FlowModel flow_model_from_name(const std::string& s) {
    if (s == "smooth_mode") return FlowModel::smooth_mode;
    if (s == "oriented_shear") return FlowModel::oriented_shear;
    if (s == "bounded_shear_drift") return FlowModel::bounded_shear_drift;
    if (s == "white_kraichnan") return FlowModel::white_kraichnan;
    if (s == "white_shear") return FlowModel::white_shear;
    throw ConfigError("model", "unknown flow model '" + s + "'");
}

struct FlowSpec {
    FlowModel model = FlowModel::white_kraichnan;
    SpectrumConfig spectrum;  // smooth_mode, white_kraichnan
    ShearSpectrum shear;      // oriented_shear, bounded_shear_drift, white_shear
};

// One-mode decomposition of the truncated d=2 drift covariance:
// u0 = sum_j c_j f_j dW_j with f_j = sqrt(2*Lambda) {cos,sin}(k.x) e(k),
// c_j^2 = lambda(k)/Lambda, Lambda = sum_{k != 0} lambda(k). Then
// sum_j c_j^2 = 1 exactly, sup_j ||f_j||_inf = sqrt(2*Lambda), and
// sum c_j^2 f_j(x) (x) f_j(y) equals the truncated D(x-y).
struct ModeTable {
    struct Mode {
        int kx = 0, ky = 0;
        bool is_sin = false;
        double ex = 0.0, ey = 0.0;  // transverse unit vector
        double cj2 = 0.0;
    };
    std::vector<Mode> modes;
    double amplitude = 0.0;  // sqrt(2*Lambda)

    double weight_sum() const {
        double s = 0.0;
        for (const auto& m : modes) s += m.cj2;
        return s;
    }

    static ModeTable from_spectrum(const SpectrumConfig& cfg) {
        cfg.validate();
        if (cfg.dim != 2) throw ConfigError("d", "mode table requires d=2");
        ModeTable table;
        double lambda_total = 0.0;
        int k[2];
        for (k[0] = -cfg.kmax; k[0] <= cfg.kmax; ++k[0])
            for (k[1] = -cfg.kmax; k[1] <= cfg.kmax; ++k[1]) {
                if (k[0] == 0 && k[1] == 0) continue;
                lambda_total += spectral_amplitude(cfg, k);
            }
        table.amplitude = std::sqrt(2.0 * lambda_total);
        for (k[0] = 0; k[0] <= cfg.kmax; ++k[0])
            for (k[1] = -cfg.kmax; k[1] <= cfg.kmax; ++k[1]) {
                const bool half = (k[0] > 0) || (k[0] == 0 && k[1] > 0);
                if (!half) continue;
                const double lambda = spectral_amplitude(cfg, k);
                const double kn = std::sqrt(double(k[0]) * k[0] + double(k[1]) * k[1]);
                for (bool is_sin : {false, true}) {
                    Mode m;
                    m.kx = k[0];
                    m.ky = k[1];
                    m.is_sin = is_sin;
                    m.ex = -k[1] / kn;
                    m.ey = k[0] / kn;
                    m.cj2 = lambda / lambda_total;
                    table.modes.push_back(m);
                }
            }
        return table;
    }
};

// One segment of the spatially smooth model: Z * f_J with P(J = j) = c_j^2
// and Z standard normal. Draw order: categorical index first, then Z.
inline VelocityField sample_smooth_mode_segment(const ModeTable& table, int n, std::uint64_t seed) {
    if (table.modes.empty()) throw ConfigError("table", "empty mode table");
    Rng rng(seed);
    const double u = rng.uniform();
    double cdf = 0.0;
    const ModeTable::Mode* pick = &table.modes.back();
    for (const auto& m : table.modes) {
        cdf += m.cj2;
        if (u < cdf) {
            pick = &m;
            break;
        }
    }
    const double z = rng.normal();
    VelocityField out{GridField(n), GridField(n)};
    const double h = 2.0 * M_PI / n;
    const double amp = z * table.amplitude;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double phase = pick->kx * (i * h) + pick->ky * (j * h);
            const double trig = pick->is_sin ? std::sin(phase) : std::cos(phase);
            out.ux(i, j) = amp * trig * pick->ex;
            out.uy(i, j) = amp * trig * pick->ey;
        }
    return out;
}

// Randomly oriented shear: sqrt(2) B f(x) e_y + sqrt(2) (1-B) f(y) e_x with
// B Bernoulli(1/2). Orientation bit drawn from the segment stream; the
// Gaussian profile uses substream 1.
inline VelocityField sample_oriented_shear_segment(const ShearSpectrum& sp, int n,
                                                   std::uint64_t seed) {
    Rng rng(seed);
    const int vertical = rng.bernoulli();
    const auto profile = sample_shear_profile(sp, n, derive_stream(seed, 1));
    VelocityField out{GridField(n), GridField(n)};
    const double s = std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (vertical)
                out.uy(i, j) = s * profile[i];  // f(x) e_y
            else
                out.ux(i, j) = s * profile[j];  // f(y) e_x
        }
    return out;
}

// Bounded sum of shears with mean drift: g(x) e_y + h(y) e_x + 2K X (e_x+e_y)
// with +/-1 coefficients; requires alpha > 1/2 so K = sum|c_j| converges.
// X from the segment stream; profiles from substreams 1, 2.
inline VelocityField sample_bounded_shear_drift_segment(const ShearSpectrum& sp, int n,
                                                        std::uint64_t seed) {
    if (!(sp.alpha > 0.5))
        throw ConfigError("alpha", "bounded_shear_drift requires alpha > 1/2");
    Rng rng(seed);
    const double x_sign = rng.sign();
    const auto g = sample_shear_profile(sp, n, derive_stream(seed, 1), /*rademacher=*/true);
    const auto h = sample_shear_profile(sp, n, derive_stream(seed, 2), /*rademacher=*/true);
    const double drift = 2.0 * shear_profile_bound(sp) * x_sign;
    VelocityField out{GridField(n), GridField(n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out.ux(i, j) = h[j] + drift;
            out.uy(i, j) = g[i] + drift;
        }
    return out;
}

// White-in-time shear-model segment: f(x) e_y + g(y) e_x, independent
// Gaussian profiles (covariance D_s).
inline VelocityField sample_white_shear_segment(const ShearSpectrum& sp, int n,
                                                std::uint64_t seed) {
    const auto f = sample_shear_profile(sp, n, derive_stream(seed, 1));
    const auto g = sample_shear_profile(sp, n, derive_stream(seed, 2));
    VelocityField out{GridField(n), GridField(n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out.ux(i, j) = g[j];
            out.uy(i, j) = f[i];
        }
    return out;
}

// Piecewise-constant-in-time drift u^eps(t,x) = eps^-1/2 u_ceil(t/eps)(x).
// Segment j (0-based) governs [j*eps, (j+1)*eps); a lookup exactly at t=j*eps
// returns segment j, i.e. the spec's 1-based "segment j+1".
struct PiecewiseFlow {
    double eps = 0.0;
    FlowModel model = FlowModel::white_kraichnan;
    std::uint64_t seed = 0;
    double scaling = 1.0;  // eps^-1/2 factor already applied to segments
    int n = 0;
    std::vector<VelocityField> segments;

    int segment_index(double t) const {
        int j = int(std::floor(t / eps + 1e-9));
        if (j < 0) j = 0;
        if (j >= int(segments.size())) j = int(segments.size()) - 1;
        return j;
    }
    const VelocityField& segment_at(double t) const { return segments[segment_index(t)]; }

    double max_abs_velocity() const {
        double m = 0.0;
        for (const auto& s : segments) m = std::max(m, s.max_abs());
        return m;
    }
};

inline VelocityField sample_flow_segment(const FlowSpec& spec, const ModeTable* table, int n,
                                         std::uint64_t seed) {
    switch (spec.model) {
        case FlowModel::smooth_mode:
            return sample_smooth_mode_segment(*table, n, seed);
        case FlowModel::oriented_shear:
            return sample_oriented_shear_segment(spec.shear, n, seed);
        case FlowModel::bounded_shear_drift:
            return sample_bounded_shear_drift_segment(spec.shear, n, seed);
        case FlowModel::white_kraichnan:
            return sample_gaussian_field2(spec.spectrum, n, seed);
        case FlowModel::white_shear:
            return sample_white_shear_segment(spec.shear, n, seed);
    }
    throw ConfigError("model", "unknown flow model");
}

// ceil(T/eps) iid segments, each scaled by eps^-1/2; segment j uses stream
// derive_stream(seed, j). Deterministic per (model, params, eps, T, seed).
inline PiecewiseFlow build_piecewise_flow(const FlowSpec& spec, int n, double eps, double T,
                                          std::uint64_t seed) {
    if (!(eps > 0.0)) throw ConfigError("eps", "must be > 0");
    if (!(T > 0.0)) throw ConfigError("tmax", "must be > 0");
    PiecewiseFlow flow;
    flow.eps = eps;
    flow.model = spec.model;
    flow.seed = seed;
    flow.scaling = 1.0 / std::sqrt(eps);
    flow.n = n;
    ModeTable table;
    if (spec.model == FlowModel::smooth_mode) table = ModeTable::from_spectrum(spec.spectrum);
    const long count = std::lround(std::ceil(T / eps - 1e-9));
    flow.segments.reserve(std::size_t(count));
    for (long j = 0; j < count; ++j) {
        VelocityField seg = sample_flow_segment(spec, &table, n, derive_stream(seed, std::uint64_t(j)));
        for (std::size_t i = 0; i < seg.ux.size(); ++i) {
            seg.ux[i] *= flow.scaling;
            seg.uy[i] *= flow.scaling;
        }
        flow.segments.push_back(std::move(seg));
    }
    return flow;
}

}  // namespace kraichnan

#endif

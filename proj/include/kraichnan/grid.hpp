#ifndef KRAICHNAN_GRID_HPP
#define KRAICHNAN_GRID_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace kraichnan {

// Uniform periodic grid on T^2 = [-pi,pi)^2, stored with node coordinates
// x_i = i*h, h = 2*pi/n, i = 0..n-1. The origin is node (0,0). Distances and
// |x| weights use the representative of x in [-pi,pi] (rep_coord below).
// Layout: value at (ix, iy) lives at index ix*n + iy.
inline double torus_rep(double x) {
    double r = std::remainder(x, 2.0 * M_PI);
    return r;
}

class GridField {
  public:
    GridField() = default;
    GridField(int n, double fill = 0.0) : n_(n), v_(std::size_t(n) * n, fill) {
        if (n < 2) throw std::invalid_argument("grid: n must be >= 2");
    }

    static GridField from_function(int n, const std::function<double(double, double)>& f) {
        GridField g(n);
        const double h = g.spacing();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = f(i * h, j * h);
        return g;
    }

    int n() const { return n_; }
    double spacing() const { return 2.0 * M_PI / n_; }
    std::size_t size() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[std::size_t(i) * n_ + j]; }
    double operator()(int i, int j) const { return v_[std::size_t(i) * n_ + j]; }
    double& operator[](std::size_t k) { return v_[k]; }
    double operator[](std::size_t k) const { return v_[k]; }

    int wrap(int i) const {
        int r = i % n_;
        return r < 0 ? r + n_ : r;
    }
    double coord(int i) const { return i * spacing(); }
    // Representative of node coordinate in [-pi, pi].
    double rep_coord(int i) const {
        return (2 * i <= n_) ? i * spacing() : (i - n_) * spacing();
    }

    double mean() const {
        double s = 0.0;
        for (double x : v_) s += x;
        return s / double(v_.size());
    }
    double integral() const {
        const double cell = spacing() * spacing();
        double s = 0.0;
        for (double x : v_) s += x;
        return s * cell;
    }
    // L2(T^2) norm: sqrt(h^2 * sum v^2).
    double l2_norm() const {
        double s = 0.0;
        for (double x : v_) s += x * x;
        return std::sqrt(s * spacing() * spacing());
    }
    double linf_norm() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }
    // True when max|v| is attained at the origin node (diagnostic).
    bool linf_at_origin() const {
        const double m = linf_norm();
        return std::abs(v_[0]) >= m * (1.0 - 1e-12);
    }

    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }

  private:
    int n_ = 0;
    std::vector<double> v_;
};

struct VelocityField {
    GridField ux;
    GridField uy;

    int n() const { return ux.n(); }
    double max_abs() const { return std::max(ux.linf_norm(), uy.linf_norm()); }
};

}  // namespace kraichnan

#endif

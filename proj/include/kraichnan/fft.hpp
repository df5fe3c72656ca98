#ifndef KRAICHNAN_FFT_HPP
#define KRAICHNAN_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "kraichnan/grid.hpp"

namespace kraichnan {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Integer wavenumber of DFT index m on an n-grid, in (-n/2, n/2].
inline int wavenumber(int m, int n) { return (2 * m <= n) ? m : m - n; }
inline int dft_index(int k, int n) { return k >= 0 ? k : k + n; }

// In-place complex transforms on an n x n (or n x n x n) grid with the sign
// convention
//   forward : u_hat(k) = sum_j u(x_j) exp(-i k.x_j),   x_j = j*h
//   backward: u(x_j)   = sum_k u_hat(k) exp(+i k.x_j)   (unnormalized)
// so forward followed by backward multiplies by n^d. One instance owns its
// buffer and must not be shared across threads; plan setup is globally
// locked because the FFTW planner is not thread-safe.
class Fft {
  public:
    Fft(int n, int dim) : n_(n), dim_(dim) {
        if (dim != 2 && dim != 3) throw std::invalid_argument("fft: dim must be 2 or 3");
        std::size_t total = 1;
        for (int d = 0; d < dim; ++d) total *= std::size_t(n);
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
        size_ = total;
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (dim == 2) {
            fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            fwd_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        if (!fwd_ || !bwd_) throw std::runtime_error("fft: plan creation failed");
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    int n() const { return n_; }
    std::size_t size() const { return size_; }

    void forward(std::vector<std::complex<double>>& a) {
        run(a, fwd_);
    }
    void backward(std::vector<std::complex<double>>& a) {
        run(a, bwd_);
    }

    // Real-field helpers (2D). forward_real fills a spectral array; the
    // backward_* variants drop the (tiny) imaginary residue.
    std::vector<std::complex<double>> forward_real(const GridField& g) {
        std::vector<std::complex<double>> a(size_);
        for (std::size_t i = 0; i < size_; ++i) a[i] = g[i];
        forward(a);
        return a;
    }
    GridField backward_real_sum(std::vector<std::complex<double>> a) {
        backward(a);
        GridField g(n_);
        for (std::size_t i = 0; i < size_; ++i) g[i] = a[i].real();
        return g;
    }
    GridField backward_real_normalized(std::vector<std::complex<double>> a) {
        backward(a);
        GridField g(n_);
        const double inv = 1.0 / double(size_);
        for (std::size_t i = 0; i < size_; ++i) g[i] = a[i].real() * inv;
        return g;
    }

  private:
    void run(std::vector<std::complex<double>>& a, fftw_plan p) {
        if (a.size() != size_) throw std::invalid_argument("fft: size mismatch");
        auto* src = reinterpret_cast<const fftw_complex*>(a.data());
        for (std::size_t i = 0; i < size_; ++i) {
            buf_[i][0] = src[i][0];
            buf_[i][1] = src[i][1];
        }
        fftw_execute(p);
        auto* dst = reinterpret_cast<fftw_complex*>(a.data());
        for (std::size_t i = 0; i < size_; ++i) {
            dst[i][0] = buf_[i][0];
            dst[i][1] = buf_[i][1];
        }
    }

    int n_;
    int dim_;
    std::size_t size_ = 0;
    fftw_complex* buf_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace kraichnan

#endif

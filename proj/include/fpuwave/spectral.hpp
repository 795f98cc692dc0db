#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fpuwave {

bool is_power_of_two(std::size_t n);

// Real-to-complex FFT of a fixed length backed by FFTW. Plans are cached per
// length and creation is serialized, so instances may be used from several
// threads as long as each thread uses its own instance.
class RealFft {
public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const { return n_; }
    std::size_t modes() const { return n_ / 2 + 1; }

    // Unnormalized forward transform.
    void forward(std::span<const double> in, std::span<std::complex<double>> out);
    // Inverse transform including the 1/n factor.
    void inverse(std::span<const std::complex<double>> in, std::span<double> out);

private:
    std::size_t n_;
    double* rbuf_;
    std::complex<double>* cbuf_;
    void* fwd_;
    void* inv_;
};

// Periodic grid x_j = -L/2 + j L/N with Fourier multipliers.
class SpectralOps {
public:
    SpectralOps(std::size_t n, double length);

    std::size_t size() const { return n_; }
    double length() const { return length_; }
    double dx() const { return length_ / static_cast<double>(n_); }
    double x(std::size_t j) const { return -0.5 * length_ + static_cast<double>(j) * dx(); }
    double wavenumber(std::size_t m) const;

    // Returns u(x + h) on the grid. Integer multiples of dx are exact index rolls.
    void shift(std::span<const double> u, double h, std::span<double> out);
    void derivative(std::span<const double> u, std::span<double> out);
    void second_derivative(std::span<const double> u, std::span<double> out);
    // Multiply the Fourier coefficients by symbol(kappa) (real, even in kappa).
    template <class F>
    void apply_symbol(std::span<const double> u, std::span<double> out, F&& symbol) {
        fft_.forward(u, spec_);
        for (std::size_t m = 0; m < spec_.size(); ++m) spec_[m] *= symbol(wavenumber(m));
        fft_.inverse(spec_, out);
    }

    RealFft& fft() { return fft_; }

private:
    std::size_t n_;
    double length_;
    RealFft fft_;
    std::vector<std::complex<double>> spec_;
};

// Trigonometric interpolant of periodic samples on the SpectralOps grid.
class TrigInterpolant {
public:
    TrigInterpolant(std::span<const double> samples, double length);

    double operator()(double x) const;
    double derivative(double x) const;
    double length() const { return length_; }
    std::size_t size() const { return n_; }

    // Samples on a grid refined by an integer factor (zero-padding).
    std::vector<double> refined(std::size_t factor) const;

private:
    std::size_t n_;
    double length_;
    std::vector<std::complex<double>> coef_;  // normalized, Nyquist halved
};

}  // namespace fpuwave

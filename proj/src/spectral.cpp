#include "fpuwave/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "fpuwave/errors.hpp"

namespace fpuwave {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

RealFft::RealFft(std::size_t n) : n_(n) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "FFT length must be at least 2");
    std::lock_guard<std::mutex> lock(planner_mutex());
    rbuf_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    cbuf_ = static_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    auto* c = reinterpret_cast<fftw_complex*>(cbuf_);
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), rbuf_, c, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, rbuf_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_));
    fftw_free(rbuf_);
    fftw_free(cbuf_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
    std::copy(in.begin(), in.end(), rbuf_);
    fftw_execute(static_cast<fftw_plan>(fwd_));
    std::copy(cbuf_, cbuf_ + modes(), out.begin());
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    // c2r destroys its input, hence the copy into the owned buffer.
    std::copy(in.begin(), in.end(), cbuf_);
    fftw_execute(static_cast<fftw_plan>(inv_));
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = rbuf_[j] * scale;
}

SpectralOps::SpectralOps(std::size_t n, double length)
    : n_(n), length_(length), fft_(n), spec_(n / 2 + 1) {
    if (!is_power_of_two(n)) throw Error(ErrorKind::NonPowerOfTwo, "grid size must be a power of two");
}

double SpectralOps::wavenumber(std::size_t m) const {
    return 2.0 * std::numbers::pi * static_cast<double>(m) / length_;
}

void SpectralOps::shift(std::span<const double> u, double h, std::span<double> out) {
    const double steps = h / dx();
    const double r = std::round(steps);
    if (std::abs(steps - r) < 1e-9) {
        const long n = static_cast<long>(n_);
        long s = static_cast<long>(r) % n;
        if (s < 0) s += n;
        for (long j = 0; j < n; ++j) out[j] = u[(j + s) % n];
        return;
    }
    fft_.forward(u, spec_);
    const std::size_t nyq = n_ / 2;
    for (std::size_t m = 0; m < nyq; ++m) spec_[m] *= std::polar(1.0, wavenumber(m) * h);
    spec_[nyq] *= std::cos(wavenumber(nyq) * h);
    fft_.inverse(spec_, out);
}

void SpectralOps::derivative(std::span<const double> u, std::span<double> out) {
    fft_.forward(u, spec_);
    const std::size_t nyq = n_ / 2;
    for (std::size_t m = 0; m < nyq; ++m) spec_[m] *= std::complex<double>(0.0, wavenumber(m));
    spec_[nyq] = 0.0;
    fft_.inverse(spec_, out);
}

void SpectralOps::second_derivative(std::span<const double> u, std::span<double> out) {
    apply_symbol(u, out, [](double k) { return -k * k; });
}

TrigInterpolant::TrigInterpolant(std::span<const double> samples, double length)
    : n_(samples.size()), length_(length), coef_(samples.size() / 2 + 1) {
    if (n_ % 2 != 0 || n_ < 2) throw Error(ErrorKind::InvalidArgument, "interpolant needs an even sample count");
    RealFft fft(n_);
    fft.forward(samples, coef_);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t m = 0; m < coef_.size(); ++m)
        coef_[m] *= (m == 0 || m == n_ / 2) ? inv : 2.0 * inv;
}

double TrigInterpolant::operator()(double x) const {
    const double theta = 2.0 * std::numbers::pi * (x + 0.5 * length_) / length_;
    const std::complex<double> z = std::polar(1.0, theta);
    std::complex<double> zm(1.0, 0.0);
    double s = 0.0;
    for (std::size_t m = 0; m < coef_.size(); ++m) {
        if (m % 64 == 0) zm = std::polar(1.0, theta * static_cast<double>(m));
        s += (coef_[m] * zm).real();
        zm *= z;
    }
    return s;
}

double TrigInterpolant::derivative(double x) const {
    const double theta = 2.0 * std::numbers::pi * (x + 0.5 * length_) / length_;
    const std::complex<double> z = std::polar(1.0, theta);
    std::complex<double> zm(1.0, 0.0);
    double s = 0.0;
    const double k1 = 2.0 * std::numbers::pi / length_;
    for (std::size_t m = 0; m < coef_.size(); ++m) {
        if (m % 64 == 0) zm = std::polar(1.0, theta * static_cast<double>(m));
        s += (coef_[m] * std::complex<double>(0.0, k1 * static_cast<double>(m)) * zm).real();
        zm *= z;
    }
    return s;
}

std::vector<double> TrigInterpolant::refined(std::size_t factor) const {
    if (factor == 0) throw Error(ErrorKind::InvalidArgument, "refinement factor must be positive");
    const std::size_t nf = n_ * factor;
    std::vector<std::complex<double>> c(nf / 2 + 1, 0.0);
    const double nfd = static_cast<double>(nf);
    for (std::size_t m = 0; m < coef_.size(); ++m) {
        // Undo the one-sided weights and rescale to the unnormalized layout.
        const double w = (m == 0 || (m == n_ / 2 && factor == 1)) ? 1.0 : 0.5;
        c[m] = coef_[m] * w * nfd;
    }
    std::vector<double> out(nf);
    RealFft fft(nf);
    fft.inverse(c, out);
    return out;
}

}  // namespace fpuwave

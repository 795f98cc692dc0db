#include "fpuwave/waves.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fpuwave/bvp.hpp"
#include "fpuwave/errors.hpp"
#include "fpuwave/spectral.hpp"

namespace fpuwave {

namespace {

double sech(double x) {
    const double e = std::exp(-std::abs(x));
    return 2.0 * e / (1.0 + e * e);
}

}  // namespace

void WaveAnsatz::validate() const {
    if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "ansatz epsilon must be positive");
    if (!(amplitude_scale > 0.0) || !(width > 0.0) || !std::isfinite(amplitude_scale) || !std::isfinite(width))
        throw Error(ErrorKind::ParameterSignError, "ansatz needs s0 > 0 and s_effective < 0");
}

WaveAnsatz make_ansatz(double epsilon, const CriticalData& cr, const NormalFormCoeffs& nf, double theta,
                       double r_coeff) {
    if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "ansatz epsilon must be positive");
    if (!(nf.s_effective < 0.0))
        throw Error(ErrorKind::ExistenceConditionViolated, "no sech homoclinic: s_effective is not negative");
    WaveAnsatz a;
    a.epsilon = epsilon;
    a.c = cr.c_star + epsilon * epsilon;
    a.theta = theta;
    a.r_coeff = r_coeff;
    const Unfolding u = unfold(a.c, cr);
    a.k0 = cr.k0;
    a.s0 = u.s0;
    a.p0 = u.p0;
    a.s_effective = nf.s_effective;
    a.width = std::sqrt(u.s0);
    a.amplitude_scale = std::sqrt(2.0 * u.s0 / -nf.s_effective);
    a.validate();
    return a;
}

double nls_soliton(double X, double gamma, double nu1, double nu2) {
    if (!(gamma * nu1 > 0.0) || !(nu1 * nu2 > 0.0))
        throw Error(ErrorKind::ParameterSignError, "NLS soliton needs gamma*nu1 > 0 and nu1*nu2 > 0");
    return std::sqrt(2.0 * gamma / nu2) * sech(std::sqrt(gamma / nu1) * X);
}

EnvelopePhase r0_psi0(double xi, const WaveAnsatz& a) {
    const double w = a.width;
    return {a.amplitude_scale * sech(w * xi),
            a.p0 * xi + 2.0 * (a.r_coeff / a.s_effective) * w * std::tanh(w * xi)};
}

double truncated_nf_residual(const WaveAnsatz& a, std::span<const double> grid) {
    if (a.r_coeff != 0.0)
        throw Error(ErrorKind::InvalidArgument, "the truncated normal-form check is only defined for r = 0");
    using C = std::complex<double>;
    const C I(0.0, 1.0);
    const double w = a.width, amp = a.amplitude_scale;
    double worst = 0.0;
    for (double xi : grid) {
        const double sh = sech(w * xi), th = std::tanh(w * xi);
        const double r0 = amp * sh;
        const double r1 = -amp * w * sh * th;
        const double r2 = amp * w * w * sh * (th * th - sh * sh);
        const C e = std::polar(1.0, (a.k0 + a.p0) * xi + a.theta);
        const C A = r0 * e, B = r1 * e;
        const C dA = (r1 + I * (a.k0 + a.p0) * r0) * e;
        const C dB = (r2 + I * (a.k0 + a.p0) * r1) * e;
        const double res1 = std::abs(dA - I * a.k0 * A - B - I * A * a.p0);
        const double res2 = std::abs(dB - I * a.k0 * B - I * B * a.p0 - A * (a.s0 + a.s_effective * r0 * r0));
        worst = std::max(worst, res1 + res2);
    }
    return worst;
}

double leading_profile(double xi, const WaveAnsatz& a) {
    const EnvelopePhase rp = r0_psi0(xi, a);
    return 2.0 * rp.r0 * std::cos(a.k0 * xi + rp.psi0 + a.theta);
}

double leading_profile_derivative(double xi, const WaveAnsatz& a) {
    const double w = a.width;
    const double sh = sech(w * xi), th = std::tanh(w * xi);
    const EnvelopePhase rp = r0_psi0(xi, a);
    const double dr = -a.amplitude_scale * w * sh * th;
    const double dpsi = a.p0 + 2.0 * (a.r_coeff / a.s_effective) * w * w * sh * sh;
    const double ph = a.k0 * xi + rp.psi0 + a.theta;
    return 2.0 * dr * std::cos(ph) - 2.0 * rp.r0 * std::sin(ph) * (a.k0 + dpsi);
}

ProfileFunction ansatz_profile(const WaveAnsatz& a) {
    return {[a](double x) { return leading_profile(x, a); },
            [a](double x) { return leading_profile_derivative(x, a); }};
}

LatticeState lattice_initial_data(const ProfileFunction& f, double c, std::size_t n_sites, double x0) {
    LatticeState s;
    s.q.resize(n_sites);
    s.p.resize(n_sites);
    for (std::size_t n = 0; n < n_sites; ++n) {
        const double xi = static_cast<double>(n) - x0;
        s.q[n] = f.value(xi);
        s.p[n] = -c * f.derivative(xi);
    }
    return s;
}

LatticeState lattice_initial_data(const ProfileSolution& sol, std::size_t n_sites, double x0) {
    const std::size_t N = sol.n_modes;
    const double L = sol.domain_length;
    LatticeState s;
    s.q.assign(n_sites, 0.0);
    s.p.assign(n_sites, 0.0);
    if (N == 0 || sol.v.empty()) return s;

    const double ring = static_cast<double>(n_sites);
    double fill = 0.0;
    if (ring > L) {
        if (!(tail_ratio(sol) < 1e-6))
            throw Error(ErrorKind::DomainTooSmall,
                        "profile window is shorter than the chain and its tails are not negligible");
        // Outside the window the chain sits at the tail level of the profile.
        const std::size_t band = std::max<std::size_t>(1, N / 20);
        double acc = 0.0;
        for (std::size_t j = 0; j < band; ++j) acc += sol.v[j] + sol.v[N - 1 - j];
        fill = acc / (2.0 * static_cast<double>(band));
    } else if (ring < L) {
        // The ring only shows |xi| < n_sites/2 of the window.
        std::vector<double> cut;
        double peak = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            peak = std::max(peak, std::abs(sol.v[j]));
            if (std::abs(sol.xi(j)) >= 0.5 * ring) cut.push_back(sol.v[j]);
        }
        double level = 0.0;
        for (double x : cut) level += x;
        level /= static_cast<double>(std::max<std::size_t>(1, cut.size()));
        double worst = 0.0;
        for (double x : cut) worst = std::max(worst, std::abs(x - level));
        if (peak > 0.0 && !(worst < 1e-6 * peak))
            throw Error(ErrorKind::DomainTooSmall, "chain is shorter than the pulse support");
    }

    const double m_real = static_cast<double>(N) / L;
    const long m = std::lround(m_real);
    std::vector<double> u(N), du(N);
    const bool on_grid = std::abs(m_real - static_cast<double>(m)) < 1e-12 && m > 0;
    const double frac = x0 - std::round(x0);
    if (on_grid) {
        SpectralOps ops(N, L);
        ops.shift(sol.v, -frac, u);
        ops.derivative(u, du);
    }
    TrigInterpolant interp(sol.v, L);

    for (std::size_t n = 0; n < n_sites; ++n) {
        // Offset from the pulse centre, taken the short way round the ring.
        double xi = static_cast<double>(n) - x0;
        xi -= ring * std::floor((xi + 0.5 * ring) / ring);
        if (xi < -0.5 * L || xi >= 0.5 * L) {
            s.q[n] = fill;
            continue;
        }
        if (on_grid) {
            const long j = std::lround((xi + frac + 0.5 * L) * static_cast<double>(m));
            if (j >= 0 && j < static_cast<long>(N)) {
                s.q[n] = u[j];
                s.p[n] = -sol.c * du[j];
                continue;
            }
        }
        s.q[n] = interp(xi);
        s.p[n] = -sol.c * interp.derivative(xi);
    }
    return s;
}

double nls_error(std::span<const double> xi, std::span<const double> v, double epsilon,
                 const CriticalData& cr, const NormalFormCoeffs& nf) {
    if (xi.size() != v.size() || xi.size() < 2)
        throw Error(ErrorKind::InvalidArgument, "nls_error needs matching sample arrays");
    const double dx = xi[1] - xi[0];
    if (!(dx > 0.0) || dx > 2.0 * std::numbers::pi / cr.k0 / 16.0)
        throw Error(ErrorKind::GridTooCoarse, "fewer than 16 samples per carrier wavelength");
    const double period = xi.back() - xi.front() + dx;

    // Envelope centre from the circular centroid of v^2.
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < xi.size(); ++j)
        acc += v[j] * v[j] * std::polar(1.0, 2.0 * std::numbers::pi * (xi[j] - xi.front()) / period);
    double centre = 0.0;
    if (std::abs(acc) > 0.0) {
        centre = xi.front() + period * std::arg(acc) / (2.0 * std::numbers::pi);
        if (centre >= xi.front() + period) centre -= period;
    }
    auto wrap = [&](double d) { return d - period * std::floor((d + 0.5 * period) / period); };

    std::vector<double> env(xi.size());
    std::complex<double> corr(0.0, 0.0);
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const double d = wrap(xi[j] - centre);
        env[j] = epsilon * nls_soliton(epsilon * d, nf.gamma, nf.nu1, nf.nu2);
        corr += v[j] * env[j] * std::polar(1.0, -cr.k0 * d);
    }
    const double phase = std::abs(corr) > 0.0 ? std::arg(corr) : 0.0;
    double err = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const double d = wrap(xi[j] - centre);
        err = std::max(err, std::abs(v[j] - 2.0 * env[j] * std::cos(cr.k0 * d + phase)));
    }
    return err;
}

double nls_error(const ProfileSolution& sol, const CriticalData& cr, const NormalFormCoeffs& nf) {
    const double target = 2.0 * std::numbers::pi / cr.k0 / 16.0;
    std::size_t factor = 1;
    while (sol.dx() / static_cast<double>(factor) > target) factor *= 2;
    const TrigInterpolant interp(sol.v, sol.domain_length);
    const std::vector<double> fine = factor == 1 ? sol.v : interp.refined(factor);
    std::vector<double> xi(fine.size());
    const double h = sol.dx() / static_cast<double>(factor);
    for (std::size_t j = 0; j < xi.size(); ++j) xi[j] = -0.5 * sol.domain_length + static_cast<double>(j) * h;
    return nls_error(xi, fine, sol.epsilon, cr, nf);
}

}  // namespace fpuwave

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "common.hpp"
#include "fpuwave/bvp.hpp"
#include "fpuwave/errors.hpp"
#include "fpuwave/spectral.hpp"

using namespace fpuwave;
using std::numbers::pi;

namespace {

const std::vector<double>& family_eps() {
    static const std::vector<double> e{0.02, 0.04, 0.06, 0.08};
    return e;
}

const std::vector<ProfileSolution>& family() {
    static const auto f = continuation(family_eps(), testing::critical(), testing::coeffs(), testing::hardening());
    return f;
}

double sup(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Config;
}

// Band-limited random field with its exact second derivative.
struct RandomField {
    std::vector<double> amp, phase;
    std::vector<int> modes;
    double L;
    double value(double x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < modes.size(); ++i) s += amp[i] * std::cos(2 * pi * modes[i] * x / L + phase[i]);
        return s;
    }
    double second(double x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const double k = 2 * pi * modes[i] / L;
            s -= k * k * amp[i] * std::cos(k * x + phase[i]);
        }
        return s;
    }
};

}  // namespace

TEST_CASE("residual of trivial and linear solutions") {
    const PotentialSpec lin{};
    const std::vector<double> zero(256, 0.0);
    CHECK(sup(residual(zero, 1.7, 64.0, testing::hardening())) == 0.0);

    const std::size_t n = 512;
    const double L = 128.0;
    for (int m0 : {3, 40, 90, 200}) {
        const double k = 2 * pi * m0 / L;
        const double c = std::sqrt(omega_sq(k)) / k;
        std::vector<double> v(n);
        for (std::size_t j = 0; j < n; ++j) v[j] = std::cos(k * (-0.5 * L + j * L / n));
        CAPTURE(m0);
        CHECK(sup(residual(v, c, L, lin)) < 1e-10);
    }
}

TEST_CASE("residual against a shift-by-index evaluation") {
    // dx = 1/4, so v(xi +- 1) and v(xi +- 2) are exact index offsets.
    const std::size_t n = 256;
    const double L = 64.0;
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RandomField f{{}, {}, {}, L};
    for (int m = 1; m < 60; m += 3) {
        f.modes.push_back(m);
        f.amp.push_back(0.2 * u(rng) / (1.0 + 0.05 * m));
        f.phase.push_back(pi * u(rng));
    }
    const PotentialSpec spec{0.3, -0.7, 1.1, 0.9};
    const double c = 1.62;
    std::vector<double> v(n), rhs(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = f.value(-0.5 * L + j * 0.25);
    auto at = [&](long j) { return v[static_cast<std::size_t>((j % static_cast<long>(n) + n) % n)]; };
    for (long j = 0; j < static_cast<long>(n); ++j) {
        const double x = -0.5 * L + j * 0.25;
        rhs[j] = c * c * f.second(x) - (w1_prime(at(j + 4) - at(j), spec) - w1_prime(at(j) - at(j - 4), spec) +
                                        w2_prime(at(j + 8) - at(j), spec) - w2_prime(at(j) - at(j - 8), spec));
    }
    const auto F = residual(v, c, L, spec);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(F[j] - rhs[j]));
    CHECK(worst < 1e-12);

    CHECK(kind_of([&] { residual(std::vector<double>(96, 0.0), c, 24.0, spec); }) == ErrorKind::NonPowerOfTwo);
    CHECK(kind_of([&] { residual(std::vector<double>(32, 0.0), c, 8.0, spec); }) == ErrorKind::WindowTooSmall);
}

TEST_CASE("residual is invariant under constant displacement") {
    const std::size_t n = 512;
    const double L = 128.0;
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = -0.5 * L + j * L / n;
        v[j] = 0.1 * std::exp(-0.01 * x * x) * std::cos(2.2 * x);
    }
    const PotentialSpec spec{0.4, 0.2, 1.0, 1.0};
    const auto base = residual(v, 1.66, L, spec);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int t = 0; t < 10; ++t) {
        const double q0 = u(rng);
        std::vector<double> w(v);
        for (auto& x : w) x += q0;
        const auto r = residual(w, 1.66, L, spec);
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(r[j] - base[j]));
        // rounding of v + q0 is amplified by c^2 kappa_max^2 (about 430 here)
        CHECK(d < 1e-12 * (1.0 + std::abs(q0)));
    }
}

TEST_CASE("window policy") {
    SolverConfig cfg;
    const auto p = plan_window(0.1, cfg);
    CHECK(is_power_of_two(p.n_modes));
    CHECK(p.length >= 60.0 / 0.1);
    CHECK(p.length == static_cast<double>(p.n_modes) / cfg.points_per_unit);
    CHECK(plan_window(10.0, cfg).length >= cfg.min_window);
    cfg.n_modes = 1000;
    CHECK(kind_of([&] { plan_window(0.1, cfg); }) == ErrorKind::NonPowerOfTwo);
}

TEST_CASE("single solve at eps = 0.05") {
    const auto& cr = testing::critical();
    const auto& nf = testing::coeffs();
    const auto zero = solve(0.0, cr, nf, testing::hardening());
    CHECK(sup(zero.v) == 0.0);
    CHECK(zero.newton_iterations == 0);

    const auto s = solve(0.05, cr, nf, testing::hardening());
    CHECK(s.residual_norm < 1e-10);
    CHECK(s.newton_iterations <= 10);
    CHECK(sup(residual(s.v, s.c, s.domain_length, s.potential)) < 1e-10);
    double mean = 0.0;
    for (double x : s.v) mean += x;
    CHECK(std::abs(mean / s.n_modes) < 1e-12);
    CHECK(s.tail_ratio < 1e-8);
    CHECK(s.symmetry_defect < 1e-6);
    CHECK(s.first_integral_drift < 1e-8);
    CHECK(s.domain_length >= 40.0 / s.ansatz.width);
    const double lead = 2.0 * 0.05 * std::sqrt(2.0 * cr.s0_prime / nf.nu2);
    CHECK(std::abs(sup(s.v) / lead - 1.0) < 0.25);

    // first Newton step improves on the ansatz
    REQUIRE(s.residual_history.size() >= 2);
    CHECK(s.residual_history[1] < s.residual_history[0]);
    // residual sequence contracts quadratically: r_{k+1} / r_k^2 stays bounded
    std::vector<double> C;
    for (std::size_t i = 0; i + 1 < s.residual_history.size(); ++i)
        if (s.residual_history[i + 1] > 1e-12) C.push_back(s.residual_history[i + 1] / std::pow(s.residual_history[i], 2));
    MESSAGE("history size ", s.residual_history.size());
    for (double r : s.residual_history) MESSAGE("r = ", r);
    REQUIRE(C.size() >= 2);
    CHECK(*std::max_element(C.begin(), C.end()) / *std::min_element(C.begin(), C.end()) < 50.0);
}

TEST_CASE("dense and Krylov linear solves agree") {
    const auto& cr = testing::critical();
    const auto& nf = testing::coeffs();
    SolverConfig krylov;
    krylov.n_modes = 2048;
    krylov.dense_max = 0;
    SolverConfig dense = krylov;
    dense.dense_max = 4096;
    const auto a = solve(0.08, cr, nf, testing::hardening(), krylov);
    const auto b = solve(0.08, cr, nf, testing::hardening(), dense);
    double d = 0.0;
    for (std::size_t j = 0; j < a.v.size(); ++j) d = std::max(d, std::abs(a.v[j] - b.v[j]));
    MESSAGE("dense vs gmres ", d, " sym ", a.symmetry_defect, " ", b.symmetry_defect);
    CHECK(d < 1e-8);
    CHECK(a.residual_norm < 1e-10);
    CHECK(b.residual_norm < 1e-10);
}

TEST_CASE("doubling the window leaves the profile unchanged") {
    const auto& cr = testing::critical();
    const auto& nf = testing::coeffs();
    SolverConfig cfg;
    cfg.n_modes = 2048;
    const auto a = solve(0.08, cr, nf, testing::hardening(), cfg);
    cfg.n_modes = 4096;
    const auto b = solve(0.08, cr, nf, testing::hardening(), cfg);
    REQUIRE(a.dx() == b.dx());
    const std::size_t off = (b.n_modes - a.n_modes) / 2;
    double d = 0.0;
    for (std::size_t j = 0; j < a.n_modes; ++j) d = std::max(d, std::abs(a.v[j] - b.v[j + off]));
    MESSAGE("window doubling ", d);
    CHECK(d < 1e-8);
}

TEST_CASE("continuation family") {
    const auto& fam = family();
    REQUIRE(fam.size() == 4);
    const auto& nf = testing::coeffs();
    const double lead = 2.0 * std::sqrt(2.0 * testing::critical().s0_prime / nf.nu2);
    for (const auto& s : fam) {
        CAPTURE(s.epsilon);
        CHECK(s.residual_norm < 1e-10);
        CHECK(s.first_integral_drift < 1e-8);
        CHECK(s.symmetry_defect < 1e-6);
        CHECK(s.tail_ratio < 1e-8);
        CHECK_FALSE(s.least_squares_used);
        // amplitude ~ eps
        CHECK(std::abs(sup(s.v) / (lead * s.epsilon) - 1.0) < 0.10);
        const auto I = first_integral(s, default_integral_samples(s));
        CHECK(I.drift == doctest::Approx(s.first_integral_drift));
        double m = 0.0;
        for (double x : I.values) m = std::max(m, std::abs(x));
        CHECK(m < 1e-8);
    }
    const double r0 = sup(fam[0].v) / fam[0].epsilon;
    for (const auto& s : fam) CHECK(std::abs(sup(s.v) / s.epsilon / r0 - 1.0) < 0.10);

    // single-entry continuation is a plain solve
    const std::vector<double> one{0.04};
    const auto single = continuation(one, testing::critical(), nf, testing::hardening());
    const auto direct = solve(0.04, testing::critical(), nf, testing::hardening());
    CHECK(single[0].v == direct.v);
}

TEST_CASE("continuation arguments") {
    const auto& cr = testing::critical();
    const auto& nf = testing::coeffs();
    const std::vector<double> rev{0.08, 0.06, 0.04, 0.02};
    CHECK(kind_of([&] { continuation(rev, cr, nf, testing::hardening()); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { continuation(std::vector<double>{}, cr, nf, testing::hardening()); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("parallel unseeded continuation is identical to sequential") {
    const auto& cr = testing::critical();
    const auto& nf = testing::coeffs();
    SolverConfig seq;
    seq.seeded_continuation = false;
    SolverConfig par = seq;
    par.parallel = true;
    const std::vector<double> eps{0.05, 0.07, 0.08};
    const auto a = continuation(eps, cr, nf, testing::hardening(), seq);
    const auto b = continuation(eps, cr, nf, testing::hardening(), par);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        CHECK(a[i].v == b[i].v);
        CHECK(a[i].residual_norm == b[i].residual_norm);
    }
}

TEST_CASE("solver preconditions and failures") {
    const auto& cr = testing::critical();
    const auto& nf = testing::coeffs();
    CHECK(kind_of([&] { solve(0.05, cr, nf, {0.2, 0.0, 1.0, 1.0}); }) == ErrorKind::InvalidArgument);
    const PotentialSpec soft{0.0, 0.0, -1.0, -1.0};
    const auto nf_soft = compute_normal_form(cr, soft);
    CHECK(kind_of([&] { solve(0.05, cr, nf_soft, soft); }) == ErrorKind::ExistenceConditionViolated);
    SolverConfig small;
    small.tail_factor = 20.0;
    small.min_window = 16.0;
    CHECK(kind_of([&] { solve(0.05, cr, nf, testing::hardening(), small); }) == ErrorKind::TailNotResolved);
    SolverConfig tight;
    tight.max_newton = 1;
    try {
        solve(0.06, cr, nf, testing::hardening(), tight);
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoConvergence);
        // the message carries the residual trace
        CHECK(std::string(e.what()).find("e-") != std::string::npos);
    }
    CHECK(kind_of([&] { solve(-0.01, cr, nf, testing::hardening()); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("symmetry defect of constructed profiles") {
    ProfileSolution s;
    s.n_modes = 1024;
    s.domain_length = 256.0;
    s.v.resize(s.n_modes);
    for (std::size_t j = 0; j < s.n_modes; ++j) {
        const double x = s.xi(j);
        s.v[j] = std::exp(-0.02 * x * x) * std::cos(2.2 * x);
    }
    CHECK(symmetry_defect(s) < 1e-14);
    // translated copy: defect unchanged
    ProfileSolution t = s;
    std::rotate(t.v.begin(), t.v.begin() + 37, t.v.end());
    CHECK(symmetry_defect(t) < 1e-14);
    // an odd admixture is detected
    ProfileSolution o = s;
    for (std::size_t j = 0; j < o.n_modes; ++j) o.v[j] += 1e-3 * std::exp(-0.02 * o.xi(j) * o.xi(j)) * std::sin(2.2 * o.xi(j));
    CHECK(symmetry_defect(o) > 1e-4);
    CHECK(tail_ratio(s) < 1e-12);
}

TEST_CASE("projections along the profile") {
    ProfileSolution z;
    z.n_modes = 512;
    z.domain_length = 128.0;
    z.c = 1.7;
    z.v.assign(512, 0.0);
    const auto [c0, c1] = chi_diagnostics(z, 3.0);
    CHECK(c0 == 0.0);
    CHECK(c1 == 0.0);
    const auto I = first_integral(z, std::vector<double>{-10.0, 0.0, 10.0});
    CHECK(I.drift == 0.0);

    // zero-mode content of the solved pulses is O(eps^2)
    std::vector<double> scaled;
    for (const auto& s : family()) {
        double m = 0.0;
        for (double x = -3.0 / s.ansatz.width; x <= 3.0 / s.ansatz.width; x += 0.37)
            m = std::max(m, std::abs(chi_diagnostics(s, x).second));
        scaled.push_back(m / (s.epsilon * s.epsilon));
        MESSAGE("eps ", s.epsilon, " max|chi1| ", m);
    }
    // max|chi1| <= K eps^2 with K not growing as eps decreases; the fitted
    // exponent over the family is at least 2.
    for (std::size_t i = 0; i + 1 < scaled.size(); ++i) CHECK(scaled[i] <= scaled[i + 1]);
    const double p = std::log(scaled.back() / scaled.front()) / std::log(family_eps().back() / family_eps().front()) + 2.0;
    MESSAGE("fitted exponent ", p);
    CHECK(p >= 2.0);
}

TEST_CASE("lattice initial data from a solved profile") {
    const auto& s = family()[1];
    // chain inside one period: periodic extension, exact at grid points
    const std::size_t n = static_cast<std::size_t>(s.domain_length);
    const auto st = lattice_initial_data(s, n, 0.0);
    for (std::size_t i = 0; i < n; i += 17) {
        const double xi = static_cast<double>(i);
        const std::size_t j = static_cast<std::size_t>(std::lround((xi + 0.5 * s.domain_length) / s.dx())) % s.n_modes;
        CHECK(std::abs(st.q[i] - s.v[j]) < 1e-13);
    }
    // longer chain: tail level outside the window
    const auto big = lattice_initial_data(s, 4 * n, 2.0 * n);
    CHECK(std::abs(big.q[0] - big.q[10]) < 1e-12);
    ProfileSolution wide = s;
    for (std::size_t j = 0; j < wide.n_modes; ++j) wide.v[j] = std::cos(2 * pi * 3 * wide.xi(j) / wide.domain_length);
    CHECK(kind_of([&] { lattice_initial_data(wide, 4 * n, 2.0 * n); }) == ErrorKind::DomainTooSmall);
}

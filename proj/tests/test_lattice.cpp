#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "common.hpp"
#include "fpuwave/bvp.hpp"
#include "fpuwave/errors.hpp"
#include "fpuwave/lattice.hpp"
#include "fpuwave/waves.hpp"

using namespace fpuwave;
using std::numbers::pi;

namespace {

LatticeState bump(std::size_t n = 256, double amp = 0.2) {
    LatticeState s;
    s.q.resize(n);
    s.p.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(i) - 0.5 * static_cast<double>(n);
        s.q[i] = amp * std::exp(-d * d / 20.0);
    }
    return s;
}

// Displacement-to-force matrix of the linear chain.
std::vector<double> linear_stencil(const std::vector<double>& q) {
    const std::size_t n = q.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto at = [&](long d) { return q[(i + n + d) % n]; };
        f[i] = 5.0 * (at(1) - 2.0 * at(0) + at(-1)) - (at(2) - 2.0 * at(0) + at(-2));
    }
    return f;
}

const ProfileSolution& profile() {
    static const ProfileSolution s = [] {
        SolverConfig cfg;
        cfg.n_modes = 2048;
        return solve(0.08, testing::critical(), testing::coeffs(), testing::hardening(), cfg);
    }();
    return s;
}

double mode_amplitude(const std::vector<double>& q, int m) {
    const double n = static_cast<double>(q.size());
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) acc += q[i] * std::polar(1.0, -2 * pi * m * static_cast<double>(i) / n);
    return 2.0 * std::abs(acc) / n;
}

}  // namespace

TEST_CASE("force stencil on a single displaced site") {
    std::vector<double> q(16, 0.0);
    q[0] = 1.0;
    const auto f = forces(q, PotentialSpec{});
    CHECK(f[0] == -8.0);
    CHECK(f[1] == 5.0);
    CHECK(f[15] == 5.0);
    CHECK(f[2] == -1.0);
    CHECK(f[14] == -1.0);
    for (std::size_t i = 3; i < 14; ++i) CHECK(f[i] == 0.0);
}

TEST_CASE("forces against direct evaluations") {
    std::mt19937_64 rng(51);
    std::normal_distribution<double> g(0.0, 0.3);
    std::vector<double> q(64);
    for (auto& x : q) x = g(rng);
    const auto lin = forces(q, PotentialSpec{});
    const auto ref = linear_stencil(q);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(lin[i] - ref[i]) < 1e-14);

    const PotentialSpec s{0.4, -0.3, 1.0, 2.0};
    const auto f = forces(q, s);
    const std::size_t n = q.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto at = [&](long d) { return q[(i + n + d) % n]; };
        const double direct = w1_prime(at(1) - at(0), s) - w1_prime(at(0) - at(-1), s) + w2_prime(at(2) - at(0), s) -
                              w2_prime(at(0) - at(-2), s);
        CHECK(std::abs(f[i] - direct) < 1e-14);
        total += f[i];
    }
    CHECK(std::abs(total) < 1e-12);

    std::vector<double> flat(32, 0.37);
    for (double x : forces(flat, s)) CHECK(x == 0.0);
    CHECK_THROWS_AS(forces(std::vector<double>(6, 0.0), s), Error);
}

TEST_CASE("single steps") {
    // no forces: free flight
    LatticeState s;
    s.q.assign(32, 0.5);
    s.p.assign(32, 0.25);
    const auto t = step_verlet(s, 0.01, testing::hardening());
    for (std::size_t i = 0; i < 32; ++i) {
        CHECK(t.q[i] == 0.5 + 0.01 * 0.25);
        CHECK(t.p[i] == 0.25);
    }
    CHECK(t.t == 0.01);

    // forward then backward
    auto b = bump();
    b.p[100] = 0.05;
    const auto fwd = step_verlet(b, 0.005, testing::hardening());
    const auto back = step_verlet(fwd, -0.005, testing::hardening());
    for (std::size_t i = 0; i < b.n_sites(); ++i) {
        CHECK(std::abs(back.q[i] - b.q[i]) < 1e-13);
        CHECK(std::abs(back.p[i] - b.p[i]) < 1e-13);
    }
}

TEST_CASE("energy") {
    LatticeState z;
    z.q.assign(16, 0.0);
    z.p.assign(16, 0.0);
    CHECK(energy(z, testing::hardening()) == 0.0);
    // linear chain: H = p.p/2 - q.K q/2
    std::mt19937_64 rng(53);
    std::normal_distribution<double> g(0.0, 0.3);
    LatticeState s;
    s.q.resize(40);
    s.p.resize(40);
    for (auto& x : s.q) x = g(rng);
    for (auto& x : s.p) x = g(rng);
    const auto Kq = linear_stencil(s.q);
    double H = 0.0;
    for (std::size_t i = 0; i < 40; ++i) H += 0.5 * s.p[i] * s.p[i] - 0.5 * s.q[i] * Kq[i];
    CHECK(std::abs(energy(s, PotentialSpec{}) - H) < 1e-13);
    LatticeState one = z;
    one.q[3] = 0.5;
    CHECK(energy(one, PotentialSpec{}) == doctest::Approx(4.0 * 0.25).epsilon(1e-15));
}

TEST_CASE("conservation along trajectories") {
    auto s = bump();
    s.p[30] = 0.1;
    s.p[200] = -0.03;
    const double P0 = momentum(s);
    RunOptions opt;
    opt.stride = 1000;
    const auto r = run(s, 50.0, 0.005, testing::hardening(), opt);
    REQUIRE(r.steps == 10000);
    for (const auto& rec : r.records) CHECK(std::abs(rec.momentum - P0) < 1e-12);

    // energy error is second order in dt
    auto drift = [&](double dt) {
        RunOptions o;
        o.stride = static_cast<std::size_t>(std::lround(0.1 / dt));
        return relative_energy_drift(run(bump(), 10.0, dt, testing::hardening(), o).records);
    };
    const double ratio = drift(0.01) / drift(0.005);
    MESSAGE("energy drift ratio ", ratio);
    CHECK(ratio > 3.2);
    CHECK(ratio < 4.8);
}

TEST_CASE("symmetries of the flow") {
    auto s = bump(128, 0.3);
    s.p[10] = 0.2;
    const int m = 37;
    LatticeState rot = s;
    std::rotate(rot.q.rbegin(), rot.q.rbegin() + m, rot.q.rend());
    std::rotate(rot.p.rbegin(), rot.p.rbegin() + m, rot.p.rend());
    const auto a = run(s, 5.0, 0.005, testing::hardening()).final_state;
    const auto b = run(rot, 5.0, 0.005, testing::hardening()).final_state;
    for (std::size_t i = 0; i < 128; ++i) {
        CHECK(b.q[(i + m) % 128] == a.q[i]);
        CHECK(b.p[(i + m) % 128] == a.p[i]);
    }

    // time reversal
    auto fin = run(s, 10.0, 0.005, testing::hardening()).final_state;
    for (auto& x : fin.p) x = -x;
    const auto ret = run(fin, 10.0, 0.005, testing::hardening()).final_state;
    for (std::size_t i = 0; i < 128; ++i) CHECK(std::abs(ret.q[i] - s.q[i]) < 1e-8);
}

TEST_CASE("linear plane wave keeps its amplitude") {
    const std::size_t n = 256;
    const int m = 8;
    const double k = 2 * pi * m / n, w = std::sqrt(omega_sq(k)), A = 1e-3;
    LatticeState s;
    s.q.resize(n);
    s.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.q[i] = A * std::cos(k * i);
        s.p[i] = A * w * std::sin(k * i);
    }
    double lo = 1e300, hi = 0.0;
    RunOptions opt;
    opt.stride = 400;
    opt.observer = [&](const LatticeState& st) {
        const double a = mode_amplitude(st.q, m);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    };
    run(s, 100.0, 0.005, PotentialSpec{}, opt);
    // Verlet distorts the circular orbit of the mode by about (w dt)^2 / 8
    CHECK((hi - lo) / A < 1e-6);
}

TEST_CASE("harmonic mode frequency") {
    const std::size_t n = 128;
    const int m = 20;
    const double k = 2 * pi * m / n;
    LatticeState s;
    s.q.resize(n);
    s.p.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) s.q[i] = 1e-3 * std::cos(k * i);
    std::vector<double> ts, xs;
    RunOptions opt;
    opt.stride = 1;
    opt.observer = [&](const LatticeState& st) {
        ts.push_back(st.t);
        xs.push_back(st.q[0]);
    };
    const double dt = 0.005;
    run(s, 20.0, dt, PotentialSpec{}, opt);
    std::vector<double> zc;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if ((xs[i] < 0.0) != (xs[i + 1] < 0.0)) zc.push_back(ts[i] - xs[i] * (ts[i + 1] - ts[i]) / (xs[i + 1] - xs[i]));
    REQUIRE(zc.size() > 4);
    const double w = pi * static_cast<double>(zc.size() - 1) / (zc.back() - zc.front());
    const double exact = std::sqrt(omega_sq(k));
    CHECK(std::abs(w / exact - 1.0) < std::pow(exact * dt, 2));
}

TEST_CASE("run edge cases") {
    const auto s = bump();
    const auto r = run(s, 0.0, 0.005, testing::hardening());
    CHECK(r.final_state.q == s.q);
    CHECK(r.final_state.p == s.p);
    CHECK(r.steps == 0);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].t == 0.0);

    const auto part = run(s, 0.0123, 0.005, testing::hardening());
    CHECK(part.final_state.t == doctest::Approx(0.0123).epsilon(1e-15));
    CHECK_THROWS_AS(run(s, -1.0, 0.005, testing::hardening()), Error);
    CHECK_THROWS_AS(run(s, 1.0, 0.1, testing::hardening()), Error);

    auto wild = bump(64, 50.0);
    RunOptions opt;
    opt.stride = 1;
    try {
        run(wild, 5.0, 0.05, testing::hardening(), opt);
        FAIL("expected BlowUp");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BlowUp);
    }
}

TEST_CASE("shape error of sampled profiles") {
    const auto& v = profile();
    const std::size_t n = 512;
    const double sigma = 3.1 * 1.7;  // c t for some t
    const auto st = lattice_initial_data(v, n, sigma);
    const auto fit = shape_error(st, v, v.c);
    CHECK(fit.error < 1e-10);
    CHECK(std::abs(fit.shift - sigma) < 1e-6);

    auto big = st;
    for (auto& x : big.q) x *= 1.1;
    double vmax = 0.0, qmax = 0.0;
    for (double x : v.v) vmax = std::max(vmax, std::abs(x));
    for (double x : st.q) qmax = std::max(qmax, std::abs(x));
    // At the true shift the misfit is 0.1 max|q| / max|v|; the minimum over
    // shifts can only be lower, and stays close to 0.1.
    const double scaled = shape_error(big, v, v.c, sigma).error;
    CHECK(scaled <= 0.1 * qmax / vmax + 1e-12);
    CHECK(scaled == doctest::Approx(0.1).epsilon(0.15));

    // larger and smaller rings, pulse straddling site 0
    for (std::size_t ring : {400u, 1024u}) {
        const auto wrapped = lattice_initial_data(v, ring, 2.4);
        const auto f = shape_error(wrapped, v, v.c);
        CHECK(f.error < 1e-10);
        CHECK(std::abs(f.shift - 2.4) < 1e-6);
    }
}

TEST_CASE("a solved pulse travels at its speed") {
    const auto& v = profile();
    const double x0 = 300.0;
    const auto st = lattice_initial_data(v, 1024, x0);
    RunOptions opt;
    opt.profile = &v;
    opt.initial_shift = x0;
    opt.stride = 200;
    const auto r = run(st, 10.0, 0.005, testing::hardening(), opt);
    double worst = 0.0;
    for (const auto& rec : r.records) worst = std::max(worst, rec.shape_error);
    CHECK(worst < 1e-3);
    CHECK(std::abs(fitted_speed(r.records) / v.c - 1.0) < 0.01);
    CHECK(relative_energy_drift(r.records) < 1e-6);
}

TEST_CASE("record helpers") {
    std::vector<TrajectoryRecord> recs;
    for (int i = 0; i < 10; ++i) recs.push_back({0.5 * i, 2.0 + (i == 4 ? 1e-3 : 0.0), 0.0, 0.0, 3.0 + 1.25 * 0.5 * i});
    CHECK(fitted_speed(recs) == doctest::Approx(1.25).epsilon(1e-13));
    CHECK(relative_energy_drift(recs) == doctest::Approx(5e-4).epsilon(1e-12));
}

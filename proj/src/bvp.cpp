#include "fpuwave/bvp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>

#include "fpuwave/errors.hpp"
#include "fpuwave/spectral.hpp"
#include "gmres.hpp"

namespace fpuwave {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double sup_norm(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

void check_grid(std::size_t n, double L) {
    if (!is_power_of_two(n)) throw Error(ErrorKind::NonPowerOfTwo, "N = " + std::to_string(n));
    if (!(L > 8.0)) throw Error(ErrorKind::WindowTooSmall, "L = " + num(L) + " must exceed 8");
}

// Residual of the advance-delay equation and its linearization at the last
// evaluation point.
class TravelingWaveOperator {
public:
    TravelingWaveOperator(std::size_t n, double L, double c, const PotentialSpec& spec)
        : ops_(n, L), c_(c), spec_(spec), n_(n), sp1_(n), sp2_(n), sm1_(n), sm2_(n), d2_(n),
          k1p_(n), k1m_(n), k2p_(n), k2m_(n), tmp_(n) {}

    std::size_t size() const { return n_; }
    SpectralOps& ops() { return ops_; }

    void residual(std::span<const double> v, std::span<double> out) {
        ops_.second_derivative(v, d2_);
        ops_.shift(v, 1.0, sp1_);
        ops_.shift(v, 2.0, sp2_);
        ops_.shift(v, -1.0, sm1_);
        ops_.shift(v, -2.0, sm2_);
        const double c2 = c_ * c_;
        for (std::size_t j = 0; j < n_; ++j) {
            const double f = w1_prime(sp1_[j] - v[j], spec_) - w1_prime(v[j] - sm1_[j], spec_) +
                             w2_prime(sp2_[j] - v[j], spec_) - w2_prime(v[j] - sm2_[j], spec_);
            out[j] = c2 * d2_[j] - f;
        }
    }

    void linearize(std::span<const double> v) {
        ops_.shift(v, 1.0, sp1_);
        ops_.shift(v, 2.0, sp2_);
        ops_.shift(v, -1.0, sm1_);
        ops_.shift(v, -2.0, sm2_);
        for (std::size_t j = 0; j < n_; ++j) {
            k1p_[j] = w1_second(sp1_[j] - v[j], spec_);
            k1m_[j] = w1_second(v[j] - sm1_[j], spec_);
            k2p_[j] = w2_second(sp2_[j] - v[j], spec_);
            k2m_[j] = w2_second(v[j] - sm2_[j], spec_);
        }
    }

    void jacobian(std::span<const double> d, std::span<double> out) {
        ops_.second_derivative(d, d2_);
        ops_.shift(d, 1.0, sp1_);
        ops_.shift(d, 2.0, sp2_);
        ops_.shift(d, -1.0, sm1_);
        ops_.shift(d, -2.0, sm2_);
        const double c2 = c_ * c_;
        for (std::size_t j = 0; j < n_; ++j) {
            const double f = k1p_[j] * (sp1_[j] - d[j]) - k1m_[j] * (d[j] - sm1_[j]) +
                             k2p_[j] * (sp2_[j] - d[j]) - k2m_[j] * (d[j] - sm2_[j]);
            out[j] = c2 * d2_[j] - f;
        }
    }

    // Inverse of the linear symbol f_c(kappa); the zero mode is left alone.
    void precondition(std::span<const double> y, std::span<double> out) {
        const double c = c_;
        ops_.apply_symbol(y, out, [c](double k) {
            if (k == 0.0) return 1.0;
            const double f = f_c(k, c);
            return std::abs(f) < 1e-14 ? 1.0 : 1.0 / f;
        });
    }

private:
    SpectralOps ops_;
    double c_;
    PotentialSpec spec_;
    std::size_t n_;
    std::vector<double> sp1_, sp2_, sm1_, sm2_, d2_;
    std::vector<double> k1p_, k1m_, k2p_, k2m_, tmp_;
};

struct Step {
    std::vector<double> delta;
    bool least_squares = false;
};

// Bordered Newton system
//   [ J   e   t ] [delta]   [ -F          ]
//   [ e'  0   0 ] [ mu1 ] = [ -e'v        ]
//   [ t'  0   0 ] [ mu2 ]   [ -t'(v - g)  ]
// with e the normalized constant vector and t the normalized g'.
Step bordered_step(TravelingWaveOperator& op, std::span<const double> v, std::span<const double> F,
                   std::span<const double> g, std::span<const double> t, const SolverConfig& cfg) {
    const std::size_t n = op.size();
    const double e = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> rhs(n + 2);
    double ev = 0.0, tv = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        rhs[j] = -F[j];
        ev += e * v[j];
        tv += t[j] * (v[j] - g[j]);
    }
    rhs[n] = -ev;
    rhs[n + 1] = -tv;

    op.linearize(v);
    Step step;
    step.delta.assign(n, 0.0);

    if (n <= cfg.dense_max) {
        const Eigen::Index m = static_cast<Eigen::Index>(n + 2);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
        std::vector<double> unit(n, 0.0), col(n);
        for (std::size_t j = 0; j < n; ++j) {
            unit[j] = 1.0;
            op.jacobian(unit, col);
            unit[j] = 0.0;
            for (std::size_t i = 0; i < n; ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        }
        for (std::size_t j = 0; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            A(jj, m - 2) = e;
            A(jj, m - 1) = t[j];
            A(m - 2, jj) = e;
            A(m - 1, jj) = t[j];
        }
        const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), m);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        Eigen::VectorXd x;
        if (lu.rcond() * cfg.cond_limit < 1.0) {
            x = A.completeOrthogonalDecomposition().solve(b);
            step.least_squares = true;
        } else {
            x = lu.solve(b);
        }
        for (std::size_t j = 0; j < n; ++j) step.delta[j] = x(static_cast<Eigen::Index>(j));
        return step;
    }

    std::vector<double> tmp(n), tmp2(n);
    detail::LinearOp A = [&](std::span<const double> x, std::span<double> y) {
        op.jacobian(x.first(n), y.first(n));
        const double mu1 = x[n], mu2 = x[n + 1];
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            y[j] += mu1 * e + mu2 * t[j];
            s1 += e * x[j];
            s2 += t[j] * x[j];
        }
        y[n] = s1;
        y[n + 1] = s2;
    };
    detail::LinearOp M = [&](std::span<const double> x, std::span<double> y) {
        op.precondition(x.first(n), y.first(n));
        y[n] = x[n];
        y[n + 1] = x[n + 1];
    };
    std::vector<double> x(n + 2, 0.0);
    const detail::GmresResult gr =
        detail::gmres(A, M, rhs, x, cfg.gmres_rtol, cfg.gmres_restart, cfg.gmres_max_restarts);
    // A stalled Krylov solve still returns the minimal-residual step.
    step.least_squares = !gr.converged;
    std::copy(x.begin(), x.begin() + static_cast<long>(n), step.delta.begin());
    return step;
}

std::vector<double> ansatz_on_grid(const WaveAnsatz& a, std::size_t n, double L) {
    std::vector<double> g(n);
    const double dx = L / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = leading_profile(-0.5 * L + static_cast<double>(j) * dx, a);
    return g;
}

void check_inputs(const NormalFormCoeffs& nf, const PotentialSpec& spec) {
    spec.validate();
    if (!spec.is_even())
        throw Error(ErrorKind::InvalidArgument,
                    "the periodic profile solver needs even potentials (a1 = a2 = 0); fronts are not supported");
    if (!nf.sign_condition_ok || !(nf.s_effective < 0.0))
        throw Error(ErrorKind::ExistenceConditionViolated, "sign condition fails for this potential");
}

// Samples of v refined so that p-quadrature nodes with spacing 1/64 fall on
// grid points, together with the spectral derivative there.
struct FineProfile {
    std::vector<double> v, dv;
    double L = 0.0;
    std::size_t per_unit = 0;  // 0 when the grid is not commensurate
};

FineProfile fine_profile(const ProfileSolution& sol, std::size_t per_unit_target) {
    FineProfile fp;
    fp.L = sol.domain_length;
    const double m_real = static_cast<double>(sol.n_modes) / sol.domain_length;
    const long m = std::lround(m_real);
    if (m <= 0 || std::abs(m_real - static_cast<double>(m)) > 1e-12 ||
        per_unit_target % static_cast<std::size_t>(m) != 0)
        return fp;
    const std::size_t factor = per_unit_target / static_cast<std::size_t>(m);
    TrigInterpolant interp(sol.v, sol.domain_length);
    fp.v = interp.refined(factor);
    fp.dv.resize(fp.v.size());
    SpectralOps ops(fp.v.size(), sol.domain_length);
    ops.derivative(fp.v, fp.dv);
    fp.per_unit = per_unit_target;
    return fp;
}

long fine_index(const FineProfile& fp, double x) {
    const double pos = (x + 0.5 * fp.L) * static_cast<double>(fp.per_unit);
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-9) return -1;
    const long n = static_cast<long>(fp.v.size());
    return ((static_cast<long>(r) % n) + n) % n;
}

// I1 at xi with U(p) = v(xi + p) on 64 nodes per unit.
double integral_at(const FineProfile* fp, const TrigInterpolant& interp, const ProfileSolution& sol,
                   double xi) {
    constexpr int per_unit = 64;
    std::vector<double> U(4 * per_unit + 1);
    double y = 0.0;
    const long base = fp ? fine_index(*fp, xi) : -1;
    if (base >= 0) {
        const long n = static_cast<long>(fp->v.size());
        const long stride = static_cast<long>(fp->per_unit / per_unit);
        for (int j = 0; j <= 4 * per_unit; ++j) {
            const long idx = (((base + (j - 2 * per_unit) * stride) % n) + n) % n;
            U[j] = fp->v[idx];
        }
        y = fp->dv[base];
    } else {
        for (int j = 0; j <= 4 * per_unit; ++j) U[j] = interp(xi - 2.0 + static_cast<double>(j) / per_unit);
        y = interp.derivative(xi);
    }
    const PotentialSpec& s = sol.potential;
    std::vector<double> g1(per_unit + 1), g2(2 * per_unit + 1);
    // p in [0,1]: U(p) - U(p-1); p in [0,2]: U(p) - U(p-2). Index of p is 2*per_unit + p*per_unit.
    for (int j = 0; j <= per_unit; ++j)
        g1[j] = w1_prime(U[2 * per_unit + j] - U[per_unit + j], s);
    for (int j = 0; j <= 2 * per_unit; ++j)
        g2[j] = w2_prime(U[2 * per_unit + j] - U[j], s);
    const double h = 1.0 / per_unit;
    const double c2 = sol.c * sol.c;
    return (c2 * y - simpson(g1, h) - simpson(g2, h)) / (c2 - 1.0);
}

void map_to_grid(std::span<const double> src, double L_src, std::span<double> dst, double L_dst) {
    const std::size_t ns = src.size(), nd = dst.size();
    const double dxs = L_src / static_cast<double>(ns), dxd = L_dst / static_cast<double>(nd);
    if (std::abs(dxs - dxd) < 1e-12 * dxs) {
        const long off = static_cast<long>(std::lround((L_dst - L_src) / (2.0 * dxd)));
        for (std::size_t j = 0; j < nd; ++j) {
            const long i = static_cast<long>(j) - off;
            dst[j] = (i >= 0 && i < static_cast<long>(ns)) ? src[static_cast<std::size_t>(i)] : 0.0;
        }
        return;
    }
    TrigInterpolant interp(src, L_src);
    for (std::size_t j = 0; j < nd; ++j) {
        const double x = -0.5 * L_dst + static_cast<double>(j) * dxd;
        dst[j] = (x >= -0.5 * L_src && x < 0.5 * L_src) ? interp(x) : 0.0;
    }
}

}  // namespace

std::vector<double> ProfileSolution::grid() const {
    std::vector<double> x(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) x[j] = xi(j);
    return x;
}

WindowPlan plan_window(double width, const SolverConfig& cfg) {
    if (cfg.points_per_unit <= 0) throw Error(ErrorKind::InvalidArgument, "points_per_unit must be positive");
    const double m = cfg.points_per_unit;
    WindowPlan p;
    if (cfg.n_modes != 0) {
        if (!is_power_of_two(cfg.n_modes)) throw Error(ErrorKind::NonPowerOfTwo, "n_modes must be a power of two");
        p.n_modes = cfg.n_modes;
        p.length = static_cast<double>(cfg.n_modes) / m;
        return p;
    }
    const double need = std::max(cfg.tail_factor / width, cfg.min_window);
    std::size_t n = 2;
    while (static_cast<double>(n) < need * m) n *= 2;
    p.n_modes = n;
    p.length = static_cast<double>(n) / m;
    return p;
}

std::vector<double> residual(std::span<const double> v, double c, double L, const PotentialSpec& spec) {
    check_grid(v.size(), L);
    TravelingWaveOperator op(v.size(), L, c, spec);
    std::vector<double> out(v.size());
    op.residual(v, out);
    return out;
}

ProfileSolution solve_from(std::vector<double> v, double epsilon, const CriticalData& cr,
                           const NormalFormCoeffs& nf, const PotentialSpec& spec, double L,
                           const SolverConfig& cfg, std::span<const double> reference) {
    check_inputs(nf, spec);
    if (!reference.empty() && reference.size() != v.size())
        throw Error(ErrorKind::InvalidArgument, "phase reference must match the grid");
    const std::size_t n = v.size();
    check_grid(n, L);
    const double c = cr.c_star + epsilon * epsilon;

    ProfileSolution sol;
    sol.epsilon = epsilon;
    sol.c = c;
    sol.domain_length = L;
    sol.n_modes = n;
    sol.potential = spec;
    if (epsilon > 0.0) sol.ansatz = make_ansatz(epsilon, cr, nf, cfg.theta);

    TravelingWaveOperator op(n, L, c, spec);
    const std::vector<double> g = reference.empty() ? v : std::vector<double>(reference.begin(), reference.end());
    std::vector<double> t(n);
    op.ops().derivative(g, t);
    const double tn = std::sqrt(std::inner_product(t.begin(), t.end(), t.begin(), 0.0));
    if (tn > 0.0)
        for (double& x : t) x /= tn;

    const double m0 = mean(v);
    for (double& x : v) x -= m0;

    std::vector<double> F(n), trial(n), Ftrial(n);
    op.residual(v, F);
    double rn = sup_norm(F);
    sol.residual_history.push_back(rn);
    int it = 0;
    while (rn >= cfg.newton_tol) {
        if (it >= cfg.max_newton) {
            std::string trace;
            for (double r : sol.residual_history) trace += " " + num(r);
            throw Error(ErrorKind::NoConvergence,
                        "Newton did not converge at epsilon = " + num(epsilon) + "; residual trace:" + trace);
        }
        const Step st = bordered_step(op, v, F, g, t, cfg);
        sol.least_squares_used = sol.least_squares_used || st.least_squares;
        double lambda = 1.0;
        double rt = 0.0;
        for (int h = 0; h <= cfg.max_halvings; ++h) {
            for (std::size_t j = 0; j < n; ++j) trial[j] = v[j] + lambda * st.delta[j];
            op.residual(trial, Ftrial);
            rt = sup_norm(Ftrial);
            if (rt < rn || h == cfg.max_halvings) break;
            lambda *= 0.5;
        }
        v.swap(trial);
        F.swap(Ftrial);
        rn = rt;
        sol.residual_history.push_back(rn);
        ++it;
    }

    sol.v = std::move(v);
    sol.residual_norm = rn;
    sol.newton_iterations = it;
    sol.tail_ratio = tail_ratio(sol);
    sol.symmetry_defect = symmetry_defect(sol);
    sol.first_integral_drift = first_integral(sol, default_integral_samples(sol)).drift;
    return sol;
}

ProfileSolution solve(double epsilon, const CriticalData& cr, const NormalFormCoeffs& nf,
                      const PotentialSpec& spec, const SolverConfig& cfg) {
    check_inputs(nf, spec);
    if (epsilon < 0.0 || !std::isfinite(epsilon))
        throw Error(ErrorKind::InvalidArgument, "epsilon must be non-negative");
    if (epsilon == 0.0) {
        const WindowPlan wp = plan_window(std::numeric_limits<double>::infinity(), cfg);
        ProfileSolution sol;
        sol.c = cr.c_star;
        sol.domain_length = wp.length;
        sol.n_modes = wp.n_modes;
        sol.v.assign(wp.n_modes, 0.0);
        sol.potential = spec;
        sol.residual_history = {0.0};
        return sol;
    }
    const WaveAnsatz a = make_ansatz(epsilon, cr, nf, cfg.theta);
    const WindowPlan wp = plan_window(a.width, cfg);
    if (wp.length < 40.0 / a.width)
        throw Error(ErrorKind::TailNotResolved, "window L = " + num(wp.length) + " is below 40/width = " +
                                                    num(40.0 / a.width) + " at epsilon = " + num(epsilon));
    return solve_from(ansatz_on_grid(a, wp.n_modes, wp.length), epsilon, cr, nf, spec, wp.length, cfg);
}

std::vector<ProfileSolution> continuation(std::span<const double> eps, const CriticalData& cr,
                                          const NormalFormCoeffs& nf, const PotentialSpec& spec,
                                          const SolverConfig& cfg) {
    if (eps.empty()) throw Error(ErrorKind::InvalidArgument, "continuation needs at least one epsilon");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !std::isfinite(eps[i]))
            throw Error(ErrorKind::InvalidArgument, "continuation epsilons must be positive");
        if (i > 0 && !(eps[i] > eps[i - 1]))
            throw Error(ErrorKind::InvalidArgument, "continuation epsilons must be strictly ascending");
    }
    auto tagged = [](double e, auto&& fn) {
        try {
            return fn();
        } catch (const Error& err) {
            throw Error(err.kind(), "continuation member epsilon = " + num(e) + ": " + err.what());
        }
    };

    std::vector<ProfileSolution> out;
    if (!cfg.seeded_continuation) {
        if (cfg.parallel) {
            std::vector<std::future<ProfileSolution>> jobs;
            for (double e : eps)
                jobs.push_back(std::async(std::launch::async, [&, e] {
                    return tagged(e, [&] { return solve(e, cr, nf, spec, cfg); });
                }));
            for (auto& j : jobs) out.push_back(j.get());
        } else {
            for (double e : eps) out.push_back(tagged(e, [&] { return solve(e, cr, nf, spec, cfg); }));
        }
        return out;
    }

    out.push_back(tagged(eps[0], [&] { return solve(eps[0], cr, nf, spec, cfg); }));
    for (std::size_t i = 1; i < eps.size(); ++i) {
        const double e = eps[i];
        out.push_back(tagged(e, [&] {
            const ProfileSolution& prev = out.back();
            const WaveAnsatz a = make_ansatz(e, cr, nf, cfg.theta);
            const WindowPlan wp = plan_window(a.width, cfg);
            if (wp.length < 40.0 / a.width)
                throw Error(ErrorKind::TailNotResolved, "window too small for this epsilon");
            // Seed: new ansatz plus the previous member's correction to its own
            // ansatz, rescaled as the cube of the amplitude ratio.
            std::vector<double> corr = ansatz_on_grid(prev.ansatz, prev.n_modes, prev.domain_length);
            for (std::size_t j = 0; j < corr.size(); ++j) corr[j] = prev.v[j] - corr[j];
            std::vector<double> mapped(wp.n_modes);
            map_to_grid(corr, prev.domain_length, mapped, wp.length);
            // theta = 0 is pinned by the seed, so only the even part (about
            // xi = 0) of the carried correction is kept. The phase direction is
            // nearly neutral and would otherwise accumulate along the family.
            const std::size_t nn = mapped.size();
            std::vector<double> even(nn);
            for (std::size_t j = 0; j < nn; ++j) even[j] = 0.5 * (mapped[j] + mapped[(nn - j) % nn]);
            mapped.swap(even);
            const double ratio = a.amplitude_scale / prev.ansatz.amplitude_scale;
            const std::vector<double> guess = ansatz_on_grid(a, wp.n_modes, wp.length);
            std::vector<double> seed = guess;
            for (std::size_t j = 0; j < seed.size(); ++j) seed[j] += ratio * ratio * ratio * mapped[j];
            return solve_from(std::move(seed), e, cr, nf, spec, wp.length, cfg, guess);
        }));
    }
    return out;
}

double tail_ratio(const ProfileSolution& sol) {
    const double peak = sup_norm(sol.v);
    if (peak == 0.0) return 0.0;
    std::vector<double> tail;
    for (std::size_t j = 0; j < sol.n_modes; ++j)
        if (std::abs(sol.xi(j)) >= 0.4 * sol.domain_length) tail.push_back(sol.v[j]);
    // Measured about the tail's own level: the mean-zero gauge lifts both
    // tails by the same constant.
    const double level = mean(tail);
    double m = 0.0;
    for (double x : tail) m = std::max(m, std::abs(x - level));
    return m / peak;
}

double symmetry_defect(const ProfileSolution& sol) {
    const std::size_t n = sol.n_modes;
    const double peak = sup_norm(sol.v);
    if (peak == 0.0 || n == 0) return 0.0;
    // Candidate centres near the circular centroid of v^2, on the half grid.
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        acc += sol.v[j] * sol.v[j] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
    const double centre = std::arg(acc) / (2.0 * std::numbers::pi) * static_cast<double>(n);
    const long width = std::max<long>(8, std::lround(4.0 / sol.dx()));
    const long nn = static_cast<long>(n);
    double best = std::numeric_limits<double>::infinity();
    for (long s = std::lround(2.0 * centre) - 2 * width; s <= std::lround(2.0 * centre) + 2 * width; ++s) {
        // Reflection j -> s - j (mod n), centre at s/2 grid units.
        double d = 0.0;
        for (long j = 0; j < nn && d < best * peak; ++j) {
            const long r = (((s - j) % nn) + nn) % nn;
            d = std::max(d, std::abs(sol.v[j] - sol.v[r]));
        }
        best = std::min(best, d / peak);
    }
    return best;
}

std::vector<double> default_integral_samples(const ProfileSolution& sol) {
    std::vector<double> xs;
    const double dx = sol.dx();
    const double core = sol.ansatz.width > 0.0 ? std::min(0.35 * sol.domain_length, 6.0 / sol.ansatz.width)
                                               : 0.35 * sol.domain_length;
    const int count = 48;
    for (int i = 0; i < count; ++i) {
        const double x = -core + 2.0 * core * i / (count - 1);
        xs.push_back(std::round(x / dx) * dx);
    }
    return xs;
}

FirstIntegral first_integral(const ProfileSolution& sol, std::span<const double> xs) {
    FirstIntegral fi;
    if (sol.v.empty()) {
        fi.values.assign(xs.size(), 0.0);
        return fi;
    }
    const FineProfile fp = fine_profile(sol, 64);
    const TrigInterpolant interp(sol.v, sol.domain_length);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : xs) {
        const double val = integral_at(fp.per_unit ? &fp : nullptr, interp, sol, x);
        fi.values.push_back(val);
        lo = std::min(lo, val);
        hi = std::max(hi, val);
    }
    fi.drift = xs.empty() ? 0.0 : hi - lo;
    return fi;
}

std::pair<double, double> chi_diagnostics(const ProfileSolution& sol, double xi) {
    if (sol.v.empty()) return {0.0, 0.0};
    const TrigInterpolant interp(sol.v, sol.domain_length);
    const WindowSamples U = WindowSamples::from(64, [&](double p) { return interp(xi + p); });
    const double z = interp(xi), y = interp.derivative(xi);
    return {chi0(z, y, U, sol.c), chi1(z, y, U, sol.c)};
}

}  // namespace fpuwave

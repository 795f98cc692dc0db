#include "fpuwave/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>

#include "fpuwave/bvp.hpp"
#include "fpuwave/errors.hpp"
#include "fpuwave/reduce.hpp"
#include "fpuwave/spectral.hpp"

namespace fpuwave {

void LatticeState::validate() const {
    if (q.size() != p.size()) throw Error(ErrorKind::InvalidArgument, "q and p must have equal length");
    if (q.size() < 8) throw Error(ErrorKind::InvalidArgument, "the ring needs at least 8 sites");
    for (std::size_t i = 0; i < q.size(); ++i)
        if (!std::isfinite(q[i]) || !std::isfinite(p[i]))
            throw Error(ErrorKind::InvalidArgument, "lattice state has non-finite entries");
}

void forces(std::span<const double> q, const PotentialSpec& spec, std::span<double> out) {
    const std::size_t n = q.size();
    // g1[n] = W1'(q[n+1]-q[n]) and g2[n] = W2'(q[n+2]-q[n]); the force is the
    // backward difference of these bond forces, so the sum telescopes.
    thread_local std::vector<double> g1, g2;
    g1.resize(n);
    g2.resize(n);
    for (std::size_t i = 0; i + 2 < n; ++i) {
        g1[i] = w1_prime(q[i + 1] - q[i], spec);
        g2[i] = w2_prime(q[i + 2] - q[i], spec);
    }
    g1[n - 2] = w1_prime(q[n - 1] - q[n - 2], spec);
    g1[n - 1] = w1_prime(q[0] - q[n - 1], spec);
    g2[n - 2] = w2_prime(q[0] - q[n - 2], spec);
    g2[n - 1] = w2_prime(q[1] - q[n - 1], spec);
    out[0] = g1[0] - g1[n - 1] + g2[0] - g2[n - 2];
    out[1] = g1[1] - g1[0] + g2[1] - g2[n - 1];
    for (std::size_t i = 2; i < n; ++i) out[i] = g1[i] - g1[i - 1] + g2[i] - g2[i - 2];
}

std::vector<double> forces(std::span<const double> q, const PotentialSpec& spec) {
    if (q.size() < 8) throw Error(ErrorKind::InvalidArgument, "the ring needs at least 8 sites");
    std::vector<double> f(q.size());
    forces(q, spec, f);
    return f;
}

LatticeState step_verlet(const LatticeState& s, double dt, const PotentialSpec& spec) {
    if (dt == 0.0 || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be finite and nonzero");
    s.validate();
    LatticeState o = s;
    const std::size_t n = s.n_sites();
    std::vector<double> f(n);
    forces(o.q, spec, f);
    for (std::size_t i = 0; i < n; ++i) o.p[i] += 0.5 * dt * f[i];
    for (std::size_t i = 0; i < n; ++i) o.q[i] += dt * o.p[i];
    forces(o.q, spec, f);
    for (std::size_t i = 0; i < n; ++i) o.p[i] += 0.5 * dt * f[i];
    o.t = s.t + dt;
    return o;
}

double energy(const LatticeState& s, const PotentialSpec& spec) {
    const std::size_t n = s.n_sites();
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r1 = s.q[(i + 1) % n] - s.q[i];
        const double r2 = s.q[(i + 2) % n] - s.q[i];
        e[i] = 0.5 * s.p[i] * s.p[i] + w1(r1, spec) + w2(r2, spec);
    }
    return pairwise_sum(e);
}

double momentum(const LatticeState& s) { return pairwise_sum(s.p); }

namespace {

// Evaluates the misfit between a chain state and the profile translated by a
// continuous shift, reusing spectral buffers between calls.
class ShapeMatcher {
public:
    ShapeMatcher(const LatticeState& state, const ProfileSolution& prof) : st_(state), prof_(prof) {
        n_ = prof.n_modes;
        L_ = prof.domain_length;
        for (double x : prof.v) peak_ = std::max(peak_, std::abs(x));
        const double m_real = static_cast<double>(n_) / L_;
        m_ = std::lround(m_real);
        on_grid_ = m_ > 0 && std::abs(m_real - static_cast<double>(m_)) < 1e-12;
        if (static_cast<double>(state.n_sites()) > L_) {
            const std::size_t band = std::max<std::size_t>(1, n_ / 20);
            double acc = 0.0;
            for (std::size_t j = 0; j < band; ++j) acc += prof.v[j] + prof.v[n_ - 1 - j];
            fill_ = acc / (2.0 * static_cast<double>(band));
        }
        if (on_grid_) {
            ops_ = std::make_unique<SpectralOps>(n_, L_);
            u_.resize(n_);
        } else {
            interp_ = std::make_unique<TrigInterpolant>(prof.v, L_);
        }
    }

    double peak() const { return peak_; }

    double operator()(double sigma) {
        if (peak_ == 0.0) return 0.0;
        const std::size_t ns = st_.n_sites();
        const double ring = static_cast<double>(ns);
        const double f = sigma - std::round(sigma);
        if (on_grid_) ops_->shift(prof_.v, -f, u_);
        double worst = 0.0;
        for (std::size_t n = 0; n < ns; ++n) {
            // Offset of site n from the profile centre, the short way round.
            double xi = static_cast<double>(n) - sigma;
            xi -= ring * std::floor((xi + 0.5 * ring) / ring);
            double model = fill_;
            if (xi >= -0.5 * L_ && xi < 0.5 * L_) {
                if (on_grid_) {
                    const long j = std::lround((xi + f + 0.5 * L_) * static_cast<double>(m_));
                    if (j >= 0 && j < static_cast<long>(n_))
                        model = u_[static_cast<std::size_t>(j)];
                    else
                        model = interp()(xi);
                } else {
                    model = (*interp_)(xi);
                }
            }
            worst = std::max(worst, std::abs(st_.q[n] - model));
        }
        return worst / peak_;
    }

private:
    const TrigInterpolant& interp() {
        if (!interp_) interp_ = std::make_unique<TrigInterpolant>(prof_.v, L_);
        return *interp_;
    }

    const LatticeState& st_;
    const ProfileSolution& prof_;
    std::size_t n_ = 0;
    double L_ = 0.0;
    long m_ = 0;
    bool on_grid_ = false;
    double peak_ = 0.0;
    double fill_ = 0.0;
    std::unique_ptr<SpectralOps> ops_;
    std::unique_ptr<TrigInterpolant> interp_;
    std::vector<double> u_;
};

}  // namespace

ShapeFit shape_error(const LatticeState& state, const ProfileSolution& profile, double c,
                     std::optional<double> hint, double search) {
    (void)c;
    if (profile.v.empty() || profile.n_modes == 0)
        throw Error(ErrorKind::InvalidArgument, "shape_error needs a solved profile");
    ShapeMatcher err(state, profile);
    if (err.peak() == 0.0) return {0.0, hint.value_or(0.0)};

    double lo, hi;
    if (hint) {
        lo = std::floor(*hint - search);
        hi = std::ceil(*hint + search);
    } else {
        lo = 0.0;
        hi = static_cast<double>(state.n_sites()) - 0.125;
    }
    // The carrier spans fewer than three sites, so neighbouring carrier
    // periods give local minima of similar depth. Scan on a 1/8-site grid and
    // refine the deepest few local minima by golden section.
    const double step = 0.125;
    const std::size_t count = static_cast<std::size_t>(std::lround((hi - lo) / step)) + 1;
    std::vector<double> grid_e(count);
    for (std::size_t i = 0; i < count; ++i) grid_e[i] = err(lo + step * static_cast<double>(i));
    std::vector<std::size_t> minima;
    for (std::size_t i = 0; i < count; ++i) {
        const bool left = i == 0 || grid_e[i] <= grid_e[i - 1];
        const bool right = i + 1 == count || grid_e[i] <= grid_e[i + 1];
        if (left && right) minima.push_back(i);
    }
    std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return grid_e[a] < grid_e[b]; });
    if (minima.size() > 6) minima.resize(6);

    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    ShapeFit fit{std::numeric_limits<double>::infinity(), lo};
    for (std::size_t i : minima) {
        const double centre = lo + step * static_cast<double>(i);
        if (grid_e[i] < fit.error) fit = {grid_e[i], centre};
        double a = centre - step, b = centre + step;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = err(x1), f2 = err(x2);
        while (b - a > 1e-11) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = err(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = err(x2);
            }
        }
        const double xm = 0.5 * (a + b);
        const double em = err(xm);
        if (em < fit.error) fit = {em, xm};
    }
    return fit;
}

RunResult run(const LatticeState& initial, double T, double dt, const PotentialSpec& spec, const RunOptions& opt) {
    initial.validate();
    if (!(T >= 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidArgument, "T must be non-negative");
    if (!(dt > 0.0) || dt > 0.05) throw Error(ErrorKind::InvalidArgument, "dt must lie in (0, 0.05]");
    if (opt.stride == 0) throw Error(ErrorKind::InvalidArgument, "record stride must be positive");

    RunResult res;
    LatticeState s = initial;
    const std::size_t n = s.n_sites();
    const double c = opt.profile ? opt.profile->c : 0.0;
    double last_shift = opt.initial_shift;
    double last_t = s.t;

    auto record = [&] {
        double qmax = 0.0;
        for (double x : s.q) {
            if (!std::isfinite(x)) qmax = std::numeric_limits<double>::infinity();
            else qmax = std::max(qmax, std::abs(x));
        }
        if (qmax > opt.blowup)
            throw Error(ErrorKind::BlowUp, "max |q| exceeded " + std::to_string(opt.blowup) + " at t = " + std::to_string(s.t));
        TrajectoryRecord r;
        r.t = s.t;
        r.energy = energy(s, spec);
        r.momentum = momentum(s);
        r.shape_error = std::numeric_limits<double>::quiet_NaN();
        r.shift = std::numeric_limits<double>::quiet_NaN();
        if (opt.profile) {
            const double predicted = last_shift + c * (s.t - last_t);
            const ShapeFit fit = shape_error(s, *opt.profile, c, predicted, 3.0);
            r.shape_error = fit.error;
            r.shift = fit.shift;
            last_shift = fit.shift;
            last_t = s.t;
        }
        res.records.push_back(r);
        if (opt.observer) opt.observer(s);
    };

    record();
    const double steps_real = T / dt;
    std::size_t full = static_cast<std::size_t>(std::floor(steps_real + 1e-9));
    const double rest = T - static_cast<double>(full) * dt;
    std::vector<double> f(n);
    forces(s.q, spec, f);
    const double t0 = s.t;
    auto advance = [&](double h) {
        for (std::size_t i = 0; i < n; ++i) s.p[i] += 0.5 * h * f[i];
        for (std::size_t i = 0; i < n; ++i) s.q[i] += h * s.p[i];
        forces(s.q, spec, f);
        for (std::size_t i = 0; i < n; ++i) s.p[i] += 0.5 * h * f[i];
    };
    for (std::size_t k = 1; k <= full; ++k) {
        advance(dt);
        s.t = t0 + static_cast<double>(k) * dt;
        ++res.steps;
        if (k % opt.stride == 0 || (k == full && rest <= 1e-12)) record();
    }
    if (rest > 1e-12) {
        advance(rest);
        s.t = t0 + T;
        ++res.steps;
        record();
    }
    res.final_state = std::move(s);
    return res;
}

double fitted_speed(std::span<const TrajectoryRecord> recs) {
    double st = 0, ss = 0, stt = 0, sts = 0;
    double cnt = 0;
    for (const auto& r : recs) {
        if (!std::isfinite(r.shift)) continue;
        st += r.t;
        ss += r.shift;
        stt += r.t * r.t;
        sts += r.t * r.shift;
        cnt += 1;
    }
    if (cnt < 2) return std::numeric_limits<double>::quiet_NaN();
    const double den = cnt * stt - st * st;
    return (cnt * sts - st * ss) / den;
}

double relative_energy_drift(std::span<const TrajectoryRecord> recs) {
    if (recs.empty()) return 0.0;
    const double h0 = recs.front().energy;
    double m = 0.0;
    for (const auto& r : recs) m = std::max(m, std::abs(r.energy - h0));
    return h0 != 0.0 ? m / std::abs(h0) : m;
}

}  // namespace fpuwave

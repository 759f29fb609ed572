#include "hcinv/value.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hcinv/health.hpp"
#include "hcinv/parallel.hpp"

namespace hcinv {

DualSlice::DualSlice(const Model& m, const BoundarySurface& surf, double t, double h)
    : m_(&m), t_(t), h_(h) {
    const double T = m.p().horizon;
    if (!(t >= 0 && t <= T)) throw std::domain_error("DualSlice: t outside [0, T]");
    if (!(h > 0)) throw std::domain_error("DualSlice: h must be positive");
    g_ = m.g_value(t);
    const double xi = T - t;
    const CharacteristicView view(m, surf, t, h);
    if (xi <= 1e-12 * T) {
        terminal_ = true;
        return;
    }
    const ProfileSums ps = post_profile(m, h, xi);
    k0_ = ps.k0;
    gamma_ = ps.gamma;

    std::vector<double> s, y, gam, w;
    const BoundaryCurve* c = view.exact_curve();
    std::optional<std::size_t> node = c ? c->node_at_t(t) : std::nullopt;
    if (node) {
        const std::size_t k = *node;
        const double dx = c->dxi();
        for (std::size_t i = 0; i <= k; ++i) {
            s.push_back(c->xi_grid[i]);
            y.push_back(c->values[k - i]);
            gam.push_back(c->gamma[k - i]);
            w.push_back(i == 0 || i == k ? 0.5 * dx : dx);
        }
        F_ = StageFunction(m, h, s, w, y, gam);
        b_ = c->values[k];
        if (b_ > 0) F_.set_anchor(b_);
        return;
    }
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(xi / view.dxi() - 1e-9)));
    const double dx = xi / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) {
        const double si = i == n ? xi : dx * static_cast<double>(i);
        s.push_back(si);
        y.push_back(i == n ? 0.0 : view.b_at_xi(xi - si));
        gam.push_back(i == 0 ? gamma_ : (i == n ? 0.0 : view.gamma_at_xi(xi - si)));
        w.push_back(i == 0 || i == n ? 0.5 * dx : dx);
    }
    F_ = StageFunction(m, h, s, w, y, gam);
    b_ = F_.solve(upper_bound_from_gamma(m, gamma_), 1e-12);
    F_.set_anchor(b_);
}

double DualSlice::w_hat(double z) const {
    const auto& d = m_->d();
    return d.C * std::pow(z, d.a) * k0_ - z * g_;
}

double DualSlice::w_hat_z(double z) const {
    const auto& d = m_->d();
    return d.a * d.C * std::pow(z, d.a - 1.0) * k0_ - g_;
}

double DualSlice::w_zz(double z) const {
    const auto& d = m_->d();
    return d.a * (d.a - 1.0) * d.C * std::pow(z, d.a - 2.0) * k0_;
}

double DualSlice::j_hat(double z) const {
    if (terminal_ || z <= b_) return 0.0;
    return F_(z);
}

JValue DualSlice::eval(double z) const {
    if (!(z > 0)) throw std::domain_error("DualSlice: z must be positive");
    JValue v;
    v.stopping = terminal_ || z <= b_;
    if (!v.stopping) {
        const KernelEval e = F_.eval(z);
        v.j_hat = e.g;
        v.j_hat_z = e.g_z;
        v.j_hat_zz = e.g_zz;
    }
    v.j = v.j_hat + w_hat(z);
    v.j_z = v.j_hat_z + w_hat_z(z);
    v.j_zz = v.j_hat_zz + w_zz(z);
    return v;
}

JValue DualSlice::eval_continuation(double z) const {
    if (!(z > 0)) throw std::domain_error("DualSlice: z must be positive");
    JValue v;
    if (!terminal_) {
        const KernelEval e = F_.eval(z);
        v.j_hat = e.g;
        v.j_hat_z = e.g_z;
        v.j_hat_zz = e.g_zz;
    }
    v.j = v.j_hat + w_hat(z);
    v.j_z = v.j_hat_z + w_hat_z(z);
    v.j_zz = v.j_hat_zz + w_zz(z);
    return v;
}

double j_hat(const Model& m, const BoundarySurface& surf, const DualPoint& p) {
    check_point(m, p);
    return DualSlice(m, surf, p.t, p.h).j_hat(p.z);
}

double j_value(const Model& m, const BoundarySurface& surf, const DualPoint& p) {
    check_point(m, p);
    return DualSlice(m, surf, p.t, p.h).eval(p.z).j;
}

double j_z(const Model& m, const BoundarySurface& surf, const DualPoint& p) {
    check_point(m, p);
    return DualSlice(m, surf, p.t, p.h).eval(p.z).j_z;
}

double j_zz(const Model& m, const BoundarySurface& surf, const DualPoint& p) {
    check_point(m, p);
    return DualSlice(m, surf, p.t, p.h).eval(p.z).j_zz;
}

ValueSurface build_value_surface(const Model& m, const BoundarySurface& surf,
                                 const std::vector<double>& t_grid, const std::vector<double>& z_grid,
                                 const std::vector<double>& h_grid, unsigned threads) {
    ValueSurface vs;
    vs.t_grid = t_grid;
    vs.z_grid = z_grid;
    vs.h_grid = h_grid;
    const std::size_t N = t_grid.size() * h_grid.size() * z_grid.size();
    vs.j_hat.resize(N);
    vs.j.resize(N);
    vs.j_z.resize(N);
    vs.j_zz.resize(N);
    vs.boundary.resize(N);
    parallel_for(t_grid.size() * h_grid.size(), threads, [&](std::size_t idx) {
        const std::size_t it = idx / h_grid.size(), ih = idx % h_grid.size();
        const DualSlice sl(m, surf, t_grid[it], h_grid[ih]);
        for (std::size_t iz = 0; iz < z_grid.size(); ++iz) {
            const JValue v = sl.eval(z_grid[iz]);
            const std::size_t k = vs.index(it, ih, iz);
            vs.j_hat[k] = v.j_hat;
            vs.j[k] = v.j;
            vs.j_z[k] = v.j_z;
            vs.j_zz[k] = v.j_zz;
            vs.boundary[k] = sl.boundary();
        }
    });
    return vs;
}

MCEstimate mc_j_hat(const Model& m, const BoundarySurface& surf, const DualPoint& p,
                    std::size_t n_paths, int n_steps, std::uint64_t seed, double scale,
                    unsigned threads, std::vector<StoppedPayoffSample>* samples) {
    check_point(m, p);
    if (n_paths < 1 || n_steps < 1) throw std::invalid_argument("mc_j_hat: need paths and steps");
    const auto& par = m.p();
    const auto& d = m.d();
    const double T = par.horizon;
    const double xi = T - p.t;
    MCEstimate out;
    out.n_paths = n_paths;
    if (xi <= 0) return out;

    const CharacteristicView view(m, surf, p.t, p.h);
    const std::size_t N = static_cast<std::size_t>(n_steps);
    const double dt = xi / n_steps;
    // deterministic pieces along the health characteristic
    std::vector<double> bnd(N + 1), gam(N + 1), disc(N + 1), drift(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        const double s = j == N ? xi : dt * static_cast<double>(j);
        const double hs = health_pre(m, p.h, s);
        const double im = integrated_mortality_pre(m, p.h, s);
        bnd[j] = scale * view.b_at_xi(xi - s);
        gam[j] = j == N ? 0.0 : gamma_fn(m, p.t + s, hs);
        disc[j] = std::exp(-par.rho * s - im);
        drift[j] = (par.rho - par.r - 0.5 * d.theta * d.theta) * s + im;
    }

    std::vector<double> pay(n_paths), dpay(n_paths), tau(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        std::mt19937_64 eng(seed ^ static_cast<std::uint64_t>(i));
        std::normal_distribution<double> nd;
        double B = 0.0, acc = 0.0, dacc = 0.0;
        double prev_f = 0, prev_df = 0;
        std::size_t stop = N;
        for (std::size_t j = 0; j <= N; ++j) {
            if (j > 0) B += std::sqrt(dt) * nd(eng);
            const double Z = p.z * std::exp(drift[j] - d.theta * B);
            const double za = std::pow(Z, d.a);
            const double f = disc[j] * (par.invest_amount * Z - d.f_of_I * gam[j] * za);
            const double df = disc[j] * (par.invest_amount - d.f_of_I * gam[j] * d.a * za / Z) * Z / p.z;
            if (j > 0) {
                acc += 0.5 * dt * (prev_f + f);
                dacc += 0.5 * dt * (prev_df + df);
            }
            prev_f = f;
            prev_df = df;
            if (j < N && Z <= bnd[j]) {
                stop = j;
                break;
            }
        }
        pay[i] = acc;
        dpay[i] = dacc;
        tau[i] = stop == N ? xi : dt * static_cast<double>(stop);
    });

    double s1 = 0, s2 = 0, d1 = 0, d2 = 0, ts = 0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        s1 += pay[i];
        s2 += pay[i] * pay[i];
        d1 += dpay[i];
        d2 += dpay[i] * dpay[i];
        ts += tau[i];
        if (samples) samples->push_back({i, tau[i], pay[i]});
    }
    const double n = static_cast<double>(n_paths);
    out.estimate = s1 / n;
    out.dz_estimate = d1 / n;
    out.mean_tau = ts / n;
    if (n_paths > 1) {
        out.std_error = std::sqrt(std::max(0.0, (s2 - n * out.estimate * out.estimate) / (n - 1)) / n);
        out.dz_std_error = std::sqrt(std::max(0.0, (d2 - n * out.dz_estimate * out.dz_estimate) / (n - 1)) / n);
    }
    return out;
}

}  // namespace hcinv

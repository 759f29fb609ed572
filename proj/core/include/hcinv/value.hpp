/**
 * @file value.hpp
 * @brief The dual stopping value J_hat, the full dual value J = J_hat + W_hat,
 *        and a Monte Carlo estimator of J_hat under a given stopping boundary.
 *
 * J_hat at (t, z, h) is the trapezoid quadrature of the reduced kernel along
 * the solved boundary, evaluated at trial value z. Its s = 0 node averages
 * Phi over the first panel against the slice's own threshold b: the average
 * is 1/2 at z = b, the solver's convention, so J_hat vanishes there, and it
 * tends to 1{z > b} away from b.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "hcinv/boundary.hpp"
#include "hcinv/dual.hpp"

namespace hcinv {

struct JValue {
    double j_hat = 0, j_hat_z = 0, j_hat_zz = 0;
    double j = 0, j_z = 0, j_zz = 0;
    bool stopping = false;  // z <= b
};

/// All dual quantities at a fixed (t, h).
class DualSlice {
public:
    DualSlice(const Model& m, const BoundarySurface& surf, double t, double h);

    double t() const { return t_; }
    double h() const { return h_; }
    /// Stopping threshold: the root of this slice's stage function. At solved
    /// nodes it equals the stored boundary value.
    double boundary() const { return b_; }
    double gamma() const { return gamma_; }
    double k0() const { return k0_; }
    double g() const { return g_; }

    double j_hat(double z) const;
    JValue eval(double z) const;
    /// Continuation-side values even at or below the boundary (one-sided
    /// limits at z = b).
    JValue eval_continuation(double z) const;
    /// W_hat = W - z g and its z-derivatives.
    double w_hat(double z) const;
    double w_hat_z(double z) const;
    double w_zz(double z) const;

private:
    const Model* m_;
    double t_, h_, b_ = 0, gamma_ = 0, k0_ = 0, g_ = 0;
    bool terminal_ = false;
    StageFunction F_;
};

double j_hat(const Model& m, const BoundarySurface& surf, const DualPoint& p);
double j_value(const Model& m, const BoundarySurface& surf, const DualPoint& p);
double j_z(const Model& m, const BoundarySurface& surf, const DualPoint& p);
double j_zz(const Model& m, const BoundarySurface& surf, const DualPoint& p);

struct ValueSurface {
    std::vector<double> t_grid, z_grid, h_grid;
    /// Flattened [t][h][z] arrays.
    std::vector<double> j_hat, j, j_z, j_zz, boundary;
    std::size_t index(std::size_t it, std::size_t ih, std::size_t iz) const {
        return (it * h_grid.size() + ih) * z_grid.size() + iz;
    }
};

ValueSurface build_value_surface(const Model& m, const BoundarySurface& surf,
                                 const std::vector<double>& t_grid, const std::vector<double>& z_grid,
                                 const std::vector<double>& h_grid, unsigned threads = 1);

struct MCEstimate {
    double estimate = 0;
    double std_error = 0;
    double dz_estimate = 0;  // pathwise z-derivative of the same payoff
    double dz_std_error = 0;
    double mean_tau = 0;
    std::size_t n_paths = 0;
};

struct StoppedPayoffSample {
    std::size_t path_id;
    double tau;
    double payoff;
};

/// Simulates Z exactly on an n_steps grid over [t, T], stops at the first
/// grid time with Z <= scale * b, and integrates the discounted running
/// payoff by the trapezoid rule. Path i draws from seed ^ i.
MCEstimate mc_j_hat(const Model& m, const BoundarySurface& surf, const DualPoint& p,
                    std::size_t n_paths, int n_steps, std::uint64_t seed, double boundary_scale = 1.0,
                    unsigned threads = 1, std::vector<StoppedPayoffSample>* samples = nullptr);

}  // namespace hcinv

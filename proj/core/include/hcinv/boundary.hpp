/**
 * @file boundary.hpp
 * @brief Free boundary b(t,h) in dual coordinates by recursive integration.
 *
 * The boundary solves 0 = int_0^xi G(xi, s, b(xi), b(xi - s)) ds in
 * time-to-maturity xi = T - t. The trapezoid rule on a uniform xi grid turns
 * this into one scalar equation per node, solved by bisection from the
 * terminal node b(T) = 0 backwards.
 *
 * A curve follows the pre-investment health path: node k at t_k = T - xi_k
 * carries health h_ref e^{-delta t_k}, where h_ref is the health at t = 0.
 */
#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "hcinv/numerics.hpp"
#include "hcinv/params.hpp"

namespace hcinv {

/// s-dependent factors of the kernel for a stage whose start health is h.
struct KernelTerms {
    double s = 0;
    double disc = 1;  // e^{-rho s - int M}
    double n1 = 1;
    double n2 = 1;
    double c1 = 0;    // drift in the first Phi argument
    double c2 = 0;    // drift in the second Phi argument
    double vol = 0;   // theta sqrt(s)
};

KernelTerms kernel_terms(const Model& m, double s, double h);

/// Kernel value and first two z-derivatives.
struct KernelEval {
    double g = 0, g_z = 0, g_zz = 0;
};

/// Kernel with Gamma supplied. y is the boundary at the later time; y <= 0
/// means the boundary has reached zero (Phi = 1). At s = 0 the limit is
/// Phi = 1{z > y}, with the value 1/2 when y == z.
KernelEval kernel_eval(const Model& m, const KernelTerms& k, double gamma, double z, double y);

/// s = 0 kernel with Phi(log(z/b) / (vol sqrt(u))) averaged over u in [0, 1]
/// against the hat weight 2 (1 - u) of the trapezoid's first node, where vol
/// belongs to the end of the first panel. The weight keeps P(0) = 1/2 and
/// P -> 1{z > b} far from b, and gives the node the whole first-panel mass of
/// the curvature that concentrates at s -> 0 next to b.
KernelEval kernel_endpoint(const Model& m, double gamma, double z, double b, double vol);

/// Kernel G(xi, s, b_xi, b_xi_minus_s) at a stage whose time is T - xi and
/// whose pre-investment health is h. Gamma is evaluated at (T - xi + s, h e^{-delta s}).
double kernel_G(const Model& m, double xi, double s, double b_xi, double b_xi_minus_s, double h);

/// Trapezoid-weighted sum of kernels over an s-mesh, as a function of the
/// current boundary value z. The s = 0 node always uses y = z.
class StageFunction {
public:
    StageFunction() = default;
    /// s[0] must be 0. y[i] and gamma[i] belong to s[i]; y[0] is ignored.
    StageFunction(const Model& m, double h_start, const std::vector<double>& s,
                  const std::vector<double>& weights, const std::vector<double>& y,
                  const std::vector<double>& gamma);

    double operator()(double z) const { return eval(z).g; }
    KernelEval eval(double z) const;

    /// Evaluates the s = 0 node against a known boundary b instead of y = z,
    /// with Phi averaged over the first panel (see kernel_endpoint). The
    /// average is 1/2 at z = b, so the root is unchanged, and it tends to
    /// 1{z > b} away from b, which the fixed 1/2 does not.
    void set_anchor(double b) { anchor_ = b; }

    /// Bisection on [1e-12, hi]; the upper end is doubled once if needed.
    /// Throws BracketError when no sign change is found.
    double solve(double hi, double tol) const;

    std::size_t size() const { return terms_.size(); }

private:
    const Model* m_ = nullptr;
    std::vector<KernelTerms> terms_;
    std::vector<double> w_, y_, gamma_;
    double anchor_ = 0;
};

struct SolveOptions {
    double bisect_tol = 1e-12;
    double lo = 1e-12;
};

struct BoundaryCurve {
    double h_ref = 0;             // health at t = 0
    std::vector<double> xi_grid;  // 0 = xi_0 < ... < xi_n = T
    std::vector<double> t_grid;   // T - xi
    std::vector<double> health;   // pre-investment health at each node
    std::vector<double> values;   // b at each node; values[0] = 0
    std::vector<double> gamma;    // Gamma at each node
    std::vector<double> upper;    // upper bound g at each node
    std::vector<double> residuals;  // NaN until filled by fill_residuals
    double bisect_tol = 0;

    std::size_t n() const { return xi_grid.size() - 1; }
    double dxi() const { return xi_grid[1] - xi_grid[0]; }
    /// Node index whose time matches t to 1e-9 relative, if any.
    std::optional<std::size_t> node_at_t(double t) const;
    /// Monotone cubic interpolation of b and Gamma in xi.
    double b_at_xi(double xi) const;
    double gamma_at_xi(double xi) const;

    MonotoneInterp b_interp, gamma_interp;
    void build_interpolants();
};

struct SolverMeta {
    int n_steps = 0;
    double bisect_tol = 0;
    double wall_seconds = 0;
};

struct BoundarySurface {
    std::vector<double> h_grid;
    std::vector<BoundaryCurve> curves;
    SolverMeta meta;
};

BoundaryCurve solve_curve(const Model& m, double h, int n_steps, const SolveOptions& opt = {});

/// One independent solve per h, in parallel over `threads` workers.
BoundarySurface solve_surface(const Model& m, const std::vector<double>& h_grid, int n_steps,
                              unsigned threads = 1, const SolveOptions& opt = {});

/// Signed residual of the stage-k equation re-evaluated on a refine-times
/// finer trapezoid mesh, with b interpolated monotonically between nodes and
/// Gamma evaluated exactly at the new mesh points.
double residual(const Model& m, const BoundaryCurve& curve, std::size_t k, int refine);

/// Residuals for every node k >= 1 (index 0 is 0), sharing one fine Gamma table.
std::vector<double> all_residuals(const Model& m, const BoundaryCurve& curve, int refine);
void fill_residuals(const Model& m, BoundaryCurve& curve, int refine);

/// The boundary and Gamma along the characteristic through (t, h), i.e. as
/// functions of xi' in [0, T - t]. Between solved curves the values are
/// interpolated linearly in log h_ref.
class CharacteristicView {
public:
    CharacteristicView(const Model& m, const BoundarySurface& surf, double t, double h);

    double b_at_xi(double xi) const;
    double gamma_at_xi(double xi) const;
    /// Curve when the characteristic coincides with a solved one.
    const BoundaryCurve* exact_curve() const { return exact_; }
    double h_ref() const { return h_ref_; }
    double dxi() const { return lo_->dxi(); }

private:
    const BoundaryCurve* exact_ = nullptr;
    const BoundaryCurve* lo_ = nullptr;
    const BoundaryCurve* hi_ = nullptr;
    double w_ = 0;
    double h_ref_ = 0;
};

/// b(t, h) from a surface.
double boundary_value(const Model& m, const BoundarySurface& surf, double t, double h);

}  // namespace hcinv

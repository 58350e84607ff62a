#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/field.hpp"
#include "fraclab/green.hpp"
#include "fraclab/operators.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/report.hpp"
#include "fraclab/specfun.hpp"

namespace fraclab::poisson {

/// Supremum of an admissible exponent range, with endpoint attainability.
struct ExponentBound {
    double sup = 0.0;
    bool inclusive = false;
};

/// The threshold exponents governing which L^p spaces the fractional
/// derivatives of the solution land in, given data in L^m.
struct RegularityExponents {
    double m_star = 1.0;   ///< max{1, N/(N+s-N(t-s)) + eps}
    double p_star = 0.0;   ///< sup of admissible p (always exclusive)
    ExponentBound r_of_m;  ///< L^r table for the solution itself
    ExponentBound q_of_m;  ///< L^q table for solution / delta^s
    ExponentBound thm14_p; ///< weighted |log delta|^{-1} (-Delta)^{s/2} u
    ExponentBound thm14_q; ///< weighted delta^{t-s} (-Delta)^{t/2} u
    bool very_integrable = false;  ///< m > N/(2s-t): the high-integrability regime
};

RegularityExponents exponents(const specfun::FracParams& params, double t);

/// One row of a norm scan: the L^p estimate of a weighted field over the
/// unit ball with its dyadic boundary-shell decomposition.
struct NormEntry {
    double p = 2.0;
    double norm_estimate = 0.0;  ///< (core + shells + tail)^{1/p}
    bool converged = true;       ///< shell contributions decay geometrically
    double weak_quasinorm = 0.0; ///< Marcinkiewicz quasinorm from the same samples
    double core_contribution = 0.0;
    std::vector<double> shell_contributions;  ///< shell k = 1..K: delta in [2^-k-1, 2^-k]
    double tail_extrapolation = 0.0;
};

/// A sweep over an exponent grid with shared shell geometry. shell_sup holds
/// the per-shell sampled sup of the (weighted) field, the p = inf sampler.
struct NormScan {
    std::string label;
    std::vector<NormEntry> entries;
    std::vector<double> shell_sup;
    int shell_count = 0;
    std::optional<double> detected_threshold;
};

/// Scan driver: integrates |value|^p per shell for every p of the grid from
/// one shared set of field evaluations.
struct ScanSpec {
    std::vector<double> p_grid;
    int shells = 14;
    int radial_nodes_per_shell = 10;
    int angular_nodes = 48;  ///< ignored when the integrand is radial
    bool radial = false;
    std::string label;
};
NormScan shell_scan(const std::function<double(const Vec&)>& value, const ScanSpec& spec,
                    int threads = 1);

/// Fits the per-shell contributions of each entry: geometric decay counts as
/// converged, flat or growing as divergent (an Aitken extrapolation of the
/// deepest ratios absorbs slow transients). Returns the grid crossover, or
/// nothing when every entry classifies the same way. Needs >= 4 shells.
std::optional<double> threshold_detect(NormScan& scan);

/// The solution map: x -> int G(x,y) f(y) dy, zero outside the ball. The
/// returned field memoizes evaluations keyed by the evaluation point; for
/// positive radial data it switches to a boundary-graded radial table with
/// monotone log-log interpolation, spot-validated against direct quadrature.
ScalarField solve_green(const ScalarField& f, const green::GreenKernel& k,
                        const quad::QuadConfig& cfg);

/// (-Delta)^{t/2} of the solution at x, through the kernel route
/// (the t/2-Laplacian of G under the data integral).
quad::QuadResult flap_solution_kernel_path(const ScalarField& f, const green::GreenKernel& k,
                                           double t, const Vec& x, const quad::QuadConfig& cfg);

/// Same quantity through the operator route: the PV fractional Laplacian
/// applied to the solve_green field.
ops::OperatorResult flap_solution_operator_path(const ScalarField& f, const green::GreenKernel& k,
                                                double t, const Vec& x,
                                                const quad::QuadConfig& cfg);

struct FlapPaths {
    double kernel_path = 0.0;
    double operator_path = 0.0;
    double rel_discrepancy = 0.0;
    bool converged = true;
};
FlapPaths flap_solution(const ScalarField& f, const green::GreenKernel& k, double t, const Vec& x,
                        const quad::QuadConfig& cfg);

/// Region for plain L^p norms.
struct Region {
    enum class Kind { Ball, AnnularShell, ExteriorRing } kind = Kind::Ball;
    double r0 = 0.0, r1 = 1.0;
};

/// L^p norm of a field over the region with the shell decomposition (p
/// finite); the weak-L^p quasinorm rides along. For Kind::Ball the shells
/// are the dyadic boundary shells of the unit ball.
NormEntry lp_norm(const ScalarField& field, double p, const Region& region,
                  const quad::QuadConfig& cfg, int shells = 12);

/// Weighted boundary norms of the solution's fractional derivatives:
///   scan 1: || |log delta|^{-1} (-Delta)^{s/2} u ||_{L^p}, p in p_grid
///   scan 2: || delta^{t-s} (-Delta)^{t/2} u ||_{L^q},      q in q_grid
struct WeightedNorms {
    NormScan log_weighted;
    NormScan dist_weighted;
    RegularityExponents thresholds;
};
WeightedNorms weighted_norms(const ScalarField& f, const green::GreenKernel& k, double t,
                             const std::vector<double>& p_grid, const std::vector<double>& q_grid,
                             const quad::QuadConfig& cfg, int shells = 14, int threads = 1);

/// Hardy-type norms of the solution: ||u||_{L^r} and ||u/delta^s||_{L^q}
/// over grids straddling the admissible tables.
struct HardyNorms {
    NormScan plain;
    NormScan hardy;
    RegularityExponents thresholds;
};
HardyNorms hardy_norms(const ScalarField& f, const green::GreenKernel& k,
                       const std::vector<double>& r_grid, const std::vector<double>& q_grid,
                       const quad::QuadConfig& cfg, int shells = 14, int threads = 1);

/// The three potentials controlling the pointwise fractional derivative of
/// the solution:
///   g1 = int |log|x-y|| |x-y|^{-(N-(2s-t))} |f|,
///   g2 = int |x-y|^{-(N-(2s-t))} |f|,
///   g3 = int |x-y|^{-(N-s)} |f|.
struct GFunctions {
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;
    bool converged = true;
};
GFunctions g_functions(const ScalarField& f, const Vec& x, double t,
                       const specfun::FracParams& params, const quad::QuadConfig& cfg);

/// Gagliardo seminorm (p-th power): the double integral of
/// |u(x)-u(y)|^p / |x-y|^{N+gamma p} over B_R x B_R by seeded Monte Carlo,
/// plus the analytic reduction of the pair set with one point beyond B_R.
quad::McResult gagliardo_seminorm(const ScalarField& field, double gamma, double p,
                                  const BallGeometry& enclosing, const quad::QuadConfig& cfg);

}  // namespace fraclab::poisson

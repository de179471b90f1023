#pragma once

#include <cstdint>
#include <vector>

#include "curvlab/curvature.hpp"

namespace curvlab {

//! A point of a zero curve with its Fubini-Study curvature.
struct CurvatureSample
{
    ProjPoint point;
    double k = 0;  //!< NaN when discarded
    std::uint64_t line_index = 0;
    int root_index = 0;
    bool discarded = false;
};

//! On-curve residual accepted for retained samples, relative to coeff_norm.
inline constexpr double kOnCurveTol = 1e-8;

//! Unitary-invariant random line: span of two Gaussian vectors in C^3.
ProjLine sample_random_line(RngStream const& stream);

/*!
 * The d intersection points of a random line with Z(P) and their curvature.
 *
 * Lines whose restriction is degenerate or whose roots fail to polish are
 * redrawn from a derived stream. Near-singular points are returned with
 * `discarded` set.
 */
std::vector<CurvatureSample> line_samples(HomPoly3 const& p,
                                          RngStream const& line_stream,
                                          std::uint64_t line_index);

/*!
 * Area-uniform points on Z(P) by complex Crofton sampling: n_lines random
 * lines, all d intersection points of each, equal weight per point.
 */
std::vector<CurvatureSample>
sample_curve_points(HomPoly3 const& p, std::uint64_t n_lines,
                    RngStream const& stream, Exec exec = Exec::parallel);

struct KappaEstimate
{
    CurvatureBand band;
    Estimate est;
    std::uint64_t n_discarded = 0;
    CurvatureAudit audit;
};

//! Fraction of the area of Z(P) where K lies in the band; binomial stderr.
KappaEstimate kappa_estimate(HomPoly3 const& p, CurvatureBand const& band,
                             std::uint64_t n_lines, RngStream const& stream,
                             Exec exec = Exec::parallel);

struct CurvesKappaResult
{
    Estimate est;  //!< mean over curves, between-curve stderr
    std::vector<double> per_curve;
    std::uint64_t n_discarded = 0;
    CurvatureAudit audit;
};

//! Mean of kappa_estimate over independent Kostlan curves.
CurvesKappaResult expected_kappa_curves(int degree, CurvatureBand const& band,
                                        std::uint64_t n_curves,
                                        std::uint64_t n_lines,
                                        RngStream const& stream,
                                        Exec exec = Exec::parallel);

struct GaussBonnetResult
{
    Estimate total;  //!< area * mean K, area = 2d
    double target = 0;  //!< 2 pi (2 - (d-1)(d-2))
    double error = 0;   //!< relative, or absolute when target == 0
    std::uint64_t n_discarded = 0;
    CurvatureAudit audit;
};

double gauss_bonnet_target(int degree);

//! Crofton estimate of the total curvature; stderr clustered by line.
GaussBonnetResult gauss_bonnet_check(HomPoly3 const& p, std::uint64_t n_lines,
                                     RngStream const& stream,
                                     Exec exec = Exec::parallel);

struct HistogramRow
{
    double lo, hi, mass;
    std::uint64_t count;
};

/*!
 * Pooled curvature histogram over n_curves Kostlan curves. `edges` must
 * be increasing, start at -inf and end at 2 pi; the last bin is closed.
 */
std::vector<HistogramRow> curvature_histogram(int degree,
                                              std::uint64_t n_curves,
                                              std::uint64_t n_lines,
                                              std::vector<double> const& edges,
                                              RngStream const& stream,
                                              Exec exec = Exec::parallel);

struct TailBoundResult
{
    Estimate empirical_prob;  //!< P[kappa > eta]
    double markov_bound = 0;  //!< phi_{r,R} / eta
    Estimate mean_kappa;
    std::uint64_t n_discarded = 0;
};

//! Empirical P[kappa(Z, [2pi - Rd, 2pi - rd]) > eta] vs the Markov bound.
TailBoundResult tail_bound_check(int degree, PhiParams const& params,
                                 std::uint64_t n_curves, std::uint64_t n_lines,
                                 double eta, RngStream const& stream,
                                 Exec exec = Exec::parallel);

/*!
 * Number of inflection points of Z(P): common zeros of P and its Hessian
 * determinant, counted through the resultant in a random unitary chart.
 * Supported for 2 <= d <= 6; throws IllConditioned when the count cannot
 * be certified at `tol`.
 */
int inflection_count(HomPoly3 const& p, double tol, RngStream const& stream);

//! Hessian determinant det(d^2 P / dXi dXj) at x.
cplx hessian_determinant(HomPoly3 const& p, Vec3 const& x) noexcept;

}  // namespace curvlab

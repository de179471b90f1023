#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>

#include "curvlab/estimate.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/projective.hpp"
#include "curvlab/rng.hpp"

namespace curvlab {

inline constexpr double kTwoPi = 2 * std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

//! Gradient threshold: |fz|^2+|fw|^2 <= eps * (second-order norm)^2.
inline constexpr double kSingularGradTol = 1e-24;

//---------------------------------------------------------------------------//
// Pointwise curvature
//---------------------------------------------------------------------------//

/*!
 * Scale-invariant curvature functional of a 2-jet,
 *
 *   V = |2 fzw fz fw - fzz fw^2 - fww fz^2|^2 / (|fz|^2 + |fw|^2)^3.
 *
 * Throws SingularPoint when the gradient vanishes relative to the
 * second-order part of the jet.
 */
double vitter_v(Jet2 const& jet);
std::optional<double> try_vitter_v(Jet2 const& jet) noexcept;

//! Curvature of Z(f) in flat C^2: K = -V.
double curvature_flat(Jet2 const& jet);

//! Fubini-Study curvature of a projective curve from its unitary-chart jet:
//! K = 2 pi - pi V, so K <= 2 pi with equality exactly on lines.
double curvature_fs(Jet2 const& jet);
inline double curvature_fs_from_v(double v) noexcept
{
    return kTwoPi - std::numbers::pi * v;
}

//---------------------------------------------------------------------------//
// Bands
//---------------------------------------------------------------------------//

//! Closed curvature interval [lo, hi]; either end may be infinite.
struct CurvatureBand
{
    double lo = -kInf;
    double hi = kInf;

    bool contains(double k) const noexcept { return lo <= k && k <= hi; }
    bool valid() const noexcept { return lo < hi; }
};

//! The degree-scaled band [2 pi - R d, 2 pi - r d].
CurvatureBand fs_band(double r, double big_r, int degree);

enum class Metric
{
    flat,
    fubini_study
};

//! Interval [lo, hi] of V values mapped onto the band.
struct VInterval
{
    double lo, hi;
};
VInterval band_to_v(CurvatureBand const& band, Metric metric);

//---------------------------------------------------------------------------//
// Jet ensembles and the limit constant
//---------------------------------------------------------------------------//

/*!
 * Exact degree-d Kostlan 2-jet at a point (value set to zero):
 * fz = sqrt(d) a, fw = sqrt(d) b, fzz = sqrt(2d(d-1)) alpha,
 * fww = sqrt(2d(d-1)) beta, fzw = sqrt(d(d-1)) gamma.
 */
Jet2 sample_exact_jet(int degree, StreamReader& reader) noexcept;
Jet2 sample_exact_jet(int degree, RngStream const& stream);

struct PhiParams
{
    double r = 0;
    double big_r = kInf;

    bool valid() const noexcept { return 0 < r && r < big_r; }
};

//! Closed form (1 + r/2pi)^-3 - (1 + R/2pi)^-3.
double phi_closed(PhiParams const& params);

//! Monte Carlo over the Gaussian jet integral defining phi.
Estimate phi_mc(PhiParams const& params, std::uint64_t n,
                RngStream const& stream, Exec exec = Exec::parallel);

//! Running record of every curvature value evaluated: K <= 2 pi audit.
struct CurvatureAudit
{
    std::uint64_t evaluations = 0;
    std::uint64_t violations = 0;  //!< K > 2 pi + kBoundSlack
    double max_k = -kInf;

    static constexpr double kBoundSlack = 1e-9;

    void record(double k) noexcept
    {
        ++evaluations;
        if (k > kTwoPi + kBoundSlack)
            ++violations;
        if (k > max_k)
            max_k = k;
    }
    void merge(CurvatureAudit const& o) noexcept
    {
        evaluations += o.evaluations;
        violations += o.violations;
        if (o.max_k > max_k)
            max_k = o.max_k;
    }
};

struct JetKappaResult
{
    Estimate est;
    std::uint64_t n_discarded = 0;
    CurvatureAudit audit;
};

/*!
 * Kac-Rice estimator of E[kappa(Z, band)] over exact degree-d jets: the
 * frequency of {curvature_fs in band} weighted by |fz|^2 + |fw|^2.
 */
JetKappaResult expected_kappa_jet(int degree, CurvatureBand const& band,
                                  std::uint64_t n, RngStream const& stream,
                                  Exec exec = Exec::parallel);

//! Area-biased mean E[w V]/E[w] over exact jets; equals d - 1.
JetKappaResult area_biased_mean_v(int degree, std::uint64_t n,
                                  RngStream const& stream,
                                  Exec exec = Exec::parallel);

}  // namespace curvlab

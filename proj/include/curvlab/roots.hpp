#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace curvlab {

using cplx = std::complex<double>;

//! Dense univariate polynomial, coeffs[m] multiplies s^m.
struct UniPoly
{
    std::vector<cplx> coeffs;

    int degree() const noexcept
    {
        return static_cast<int>(coeffs.size()) - 1;
    }
    cplx operator()(cplx s) const noexcept;
    double max_abs_coeff() const noexcept;
};

//! Value and derivative by Horner's rule.
std::pair<cplx, cplx> horner_with_derivative(std::span<cplx const> coeffs,
                                             cplx s) noexcept;

//! Largest degree above which companion eigenvalues give way to Aberth.
inline constexpr int kCompanionMaxDegree = 60;

//! Residual accepted after polishing: tol * max|c| * max(1,|r|)^d.
inline constexpr double kRootResidualTol = 1e-10;

double root_residual_bound(UniPoly const& g, cplx r) noexcept;

/*!
 * All complex roots of g, counted with multiplicity.
 *
 * Companion-matrix eigenvalues for degree <= 60 and Aberth-Ehrlich
 * iteration above, both followed by Newton polishing. Throws
 * ConvergenceFailure when a polished root misses the residual bound and
 * std::invalid_argument for degree < 1 or a zero leading coefficient.
 */
std::vector<cplx> roots(UniPoly const& g);

std::vector<cplx> companion_roots(UniPoly const& g);

/*!
 * Simultaneous Aberth-Ehrlich iteration from the given starting points
 * (or a radius-adapted circle when `start` is empty). Returns nullopt if
 * the corrections do not settle within max_iter sweeps. Roots beyond
 * `settle_radius` keep iterating but need not settle.
 */
std::optional<std::vector<cplx>>
aberth_roots(UniPoly const& g, std::span<cplx const> start = {},
             int max_iter = 500,
             double settle_radius = std::numeric_limits<double>::infinity());

//! Newton steps on g from r; returns the iterate with smallest residual.
cplx newton_polish(UniPoly const& g, cplx r, int max_iter = 8) noexcept;

}  // namespace curvlab

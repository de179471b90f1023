#include "curvlab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "curvlab/estimate.hpp"

namespace curvlab {

cplx UniPoly::operator()(cplx s) const noexcept
{
    cplx v = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        v = v * s + *it;
    return v;
}

double UniPoly::max_abs_coeff() const noexcept
{
    double m = 0;
    for (auto const& c : coeffs)
        m = std::max(m, std::abs(c));
    return m;
}

std::pair<cplx, cplx> horner_with_derivative(std::span<cplx const> coeffs,
                                             cplx s) noexcept
{
    cplx v = 0, dv = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    {
        dv = dv * s + v;
        v = v * s + *it;
    }
    return {v, dv};
}

double root_residual_bound(UniPoly const& g, cplx r) noexcept
{
    double scale = std::max(1.0, std::abs(r));
    return kRootResidualTol * g.max_abs_coeff()
           * std::pow(scale, static_cast<double>(g.degree()));
}

namespace {

//! Aberth steps below this (relative) settle a root; callers polish after.
constexpr double kAberthSettle = 1e-11;

//! Newton correction g(s)/g'(s); uses the reversed polynomial for |s| > 1
//! so large roots of high-degree polynomials do not overflow.
cplx newton_ratio(std::span<cplx const> c, cplx s) noexcept
{
    if (std::abs(s) <= 1)
    {
        auto [v, dv] = horner_with_derivative(c, s);
        return v / dv;
    }
    int d = static_cast<int>(c.size()) - 1;
    cplx t = 1.0 / s;
    // rev(t) = sum c[m] t^(d-m); g(s) = s^d rev(t)
    cplx v = 0, dv = 0;
    for (auto const& cm : c)
    {
        dv = dv * t + v;
        v = v * t + cm;
    }
    // g'(s)/g(s) = (d - t rev'(t)/rev(t)) / s
    return s / (static_cast<double>(d) - t * dv / v);
}

double abs_residual(UniPoly const& g, cplx s) noexcept
{
    return std::abs(g(s));
}

void check_input(UniPoly const& g)
{
    if (g.degree() < 1)
        throw std::invalid_argument("roots: degree must be >= 1");
    if (g.coeffs.back() == cplx(0))
        throw std::invalid_argument("roots: zero leading coefficient");
}

}  // namespace

cplx newton_polish(UniPoly const& g, cplx r, int max_iter) noexcept
{
    cplx best = r;
    double best_res = abs_residual(g, r);
    for (int it = 0; it < max_iter && best_res > 0; ++it)
    {
        cplx step = newton_ratio(g.coeffs, r);
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
            break;
        r -= step;
        double res = abs_residual(g, r);
        if (res < best_res)
        {
            best = r;
            best_res = res;
        }
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r)))
            break;
    }
    return best;
}

std::vector<cplx> companion_roots(UniPoly const& g)
{
    check_input(g);
    int d = g.degree();
    if (d == 1)
        return {-g.coeffs[0] / g.coeffs[1]};

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
    cplx lead = g.coeffs[d];
    for (int m = 0; m < d; ++m)
        companion(0, m) = -g.coeffs[d - 1 - m] / lead;
    for (int m = 1; m < d; ++m)
        companion(m, m - 1) = 1;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("companion eigenvalue iteration failed");
    auto const& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + d};
}

std::optional<std::vector<cplx>>
aberth_roots(UniPoly const& g, std::span<cplx const> start, int max_iter,
             double settle_radius)
{
    check_input(g);
    int d = g.degree();
    std::vector<cplx> z;
    if (static_cast<int>(start.size()) == d)
    {
        z.assign(start.begin(), start.end());
    }
    else
    {
        // Circle whose radius is the geometric mean of the root moduli,
        // rotated off the real axis to break symmetric stalls.
        double radius = std::pow(std::abs(g.coeffs[0] / g.coeffs[d]),
                                 1.0 / d);
        if (!(radius > 0) || !std::isfinite(radius))
            radius = 1;
        for (int k = 0; k < d; ++k)
        {
            double angle = 2 * std::numbers::pi * (k + 0.25) / d + 0.4;
            z.push_back(std::polar(radius, angle));
        }
    }

    std::vector<bool> done(d, false);
    for (int iter = 0; iter < max_iter; ++iter)
    {
        bool all_done = true;
        for (int k = 0; k < d; ++k)
        {
            if (done[k])
                continue;
            cplx ratio = newton_ratio(g.coeffs, z[k]);
            cplx repulsion = 0;
            for (int j = 0; j < d; ++j)
                if (j != k)
                    repulsion += 1.0 / (z[k] - z[j]);
            cplx step = ratio / (1.0 - ratio * repulsion);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
            {
                // Exact hit (g(z) = 0) or collision; nudge and retry.
                step = (ratio == cplx(0)) ? cplx(0)
                                          : cplx(1e-8) * (1.0 + std::abs(z[k]));
            }
            z[k] -= step;
            if (std::abs(step) <= kAberthSettle * std::max(1.0, std::abs(z[k])))
                done[k] = true;
            else if (std::abs(z[k]) <= settle_radius)
                all_done = false;
        }
        if (all_done)
            return z;
    }
    // Accept if every root meets the residual bound even without settling.
    for (auto const& r : z)
        if (std::abs(r) <= settle_radius
            && abs_residual(g, r) > root_residual_bound(g, r))
            return std::nullopt;
    return z;
}

std::vector<cplx> roots(UniPoly const& g)
{
    check_input(g);
    std::vector<cplx> z;
    if (g.degree() <= kCompanionMaxDegree)
    {
        z = companion_roots(g);
    }
    else
    {
        auto found = aberth_roots(g);
        if (!found)
            throw ConvergenceFailure("Aberth iteration did not settle");
        z = std::move(*found);
    }
    for (auto& r : z)
    {
        r = newton_polish(g, r);
        if (!(abs_residual(g, r) <= root_residual_bound(g, r)))
            throw ConvergenceFailure("root polishing stalled above bound");
    }
    return z;
}

}  // namespace curvlab

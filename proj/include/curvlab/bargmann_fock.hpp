#pragma once

#include <cstdint>
#include <vector>

#include "curvlab/curvature.hpp"

namespace curvlab {

/*!
 * Polynomial on C^2 in dense triangular storage: coeff(i, j) multiplies
 * z^i w^j for i + j <= degree.
 */
class Poly2
{
  public:
    explicit Poly2(int degree = 0);

    int degree() const noexcept { return degree_; }
    cplx& coeff(int i, int j) { return c_[index(i, j)]; }
    cplx coeff(int i, int j) const { return c_[index(i, j)]; }

    cplx operator()(cplx z, cplx w) const noexcept;
    //! Value, first and second partials at (z, w).
    Jet2 jet(cplx z, cplx w) const noexcept;

    Poly2 operator-(Poly2 const& o) const;

    //! f0(z, w) = z w - 1/4
    static Poly2 f0();

  private:
    std::size_t index(int i, int j) const noexcept
    {
        // rows by i, each row holding degree - i + 1 entries
        return static_cast<std::size_t>(i) * (degree_ + 1)
               - static_cast<std::size_t>(i) * (i - 1) / 2 + j;
    }

    int degree_;
    std::vector<cplx> c_;
};

/*!
 * Truncated Bargmann-Fock field (holomorphic part):
 * f(z, w) = sum_{i+j<=N} a_ij sqrt(pi^(i+j) / (i! j!)) z^i w^j.
 */
struct BFPoly
{
    Poly2 poly;
    double radius = 1;           //!< working ball radius for the bound
    double cov_error_bound = 0;  //!< sup over the ball of covariance tail
};

//! Tail sum_{n > N} (pi rho^2)^n / n!: covariance truncation error bound.
double bf_truncation_bound(int trunc, double radius);

//! Smallest N with bf_truncation_bound(N, radius) < tol.
int bf_truncation_degree(double radius, double tol);

BFPoly sample_bf(int trunc, RngStream const& stream, double radius = 1.0);

//! Holomorphic-part covariance E f(z) conj f(w) = exp(pi <w, z>), truncated.
cplx bf_covariance(int trunc, cplx z1, cplx z2, cplx w1, cplx w2);

struct BallRegion
{
    double radius = 1;
};

//! Grid on the z-disc: rings uniform in |z|^2, rays uniform in angle.
struct BranchGrid
{
    int rings = 64;
    int rays = 128;

    static BranchGrid from_n(int grid_n) { return {grid_n, 2 * grid_n}; }
};

struct ZeroSample
{
    cplx z, w;
    double k;       //!< flat curvature -V
    double weight;  //!< area weight (0 for boundary trace points)
};

struct ZeroCloud
{
    std::vector<ZeroSample> samples;
    std::uint64_t n_branch_failures = 0;
};

/*!
 * Weighted point cloud for the area measure of Z(p) within the ball, by
 * graph-branch quadrature over the z-disc. Each root w of p(z, .) inside
 * the ball carries weight (1 + |dw/dz|^2) times its cell area; cells cut
 * by the sphere are trimmed to the linearized crossing, and each crossing
 * is also emitted as a zero-weight sample at the refined boundary point.
 */
ZeroCloud bf_zero_samples(Poly2 const& p, BallRegion const& region,
                          BranchGrid const& grid);

struct BandArea
{
    double in_band = 0;
    double total = 0;
    std::uint64_t n_branch_failures = 0;
};

BandArea bf_area_band(Poly2 const& p, BallRegion const& region,
                      CurvatureBand const& band, BranchGrid const& grid);

struct EventConfig
{
    CurvatureBand band{-4.0, -0.125};
    double threshold = 0.5;
    BallRegion region{1.0};
    double tol = 1e-6;       //!< truncation tolerance on the radius-2 ball
    BranchGrid grid{24, 48};
};

/*!
 * Frequency over n Bargmann-Fock draws of the event
 * area{x in Z(f) cap ball : K(x) in band} > threshold.
 */
Estimate prop1_event_probability(std::uint64_t n, EventConfig const& cfg,
                                 RngStream const& stream,
                                 Exec exec = Exec::parallel);

/*!
 * Grid lower bound for the C^2 norm of p - q on the ball of radius
 * `radius` in C^2: max over grid points of all derivatives of order <= 2.
 */
double c2_distance_to(Poly2 const& p, Poly2 const& q, double radius,
                      int grid_n);

}  // namespace curvlab

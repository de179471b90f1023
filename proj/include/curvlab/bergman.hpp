#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "curvlab/rng.hpp"

namespace curvlab {

using C2 = std::array<cplx, 2>;

//! |1 + <z,w>|^d / ((1+|z|^2)(1+|w|^2))^(d/2), the normalized kernel of the
//! degree-d ensemble in the affine chart.
double fs_normalized_kernel(int degree, C2 const& z, C2 const& w);

//! exp(-(pi/2) |z - w|^2)
double bf_kernel_modulus(C2 const& z, C2 const& w);

struct PointPair
{
    C2 z, w;
};

//! Pairs drawn uniformly from the unit ball of C^2.
std::vector<PointPair> ball_pairs(std::size_t n, RngStream const& stream);

struct KernelComparison
{
    int degree = 0;
    int order = 0;  //!< derivative order k
    double sup_err = 0;
    double scale_constant = 0;
};

//! Rescaling constant c in z -> c z / sqrt(d).
double kernel_scale_constant();

/*!
 * sup over pairs of the k-th derivative gap between the rescaled
 * normalized kernel and the Bargmann-Fock kernel, derivatives taken in the
 * unscaled chart coordinates of the first argument (k in {0, 1, 2}).
 */
std::vector<KernelComparison>
kernel_convergence(std::vector<int> const& degrees,
                   std::vector<PointPair> const& pairs, int order = 0);

struct RateFit
{
    double slope = 0;
    double intercept = 0;
    double residual = 0;  //!< RMS residual in log space
};

//! Least squares on (log d, log sup_err).
RateFit rate_fit(std::vector<KernelComparison> const& comparisons);

}  // namespace curvlab

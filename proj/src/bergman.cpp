#include "curvlab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curvlab {

double fs_normalized_kernel(int degree, C2 const& z, C2 const& w)
{
    // Same arithmetic for the pairing and both norms, so z = w gives 1 exactly.
    auto pair = [](C2 const& a, C2 const& b) {
        return std::conj(b[0]) * a[0] + std::conj(b[1]) * a[1];
    };
    cplx pairing = pair(z, w);
    double nz = pair(z, z).real();
    double nw = pair(w, w).real();
    double log_k = degree
                   * (std::log(std::abs(1.0 + pairing))
                      - 0.5 * std::log(1.0 + nz) - 0.5 * std::log(1.0 + nw));
    return std::exp(std::min(log_k, 0.0));
}

double bf_kernel_modulus(C2 const& z, C2 const& w)
{
    double dist2 = std::norm(z[0] - w[0]) + std::norm(z[1] - w[1]);
    return std::exp(-0.5 * std::numbers::pi * dist2);
}

std::vector<PointPair> ball_pairs(std::size_t n, RngStream const& stream)
{
    StreamReader rd(stream);
    auto point = [&]() {
        // Uniform in the unit ball of R^4: Gaussian direction, radius U^(1/4).
        C2 g{rd.cn(), rd.cn()};
        double len = std::sqrt(std::norm(g[0]) + std::norm(g[1]));
        double radius = std::pow(rd.uniform(), 0.25);
        return C2{g[0] * (radius / len), g[1] * (radius / len)};
    };
    std::vector<PointPair> out(n);
    for (auto& p : out)
    {
        p.z = point();
        p.w = point();
    }
    return out;
}

double kernel_scale_constant()
{
    return std::sqrt(std::numbers::pi);
}

namespace {

constexpr double kFdStep = 1e-3;

//! Gap function of the first argument in rescaled coordinates.
struct Gap
{
    int degree;
    double c;

    double operator()(C2 const& z, C2 const& w) const
    {
        double s = c / std::sqrt(static_cast<double>(degree));
        C2 zs{z[0] * s, z[1] * s}, ws{w[0] * s, w[1] * s};
        return fs_normalized_kernel(degree, zs, ws) - bf_kernel_modulus(z, w);
    }
};

C2 shifted(C2 z, int axis, double h)
{
    // real axes 0..3 of C^2
    cplx delta = (axis % 2 == 0) ? cplx(h, 0) : cplx(0, h);
    z[axis / 2] += delta;
    return z;
}

//! Largest |k-th directional derivative| over the four real axes (and
//! mixed pairs for k = 2), by central differences.
double derivative_gap(Gap const& gap, PointPair const& p, int order)
{
    double h = kFdStep;
    if (order == 0)
        return std::abs(gap(p.z, p.w));
    double best = 0;
    if (order == 1)
    {
        for (int a = 0; a < 4; ++a)
        {
            double d = (gap(shifted(p.z, a, h), p.w)
                        - gap(shifted(p.z, a, -h), p.w))
                       / (2 * h);
            best = std::max(best, std::abs(d));
        }
        return best;
    }
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b)
        {
            auto at = [&](double sa, double sb) {
                return gap(shifted(shifted(p.z, a, sa), b, sb), p.w);
            };
            double d = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h))
                       / (4 * h * h);
            best = std::max(best, std::abs(d));
        }
    return best;
}

}  // namespace

std::vector<KernelComparison>
kernel_convergence(std::vector<int> const& degrees,
                   std::vector<PointPair> const& pairs, int order)
{
    if (order < 0 || order > 2)
        throw std::invalid_argument("kernel_convergence: order must be 0, 1 or 2");
    if (!std::is_sorted(degrees.begin(), degrees.end()))
        throw std::invalid_argument("kernel_convergence: degrees must increase");
    double c = kernel_scale_constant();
    std::vector<KernelComparison> out;
    for (int d : degrees)
    {
        if (d < 1)
            throw std::invalid_argument("kernel_convergence: degree must be >= 1");
        Gap gap{d, c};
        // Rescaled derivatives pick up (sqrt(d)/c)^k in chart coordinates.
        double chain = std::pow(std::sqrt(static_cast<double>(d)) / c, order);
        double sup = 0;
        for (auto const& p : pairs)
            sup = std::max(sup, chain * derivative_gap(gap, p, order));
        out.push_back({d, order, sup, c});
    }
    return out;
}

RateFit rate_fit(std::vector<KernelComparison> const& comparisons)
{
    if (comparisons.size() < 3)
        throw std::invalid_argument("rate_fit: need at least 3 degrees");
    double n = static_cast<double>(comparisons.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto const& k : comparisons)
    {
        if (!(k.sup_err > 0))
            throw std::invalid_argument("rate_fit: errors must be positive");
        double x = std::log(static_cast<double>(k.degree));
        double y = std::log(k.sup_err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    RateFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0;
    for (auto const& k : comparisons)
    {
        double r = std::log(k.sup_err)
                   - (fit.intercept
                      + fit.slope * std::log(static_cast<double>(k.degree)));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

}  // namespace curvlab

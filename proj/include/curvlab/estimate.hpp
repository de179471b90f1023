#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace curvlab {

//---------------------------------------------------------------------------//
// Errors
//---------------------------------------------------------------------------//

struct NumericalError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct DegenerateLine : NumericalError
{
    using NumericalError::NumericalError;
};
struct ConvergenceFailure : NumericalError
{
    using NumericalError::NumericalError;
};
struct SingularPoint : NumericalError
{
    using NumericalError::NumericalError;
};
struct BranchFailure : NumericalError
{
    using NumericalError::NumericalError;
};
//! Run-level abort: more than kMaxDiscardFraction of samples discarded.
struct TooManyDiscards : NumericalError
{
    using NumericalError::NumericalError;
};
struct IllConditioned : NumericalError
{
    using NumericalError::NumericalError;
};
struct MalformedInput : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline constexpr double kMaxDiscardFraction = 1e-4;

//! Throws TooManyDiscards if discarded/(retained+discarded) > 0.01%.
void check_discards(std::uint64_t retained, std::uint64_t discarded,
                    char const* where);

//---------------------------------------------------------------------------//
// Estimates
//---------------------------------------------------------------------------//

//! Monte Carlo scalar.
struct Estimate
{
    double mean = 0;
    double std_err = 0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;

    //! |mean - target| <= k * stderr (with an absolute floor for exact cases)
    bool within(double target, double k, double floor = 0) const
    {
        return std::abs(mean - target) <= k * std_err + floor;
    }
};

//! |a - b| <= k * sqrt(sa^2 + sb^2)
inline bool agree(Estimate const& a, Estimate const& b, double k)
{
    return std::abs(a.mean - b.mean)
           <= k * std::hypot(a.std_err, b.std_err);
}

//! Running sums for a sample mean; merge in a fixed order for determinism.
struct MeanAccumulator
{
    double sum = 0;
    double sum_sq = 0;
    std::uint64_t n = 0;

    void add(double x) noexcept
    {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    void merge(MeanAccumulator const& o) noexcept
    {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n += o.n;
    }
    double mean() const noexcept { return n ? sum / n : 0.0; }
    double std_error() const noexcept
    {
        if (n < 2)
            return 0;
        double m = mean();
        double var = (sum_sq - n * m * m) / (n - 1);
        return std::sqrt(std::max(var, 0.0) / n);
    }
    Estimate estimate(std::uint64_t seed) const
    {
        return {mean(), std_error(), n, seed};
    }
};

/*!
 * Sums for a weighted frequency E[w x] / E[w], with the delta-method
 * standard error of the ratio.
 */
struct RatioAccumulator
{
    double sw = 0;    //!< sum w
    double swx = 0;   //!< sum w x
    double sww = 0;   //!< sum w^2
    double swwx = 0;  //!< sum w^2 x
    double swwxx = 0; //!< sum w^2 x^2
    std::uint64_t n = 0;

    void add(double w, double x) noexcept
    {
        sw += w;
        swx += w * x;
        sww += w * w;
        swwx += w * w * x;
        swwxx += w * w * x * x;
        ++n;
    }
    void merge(RatioAccumulator const& o) noexcept
    {
        sw += o.sw;
        swx += o.swx;
        sww += o.sww;
        swwx += o.swwx;
        swwxx += o.swwxx;
        n += o.n;
    }
    double ratio() const noexcept { return sw > 0 ? swx / sw : 0.0; }
    double std_error() const noexcept
    {
        if (n < 2 || sw <= 0)
            return 0;
        double m = ratio();
        double mean_w = sw / n;
        // Var of w (x - m), centered at zero by definition of m.
        double v = (swwxx - 2 * m * swwx + m * m * sww) / (n - 1);
        return std::sqrt(std::max(v, 0.0) / n) / mean_w;
    }
    Estimate estimate(std::uint64_t seed) const
    {
        return {ratio(), std_error(), n, seed};
    }
};

}  // namespace curvlab

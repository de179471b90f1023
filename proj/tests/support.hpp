#pragma once

#include <cmath>
#include <vector>

#include "curvlab/projective.hpp"

namespace testing {

using curvlab::cplx;
using curvlab::HomPoly3;

//! X1 X2 - X0^2
inline HomPoly3 conic()
{
    return HomPoly3(2, {{0, 1, 1, 1.0}, {2, 0, 0, -1.0}});
}

//! X0^3 + X1^3 + X2^3
inline HomPoly3 fermat_cubic()
{
    return HomPoly3(3, {{3, 0, 0, 1.0}, {0, 3, 0, 1.0}, {0, 0, 3, 1.0}});
}

inline HomPoly3 monomial(int i, int j, int k, cplx c = 1.0)
{
    return HomPoly3(i + j + k, {{i, j, k, c}});
}

//! Sample mean and standard error of a sequence.
struct Moments
{
    double mean = 0, se = 0;
};

inline Moments moments(std::vector<double> const& x)
{
    double n = static_cast<double>(x.size());
    double s = 0, s2 = 0;
    for (double v : x)
        s += v;
    double m = s / n;
    for (double v : x)
        s2 += (v - m) * (v - m);
    return {m, std::sqrt(s2 / (n - 1) / n)};
}

}  // namespace testing

#include <algorithm>

#include "curvlab/curve_sampler.hpp"
#include "curvlab/roots.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {

double nearest(std::vector<cplx> const& rs, cplx target)
{
    double best = 1e300;
    for (cplx r : rs)
        best = std::min(best, std::abs(r - target));
    return best;
}

}  // namespace

TEST_CASE("quadratic and cubic")
{
    auto r2 = roots(UniPoly{{-1.0, 0.0, 1.0}});
    REQUIRE(r2.size() == 2);
    CHECK(nearest(r2, 1.0) < 1e-12);
    CHECK(nearest(r2, -1.0) < 1e-12);

    auto r3 = roots(UniPoly{{-1.0, 0.0, 0.0, 1.0}});
    REQUIRE(r3.size() == 3);
    for (int k = 0; k < 3; ++k)
        CHECK(nearest(r3, std::polar(1.0, 2 * std::numbers::pi * k / 3)) < 1e-10);
}

TEST_CASE("bad input")
{
    CHECK_THROWS_AS(roots(UniPoly{{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(roots(UniPoly{{1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("horner value and derivative")
{
    UniPoly g{{1.0, -2.0, cplx(0, 3), 4.0}};
    cplx s(0.3, -0.7);
    auto [v, dv] = horner_with_derivative(g.coeffs, s);
    CHECK(std::abs(v - (1.0 - 2.0 * s + cplx(0, 3) * s * s + 4.0 * s * s * s)) < 1e-14);
    CHECK(std::abs(dv - (-2.0 + cplx(0, 6) * s + 12.0 * s * s)) < 1e-14);
    CHECK(std::abs(g(s) - v) < 1e-15);
}

TEST_CASE("random restrictions: all roots meet the residual bound")
{
    for (int d : {5, 20, 40, 80})
    {
        CAPTURE(d);
        RngStream root(100 + d);
        auto p = sample_kostlan(d, derive_stream(root, "poly", 0));
        auto line = sample_random_line(derive_stream(root, "line", 0));
        auto g = restrict_to_line(p, line);
        auto rs = roots(g);
        REQUIRE(rs.size() == static_cast<std::size_t>(d));
        for (cplx r : rs)
            CHECK(std::abs(g(r)) <= root_residual_bound(g, r));
    }
}

TEST_CASE("aberth agrees with companion")
{
    RngStream root(9);
    StreamReader rd(root);
    std::vector<cplx> c(31);
    for (auto& v : c)
        v = rd.cn();
    UniPoly g{c};
    auto a = aberth_roots(g);
    REQUIRE(a);
    auto b = companion_roots(g);
    for (cplx r : b)
        CHECK(nearest(*a, r) < 1e-8);
}

TEST_CASE("newton polish improves a perturbed root")
{
    UniPoly g{{-2.0, 0.0, 1.0}};
    cplx r = newton_polish(g, 1.41);
    CHECK(std::abs(r - std::sqrt(2.0)) < 1e-14);
}

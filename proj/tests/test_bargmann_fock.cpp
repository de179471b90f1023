#include "curvlab/bargmann_fock.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curvlab;

namespace {

double const kPi = std::numbers::pi;
double const kF0Area = kPi * std::sqrt(3.0);

Poly2 plane_w()
{
    Poly2 p(1);
    p.coeff(0, 1) = 1;
    return p;
}

}  // namespace

TEST_CASE("poly2 storage and jets")
{
    Poly2 p(3);
    p.coeff(1, 2) = 2.0;  // 2 z w^2
    p.coeff(3, 0) = cplx(0, 1);
    p.coeff(0, 0) = -1.0;
    cplx z(0.3, 0.2), w(-0.5, 0.7);
    CHECK(std::abs(p(z, w) - (2.0 * z * w * w + cplx(0, 1) * z * z * z - 1.0)) < 1e-14);
    auto j = p.jet(z, w);
    CHECK(std::abs(j.fz - (2.0 * w * w + 3.0 * cplx(0, 1) * z * z)) < 1e-14);
    CHECK(std::abs(j.fw - 4.0 * z * w) < 1e-14);
    CHECK(std::abs(j.fzz - 6.0 * cplx(0, 1) * z) < 1e-14);
    CHECK(std::abs(j.fww - 4.0 * z) < 1e-14);
    CHECK(std::abs(j.fzw - 4.0 * w) < 1e-14);

    auto f0 = Poly2::f0();
    CHECK(f0(0.5, 0.5) == cplx(0));
    auto diff = f0 - f0;
    CHECK(diff(0.3, 0.9) == cplx(0));
}

TEST_CASE("truncation")
{
    int n = bf_truncation_degree(2, 1e-6);
    CHECK(n > 10);
    CHECK(n < 80);
    CHECK(bf_truncation_bound(n, 2) < 1e-6);
    CHECK(bf_truncation_bound(n - 1, 2) >= 1e-6);
    CHECK(bf_truncation_bound(2 * n, 2) < bf_truncation_bound(n, 2) / 10);
    CHECK(bf_truncation_degree(2, 1e9) == 0);
    double prev = bf_truncation_bound(0, 2);
    for (int k = 1; k < 60; ++k)
    {
        double b = bf_truncation_bound(k, 2);
        CHECK(b < prev);
        prev = b;
    }
    CHECK_THROWS_AS(bf_truncation_degree(2, 0), std::invalid_argument);
}

TEST_CASE("field coefficients and covariance")
{
    RngStream root(61);
    int trunc = 30;
    std::vector<double> c00, c11;
    cplx za(0.3, 0.1), zb(-0.2, 0.4), wa(0.1, -0.5), wb(0.25, 0.2);
    std::vector<double> cov_re, cov_im;
    for (int k = 0; k < 100000; ++k)
    {
        auto f = sample_bf(trunc, derive_stream(root, "f", k));
        c00.push_back(std::norm(f.poly.coeff(0, 0)));
        c11.push_back(std::norm(f.poly.coeff(1, 1)));
        cplx prod = f.poly(za, zb) * std::conj(f.poly(wa, wb));
        cov_re.push_back(prod.real());
        cov_im.push_back(prod.imag());
    }
    auto m0 = testing::moments(c00), m1 = testing::moments(c11);
    CHECK(std::abs(m0.mean - 1) < 3 * m0.se);
    CHECK(std::abs(m1.mean - kPi * kPi) < 3 * m1.se);

    cplx exact = std::exp(kPi * (za * std::conj(wa) + zb * std::conj(wb)));
    cplx series = bf_covariance(trunc, za, zb, wa, wb);
    CHECK(std::abs(series - exact) < 1e-10);
    auto re = testing::moments(cov_re), im = testing::moments(cov_im);
    CHECK(std::abs(re.mean - exact.real()) < 3 * re.se + 1e-6);
    CHECK(std::abs(im.mean - exact.imag()) < 3 * im.se + 1e-6);
    CHECK(bf_covariance(5, 0, 0, 0, 0) == cplx(1));
}

TEST_CASE("flat plane quadrature")
{
    auto cloud = bf_zero_samples(plane_w(), BallRegion{1}, BranchGrid::from_n(64));
    double total = 0;
    for (auto const& s : cloud.samples)
    {
        total += s.weight;
        CHECK(s.k == 0);
    }
    CHECK(total == doctest::Approx(kPi).epsilon(1e-12));
    auto band = bf_area_band(plane_w(), BallRegion{1}, {-1e-9, 1e-9}, BranchGrid::from_n(64));
    CHECK(band.in_band == doctest::Approx(band.total));
}

TEST_CASE("f0 oracle")
{
    auto f0 = Poly2::f0();
    auto cloud = bf_zero_samples(f0, BallRegion{1}, BranchGrid::from_n(200));
    double total = 0, kmin = 0, kmax = -1e9;
    for (auto const& s : cloud.samples)
    {
        total += s.weight;
        kmin = std::min(kmin, s.k);
        kmax = std::max(kmax, s.k);
        // analytic curvature along the curve
        double t = std::norm(s.z);
        double exact = -0.25 / std::pow(t + 1 / (16 * t), 3);
        CHECK(s.k == doctest::Approx(exact).epsilon(1e-9));
        CHECK(std::abs(f0(s.z, s.w)) < 1e-12);
        CHECK(std::norm(s.z) + std::norm(s.w) <= 1 + 1e-9);
    }
    CHECK(cloud.n_branch_failures == 0);
    CHECK(std::abs(total / kF0Area - 1) < 5e-3);
    CHECK(kmin == doctest::Approx(-2).epsilon(1e-3));
    CHECK(kmax == doctest::Approx(-0.25).epsilon(1e-3));

    auto in = bf_area_band(f0, BallRegion{1}, {-2 - 1e-6, -0.25 + 1e-6}, BranchGrid::from_n(200));
    CHECK(in.in_band == in.total);
    auto pos = bf_area_band(f0, BallRegion{1}, {0, kInf}, BranchGrid::from_n(200));
    CHECK(pos.in_band == 0);
}

TEST_CASE("f0 quadrature converges")
{
    auto f0 = Poly2::f0();
    auto area = [&](int n) {
        return bf_area_band(f0, BallRegion{1}, {-kInf, kInf}, BranchGrid::from_n(n)).total;
    };
    double a1 = area(100), a2 = area(200), a4 = area(400);
    CHECK(std::abs(a2 - a1) / a2 < 1e-3);
    CHECK(std::abs(a4 - a2) / a4 < 1e-3);
    CHECK(std::abs(a4 - kF0Area) < std::abs(a1 - kF0Area));
}

TEST_CASE("event probability limits")
{
    RngStream root(62);
    EventConfig wide;
    wide.band = {-100, -1e-3};
    wide.threshold = 1e-6;
    auto p = prop1_event_probability(20, wide, root);
    CHECK(p.mean == 1);

    EventConfig impossible;
    impossible.band = {-4, -3.99};
    impossible.threshold = 4;
    auto q = prop1_event_probability(20, impossible, root);
    CHECK(q.mean == 0);
}

TEST_CASE("c2 distance")
{
    auto f0 = Poly2::f0();
    CHECK(c2_distance_to(f0, f0, 2, 9) == 0);

    Poly2 z3(3);
    z3.coeff(3, 0) = 1;
    auto bump = [&](double eps) {
        Poly2 p(3);
        p.coeff(1, 1) = 1;
        p.coeff(0, 0) = -0.25;
        p.coeff(3, 0) = eps;
        return c2_distance_to(p, f0, 2, 9);
    };
    double base = c2_distance_to(z3, Poly2(0), 2, 9);
    CHECK(base > 0);
    for (double eps : {1e-3, 1e-2, 0.1})
        CHECK(bump(eps) == doctest::Approx(eps * base).epsilon(1e-10));
}

#include <filesystem>
#include <fstream>

#include "curvlab/curvature.hpp"
#include "curvlab/curve_sampler.hpp"
#include "curvlab/projective.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curvlab;
using testing::conic;
using testing::fermat_cubic;
using testing::monomial;

namespace {

double gram_error(Frame const& f)
{
    double worst = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            worst = std::max(worst, std::abs(dot(f[a], f[b]) - (a == b ? 1.0 : 0.0)));
    return worst;
}

Vec3 axpy(Frame const& f, cplx z, cplx w)
{
    Vec3 x;
    for (int i = 0; i < 3; ++i)
        x[i] = f[0][i] + z * f[1][i] + w * f[2][i];
    return x;
}

//! Finite-difference jet of z, w -> P(u0 + z u1 + w u2).
Jet2 fd_jet(HomPoly3 const& p, Frame const& f)
{
    auto F = [&](cplx z, cplx w) { return evaluate(p, axpy(f, z, w)); };
    double h = 1e-5;
    double H = 1e-3;  // second differences use the holomorphic 4-point rule
    cplx i(0, 1);
    Jet2 j;
    j.f0 = F(0, 0);
    j.fz = (F(h, 0) - F(-h, 0)) / (2 * h);
    j.fw = (F(0, h) - F(0, -h)) / (2 * h);
    j.fzz = (F(H, 0) + F(-H, 0) - F(i * H, 0) - F(-i * H, 0)) / (2 * H * H);
    j.fww = (F(0, H) + F(0, -H) - F(0, i * H) - F(0, -i * H)) / (2 * H * H);
    double m = 1e-4;  // the mixed rule is only second order
    j.fzw = (F(m, m) - F(m, -m) - F(-m, m) + F(-m, -m)) / (4 * m * m);
    return j;
}

void check_jet_close(Jet2 const& a, Jet2 const& b, double rel)
{
    double scale = std::max({std::abs(b.fz), std::abs(b.fw), std::abs(b.fzz),
                             std::abs(b.fww), std::abs(b.fzw), 1e-300});
    CHECK(std::abs(a.fz - b.fz) <= rel * scale);
    CHECK(std::abs(a.fw - b.fw) <= rel * scale);
    CHECK(std::abs(a.fzz - b.fzz) <= rel * scale);
    CHECK(std::abs(a.fww - b.fww) <= rel * scale);
    CHECK(std::abs(a.fzw - b.fzw) <= rel * scale);
}

Mat3 random_unitary(RngStream const& s)
{
    StreamReader rd(s);
    Frame f;
    for (auto& v : f)
        for (auto& c : v)
            c = rd.cn();
    // Gram-Schmidt on the rows
    for (int a = 0; a < 3; ++a)
    {
        for (int b = 0; b < a; ++b)
        {
            cplx pr = dot(f[b], f[a]);
            for (int i = 0; i < 3; ++i)
                f[a][i] -= pr * f[b][i];
        }
        double n = norm(f[a]);
        for (auto& c : f[a])
            c /= n;
    }
    return f;
}

}  // namespace

TEST_CASE("polynomial validation")
{
    CHECK_THROWS_AS(HomPoly3(2, {{1, 1, 1, 1.0}}), MalformedInput);
    CHECK_THROWS_AS(HomPoly3(2, {{1, 1, 0, 1.0}, {1, 1, 0, 2.0}}), MalformedInput);
    CHECK_THROWS_AS(HomPoly3(1, {{1, 0, 0, cplx(std::nan(""), 0)}}), MalformedInput);
    CHECK_THROWS_AS(HomPoly3(1, {{2, -1, 0, 1.0}}), MalformedInput);
    CHECK_NOTHROW(HomPoly3(2, {{1, 1, 0, 1.0}}));
}

TEST_CASE("kostlan sampling")
{
    auto p1 = sample_kostlan(1, RngStream(1));
    CHECK(p1.terms().size() == 3);
    CHECK(kostlan_weight(1, 1, 0, 0) == doctest::Approx(1.0));
    CHECK(kostlan_weight(2, 1, 1, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(kostlan_weight(5, 5, 0, 0) == doctest::Approx(1.0));
    CHECK(kostlan_weight(4, 2, 1, 1) == doctest::Approx(std::sqrt(12.0)));
    // large-degree path agrees with the exact product
    CHECK(kostlan_weight(200, 100, 60, 40)
          == doctest::Approx(std::exp(0.5 * (std::lgamma(201.0) - std::lgamma(101.0)
                                             - std::lgamma(61.0) - std::lgamma(41.0))))
                 .epsilon(1e-10));

    auto p7 = sample_kostlan(7, RngStream(2));
    CHECK(p7.terms().size() == 36);
    for (auto const& t : p7.terms())
        CHECK(t.i + t.j + t.k == 7);

    // variance of the X0^5 coefficient
    std::vector<double> v;
    RngStream root(3);
    for (int k = 0; k < 100000; ++k)
    {
        auto p = sample_kostlan(5, derive_stream(root, "poly", k));
        for (auto const& t : p.terms())
            if (t.i == 5)
                v.push_back(std::norm(t.c));
    }
    auto m = testing::moments(v);
    CHECK(std::abs(m.mean - 1) < 3 * m.se);
}

TEST_CASE("evaluation")
{
    CHECK(std::abs(evaluate(conic(), {1.0, 1.0, 1.0})) == 0);
    CHECK(evaluate(monomial(6, 0, 0), {1.0, 0.0, 0.0}) == cplx(1));
    CHECK(std::abs(evaluate(fermat_cubic(), {1.0, -1.0, 0.0})) == 0);
    // Bombieri norm bounds |P| on the unit sphere
    auto p = sample_kostlan(6, RngStream(4));
    StreamReader rd(RngStream(5));
    for (int k = 0; k < 200; ++k)
    {
        Vec3 x{rd.cn(), rd.cn(), rd.cn()};
        double n = norm(x);
        for (auto& c : x)
            c /= n;
        CHECK(std::abs(evaluate(p, x)) <= p.coeff_norm() * (1 + 1e-12));
    }
}

TEST_CASE("derivatives of a monomial")
{
    auto p = monomial(2, 1, 0, 3.0);  // 3 X0^2 X1
    Vec3 x{2.0, 5.0, 7.0};
    auto d = derivatives(p, x);
    CHECK(std::abs(d.value - 60.0) < 1e-12);
    CHECK(std::abs(d.grad[0] - 60.0) < 1e-12);
    CHECK(std::abs(d.grad[1] - 12.0) < 1e-12);
    CHECK(std::abs(d.grad[2]) < 1e-12);
    CHECK(std::abs(d.hess[0][0] - 30.0) < 1e-12);
    CHECK(std::abs(d.hess[0][1] - 12.0) < 1e-12);
    CHECK(std::abs(d.hess[1][0] - 12.0) < 1e-12);
    CHECK(std::abs(d.hess[1][1]) < 1e-12);
}

TEST_CASE("unitary frames")
{
    auto f0 = unitary_frame(ProjPoint{{1.0, 0.0, 0.0}});
    CHECK(gram_error(f0) < 1e-12);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(std::abs(f0[a][b] - (a == b ? 1.0 : 0.0)) < 1e-15);

    auto f2 = unitary_frame(ProjPoint{{0.0, 0.0, 1.0}});
    CHECK(gram_error(f2) < 1e-12);
    CHECK(std::abs(f2[0][2] - 1.0) < 1e-15);

    double s = 1 / std::sqrt(3.0);
    auto f = unitary_frame(ProjPoint{{s, s, s}});
    CHECK(gram_error(f) < 1e-12);

    StreamReader rd(RngStream(8));
    for (int k = 0; k < 100; ++k)
    {
        auto x = normalize({rd.cn(), rd.cn(), rd.cn()});
        auto fr = unitary_frame(x);
        CHECK(gram_error(fr) < 1e-12);
        CHECK(std::abs(std::abs(dot(fr[0], x.rep)) - 1) < 1e-12);
    }
}

TEST_CASE("directional jets")
{
    Frame e{Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}, Vec3{0.0, 0.0, 1.0}};

    auto j1 = directional_jet(monomial(0, 1, 0), e);
    CHECK(j1.f0 == cplx(0));
    CHECK(j1.fz == cplx(1));
    CHECK(j1.fw == cplx(0));
    CHECK(j1.fzz == cplx(0));

    auto j2 = directional_jet(monomial(0, 1, 1), e);
    CHECK(j2.fz == cplx(0));
    CHECK(j2.fw == cplx(0));
    CHECK(j2.fzw == cplx(1));
    CHECK_THROWS_AS(vitter_v(j2), SingularPoint);

    double s = 1 / std::sqrt(3.0);
    auto f = unitary_frame(ProjPoint{{s, s, s}});
    check_jet_close(directional_jet(conic(), f), fd_jet(conic(), f), 1e-6);

    RngStream root(12);
    for (int k = 0; k < 30; ++k)
    {
        auto p = sample_kostlan(2 + k % 7, derive_stream(root, "poly", k));
        StreamReader rd(derive_stream(root, "pt", k));
        auto fr = unitary_frame(normalize({rd.cn(), rd.cn(), rd.cn()}));
        check_jet_close(directional_jet(p, fr), fd_jet(p, fr), 1e-6);
    }
}

TEST_CASE("exact jet law matches jets of sampled polynomials")
{
    Frame e{Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}, Vec3{0.0, 0.0, 1.0}};
    int d = 4;
    RngStream root(13);
    std::vector<double> fz, fzz, fzw;
    for (int k = 0; k < 10000; ++k)
    {
        auto j = directional_jet(sample_kostlan(d, derive_stream(root, "p", k)), e);
        fz.push_back(std::norm(j.fz));
        fzz.push_back(std::norm(j.fzz));
        fzw.push_back(std::norm(j.fzw));
    }
    auto m1 = testing::moments(fz), m2 = testing::moments(fzz),
         m3 = testing::moments(fzw);
    CHECK(std::abs(m1.mean - d) < 3 * m1.se);
    CHECK(std::abs(m2.mean - 2.0 * d * (d - 1)) < 3 * m2.se);
    CHECK(std::abs(m3.mean - d * (d - 1.0)) < 3 * m3.se);
}

TEST_CASE("line restriction")
{
    Vec3 e0{1.0, 0.0, 0.0}, e1{0.0, 1.0, 0.0}, e2{0.0, 0.0, 1.0};
    auto g1 = restrict_to_line(monomial(0, 1, 0), make_line(e0, e1));
    REQUIRE(g1.degree() == 1);
    CHECK(std::abs(g1.coeffs[0]) < 1e-15);
    CHECK(std::abs(g1.coeffs[1] - 1.0) < 1e-15);

    double r = 1 / std::sqrt(2.0);
    auto g2 = restrict_to_line(conic(), make_line(e0, {0.0, r, r}));
    REQUIRE(g2.degree() == 2);
    CHECK(std::abs(g2.coeffs[0] + 1.0) < 1e-14);
    CHECK(std::abs(g2.coeffs[1]) < 1e-14);
    CHECK(std::abs(g2.coeffs[2] - 0.5) < 1e-14);

    // the line X1 = 0 lies in Z(X1)
    CHECK_THROWS_AS(restrict_to_line(monomial(0, 1, 0), make_line(e0, e2)),
                    DegenerateLine);
    CHECK_THROWS_AS(make_line(e0, {2.0, 0.0, 0.0}), std::domain_error);

    auto p = fermat_cubic();
    RngStream root(14);
    for (int k = 0; k < 50; ++k)
    {
        auto L = sample_random_line(derive_stream(root, "line", k));
        auto rs = roots(restrict_to_line(p, L));
        REQUIRE(rs.size() == 3);
        for (cplx s : rs)
        {
            Vec3 x;
            for (int i = 0; i < 3; ++i)
                x[i] = L.u[i] + s * L.v[i];
            CHECK(std::abs(evaluate(p, x)) < 1e-9 * p.coeff_norm() * std::pow(norm(x), 3));
        }
    }
}

TEST_CASE("json round trip")
{
    auto p = sample_kostlan(7, RngStream(15));
    auto path = std::filesystem::temp_directory_path() / "curvlab_roundtrip.json";
    write_poly(p, path);
    auto q = read_poly(path);
    std::filesystem::remove(path);
    REQUIRE(q.degree() == 7);
    REQUIRE(q.terms().size() == p.terms().size());
    for (std::size_t i = 0; i < p.terms().size(); ++i)
    {
        auto const &a = p.terms()[i], &b = q.terms()[i];
        CHECK(a.i == b.i);
        CHECK(a.j == b.j);
        CHECK(a.k == b.k);
        CHECK(a.c == b.c);
    }

    CHECK_THROWS_AS(poly_from_json(R"({"degree":2,"coeffs":[{"i":1,"j":1,"k":1,"re":1,"im":0}]})"),
                    MalformedInput);
    CHECK_THROWS_AS(poly_from_json(R"({"degree":2,"coeffs":[{"i":1,"j":1,"k":0,"re":1,"im":0},{"i":1,"j":1,"k":0,"re":2,"im":0}]})"),
                    MalformedInput);
    CHECK_THROWS_AS(poly_from_json("not json"), MalformedInput);
    CHECK_THROWS_AS(poly_from_json(R"({"coeffs":[]})"), MalformedInput);
    CHECK_THROWS_AS(read_poly("/nonexistent/curvlab.json"), MalformedInput);
}

TEST_CASE("unitary invariance of the ensemble")
{
    auto U = random_unitary(RngStream(16));
    int d = 3;
    RngStream root(17);
    std::vector<double> a_var, b_var, cross_re;
    for (int k = 0; k < 20000; ++k)
    {
        auto p = compose_unitary(sample_kostlan(d, derive_stream(root, "p", k)), U);
        cplx c300 = 0, c210 = 0;
        for (auto const& t : p.terms())
        {
            if (t.i == 3)
                c300 = t.c;
            if (t.i == 2 && t.j == 1)
                c210 = t.c;
        }
        a_var.push_back(std::norm(c300));
        b_var.push_back(std::norm(c210));
        cross_re.push_back((c300 * std::conj(c210)).real());
    }
    auto a = testing::moments(a_var), b = testing::moments(b_var),
         c = testing::moments(cross_re);
    CHECK(std::abs(a.mean - 1) < 3 * a.se);
    CHECK(std::abs(b.mean - 3) < 3 * b.se);  // weight^2 = 3!/(2!1!)
    CHECK(std::abs(c.mean) < 3 * c.se);
}

TEST_CASE("composition evaluates at the transformed point")
{
    auto U = random_unitary(RngStream(18));
    auto p = sample_kostlan(5, RngStream(19));
    auto q = compose_unitary(p, U);
    Vec3 x{0.3, cplx(-0.2, 0.5), 0.9};
    Vec3 ux{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            ux[i] += U[i][j] * x[j];
    CHECK(std::abs(evaluate(q, x) - evaluate(p, ux)) < 1e-12 * p.coeff_norm());
}

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/LU>

#include "curvlab/curve_sampler.hpp"

namespace curvlab {

cplx hessian_determinant(HomPoly3 const& p, Vec3 const& x) noexcept
{
    auto const& h = derivatives(p, x).hess;
    return h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1])
           - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
           + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
}

namespace {

constexpr int kMaxCharts = 4;

Mat3 random_unitary(StreamReader& rd)
{
    for (;;)
    {
        Vec3 a{rd.cn(), rd.cn(), rd.cn()}, b{rd.cn(), rd.cn(), rd.cn()},
            c{rd.cn(), rd.cn(), rd.cn()};
        try
        {
            ProjLine l = make_line(a, b);
            // third column: c minus its projections, normalized
            cplx pu = dot(l.u, c), pv = dot(l.v, c);
            Vec3 w{c[0] - pu * l.u[0] - pv * l.v[0],
                   c[1] - pu * l.u[1] - pv * l.v[1],
                   c[2] - pu * l.u[2] - pv * l.v[2]};
            Vec3 u2 = normalize(w).rep;
            // rows of the matrix are images of the basis: U[m][n] = col_n[m]
            Mat3 u;
            for (int m = 0; m < 3; ++m)
                u[m] = {l.u[m], l.v[m], u2[m]};
            return u;
        }
        catch (std::domain_error const&)
        {
        }
    }
}

//! Coefficients by inverse DFT of values at the n-th roots of unity.
std::vector<cplx> interpolate_on_circle(std::vector<cplx> const& values,
                                        double radius)
{
    auto n = values.size();
    std::vector<cplx> c(n);
    for (std::size_t m = 0; m < n; ++m)
    {
        cplx acc = 0;
        for (std::size_t k = 0; k < n; ++k)
            acc += values[k]
                   * std::polar(1.0, -2 * std::numbers::pi
                                         * static_cast<double>((k * m) % n) / n);
        c[m] = acc / static_cast<double>(n) / std::pow(radius, static_cast<double>(m));
    }
    return c;
}

struct ChartSystem
{
    HomPoly3 q;
    int d;
    int e;  // Hessian degree 3(d-2)

    Vec3 lift(cplx x, cplx y) const { return {1.0, x, y}; }

    std::vector<cplx> p_in_y(cplx x) const
    {
        std::vector<cplx> xp(d + 1, cplx(1));
        for (int j = 1; j <= d; ++j)
            xp[j] = xp[j - 1] * x;
        std::vector<cplx> a(d + 1, cplx(0));
        for (auto const& t : q.terms())
            a[t.k] += t.c * xp[t.j];
        return a;
    }

    std::vector<cplx> h_in_y(cplx x) const
    {
        std::vector<cplx> vals(e + 1);
        for (int k = 0; k <= e; ++k)
        {
            cplx y = std::polar(1.0, 2 * std::numbers::pi * k / (e + 1));
            vals[k] = hessian_determinant(q, lift(x, y));
        }
        return interpolate_on_circle(vals, 1.0);
    }

    cplx resultant(cplx x) const
    {
        auto a = p_in_y(x);
        auto b = h_in_y(x);
        int n = d + e;
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
        for (int row = 0; row < e; ++row)
            for (int m = 0; m <= d; ++m)
                s(row, row + (d - m)) = a[m];
        for (int row = 0; row < d; ++row)
            for (int m = 0; m <= e; ++m)
                s(e + row, row + (e - m)) = b[m];
        return s.partialPivLu().determinant();
    }

    cplx h(cplx x, cplx y) const { return hessian_determinant(q, lift(x, y)); }
};

double projective_distance(Vec3 const& a, Vec3 const& b)
{
    double c = std::abs(dot(a, b)) / (norm(a) * norm(b));
    return std::sqrt(std::max(0.0, 1 - c * c));
}

//! Count inflections in one chart; throws IllConditioned on failure.
int count_in_chart(HomPoly3 const& p, double tol, StreamReader& rd)
{
    ChartSystem sys{compose_unitary(p, random_unitary(rd)), p.degree(),
                    3 * (p.degree() - 2)};
    int const d = sys.d, e = sys.e;

    // Scale of the Hessian determinant on the unit sphere.
    double h_scale = 0;
    for (int k = 0; k < 16; ++k)
    {
        Vec3 x = normalize({rd.cn(), rd.cn(), rd.cn()}).rep;
        h_scale = std::max(h_scale, std::abs(hessian_determinant(sys.q, x)));
    }
    if (!(h_scale > 0))
        throw IllConditioned("Hessian determinant vanishes identically");
    if (e == 0)
        return 0;  // conic: constant nonzero Hessian

    int total = d * e;
    std::vector<cplx> values(total + 1);
    for (int k = 0; k <= total; ++k)
        values[k] = sys.resultant(std::polar(1.0, 2 * std::numbers::pi * k / (total + 1)));
    UniPoly res{interpolate_on_circle(values, 1.0)};
    if (std::abs(res.coeffs.back()) < 1e-12 * res.max_abs_coeff())
        throw IllConditioned("resultant degree drops: chart not generic");

    std::vector<cplx> xs;
    try
    {
        xs = companion_roots(res);
    }
    catch (NumericalError const&)
    {
        throw IllConditioned("resultant roots did not converge");
    }

    double const p_tol = 1e-8 * sys.q.coeff_norm();
    double const h_tol = 1e-8 * h_scale;
    std::vector<Vec3> points;
    for (cplx x0 : xs)
    {
        x0 = newton_polish(res, x0);
        UniPoly py{sys.p_in_y(x0)};
        if (std::abs(py.coeffs.back()) == 0)
            throw IllConditioned("leading y-coefficient vanishes");
        auto ys = companion_roots(py);
        // The y-root where the Hessian is smallest is the common zero.
        cplx y0 = *std::min_element(ys.begin(), ys.end(), [&](cplx s, cplx t) {
            return std::abs(sys.h(x0, s)) / std::pow(1 + std::norm(s), e / 2.0)
                   < std::abs(sys.h(x0, t)) / std::pow(1 + std::norm(t), e / 2.0);
        });

        // Newton on (p, h) = 0 in the chart.
        cplx x = x0, y = y0;
        for (int it = 0; it < 30; ++it)
        {
            PolyDerivs pd = derivatives(sys.q, sys.lift(x, y));
            cplx fp = pd.value, fh = sys.h(x, y);
            double step_h = 1e-6 * std::max(1.0, std::abs(x) + std::abs(y));
            cplx hx = (sys.h(x + step_h, y) - sys.h(x - step_h, y)) / (2 * step_h);
            cplx hy = (sys.h(x, y + step_h) - sys.h(x, y - step_h)) / (2 * step_h);
            cplx det = pd.grad[1] * hy - pd.grad[2] * hx;
            if (std::abs(det) == 0)
                break;
            cplx dx = (fp * hy - pd.grad[2] * fh) / det;
            cplx dy = (pd.grad[1] * fh - hx * fp) / det;
            x -= dx;
            y -= dy;
            if (std::abs(dx) + std::abs(dy) < 1e-14 * (1 + std::abs(x) + std::abs(y)))
                break;
        }

        Vec3 pt = normalize(sys.lift(x, y)).rep;
        if (std::abs(evaluate(sys.q, pt)) > p_tol
            || std::abs(hessian_determinant(sys.q, pt)) > h_tol)
        {
            throw IllConditioned("resultant root has no common zero");
        }
        points.push_back(pt);
    }

    // Distinct points at tolerance tol.
    int distinct = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        bool dup = false;
        for (std::size_t j = 0; j < i; ++j)
            if (projective_distance(points[i], points[j]) < tol)
                dup = true;
        if (dup)
            throw IllConditioned("clustered intersection points");
        ++distinct;
    }
    return distinct;
}

}  // namespace

int inflection_count(HomPoly3 const& p, double tol, RngStream const& stream)
{
    if (p.degree() < 2 || p.degree() > 6)
        throw std::invalid_argument("inflection_count: supported for 2 <= d <= 6");
    StreamReader rd(stream);
    std::string last;
    for (int chart = 0; chart < kMaxCharts; ++chart)
    {
        try
        {
            return count_in_chart(p, tol, rd);
        }
        catch (IllConditioned const& e)
        {
            last = e.what();
        }
    }
    throw IllConditioned("inflection_count: " + last);
}

}  // namespace curvlab

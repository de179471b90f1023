#include "curvlab/projective.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

#include "curvlab/estimate.hpp"

namespace curvlab {

cplx dot(Vec3 const& a, Vec3 const& b) noexcept
{
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]
           + std::conj(a[2]) * b[2];
}

double norm(Vec3 const& a) noexcept
{
    return std::sqrt(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]));
}

namespace {

double log_factorial(int n)
{
    return std::lgamma(static_cast<double>(n) + 1);
}

void check_terms(int degree, std::vector<HomPoly3::Term> const& terms)
{
    if (degree < 1)
        throw MalformedInput("degree must be >= 1");
    std::set<std::pair<int, int>> seen;
    for (auto const& t : terms)
    {
        if (t.i < 0 || t.j < 0 || t.k < 0 || t.i + t.j + t.k != degree)
        {
            throw MalformedInput("exponent triple (" + std::to_string(t.i)
                                 + "," + std::to_string(t.j) + ","
                                 + std::to_string(t.k) + ") does not sum to "
                                 + std::to_string(degree));
        }
        if (!std::isfinite(t.c.real()) || !std::isfinite(t.c.imag()))
            throw MalformedInput("non-finite coefficient");
        if (!seen.insert({t.i, t.j}).second)
        {
            throw MalformedInput("duplicate exponent triple ("
                                 + std::to_string(t.i) + ","
                                 + std::to_string(t.j) + ","
                                 + std::to_string(t.k) + ")");
        }
    }
}

//! x^0..x^d
std::vector<cplx> powers(cplx x, int d)
{
    std::vector<cplx> p(d + 1);
    p[0] = 1;
    for (int e = 1; e <= d; ++e)
        p[e] = p[e - 1] * x;
    return p;
}

}  // namespace

double kostlan_weight(int d, int i, int j, int k)
{
    if (d <= 150)
    {
        // Exact product form: d!/(i!j!k!) = C(d,i) C(d-i,j)
        double w = 1;
        for (int m = 1; m <= i; ++m)
            w *= static_cast<double>(d - i + m) / m;
        for (int m = 1; m <= j; ++m)
            w *= static_cast<double>(d - i - j + m) / m;
        return std::sqrt(w);
    }
    return std::exp(0.5
                    * (log_factorial(d) - log_factorial(i) - log_factorial(j)
                       - log_factorial(k)));
}

HomPoly3::HomPoly3(int degree, std::vector<Term> terms)
    : degree_(degree), terms_(std::move(terms))
{
    check_terms(degree_, terms_);
    double sum = 0;
    for (auto const& t : terms_)
    {
        double w = kostlan_weight(degree_, t.i, t.j, t.k);
        sum += std::norm(t.c) / (w * w);
    }
    norm_ = std::sqrt(sum);
}

HomPoly3 sample_kostlan(int degree, RngStream const& stream)
{
    if (degree < 1)
        throw std::invalid_argument("sample_kostlan: degree must be >= 1");
    StreamReader reader(stream);
    std::vector<HomPoly3::Term> terms;
    terms.reserve((degree + 1) * (degree + 2) / 2);
    for (int i = degree; i >= 0; --i)
    {
        for (int j = degree - i; j >= 0; --j)
        {
            int k = degree - i - j;
            terms.push_back({i, j, k, reader.cn() * kostlan_weight(degree, i, j, k)});
        }
    }
    return HomPoly3(degree, std::move(terms));
}

cplx evaluate(HomPoly3 const& p, Vec3 const& x) noexcept
{
    int d = p.degree();
    auto p0 = powers(x[0], d), p1 = powers(x[1], d), p2 = powers(x[2], d);
    cplx v = 0;
    for (auto const& t : p.terms())
        v += t.c * p0[t.i] * p1[t.j] * p2[t.k];
    return v;
}

PolyDerivs derivatives(HomPoly3 const& p, Vec3 const& x) noexcept
{
    int d = p.degree();
    std::array<std::vector<cplx>, 3> pw{
        powers(x[0], d), powers(x[1], d), powers(x[2], d)};
    auto at = [&](int var, int e) -> cplx {
        return e < 0 ? cplx(0) : pw[var][e];
    };

    PolyDerivs out{};
    for (auto const& t : p.terms())
    {
        std::array<int, 3> e{t.i, t.j, t.k};
        std::array<cplx, 3> base{at(0, e[0]), at(1, e[1]), at(2, e[2])};
        std::array<cplx, 3> d1{double(e[0]) * at(0, e[0] - 1),
                               double(e[1]) * at(1, e[1] - 1),
                               double(e[2]) * at(2, e[2] - 1)};
        std::array<cplx, 3> d2{
            static_cast<double>(e[0] * (e[0] - 1)) * at(0, e[0] - 2),
            static_cast<double>(e[1] * (e[1] - 1)) * at(1, e[1] - 2),
            static_cast<double>(e[2] * (e[2] - 1)) * at(2, e[2] - 2)};

        out.value += t.c * base[0] * base[1] * base[2];
        out.grad[0] += t.c * d1[0] * base[1] * base[2];
        out.grad[1] += t.c * base[0] * d1[1] * base[2];
        out.grad[2] += t.c * base[0] * base[1] * d1[2];
        out.hess[0][0] += t.c * d2[0] * base[1] * base[2];
        out.hess[1][1] += t.c * base[0] * d2[1] * base[2];
        out.hess[2][2] += t.c * base[0] * base[1] * d2[2];
        out.hess[0][1] += t.c * d1[0] * d1[1] * base[2];
        out.hess[0][2] += t.c * d1[0] * base[1] * d1[2];
        out.hess[1][2] += t.c * base[0] * d1[1] * d1[2];
    }
    out.hess[1][0] = out.hess[0][1];
    out.hess[2][0] = out.hess[0][2];
    out.hess[2][1] = out.hess[1][2];
    return out;
}

ProjPoint normalize(Vec3 const& x)
{
    double n = norm(x);
    if (!(n > 0))
        throw std::domain_error("normalize: zero vector");
    return {{x[0] / n, x[1] / n, x[2] / n}};
}

Frame unitary_frame(ProjPoint const& x)
{
    Vec3 const& u0 = x.rep;
    std::array<int, 3> order{0, 1, 2};
    std::array<double, 3> residual;
    for (int m = 0; m < 3; ++m)
        residual[m] = 1 - std::norm(u0[m]);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return residual[a] > residual[b];
    });

    auto project_out = [](Vec3 v, Vec3 const& q) {
        cplx c = dot(q, v);
        for (int m = 0; m < 3; ++m)
            v[m] -= c * q[m];
        return v;
    };
    Vec3 e1{}, e2{};
    e1[order[0]] = 1;
    e2[order[1]] = 1;
    Vec3 u1 = normalize(project_out(e1, u0)).rep;
    Vec3 u2 = project_out(project_out(e2, u0), u1);
    // One reorthogonalization pass keeps the Gram matrix at roundoff.
    u2 = normalize(project_out(project_out(u2, u0), u1)).rep;
    return {u0, u1, u2};
}

Jet2 directional_jet(HomPoly3 const& p, Frame const& frame) noexcept
{
    auto const& [u0, u1, u2] = frame;
    PolyDerivs pd = derivatives(p, u0);
    auto lin = [&](Vec3 const& a) {
        return pd.grad[0] * a[0] + pd.grad[1] * a[1] + pd.grad[2] * a[2];
    };
    auto quad = [&](Vec3 const& a, Vec3 const& b) {
        cplx s = 0;
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n)
                s += a[m] * pd.hess[m][n] * b[n];
        return s;
    };
    return {pd.value, lin(u1), lin(u2), quad(u1, u1), quad(u2, u2),
            quad(u1, u2)};
}

UniPoly restrict_to_line(HomPoly3 const& p, ProjLine const& line)
{
    int d = p.degree();
    cplx lead = evaluate(p, line.v);
    if (std::abs(lead) < kDegenerateLineTol * p.coeff_norm())
        throw DegenerateLine("line meets the curve at s = infinity");

    int n_nodes = d + 1;
    std::vector<cplx> values(n_nodes);
    for (int k = 0; k < n_nodes; ++k)
    {
        cplx s = std::polar(1.0, 2 * std::numbers::pi * k / n_nodes);
        Vec3 x{line.u[0] + s * line.v[0], line.u[1] + s * line.v[1],
               line.u[2] + s * line.v[2]};
        values[k] = evaluate(p, x);
    }
    UniPoly g;
    g.coeffs.resize(n_nodes);
    for (int m = 0; m < n_nodes; ++m)
    {
        cplx acc = 0;
        for (int k = 0; k < n_nodes; ++k)
        {
            acc += values[k]
                   * std::polar(1.0, -2 * std::numbers::pi
                                         * static_cast<double>((k * m) % n_nodes)
                                         / n_nodes);
        }
        g.coeffs[m] = acc / static_cast<double>(n_nodes);
    }
    // The top coefficient is known exactly; keep it exact.
    g.coeffs[d] = lead;
    return g;
}

HomPoly3 compose_unitary(HomPoly3 const& p, Mat3 const& u)
{
    int d = p.degree();
    // Dense coefficient arrays indexed by (i, j) with k = degree - i - j.
    using Dense = std::vector<cplx>;
    auto idx = [](int dim, int i, int j) { return i * (dim + 1) + j; };

    auto times_linear = [&](Dense const& a, int deg, Vec3 const& lin) {
        Dense out((deg + 2) * (deg + 2), cplx(0));
        for (int i = 0; i <= deg; ++i)
            for (int j = 0; i + j <= deg; ++j)
            {
                cplx c = a[idx(deg, i, j)];
                if (c == cplx(0))
                    continue;
                out[idx(deg + 1, i + 1, j)] += c * lin[0];
                out[idx(deg + 1, i, j + 1)] += c * lin[1];
                out[idx(deg + 1, i, j)] += c * lin[2];
            }
        return out;
    };

    Dense total((d + 1) * (d + 1), cplx(0));
    for (auto const& t : p.terms())
    {
        Dense acc{t.c};
        int deg = 0;
        std::array<int, 3> e{t.i, t.j, t.k};
        for (int var = 0; var < 3; ++var)
            for (int rep = 0; rep < e[var]; ++rep)
                acc = times_linear(acc, deg++, u[var]);
        for (std::size_t m = 0; m < total.size(); ++m)
            total[m] += acc[m];
    }

    std::vector<HomPoly3::Term> terms;
    for (int i = d; i >= 0; --i)
        for (int j = d - i; j >= 0; --j)
            terms.push_back({i, j, d - i - j, total[idx(d, i, j)]});
    return HomPoly3(d, std::move(terms));
}

ProjLine make_line(Vec3 const& a, Vec3 const& b)
{
    double na = norm(a);
    if (!(na > 1e-300))
        throw std::domain_error("make_line: zero vector");
    Vec3 u{a[0] / na, a[1] / na, a[2] / na};
    cplx c = dot(u, b);
    Vec3 v{b[0] - c * u[0], b[1] - c * u[1], b[2] - c * u[2]};
    double nv = norm(v);
    if (!(nv > 1e-12 * norm(b)))
        throw std::domain_error("make_line: dependent vectors");
    // Second pass for orthogonality at roundoff level.
    for (int m = 0; m < 3; ++m)
        v[m] /= nv;
    c = dot(u, v);
    for (int m = 0; m < 3; ++m)
        v[m] -= c * u[m];
    nv = norm(v);
    for (int m = 0; m < 3; ++m)
        v[m] /= nv;
    return {u, v};
}

//---------------------------------------------------------------------------//

std::string poly_to_json(HomPoly3 const& p)
{
    nlohmann::json j;
    j["degree"] = p.degree();
    auto& arr = j["coeffs"] = nlohmann::json::array();
    for (auto const& t : p.terms())
    {
        arr.push_back({{"i", t.i},
                       {"j", t.j},
                       {"k", t.k},
                       {"re", t.c.real()},
                       {"im", t.c.imag()}});
    }
    return j.dump(1);
}

HomPoly3 poly_from_json(std::string const& text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (nlohmann::json::exception const& e)
    {
        throw MalformedInput(std::string("invalid JSON: ") + e.what());
    }
    try
    {
        int degree = j.at("degree").get<int>();
        std::vector<HomPoly3::Term> terms;
        for (auto const& c : j.at("coeffs"))
        {
            auto num = [&](char const* key) {
                auto const& v = c.at(key);
                if (!v.is_number())
                    throw MalformedInput(std::string("non-numeric ") + key);
                return v.get<double>();
            };
            terms.push_back({c.at("i").get<int>(), c.at("j").get<int>(),
                             c.at("k").get<int>(), {num("re"), num("im")}});
        }
        return HomPoly3(degree, std::move(terms));
    }
    catch (nlohmann::json::exception const& e)
    {
        throw MalformedInput(std::string("bad polynomial schema: ") + e.what());
    }
}

void write_poly(HomPoly3 const& p, std::filesystem::path const& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    out << poly_to_json(p) << '\n';
}

HomPoly3 read_poly(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw MalformedInput("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return poly_from_json(buf.str());
}

}  // namespace curvlab

#include "curvlab/bargmann_fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace curvlab {

//---------------------------------------------------------------------------//
// Poly2
//---------------------------------------------------------------------------//

Poly2::Poly2(int degree)
    : degree_(degree),
      c_(static_cast<std::size_t>(degree + 1) * (degree + 2) / 2, cplx(0))
{
    if (degree < 0)
        throw std::invalid_argument("Poly2: negative degree");
}

cplx Poly2::operator()(cplx z, cplx w) const noexcept
{
    // Horner in z over w-Horner rows.
    cplx acc = 0;
    for (int i = degree_; i >= 0; --i)
    {
        cplx row = 0;
        for (int j = degree_ - i; j >= 0; --j)
            row = row * w + c_[index(i, j)];
        acc = acc * z + row;
    }
    return acc;
}

Jet2 Poly2::jet(cplx z, cplx w) const noexcept
{
    std::vector<cplx> zp(degree_ + 1), wp(degree_ + 1);
    zp[0] = wp[0] = 1;
    for (int e = 1; e <= degree_; ++e)
    {
        zp[e] = zp[e - 1] * z;
        wp[e] = wp[e - 1] * w;
    }
    auto zpow = [&](int e) { return e < 0 ? cplx(0) : zp[e]; };
    auto wpow = [&](int e) { return e < 0 ? cplx(0) : wp[e]; };

    Jet2 out{};
    for (int i = 0; i <= degree_; ++i)
    {
        for (int j = 0; i + j <= degree_; ++j)
        {
            cplx c = c_[index(i, j)];
            if (c == cplx(0))
                continue;
            double di = i, dj = j;
            out.f0 += c * zp[i] * wp[j];
            out.fz += c * di * zpow(i - 1) * wp[j];
            out.fw += c * dj * zp[i] * wpow(j - 1);
            out.fzz += c * (di * (di - 1)) * zpow(i - 2) * wp[j];
            out.fww += c * (dj * (dj - 1)) * zp[i] * wpow(j - 2);
            out.fzw += c * (di * dj) * zpow(i - 1) * wpow(j - 1);
        }
    }
    return out;
}

Poly2 Poly2::operator-(Poly2 const& o) const
{
    Poly2 out(std::max(degree_, o.degree_));
    for (int i = 0; i <= out.degree_; ++i)
        for (int j = 0; i + j <= out.degree_; ++j)
        {
            cplx a = i + j <= degree_ ? coeff(i, j) : cplx(0);
            cplx b = i + j <= o.degree_ ? o.coeff(i, j) : cplx(0);
            out.coeff(i, j) = a - b;
        }
    return out;
}

Poly2 Poly2::f0()
{
    Poly2 p(2);
    p.coeff(1, 1) = 1;
    p.coeff(0, 0) = -0.25;
    return p;
}

//---------------------------------------------------------------------------//
// Sampling and truncation
//---------------------------------------------------------------------------//

double bf_truncation_bound(int trunc, double radius)
{
    double x = std::numbers::pi * radius * radius;
    if (x == 0)
        return 0;
    // Terms x^n/n! in log space; the tail past the peak decays faster than
    // geometrically, so summing until terms drop below 1e-20 of the sum is
    // exact to double precision.
    double sum = 0;
    double log_x = std::log(x);
    for (int n = trunc + 1;; ++n)
    {
        double term = std::exp(n * log_x - std::lgamma(n + 1.0));
        sum += term;
        if (n > x && term < 1e-20 * sum)
            break;
        if (n > trunc + 100000)
            break;
    }
    return sum;
}

int bf_truncation_degree(double radius, double tol)
{
    if (!(tol > 0))
        throw std::invalid_argument("bf_truncation_degree: tol must be > 0");
    int n = 0;
    while (bf_truncation_bound(n, radius) >= tol)
        ++n;
    return n;
}

namespace {

double bf_weight(int i, int j)
{
    return std::exp(0.5
                    * ((i + j) * std::log(std::numbers::pi) - std::lgamma(i + 1.0)
                       - std::lgamma(j + 1.0)));
}

}  // namespace

BFPoly sample_bf(int trunc, RngStream const& stream, double radius)
{
    if (trunc < 0)
        throw std::invalid_argument("sample_bf: truncation must be >= 0");
    StreamReader rd(stream);
    BFPoly out{Poly2(trunc), radius, bf_truncation_bound(trunc, radius)};
    for (int i = 0; i <= trunc; ++i)
        for (int j = 0; i + j <= trunc; ++j)
            out.poly.coeff(i, j) = rd.cn() * bf_weight(i, j);
    return out;
}

cplx bf_covariance(int trunc, cplx z1, cplx z2, cplx w1, cplx w2)
{
    cplx acc = 0;
    cplx a = z1 * std::conj(w1), b = z2 * std::conj(w2);
    cplx ai = 1;
    for (int i = 0; i <= trunc; ++i, ai *= a)
    {
        cplx bj = 1;
        for (int j = 0; i + j <= trunc; ++j, bj *= b)
        {
            double wt = bf_weight(i, j);
            acc += wt * wt * ai * bj;
        }
    }
    return acc;
}

//---------------------------------------------------------------------------//
// Graph-branch quadrature
//---------------------------------------------------------------------------//

namespace {

//! w-coefficients of p(z, .) and their first two z-derivatives.
struct SliceCoeffs
{
    std::vector<cplx> c, dc, ddc;
};

SliceCoeffs slice(Poly2 const& p, cplx z)
{
    int n = p.degree();
    SliceCoeffs s{std::vector<cplx>(n + 1), std::vector<cplx>(n + 1),
                  std::vector<cplx>(n + 1)};
    for (int j = 0; j <= n; ++j)
    {
        cplx v = 0, dv = 0, ddv = 0;
        for (int i = n - j; i >= 0; --i)
        {
            ddv = ddv * z + 2.0 * dv;
            dv = dv * z + v;
            v = v * z + p.coeff(i, j);
        }
        s.c[j] = v;
        s.dc[j] = dv;
        s.ddc[j] = ddv;
    }
    return s;
}

//! Full 2-jet of p at (z, w) from the slice at z.
Jet2 slice_jet(SliceCoeffs const& s, cplx w)
{
    Jet2 j{};
    for (std::size_t k = s.c.size(); k-- > 0;)
    {
        j.fww = j.fww * w + 2.0 * j.fw;
        j.fw = j.fw * w + j.f0;
        j.f0 = j.f0 * w + s.c[k];
        j.fzw = j.fzw * w + j.fz;
        j.fz = j.fz * w + s.dc[k];
        j.fzz = j.fzz * w + s.ddc[k];
    }
    return j;
}

//! Highest power kept for roots with |w| <= rho: the dropped tail is below
//! double precision relative to the polynomial's size on that disc.
int trimmed_degree(std::vector<cplx> const& c, double rho)
{
    double total = 0;
    std::vector<double> mag(c.size());
    double rp = 1;
    for (std::size_t j = 0; j < c.size(); ++j)
    {
        mag[j] = std::abs(c[j]) * rp;
        total += mag[j];
        rp *= rho;
    }
    int top = static_cast<int>(c.size()) - 1;
    double tail = 0;
    while (top > 0 && tail + mag[top] <= 1e-17 * total)
        tail += mag[top--];
    while (top > 0 && c[top] == cplx(0))
        --top;
    return top;
}

//! Resize the previous cell's roots to `degree` starting points: drop the
//! largest, or add new ones on a circle beyond the current outermost.
void fit_warm_start(std::vector<cplx>& warm, int degree)
{
    auto n = static_cast<std::size_t>(degree);
    if (warm.size() > n)
    {
        std::nth_element(warm.begin(), warm.begin() + n, warm.end(),
                         [](cplx a, cplx b) { return std::norm(a) < std::norm(b); });
        warm.resize(n);
        return;
    }
    double outer = 1;
    for (cplx w : warm)
        outer = std::max(outer, std::abs(w));
    std::size_t extra = n - warm.size();
    for (std::size_t k = 0; k < extra; ++k)
        warm.push_back(std::polar(2 * outer,
                                  2 * std::numbers::pi * (k + 0.3) / extra));
}

struct BranchPoint
{
    cplx w;
    cplx dwdz;
    double h, dh_dt;
    Jet2 jet;
};

bool branch_at(SliceCoeffs const& sc, cplx w, double rho2, double t, cplx dir,
               BranchPoint& out)
{
    Jet2 jet = slice_jet(sc, w);
    double scale = 0;
    double wa = std::abs(w), wp = 1;
    for (auto const& c : sc.c)
    {
        scale += std::abs(c) * wp;
        wp *= wa;
    }
    if (std::abs(jet.f0) > 1e-9 * scale || std::abs(jet.fw) < 1e-10 * scale)
        return false;
    out.w = w;
    out.jet = jet;
    out.dwdz = -jet.fz / jet.fw;
    out.h = t + std::norm(w) - rho2;
    double r = std::sqrt(t);
    out.dh_dt = 1 + std::real(std::conj(w) * out.dwdz * dir) / r;
    return true;
}

}  // namespace

ZeroCloud bf_zero_samples(Poly2 const& p, BallRegion const& region,
                          BranchGrid const& grid)
{
    if (!(region.radius > 0))
        throw std::invalid_argument("bf_zero_samples: radius must be > 0");
    if (grid.rings < 1 || grid.rays < 1)
        throw std::invalid_argument("bf_zero_samples: empty grid");

    double const rho = region.radius;
    double const rho2 = rho * rho;
    double const dt = rho2 / grid.rings;
    double const dtheta = 2 * std::numbers::pi / grid.rays;
    double const cell = 0.5 * dt * dtheta;  // dx dy = (1/2) dt dtheta

    ZeroCloud cloud;
    std::vector<cplx> ring_start;  // roots at the first cell of the last ring
    for (int a = 0; a < grid.rings; ++a)
    {
        double t = (a + 0.5) * dt;
        double r = std::sqrt(t);
        std::vector<cplx> warm = ring_start;
        for (int b = 0; b < grid.rays; ++b)
        {
            double theta = (b + 0.5) * dtheta;
            cplx dir = std::polar(1.0, theta);
            cplx z = r * dir;
            SliceCoeffs sc = slice(p, z);
            UniPoly full{sc.c};
            int top = trimmed_degree(sc.c, rho);
            if (top < 1)
            {
                warm.clear();
                continue;
            }
            UniPoly g{std::vector<cplx>(sc.c.begin(), sc.c.begin() + top + 1)};

            std::vector<cplx> ws;
            if (!warm.empty())
            {
                fit_warm_start(warm, top);
                if (auto found = aberth_roots(g, warm, 60, 2 * rho))
                    ws = std::move(*found);
            }
            if (ws.empty())
            {
                try
                {
                    ws = roots(g);
                }
                catch (NumericalError const&)
                {
                    ++cloud.n_branch_failures;
                    warm.clear();
                    continue;
                }
            }
            warm = ws;
            if (b == 0)
                ring_start = ws;

            for (cplx w : ws)
            {
                if (std::norm(w) > rho2 - t + 2 * dt * (1 + std::norm(w)))
                    continue;  // far outside: cannot reach this cell
                w = newton_polish(full, w, 6);
                BranchPoint bp;
                if (!branch_at(sc, w, rho2, t, dir, bp))
                {
                    ++cloud.n_branch_failures;
                    continue;
                }
                // Branch point at parameter tn on this ray, continued from w.
                auto follow = [&](double tn, BranchPoint& out) {
                    cplx zn = std::sqrt(tn) * dir;
                    SliceCoeffs scn = slice(p, zn);
                    cplx wn = w + bp.dwdz * (std::sqrt(tn) - r) * dir;
                    wn = newton_polish(UniPoly{scn.c}, wn, 6);
                    return branch_at(scn, wn, rho2, tn, dir, out);
                };

                double tb = t - bp.h / bp.dh_dt;
                bool crossing = std::isfinite(tb) && std::abs(tb - t) < 0.5 * dt;
                if (!crossing)
                {
                    if (bp.h > 0)
                        continue;
                    auto v = try_vitter_v(bp.jet);
                    if (!v)
                    {
                        ++cloud.n_branch_failures;
                        continue;
                    }
                    double weight = (1 + std::norm(bp.dwdz)) * cell;
                    cloud.samples.push_back({z, w, -*v, weight});
                    continue;
                }

                // Refine the crossing by Newton on h along the branch.
                double tc = tb;
                BranchPoint bc;
                bool ok = false;
                for (int it = 0; it < 8 && tc > 0; ++it)
                {
                    if (!follow(tc, bc))
                        break;
                    double next = tc - bc.h / bc.dh_dt;
                    if (!std::isfinite(next) || next <= 0)
                        break;
                    if (std::abs(next - tc) < 1e-15 * rho2)
                    {
                        ok = follow(next, bc);
                        tc = next;
                        break;
                    }
                    tc = next;
                }
                if (ok && std::abs(tc - t) < 0.5 * dt)
                {
                    tb = tc;
                    if (auto v = try_vitter_v(bc.jet))
                        cloud.samples.push_back({std::sqrt(tc) * dir, bc.w, -*v, 0.0});
                }

                // Integrate over the inside part of the cell at its midpoint.
                double lo = t - 0.5 * dt, hi = t + 0.5 * dt;
                if (bp.dh_dt > 0)
                    hi = std::clamp(tb, lo, hi);
                else
                    lo = std::clamp(tb, lo, hi);
                if (!(hi > lo))
                    continue;
                double tm = 0.5 * (lo + hi);
                BranchPoint bm;
                if (!follow(tm, bm))
                {
                    ++cloud.n_branch_failures;
                    continue;
                }
                auto v = try_vitter_v(bm.jet);
                if (!v)
                {
                    ++cloud.n_branch_failures;
                    continue;
                }
                double weight = (1 + std::norm(bm.dwdz)) * cell * (hi - lo) / dt;
                cloud.samples.push_back({std::sqrt(tm) * dir, bm.w, -*v, weight});
            }
        }
    }
    return cloud;
}

BandArea bf_area_band(Poly2 const& p, BallRegion const& region,
                      CurvatureBand const& band, BranchGrid const& grid)
{
    ZeroCloud cloud = bf_zero_samples(p, region, grid);
    BandArea out;
    for (auto const& s : cloud.samples)
    {
        out.total += s.weight;
        if (band.contains(s.k))
            out.in_band += s.weight;
    }
    out.n_branch_failures = cloud.n_branch_failures;
    return out;
}

Estimate prop1_event_probability(std::uint64_t n, EventConfig const& cfg,
                                 RngStream const& stream, Exec exec)
{
    if (n < 1)
        throw std::invalid_argument("prop1_event_probability: n must be >= 1");
    int trunc = bf_truncation_degree(2.0, cfg.tol);
    struct Outcome
    {
        bool event = false;
        std::uint64_t samples = 0, failures = 0;
    };
    auto outcomes = map_chunks<Outcome>(n, exec, [&](std::size_t k) {
        BFPoly f = sample_bf(trunc, derive_stream(stream, "field", k), 2.0);
        ZeroCloud cloud = bf_zero_samples(f.poly, cfg.region, cfg.grid);
        double area = 0;
        for (auto const& s : cloud.samples)
            if (cfg.band.contains(s.k))
                area += s.weight;
        return Outcome{area > cfg.threshold, cloud.samples.size(),
                       cloud.n_branch_failures};
    });
    MeanAccumulator m;
    std::uint64_t samples = 0, failures = 0;
    for (auto const& o : outcomes)
    {
        m.add(o.event ? 1.0 : 0.0);
        samples += o.samples;
        failures += o.failures;
    }
    check_discards(samples, failures, "prop1_event_probability");
    Estimate e = m.estimate(stream.root_seed());
    // binomial stderr
    e.std_err = std::sqrt(e.mean * (1 - e.mean) / n);
    return e;
}

double c2_distance_to(Poly2 const& p, Poly2 const& q, double radius,
                      int grid_n)
{
    if (grid_n < 2)
        throw std::invalid_argument("c2_distance_to: grid_n must be >= 2");
    Poly2 diff = p - q;
    double best = 0;
    double step = 2 * radius / (grid_n - 1);
    for (int a = 0; a < grid_n; ++a)
        for (int b = 0; b < grid_n; ++b)
            for (int c = 0; c < grid_n; ++c)
                for (int d = 0; d < grid_n; ++d)
                {
                    cplx z(-radius + a * step, -radius + b * step);
                    cplx w(-radius + c * step, -radius + d * step);
                    if (std::norm(z) + std::norm(w) > radius * radius * (1 + 1e-12))
                        continue;
                    Jet2 j = diff.jet(z, w);
                    for (cplx v : {j.f0, j.fz, j.fw, j.fzz, j.fww, j.fzw})
                        best = std::max(best, std::abs(v));
                }
    return best;
}

}  // namespace curvlab

#include "curvlab/curve_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curvlab {
namespace {

constexpr int kMaxLineRedraws = 64;

Vec3 gaussian_vec3(StreamReader& rd) noexcept
{
    return {rd.cn(), rd.cn(), rd.cn()};
}

//! Fixed line chunking for reductions: independent of worker count.
template<class Acc, class LineBody>
Acc reduce_lines(std::uint64_t n_lines, Exec exec, LineBody&& body)
{
    auto parts = map_chunks<Acc>(num_chunks(n_lines), exec, [&](std::size_t c) {
        Acc acc;
        std::uint64_t begin = c * kChunkSize;
        std::uint64_t end = std::min<std::uint64_t>(n_lines, begin + kChunkSize);
        for (std::uint64_t l = begin; l < end; ++l)
            body(l, acc);
        return acc;
    });
    Acc total;
    for (auto const& p : parts)
        total.merge(p);
    return total;
}

}  // namespace

ProjLine sample_random_line(RngStream const& stream)
{
    StreamReader rd(stream);
    for (;;)
    {
        Vec3 a = gaussian_vec3(rd);
        Vec3 b = gaussian_vec3(rd);
        try
        {
            return make_line(a, b);
        }
        catch (std::domain_error const&)
        {
            // numerically dependent pair: draw again from the same reader
        }
    }
}

std::vector<CurvatureSample> line_samples(HomPoly3 const& p,
                                          RngStream const& line_stream,
                                          std::uint64_t line_index)
{
    double const resid_tol = kOnCurveTol * p.coeff_norm();
    for (int attempt = 0; attempt < kMaxLineRedraws; ++attempt)
    {
        ProjLine line = sample_random_line(
            attempt == 0 ? line_stream
                         : derive_stream(line_stream, "redraw", attempt));
        std::vector<cplx> rts;
        try
        {
            rts = roots(restrict_to_line(p, line));
        }
        catch (NumericalError const&)
        {
            continue;  // DegenerateLine or ConvergenceFailure: redraw
        }

        std::vector<CurvatureSample> out;
        out.reserve(rts.size());
        bool ok = true;
        for (std::size_t r = 0; r < rts.size(); ++r)
        {
            Vec3 x{line.u[0] + rts[r] * line.v[0], line.u[1] + rts[r] * line.v[1],
                   line.u[2] + rts[r] * line.v[2]};
            ProjPoint pt = normalize(x);
            Jet2 jet = directional_jet(p, unitary_frame(pt));
            if (std::abs(jet.f0) > resid_tol)
            {
                ok = false;
                break;
            }
            CurvatureSample s;
            s.point = pt;
            s.line_index = line_index;
            s.root_index = static_cast<int>(r);
            if (auto v = try_vitter_v(jet))
            {
                s.k = curvature_fs_from_v(*v);
            }
            else
            {
                s.k = std::nan("");
                s.discarded = true;
            }
            out.push_back(s);
        }
        if (ok)
            return out;
    }
    throw ConvergenceFailure("line_samples: no usable line after redraws");
}

std::vector<CurvatureSample>
sample_curve_points(HomPoly3 const& p, std::uint64_t n_lines,
                    RngStream const& stream, Exec exec)
{
    if (n_lines < 1)
        throw std::invalid_argument("sample_curve_points: n_lines must be >= 1");
    struct Acc
    {
        std::vector<CurvatureSample> samples;
        void merge(Acc const& o)
        {
            samples.insert(samples.end(), o.samples.begin(), o.samples.end());
        }
    };
    auto acc = reduce_lines<Acc>(n_lines, exec, [&](std::uint64_t l, Acc& a) {
        auto s = line_samples(p, derive_stream(stream, "line", l), l);
        a.samples.insert(a.samples.end(), s.begin(), s.end());
    });
    return std::move(acc.samples);
}

namespace {

struct BandAcc
{
    std::uint64_t in_band = 0;
    std::uint64_t retained = 0;
    std::uint64_t discarded = 0;
    CurvatureAudit audit;

    void merge(BandAcc const& o) noexcept
    {
        in_band += o.in_band;
        retained += o.retained;
        discarded += o.discarded;
        audit.merge(o.audit);
    }
};

BandAcc band_counts(HomPoly3 const& p, CurvatureBand const& band,
                    std::uint64_t n_lines, RngStream const& stream, Exec exec)
{
    return reduce_lines<BandAcc>(n_lines, exec, [&](std::uint64_t l, BandAcc& a) {
        for (auto const& s : line_samples(p, derive_stream(stream, "line", l), l))
        {
            if (s.discarded)
            {
                ++a.discarded;
                continue;
            }
            ++a.retained;
            a.audit.record(s.k);
            if (band.contains(s.k))
                ++a.in_band;
        }
    });
}

}  // namespace

KappaEstimate kappa_estimate(HomPoly3 const& p, CurvatureBand const& band,
                             std::uint64_t n_lines, RngStream const& stream,
                             Exec exec)
{
    if (!band.valid())
        throw std::invalid_argument("kappa_estimate: invalid band");
    if (n_lines < 1)
        throw std::invalid_argument("kappa_estimate: n_lines must be >= 1");
    BandAcc acc = band_counts(p, band, n_lines, stream, exec);
    check_discards(acc.retained, acc.discarded, "kappa_estimate");
    KappaEstimate out;
    out.band = band;
    out.n_discarded = acc.discarded;
    out.audit = acc.audit;
    out.est.n = acc.retained;
    out.est.seed = stream.root_seed();
    if (acc.retained > 0)
    {
        double m = static_cast<double>(acc.in_band) / acc.retained;
        out.est.mean = m;
        out.est.std_err = std::sqrt(m * (1 - m) / acc.retained);
    }
    return out;
}

CurvesKappaResult expected_kappa_curves(int degree, CurvatureBand const& band,
                                        std::uint64_t n_curves,
                                        std::uint64_t n_lines,
                                        RngStream const& stream, Exec exec)
{
    if (degree < 1)
        throw std::invalid_argument("expected_kappa_curves: degree must be >= 1");
    if (n_curves < 1)
        throw std::invalid_argument("expected_kappa_curves: n_curves must be >= 1");
    auto per_curve = map_chunks<KappaEstimate>(n_curves, exec, [&](std::size_t c) {
        RngStream cs = derive_stream(stream, "curve", c);
        HomPoly3 p = sample_kostlan(degree, derive_stream(cs, "poly", 0));
        return kappa_estimate(p, band, n_lines, cs, Exec::serial);
    });

    CurvesKappaResult out;
    MeanAccumulator m;
    std::uint64_t retained = 0;
    for (auto const& k : per_curve)
    {
        m.add(k.est.mean);
        out.per_curve.push_back(k.est.mean);
        out.n_discarded += k.n_discarded;
        out.audit.merge(k.audit);
        retained += k.est.n;
    }
    check_discards(retained, out.n_discarded, "expected_kappa_curves");
    out.est = m.estimate(stream.root_seed());
    return out;
}

double gauss_bonnet_target(int degree)
{
    double d = degree;
    return kTwoPi * (2 - (d - 1) * (d - 2));
}

GaussBonnetResult gauss_bonnet_check(HomPoly3 const& p, std::uint64_t n_lines,
                                     RngStream const& stream, Exec exec)
{
    if (n_lines < 1)
        throw std::invalid_argument("gauss_bonnet_check: n_lines must be >= 1");
    struct Acc
    {
        RatioAccumulator by_line;  // weight = retained points, value = line mean
        std::uint64_t discarded = 0;
        CurvatureAudit audit;
        void merge(Acc const& o) noexcept
        {
            by_line.merge(o.by_line);
            discarded += o.discarded;
            audit.merge(o.audit);
        }
    };
    auto acc = reduce_lines<Acc>(n_lines, exec, [&](std::uint64_t l, Acc& a) {
        double sum = 0;
        int count = 0;
        for (auto const& s : line_samples(p, derive_stream(stream, "line", l), l))
        {
            if (s.discarded)
            {
                ++a.discarded;
                continue;
            }
            a.audit.record(s.k);
            sum += s.k;
            ++count;
        }
        if (count > 0)
            a.by_line.add(count, sum / count);
    });
    check_discards(static_cast<std::uint64_t>(acc.by_line.sw), acc.discarded,
                   "gauss_bonnet_check");

    double area = 2.0 * p.degree();
    GaussBonnetResult out;
    out.total.mean = area * acc.by_line.ratio();
    out.total.std_err = area * acc.by_line.std_error();
    out.total.n = static_cast<std::uint64_t>(acc.by_line.sw);
    out.total.seed = stream.root_seed();
    out.target = gauss_bonnet_target(p.degree());
    out.error = out.target == 0
                    ? std::abs(out.total.mean)
                    : std::abs(out.total.mean - out.target) / std::abs(out.target);
    out.n_discarded = acc.discarded;
    out.audit = acc.audit;
    return out;
}

std::vector<HistogramRow> curvature_histogram(int degree,
                                              std::uint64_t n_curves,
                                              std::uint64_t n_lines,
                                              std::vector<double> const& edges,
                                              RngStream const& stream, Exec exec)
{
    if (edges.size() < 2 || edges.front() != -kInf
        || edges.back() != kTwoPi)
    {
        throw std::invalid_argument(
            "curvature_histogram: edges must run from -inf to 2 pi");
    }
    if (!std::is_sorted(edges.begin(), edges.end())
        || std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    {
        throw std::invalid_argument(
            "curvature_histogram: edges must be strictly increasing");
    }
    std::size_t n_bins = edges.size() - 1;

    struct Counts
    {
        std::vector<std::uint64_t> bins;
        std::uint64_t discarded = 0;
    };
    auto per_curve = map_chunks<Counts>(n_curves, exec, [&](std::size_t c) {
        RngStream cs = derive_stream(stream, "curve", c);
        HomPoly3 p = sample_kostlan(degree, derive_stream(cs, "poly", 0));
        Counts out{std::vector<std::uint64_t>(n_bins, 0), 0};
        for (auto const& s : sample_curve_points(p, n_lines, cs, Exec::serial))
        {
            if (s.discarded)
            {
                ++out.discarded;
                continue;
            }
            // upper_bound: bins are [e_b, e_{b+1}); K = 2 pi goes to the last
            auto it = std::upper_bound(edges.begin(), edges.end(), s.k);
            std::size_t b = std::min<std::size_t>(
                static_cast<std::size_t>(it - edges.begin()) - 1, n_bins - 1);
            ++out.bins[b];
        }
        return out;
    });

    std::vector<std::uint64_t> total(n_bins, 0);
    std::uint64_t discarded = 0;
    for (auto const& c : per_curve)
    {
        for (std::size_t b = 0; b < n_bins; ++b)
            total[b] += c.bins[b];
        discarded += c.discarded;
    }
    std::uint64_t retained = 0;
    for (auto t : total)
        retained += t;
    check_discards(retained, discarded, "curvature_histogram");

    std::vector<HistogramRow> rows;
    for (std::size_t b = 0; b < n_bins; ++b)
    {
        double mass = retained ? static_cast<double>(total[b]) / retained : 0.0;
        rows.push_back({edges[b], edges[b + 1], mass, total[b]});
    }
    return rows;
}

TailBoundResult tail_bound_check(int degree, PhiParams const& params,
                                 std::uint64_t n_curves, std::uint64_t n_lines,
                                 double eta, RngStream const& stream, Exec exec)
{
    if (!params.valid())
        throw std::invalid_argument("tail_bound_check: need 0 < r < R");
    if (!(eta > 0 && eta < 1))
        throw std::invalid_argument("tail_bound_check: eta must be in (0, 1)");
    auto curves = expected_kappa_curves(degree,
                                        fs_band(params.r, params.big_r, degree),
                                        n_curves, n_lines, stream, exec);
    TailBoundResult out;
    std::uint64_t above = 0;
    for (double k : curves.per_curve)
        if (k > eta)
            ++above;
    double prob = static_cast<double>(above) / n_curves;
    out.empirical_prob = {prob, std::sqrt(prob * (1 - prob) / n_curves),
                          n_curves, stream.root_seed()};
    out.markov_bound = phi_closed(params) / eta;
    out.mean_kappa = curves.est;
    out.n_discarded = curves.n_discarded;
    return out;
}

}  // namespace curvlab

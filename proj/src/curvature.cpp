#include "curvlab/curvature.hpp"

#include <cmath>
#include <stdexcept>

namespace curvlab {

std::optional<double> try_vitter_v(Jet2 const& jet) noexcept
{
    double grad2 = std::norm(jet.fz) + std::norm(jet.fw);
    double hess2 = std::norm(jet.fzz) + std::norm(jet.fww)
                   + 2 * std::norm(jet.fzw);
    if (grad2 == 0 || grad2 <= kSingularGradTol * hess2)
        return std::nullopt;
    cplx num = 2.0 * jet.fzw * jet.fz * jet.fw - jet.fzz * jet.fw * jet.fw
               - jet.fww * jet.fz * jet.fz;
    return std::norm(num) / (grad2 * grad2 * grad2);
}

double vitter_v(Jet2 const& jet)
{
    auto v = try_vitter_v(jet);
    if (!v)
        throw SingularPoint("jet gradient vanishes: near-nodal point");
    return *v;
}

double curvature_flat(Jet2 const& jet)
{
    return -vitter_v(jet);
}

double curvature_fs(Jet2 const& jet)
{
    return curvature_fs_from_v(vitter_v(jet));
}

CurvatureBand fs_band(double r, double big_r, int degree)
{
    return {kTwoPi - big_r * degree, kTwoPi - r * degree};
}

VInterval band_to_v(CurvatureBand const& band, Metric metric)
{
    if (!band.valid())
        throw std::invalid_argument("band_to_v: lo must be < hi");
    if (metric == Metric::flat)
        return {-band.hi, -band.lo};
    constexpr double pi = std::numbers::pi;
    return {(kTwoPi - band.hi) / pi, (kTwoPi - band.lo) / pi};
}

Jet2 sample_exact_jet(int degree, StreamReader& reader) noexcept
{
    double d = degree;
    double s1 = std::sqrt(d);
    double s2 = std::sqrt(2 * d * (d - 1));
    double s11 = std::sqrt(d * (d - 1));
    Jet2 jet;
    jet.f0 = 0;
    jet.fz = s1 * reader.cn();
    jet.fw = s1 * reader.cn();
    jet.fzz = s2 * reader.cn();
    jet.fww = s2 * reader.cn();
    jet.fzw = s11 * reader.cn();
    return jet;
}

Jet2 sample_exact_jet(int degree, RngStream const& stream)
{
    if (degree < 2)
        throw std::invalid_argument("sample_exact_jet: degree must be >= 2");
    StreamReader reader(stream);
    return sample_exact_jet(degree, reader);
}

double phi_closed(PhiParams const& params)
{
    if (!(params.r >= 0 && params.r < params.big_r))
        throw std::invalid_argument("phi_closed: need 0 <= r < R");
    auto tail = [](double x) {
        if (std::isinf(x))
            return 0.0;
        double t = 1 + x / kTwoPi;
        return 1 / (t * t * t);
    };
    return tail(params.r) - tail(params.big_r);
}

namespace {

template<class Acc, class Sample>
Acc reduce_chunks(std::uint64_t n, RngStream const& stream, Exec exec,
                  Sample&& sample)
{
    auto n_chunks = num_chunks(n);
    auto parts = map_chunks<Acc>(n_chunks, exec, [&](std::size_t c) {
        StreamReader reader(derive_stream(stream, "chunk", c));
        Acc acc;
        std::uint64_t begin = c * kChunkSize;
        std::uint64_t end = std::min<std::uint64_t>(n, begin + kChunkSize);
        for (std::uint64_t s = begin; s < end; ++s)
            sample(reader, acc);
        return acc;
    });
    Acc total;
    for (auto const& p : parts)
        total.merge(p);
    return total;
}

struct JetAcc
{
    RatioAccumulator ratio;
    CurvatureAudit audit;
    std::uint64_t discarded = 0;

    void merge(JetAcc const& o) noexcept
    {
        ratio.merge(o.ratio);
        audit.merge(o.audit);
        discarded += o.discarded;
    }
};

}  // namespace

Estimate phi_mc(PhiParams const& params, std::uint64_t n,
                RngStream const& stream, Exec exec)
{
    if (!params.valid())
        throw std::invalid_argument("phi_mc: need 0 < r < R");
    if (n < 1)
        throw std::invalid_argument("phi_mc: n must be >= 1");
    double const sqrt2 = std::numbers::sqrt2;
    auto acc = reduce_chunks<MeanAccumulator>(
        n, stream, exec, [&](StreamReader& rd, MeanAccumulator& m) {
            cplx a = rd.cn(), b = rd.cn(), alpha = rd.cn(), beta = rd.cn(),
                 gamma = rd.cn();
            double s = std::norm(a) + std::norm(b);
            cplx num = 2.0 * gamma * a * b - sqrt2 * alpha * b * b
                       - sqrt2 * beta * a * a;
            double pw = std::numbers::pi * std::norm(num) / (s * s * s);
            bool in = pw >= params.r && pw <= params.big_r;
            m.add(in ? 0.5 * s : 0.0);
        });
    return acc.estimate(stream.root_seed());
}

JetKappaResult expected_kappa_jet(int degree, CurvatureBand const& band,
                                  std::uint64_t n, RngStream const& stream,
                                  Exec exec)
{
    if (degree < 2)
        throw std::invalid_argument("expected_kappa_jet: degree must be >= 2");
    if (!band.valid())
        throw std::invalid_argument("expected_kappa_jet: invalid band");
    auto acc = reduce_chunks<JetAcc>(
        n, stream, exec, [&](StreamReader& rd, JetAcc& a) {
            Jet2 jet = sample_exact_jet(degree, rd);
            auto v = try_vitter_v(jet);
            if (!v)
            {
                ++a.discarded;
                return;
            }
            double k = curvature_fs_from_v(*v);
            a.audit.record(k);
            double w = std::norm(jet.fz) + std::norm(jet.fw);
            a.ratio.add(w, band.contains(k) ? 1.0 : 0.0);
        });
    check_discards(acc.ratio.n, acc.discarded, "expected_kappa_jet");
    return {acc.ratio.estimate(stream.root_seed()), acc.discarded, acc.audit};
}

JetKappaResult area_biased_mean_v(int degree, std::uint64_t n,
                                  RngStream const& stream, Exec exec)
{
    if (degree < 2)
        throw std::invalid_argument("area_biased_mean_v: degree must be >= 2");
    auto acc = reduce_chunks<JetAcc>(
        n, stream, exec, [&](StreamReader& rd, JetAcc& a) {
            Jet2 jet = sample_exact_jet(degree, rd);
            auto v = try_vitter_v(jet);
            if (!v)
            {
                ++a.discarded;
                return;
            }
            a.audit.record(curvature_fs_from_v(*v));
            a.ratio.add(std::norm(jet.fz) + std::norm(jet.fw), *v);
        });
    check_discards(acc.ratio.n, acc.discarded, "area_biased_mean_v");
    return {acc.ratio.estimate(stream.root_seed()), acc.discarded, acc.audit};
}

}  // namespace curvlab

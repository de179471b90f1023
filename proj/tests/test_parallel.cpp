#include "curvlab/bargmann_fock.hpp"
#include "curvlab/curve_sampler.hpp"
#include "curvlab/parallel.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {

struct ThreadScope
{
    explicit ThreadScope(int n) { set_num_threads(n); }
    ~ThreadScope() { set_num_threads(0); }
};

void same(Estimate const& a, Estimate const& b)
{
    CHECK(a.mean == b.mean);
    CHECK(a.std_err == b.std_err);
    CHECK(a.n == b.n);
}

}  // namespace

TEST_CASE("chunk arithmetic")
{
    CHECK(num_chunks(0) == 0);
    CHECK(num_chunks(1) == 1);
    CHECK(num_chunks(kChunkSize) == 1);
    CHECK(num_chunks(kChunkSize + 1) == 2);
}

TEST_CASE("map_chunks keeps order and rethrows the first error")
{
    ThreadScope scope(4);
    auto v = map_chunks<int>(100, Exec::parallel, [](std::size_t c) { return int(c * c); });
    for (int c = 0; c < 100; ++c)
        CHECK(v[c] == c * c);
    auto boom = [](std::size_t c) -> int {
        if (c == 7 || c == 42)
            throw std::runtime_error("chunk " + std::to_string(c));
        return 0;
    };
    for (Exec e : {Exec::serial, Exec::parallel})
    {
        try
        {
            map_chunks<int>(100, e, boom);
            FAIL("expected a throw");
        }
        catch (std::runtime_error const& err)
        {
            CHECK(std::string(err.what()) == "chunk 7");
        }
    }
}

TEST_CASE("parallel kernels match the serial reference bit for bit")
{
    ThreadScope scope(4);
    RngStream root(81);

    same(phi_mc({1, 4}, 300000, root, Exec::serial),
         phi_mc({1, 4}, 300000, root, Exec::parallel));

    auto band = fs_band(1, 4, 8);
    same(expected_kappa_jet(8, band, 300000, root, Exec::serial).est,
         expected_kappa_jet(8, band, 300000, root, Exec::parallel).est);

    auto p = sample_kostlan(6, root);
    same(kappa_estimate(p, fs_band(1, 4, 6), 2000, root, Exec::serial).est,
         kappa_estimate(p, fs_band(1, 4, 6), 2000, root, Exec::parallel).est);

    same(expected_kappa_curves(5, fs_band(1, 4, 5), 12, 40, root, Exec::serial).est,
         expected_kappa_curves(5, fs_band(1, 4, 5), 12, 40, root, Exec::parallel).est);

    same(gauss_bonnet_check(p, 3000, root, Exec::serial).total,
         gauss_bonnet_check(p, 3000, root, Exec::parallel).total);

    EventConfig cfg;
    cfg.grid = {12, 24};
    same(prop1_event_probability(6, cfg, root, Exec::serial),
         prop1_event_probability(6, cfg, root, Exec::parallel));
}

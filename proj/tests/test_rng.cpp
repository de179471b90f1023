#include <set>

#include "curvlab/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curvlab;

TEST_CASE("philox known answers")
{
    using P = Philox4x32;
    CHECK(P::apply({0, 0, 0, 0}, {0, 0})
          == P::ctr_type{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(P::apply({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                   {0xffffffff, 0xffffffff})
          == P::ctr_type{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(P::apply({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                   {0xa4093822, 0x299f31d0})
          == P::ctr_type{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

namespace {

std::vector<std::uint64_t> head(RngStream const& s, int n = 128)
{
    StreamReader rd(s);
    std::vector<std::uint64_t> out;
    for (int i = 0; i < n; ++i)
        out.push_back(rd.next_u64());
    return out;
}

}  // namespace

TEST_CASE("derived streams")
{
    RngStream root(42);
    auto c0 = derive_stream(root, "curve", 0);
    auto c1 = derive_stream(root, "curve", 1);
    auto l0 = derive_stream(root, "line", 0);

    SUBCASE("siblings differ in every leading output")
    {
        auto a = head(c0), b = head(c1);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i] != b[i]);
    }
    SUBCASE("same path twice is identical")
    {
        CHECK(head(c0) == head(derive_stream(root, "curve", 0)));
    }
    SUBCASE("labels separate streams")
    {
        CHECK(head(c0) != head(l0));
        CHECK(c0.key() != l0.key());
    }
    SUBCASE("root seed separates streams")
    {
        CHECK(head(derive_stream(RngStream(43), "curve", 0)) != head(c0));
    }
    SUBCASE("path is recorded")
    {
        auto deep = derive_stream(c1, "line", 17);
        CHECK(deep.path_string() == "curve[1]/line[17]");
        CHECK(deep.root_seed() == 42);
        CHECK(deep.path().size() == 2);
    }
    SUBCASE("no key collisions among many children")
    {
        std::set<std::uint64_t> keys;
        for (std::uint64_t i = 0; i < 10000; ++i)
            keys.insert(derive_stream(root, "chunk", i).key());
        CHECK(keys.size() == 10000);
    }
}

TEST_CASE("uniforms are in the open unit interval")
{
    StreamReader rd(RngStream(5));
    double lo = 1, hi = 0;
    for (int i = 0; i < 100000; ++i)
    {
        double u = rd.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo > 0);
    CHECK(hi < 1);
}

TEST_CASE("complex gaussian moments")
{
    auto a = sample_cn(RngStream(7), 1000000);
    REQUIRE(a.size() == 1000000);
    cplx mean = 0, sq = 0;
    double abs2 = 0, re2 = 0, im2 = 0, reim = 0;
    for (cplx v : a)
    {
        mean += v;
        sq += v * v;
        abs2 += std::norm(v);
        re2 += v.real() * v.real();
        im2 += v.imag() * v.imag();
        reim += v.real() * v.imag();
    }
    double n = static_cast<double>(a.size());
    CHECK(std::abs(mean / n) < 3e-3);
    CHECK(std::abs(abs2 / n - 1) < 5e-3);
    CHECK(std::abs(sq / n) < 5e-3);

    // (Re a, Im a) covariance diag(1/2, 1/2); Var of x^2 is 2 (1/2)^2.
    double se_var = std::sqrt(2 * 0.25 / n);
    CHECK(std::abs(re2 / n - 0.5) < 3 * se_var);
    CHECK(std::abs(im2 / n - 0.5) < 3 * se_var);
    CHECK(std::abs(reim / n) < 3 * 0.5 / std::sqrt(n));
}

TEST_CASE("real normals")
{
    StreamReader rd(RngStream(11));
    std::vector<double> x(200000);
    for (auto& v : x)
        v = rd.normal();
    auto m = testing::moments(x);
    CHECK(std::abs(m.mean) < 3 * m.se);
    double var = 0;
    for (double v : x)
        var += v * v;
    var /= x.size();
    CHECK(std::abs(var - 1) < 3 * std::sqrt(2.0 / x.size()));
}

TEST_CASE("reader is a pure function of the stream")
{
    auto s = derive_stream(RngStream(3), "x", 9);
    StreamReader a(s), b(s);
    for (int i = 0; i < 1000; ++i)
        CHECK(a.cn() == b.cn());
}

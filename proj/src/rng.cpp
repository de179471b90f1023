#include "curvlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace curvlab {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept
{
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) noexcept
{
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

Philox4x32::ctr_type Philox4x32::apply(ctr_type ctr, key_type key) noexcept
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t root_seed)
    : root_seed_(root_seed), key_(splitmix64(root_seed))
{
}

std::string RngStream::path_string() const
{
    std::string out;
    for (auto const& step : path_)
    {
        if (!out.empty())
            out += '/';
        out += step.label + '[' + std::to_string(step.index) + ']';
    }
    return out;
}

RngStream derive_stream(RngStream const& parent, std::string_view label,
                        std::uint64_t index)
{
    RngStream child = parent;
    child.path_.push_back({std::string(label), index});
    // Chained mixing: the label hash and index are absorbed separately so
    // ("ab", 1) and ("a", ...) cannot collide by concatenation.
    std::uint64_t k = splitmix64(parent.key_ ^ fnv1a(label));
    k = splitmix64(k + 0x632BE59BD9B4E019ull * (index + 1));
    child.key_ = k;
    return child;
}

StreamReader::StreamReader(RngStream const& stream) noexcept
    : key_{static_cast<std::uint32_t>(stream.key()),
           static_cast<std::uint32_t>(stream.key() >> 32)}
{
}

void StreamReader::refill() noexcept
{
    Philox4x32::ctr_type ctr{static_cast<std::uint32_t>(block_),
                             static_cast<std::uint32_t>(block_ >> 32), 0, 0};
    buf_ = Philox4x32::apply(ctr, key_);
    ++block_;
    pos_ = 0;
}

std::uint64_t StreamReader::next_u64() noexcept
{
    if (pos_ > 2)
        refill();
    std::uint64_t v = (static_cast<std::uint64_t>(buf_[pos_]) << 32)
                      | buf_[pos_ + 1];
    pos_ += 2;
    return v;
}

double StreamReader::uniform() noexcept
{
    // 53 random bits, shifted by half an ulp so 0 is excluded.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

cplx StreamReader::cn() noexcept
{
    // |a|^2 ~ Exp(1), arg a ~ U(0, 2 pi).
    double modulus = std::sqrt(-std::log(uniform()));
    double angle = 2 * std::numbers::pi * uniform();
    return {modulus * std::cos(angle), modulus * std::sin(angle)};
}

double StreamReader::normal() noexcept
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    cplx a = cn() * std::numbers::sqrt2;
    spare_ = a.imag();
    has_spare_ = true;
    return a.real();
}

std::vector<cplx> sample_cn(RngStream const& stream, std::size_t n)
{
    StreamReader reader(stream);
    std::vector<cplx> out(n);
    for (auto& a : out)
        a = reader.cn();
    return out;
}

}  // namespace curvlab

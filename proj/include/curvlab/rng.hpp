#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace curvlab {

using cplx = std::complex<double>;

//! Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
struct Philox4x32
{
    using ctr_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static ctr_type apply(ctr_type ctr, key_type key) noexcept;
};

//! One step of a stream derivation path.
struct PathStep
{
    std::string label;
    std::uint64_t index = 0;

    bool operator==(PathStep const&) const = default;
};

/*!
 * Immutable handle on a random stream.
 *
 * The output of a stream is a pure function of (root seed, path). The path
 * is hashed into a 64-bit Philox key, so streams reached by different paths
 * use different keys and never overlap.
 */
class RngStream
{
  public:
    explicit RngStream(std::uint64_t root_seed);

    std::uint64_t root_seed() const noexcept { return root_seed_; }
    std::vector<PathStep> const& path() const noexcept { return path_; }
    std::uint64_t key() const noexcept { return key_; }

    //! Human-readable path, e.g. "curve[3]/line[17]".
    std::string path_string() const;

  private:
    friend RngStream derive_stream(RngStream const&, std::string_view,
                                   std::uint64_t);

    std::uint64_t root_seed_;
    std::vector<PathStep> path_;
    std::uint64_t key_;
};

//! Child stream for (label, index); independent of parent and siblings.
RngStream derive_stream(RngStream const& parent, std::string_view label,
                        std::uint64_t index);

/*!
 * Sequential reader over a stream's output.
 *
 * Each Philox block gives 128 bits: two 53-bit uniforms or one pair of
 * complex Gaussians. A reader is used by one task at a time.
 */
class StreamReader
{
  public:
    explicit StreamReader(RngStream const& stream) noexcept;

    std::uint64_t next_u64() noexcept;
    //! Uniform on the open interval (0, 1).
    double uniform() noexcept;
    //! Canonical complex Gaussian: E a = 0, E|a|^2 = 1, E a^2 = 0.
    cplx cn() noexcept;
    //! Real standard normal.
    double normal() noexcept;

  private:
    void refill() noexcept;

    Philox4x32::key_type key_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0;
};

//! First n canonical complex Gaussians of a stream.
std::vector<cplx> sample_cn(RngStream const& stream, std::size_t n);

}  // namespace curvlab

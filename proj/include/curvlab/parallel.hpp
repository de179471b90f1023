#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#ifdef _OPENMP
#    include <omp.h>
#endif

namespace curvlab {

//! Execution policy for Monte Carlo kernels.
enum class Exec
{
    serial,   //!< reference loop, chunks in order on the calling thread
    parallel  //!< OpenMP over chunks
};

//! Fixed reduction chunk: results never depend on the worker count.
inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

inline std::size_t num_chunks(std::size_t n, std::size_t chunk = kChunkSize)
{
    return (n + chunk - 1) / chunk;
}

//! Set the worker count for Exec::parallel (0 keeps the runtime default).
void set_num_threads(int threads);
int max_threads();

/*!
 * Evaluate `body(c)` for every chunk index c in [0, n_chunks) and return
 * the per-chunk results in chunk order.
 *
 * The serial and parallel paths produce identical vectors; callers merge
 * them sequentially so the final reduction is bit-identical regardless of
 * thread count. Exceptions thrown inside a chunk are rethrown after the
 * loop (first one by chunk index).
 */
template<class Result, class Body>
std::vector<Result> map_chunks(std::size_t n_chunks, Exec exec, Body&& body)
{
    std::vector<Result> out(n_chunks);
    std::vector<std::exception_ptr> errors(n_chunks);
    if (exec == Exec::parallel)
    {
        auto n = static_cast<std::int64_t>(n_chunks);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t c = 0; c < n; ++c)
        {
            try
            {
                out[c] = body(static_cast<std::size_t>(c));
            }
            catch (...)
            {
                errors[c] = std::current_exception();
            }
        }
    }
    else
    {
        for (std::size_t c = 0; c < n_chunks; ++c)
        {
            try
            {
                out[c] = body(c);
            }
            catch (...)
            {
                errors[c] = std::current_exception();
            }
        }
    }
    for (auto const& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

}  // namespace curvlab

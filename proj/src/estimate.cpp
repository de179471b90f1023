#include "curvlab/estimate.hpp"

namespace curvlab {

void check_discards(std::uint64_t retained, std::uint64_t discarded,
                    char const* where)
{
    auto total = retained + discarded;
    if (total == 0)
        return;
    if (static_cast<double>(discarded) > kMaxDiscardFraction * total)
    {
        throw TooManyDiscards(std::string(where) + ": "
                              + std::to_string(discarded) + " of "
                              + std::to_string(total)
                              + " samples discarded as singular");
    }
}

}  // namespace curvlab

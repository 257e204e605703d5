#include "herdlens/bitgrid.hpp"

#include "herdlens/error.hpp"

namespace herdlens {

BitGrid::BitGrid(int height, int width, bool fill) : height_(height), width_(width) {
    if (height < 0 || width < 0) {
        fail(ErrorCode::InvalidArgument, "grid dimensions must be nonnegative");
    }
    bits_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill ? 1 : 0);
}

} // namespace herdlens

#include "herdlens/matrix.hpp"

#include "herdlens/error.hpp"

namespace herdlens {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        fail(ErrorCode::DimensionMismatch, "matrix storage does not match its shape");
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return sum;
}

} // namespace herdlens

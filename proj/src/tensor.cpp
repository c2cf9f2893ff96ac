#include "nehd/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nehd {

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 4) {
        throw std::invalid_argument("tensor rank must be 1..4");
    }
    std::size_t n = 1;
    for (std::size_t d : shape_) {
        if (d == 0) throw std::invalid_argument("tensor dimension must be positive");
        n *= d;
    }
    data_.assign(n, fill);
}

void Tensor::fill(double v) {
    for (double& x : data_) x = v;
}

bool Tensor::all_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << " x ";
        os << shape_[i];
    }
    os << "]";
    return os.str();
}

}  // namespace nehd

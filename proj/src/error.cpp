#include "etabs/error.hpp"

#include <sstream>

namespace etabs {

namespace {

std::string symmetrization_message(std::size_t index, double dx, double dx_bound) {
    std::ostringstream os;
    os.precision(6);
    os << "grid too coarse for symmetrization: off-diagonal pair " << index
       << " is zero or changes sign (dx = " << dx << ", need dx < " << dx_bound << ")";
    return os.str();
}

}  // namespace

SymmetrizationError::SymmetrizationError(std::size_t index, double dx, double dx_bound)
    : std::runtime_error(symmetrization_message(index, dx, dx_bound)),
      index_(index),
      dx_(dx),
      dx_bound_(dx_bound) {}

ConvergenceError::ConvergenceError(std::size_t index, int iterations)
    : std::runtime_error("eigensolver did not converge for eigenvalue " + std::to_string(index) +
                         " after " + std::to_string(iterations) + " iterations"),
      index_(index) {}

}  // namespace etabs

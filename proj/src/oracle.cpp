#include "vmrp/oracle.hpp"

#include <stdexcept>
#include <utility>

namespace vmrp {

FunctionOracle::FunctionOracle(Index n, std::function<double(const Vector&)> f)
    : n_(n), f_(std::move(f)) {
  if (n < 1) throw std::invalid_argument("FunctionOracle: dimension must be positive");
  if (!f_) throw std::invalid_argument("FunctionOracle: empty callable");
}

}  // namespace vmrp

#pragma once

#include <cstdint>
#include <functional>

#include "vmrp/metric.hpp"

namespace vmrp {

/// Zeroth-order function oracle. Every value() call counts as one function
/// evaluation (FES); optimizers only ever see values.
class Oracle {
 public:
  virtual ~Oracle() = default;

  double value(const Vector& x) {
    ++evaluations_;
    return evaluate(x);
  }
  std::int64_t evaluations() const { return evaluations_; }
  virtual Index dim() const = 0;

 protected:
  virtual double evaluate(const Vector& x) const = 0;

 private:
  std::int64_t evaluations_ = 0;
};

/// Oracle over an arbitrary callable.
class FunctionOracle final : public Oracle {
 public:
  FunctionOracle(Index n, std::function<double(const Vector&)> f);
  Index dim() const override { return n_; }

 protected:
  double evaluate(const Vector& x) const override { return f_(x); }

 private:
  Index n_;
  std::function<double(const Vector&)> f_;
};

}  // namespace vmrp

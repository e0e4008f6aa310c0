#pragma once

#include <string>

#include "vmrp/oracle.hpp"
#include "vmrp/sampling.hpp"

namespace vmrp {

enum class Family { f1, f2, f3, f4, g };

struct FamilyParams {
  Family family = Family::f1;
  Index n = 2;
  double ell = 1.0;
  Index i = 1;  // g only
};

std::string family_name(Family f);
/// Accepts "f1" ... "f4" and "g"; throws std::invalid_argument otherwise.
Family parse_family(const std::string& name);

/// Benchmark objective f(R(x - s)) with known optimum. value() is counted;
/// gradient() and hessian() are diagnostics and do not count.
class ObjectiveInstance : public Oracle {
 public:
  Index dim() const override { return params_.n; }
  const FamilyParams& params() const { return params_; }
  std::string name() const;

  bool is_quadratic() const { return params_.family != Family::f2; }
  double f_star() const { return 0.0; }
  const Vector& x_star() const { return x_star_; }

  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
  /// Hessian diagonal of the untransformed quadratic (empty for f2).
  const Vector& spectrum() const { return diag_; }
  /// lambda_max / lambda_min of the quadratic's Hessian; NaN for f2.
  double condition_number() const;

  bool transformed() const { return transformed_; }
  const Matrix& rotation() const { return rotation_; }
  const Vector& shift() const { return shift_; }
  /// Maps a point of the untransformed problem to instance coordinates:
  /// R^T x + s.
  Vector transform_point(const Vector& canonical) const;

  /// 1_n for quadratics, 0_n for f2 (untransformed coordinates).
  Vector canonical_start() const;
  /// (1, ..., 1, 1/sqrt(ell), ...) style start: d_i^{-1/2} per coordinate.
  /// Only defined for f3 and f4.
  Vector som_start() const;
  /// transform_point(canonical_start()).
  Vector start() const { return transform_point(canonical_start()); }

  friend ObjectiveInstance make_objective(const FamilyParams& p);
  friend ObjectiveInstance transform_instance(const ObjectiveInstance& inst, const Matrix& R,
                                              const Vector& shift);

 protected:
  double evaluate(const Vector& x) const override;

 private:
  explicit ObjectiveInstance(const FamilyParams& p);
  Vector to_base(const Vector& x) const;
  double base_value(const Vector& z) const;
  Vector base_gradient(const Vector& z) const;
  Matrix base_hessian(const Vector& z) const;

  FamilyParams params_;
  Vector diag_;
  bool transformed_ = false;
  Matrix rotation_;
  Vector shift_;
  Vector x_star_;
};

ObjectiveInstance make_f1(Index n, double ell);
ObjectiveInstance make_f2(Index n);
ObjectiveInstance make_f3(Index n, double ell);
ObjectiveInstance make_f4(Index n, double ell);
ObjectiveInstance make_gi(Index n, double ell, Index i);
ObjectiveInstance make_objective(const FamilyParams& p);

/// Random Haar rotation and shift s ~ N(0, I_n). Throws std::logic_error if
/// inst is already transformed.
ObjectiveInstance transform_instance(const ObjectiveInstance& inst, SeededRng& rng);
ObjectiveInstance transform_instance(const ObjectiveInstance& inst, const Matrix& R,
                                     const Vector& shift);

}  // namespace vmrp

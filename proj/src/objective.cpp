#include "vmrp/objective.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vmrp {

std::string family_name(Family f) {
  switch (f) {
    case Family::f1: return "f1";
    case Family::f2: return "f2";
    case Family::f3: return "f3";
    case Family::f4: return "f4";
    case Family::g: return "g";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "f1") return Family::f1;
  if (name == "f2") return Family::f2;
  if (name == "f3") return Family::f3;
  if (name == "f4") return Family::f4;
  if (name == "g") return Family::g;
  throw std::invalid_argument("unknown function family '" + name + "'");
}

namespace {

void validate(const FamilyParams& p) {
  if (p.n < 2) throw std::invalid_argument("function: n must be at least 2");
  if (p.family != Family::f2 && !(p.ell >= 1.0 && std::isfinite(p.ell))) {
    throw std::invalid_argument("function: ell must be a finite value >= 1");
  }
  if (p.family == Family::g && (p.i < 1 || p.i >= p.n)) {
    throw std::invalid_argument("function: g index i must satisfy 1 <= i < n");
  }
}

Vector quadratic_diagonal(const FamilyParams& p) {
  const Index n = p.n;
  const double ell = p.ell;
  Vector d(n);
  switch (p.family) {
    case Family::f1: {
      const double log_ell = std::log(ell);
      for (Index k = 0; k < n; ++k) {
        d(k) = std::exp(1.0 + static_cast<double>(k) * (log_ell - 1.0) / static_cast<double>(n - 1));
      }
      break;
    }
    case Family::f3: {
      const Index half = (n + 1) / 2;
      for (Index k = 0; k < n; ++k) d(k) = k < half ? 1.0 : ell;
      break;
    }
    case Family::f4:
      d.setConstant(ell / 2.0);
      d(0) = 1.0;
      d(n - 1) = ell;
      break;
    case Family::g:
      for (Index k = 0; k < n; ++k) d(k) = k < p.i ? ell : 1.0;
      break;
    case Family::f2:
      return Vector();
  }
  return d;
}

}  // namespace

ObjectiveInstance::ObjectiveInstance(const FamilyParams& p) : params_(p) {
  validate(p);
  diag_ = quadratic_diagonal(p);
  rotation_ = Matrix::Identity(p.n, p.n);
  shift_ = Vector::Zero(p.n);
  x_star_ = p.family == Family::f2 ? Vector::Ones(p.n) : Vector::Zero(p.n);
}

std::string ObjectiveInstance::name() const {
  std::ostringstream os;
  os << family_name(params_.family);
  if (params_.family == Family::g) os << params_.i;
  return os.str();
}

Vector ObjectiveInstance::to_base(const Vector& x) const {
  if (x.size() != params_.n) throw std::invalid_argument("objective: dimension mismatch");
  if (!transformed_) return x;
  return rotation_ * (x - shift_);
}

double ObjectiveInstance::base_value(const Vector& z) const {
  if (params_.family != Family::f2) return 0.5 * z.cwiseProduct(z).dot(diag_);
  double s = 0.0;
  for (Index k = 0; k + 1 < params_.n; ++k) {
    const double a = z(k + 1) - z(k) * z(k);
    const double b = z(k) - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

Vector ObjectiveInstance::base_gradient(const Vector& z) const {
  if (params_.family != Family::f2) return diag_.cwiseProduct(z);
  const Index n = params_.n;
  Vector g = Vector::Zero(n);
  for (Index k = 0; k + 1 < n; ++k) {
    const double a = z(k + 1) - z(k) * z(k);
    g(k) += -400.0 * z(k) * a + 2.0 * (z(k) - 1.0);
    g(k + 1) += 200.0 * a;
  }
  return g;
}

Matrix ObjectiveInstance::base_hessian(const Vector& z) const {
  if (params_.family != Family::f2) return diag_.asDiagonal();
  const Index n = params_.n;
  Matrix h = Matrix::Zero(n, n);
  for (Index k = 0; k + 1 < n; ++k) {
    h(k, k) += 1200.0 * z(k) * z(k) - 400.0 * z(k + 1) + 2.0;
    h(k, k + 1) += -400.0 * z(k);
    h(k + 1, k) += -400.0 * z(k);
    h(k + 1, k + 1) += 200.0;
  }
  return h;
}

double ObjectiveInstance::evaluate(const Vector& x) const { return base_value(to_base(x)); }

Vector ObjectiveInstance::gradient(const Vector& x) const {
  const Vector g = base_gradient(to_base(x));
  return transformed_ ? Vector(rotation_.transpose() * g) : g;
}

Matrix ObjectiveInstance::hessian(const Vector& x) const {
  const Matrix h = base_hessian(to_base(x));
  if (!transformed_) return h;
  Matrix t = rotation_.transpose() * h * rotation_;
  return 0.5 * (t + t.transpose());
}

double ObjectiveInstance::condition_number() const {
  if (!is_quadratic()) return std::numeric_limits<double>::quiet_NaN();
  return diag_.maxCoeff() / diag_.minCoeff();
}

Vector ObjectiveInstance::transform_point(const Vector& canonical) const {
  if (canonical.size() != params_.n) throw std::invalid_argument("transform_point: dimension mismatch");
  if (!transformed_) return canonical;
  return rotation_.transpose() * canonical + shift_;
}

Vector ObjectiveInstance::canonical_start() const {
  return params_.family == Family::f2 ? Vector::Zero(params_.n) : Vector::Ones(params_.n);
}

Vector ObjectiveInstance::som_start() const {
  if (params_.family != Family::f3 && params_.family != Family::f4) {
    throw std::invalid_argument("som_start: only defined for f3 and f4");
  }
  return diag_.cwiseSqrt().cwiseInverse();
}

ObjectiveInstance make_objective(const FamilyParams& p) { return ObjectiveInstance(p); }

ObjectiveInstance make_f1(Index n, double ell) { return make_objective({Family::f1, n, ell, 1}); }
ObjectiveInstance make_f2(Index n) { return make_objective({Family::f2, n, 1.0, 1}); }
ObjectiveInstance make_f3(Index n, double ell) { return make_objective({Family::f3, n, ell, 1}); }
ObjectiveInstance make_f4(Index n, double ell) { return make_objective({Family::f4, n, ell, 1}); }
ObjectiveInstance make_gi(Index n, double ell, Index i) { return make_objective({Family::g, n, ell, i}); }

ObjectiveInstance transform_instance(const ObjectiveInstance& inst, const Matrix& R,
                                     const Vector& shift) {
  if (inst.transformed_) throw std::logic_error("transform_instance: instance already transformed");
  const Index n = inst.dim();
  if (R.rows() != n || R.cols() != n || shift.size() != n) {
    throw std::invalid_argument("transform_instance: dimension mismatch");
  }
  if ((R * R.transpose() - Matrix::Identity(n, n)).norm() > 1e-10) {
    throw std::invalid_argument("transform_instance: R is not orthogonal");
  }
  ObjectiveInstance out = inst;
  out.transformed_ = true;
  out.rotation_ = R;
  out.shift_ = shift;
  out.x_star_ = R.transpose() * inst.x_star_ + shift;
  return out;
}

ObjectiveInstance transform_instance(const ObjectiveInstance& inst, SeededRng& rng) {
  if (inst.transformed()) throw std::logic_error("transform_instance: instance already transformed");
  const Matrix R = haar_rotation(inst.dim(), rng);
  const Vector s = rng.normal_vector(inst.dim());
  return transform_instance(inst, R, s);
}

}  // namespace vmrp

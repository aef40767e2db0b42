#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pmc/errors.hpp"
#include "pmc/spectral_analysis.hpp"

namespace pmc {

namespace {

constexpr double kRelativeStep = 1e-6;
constexpr double kRelativeDecreaseTol = 1e-10;
constexpr double kStepNormTol = 1e-12;
constexpr double kInitialLambda = 1e-3;
constexpr double kMaxLambda = 1e12;

std::vector<FitParameter> free_list(FreeMask mask) {
  std::vector<FitParameter> out;
  for (std::size_t k = 0; k < kFitParameterCount; ++k)
    if (mask.free[k]) out.push_back(static_cast<FitParameter>(k));
  return out;
}

// Magnitude below which a parameter is treated as "near zero" for step sizing.
double floor_scale(const HybridSystem& sys, FitParameter p) {
  switch (p) {
    case FitParameter::alpha:
    case FitParameter::beta:
      return 1e-6;
    default:
      return 1e-6 * sys.photon.omega;
  }
}

double scale_of(const HybridSystem& sys, FitParameter p) {
  return std::max(std::abs(get_parameter(sys, p)), floor_scale(sys, p));
}

Eigen::VectorXd model_magnitudes(const std::vector<double>& f, const HybridSystem& sys) {
  const auto s = s21_samples(sys, f);
  Eigen::VectorXd m(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) m[static_cast<Eigen::Index>(i)] = std::abs(s[i]);
  return m;
}

Jacobian difference_jacobian(const FrequencyGrid& grid, const HybridSystem& at,
                             FreeMask mask, bool central) {
  grid.validate();
  at.validate();
  const auto params = free_list(mask);
  const auto f = grid.frequencies();
  const Eigen::VectorXd base = central ? Eigen::VectorXd() : model_magnitudes(f, at);

  Jacobian jac{grid.points, params.size(), std::vector<double>(grid.points * params.size())};
  for (std::size_t c = 0; c < params.size(); ++c) {
    const FitParameter p = params[c];
    const double h = kRelativeStep * scale_of(at, p);
    HybridSystem plus = at;
    set_parameter(plus, p, get_parameter(at, p) + h);
    const Eigen::VectorXd up = model_magnitudes(f, plus);
    Eigen::VectorXd column;
    if (central) {
      HybridSystem minus = at;
      const double lowered = get_parameter(at, p) - h;
      // Stay inside the non-negative domain: fall back to a one-sided stencil.
      if (lowered < 0.0) {
        column = (up - model_magnitudes(f, at)) / h;
      } else {
        set_parameter(minus, p, lowered);
        column = (up - model_magnitudes(f, minus)) / (2.0 * h);
      }
    } else {
      column = (up - base) / h;
    }
    for (std::size_t r = 0; r < grid.points; ++r)
      jac.values[r * jac.cols + c] = column[static_cast<Eigen::Index>(r)];
  }
  return jac;
}

}  // namespace

std::size_t FreeMask::count() const {
  return static_cast<std::size_t>(std::count(free.begin(), free.end(), true));
}

double get_parameter(const HybridSystem& sys, FitParameter p) {
  switch (p) {
    case FitParameter::g: return sys.g;
    case FitParameter::alpha: return sys.magnon.intrinsic_damping;
    case FitParameter::beta: return sys.photon.intrinsic_damping;
    case FitParameter::gamma_c: return sys.photon.extrinsic_rate;
    case FitParameter::gamma_m: return sys.magnon.extrinsic_rate;
  }
  throw InvalidParameter("unknown fit parameter");
}

void set_parameter(HybridSystem& sys, FitParameter p, double value) {
  switch (p) {
    case FitParameter::g: sys.g = value; return;
    case FitParameter::alpha: sys.magnon.intrinsic_damping = value; return;
    case FitParameter::beta: sys.photon.intrinsic_damping = value; return;
    case FitParameter::gamma_c: sys.photon.extrinsic_rate = value; return;
    case FitParameter::gamma_m: sys.magnon.extrinsic_rate = value; return;
  }
  throw InvalidParameter("unknown fit parameter");
}

Jacobian forward_difference_jacobian(const FrequencyGrid& grid, const HybridSystem& at,
                                     FreeMask mask) {
  return difference_jacobian(grid, at, mask, false);
}

Jacobian central_difference_jacobian(const FrequencyGrid& grid, const HybridSystem& at,
                                     FreeMask mask) {
  return difference_jacobian(grid, at, mask, true);
}

FitResult fit_model(const FrequencyGrid& grid, std::span<const double> data,
                    const HybridSystem& init, FreeMask mask, int max_iter) {
  grid.validate();
  init.validate();
  if (mask.count() == 0) throw PreconditionError("fit_model: no free parameters");
  if (data.size() != grid.points) {
    std::ostringstream os;
    os << "fit_model: data has " << data.size() << " points, grid has " << grid.points;
    throw PreconditionError(os.str());
  }
  if (max_iter < 1) throw InvalidParameter("fit_model: max_iter must be >= 1");

  const auto params = free_list(mask);
  const auto k = static_cast<Eigen::Index>(params.size());
  const auto f = grid.frequencies();
  const Eigen::Map<const Eigen::VectorXd> y(data.data(), static_cast<Eigen::Index>(data.size()));

  FitResult result;
  result.params = init;
  Eigen::VectorXd r = model_magnitudes(f, init) - y;
  double cost = r.squaredNorm();
  result.residual_history.push_back(std::sqrt(cost));
  double lambda = kInitialLambda;

  for (int iter = 0; iter < max_iter && !result.converged; ++iter) {
    result.iterations = iter + 1;
    if (cost == 0.0) {
      result.converged = true;
      break;
    }

    const Jacobian jac = forward_difference_jacobian(grid, result.params, mask);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        J(jac.values.data(), static_cast<Eigen::Index>(jac.rows), k);
    // Work in parameters divided by their magnitude: raw columns differ by
    // ~20 orders between g (rad/s) and the damping constants.
    Eigen::VectorXd scale(k);
    for (Eigen::Index j = 0; j < k; ++j)
      scale[j] = scale_of(result.params, params[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd Js = J * scale.asDiagonal();
    const Eigen::MatrixXd A = Js.transpose() * Js;
    const Eigen::VectorXd b = Js.transpose() * r;
    const double max_diag = A.diagonal().maxCoeff();

    bool accepted = false;
    while (!accepted) {
      Eigen::VectorXd delta;
      Eigen::MatrixXd damped = A;
      damped.diagonal() += lambda * A.diagonal();
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      const bool singular = ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                            A.diagonal().minCoeff() <= 0.0 || ldlt.rcond() < 1e-14;
      if (!singular) delta = -ldlt.solve(b);
      if (singular || !delta.allFinite()) {
        ++result.gradient_fallbacks;
        delta = -b / ((1.0 + lambda) * std::max(max_diag, 1e-300));
      }

      HybridSystem trial = result.params;
      double step_norm2 = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        const FitParameter p = params[static_cast<std::size_t>(j)];
        const double old = get_parameter(result.params, p);
        const double updated = std::max(0.0, old + scale[j] * delta[j]);
        set_parameter(trial, p, updated);
        const double rel = (updated - old) / scale[j];
        step_norm2 += rel * rel;
      }
      if (std::sqrt(step_norm2) < kStepNormTol) {
        result.converged = true;
        break;
      }

      Eigen::VectorXd r_trial;
      double cost_trial = std::numeric_limits<double>::infinity();
      try {
        r_trial = model_magnitudes(f, trial) - y;
        cost_trial = r_trial.squaredNorm();
      } catch (const Error&) {
        // Projection can land on an all-lossless point; treat as a rejection.
      }

      if (std::isfinite(cost_trial) && cost_trial < cost) {
        const double decrease = (cost - cost_trial) / cost;
        result.params = trial;
        r = std::move(r_trial);
        cost = cost_trial;
        result.residual_history.push_back(std::sqrt(cost));
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (decrease < kRelativeDecreaseTol) result.converged = true;
      } else {
        lambda *= 10.0;
        if (lambda > kMaxLambda) {
          // No descent possible at working precision: a stationary point.
          result.converged = true;
          break;
        }
      }
    }
  }

  result.residual_norm = std::sqrt(cost);
  return result;
}

}  // namespace pmc

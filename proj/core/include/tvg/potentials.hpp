#pragma once

#include "tvg/forward.hpp"
#include "tvg/gaussian.hpp"
#include "tvg/grid.hpp"

namespace tvg {

/// Weight of the total-variation term R(u) = lambda ||u||_TV.
///
/// lambda = 0 is accepted and gives R = 0; negative weights are rejected.
struct TVTerm {
  explicit TVTerm(double weight);
  double lambda;
};

/// sum_i |u_{i+1} - u_i|. The midpoint-rule spacing cancels against the
/// difference quotient, so a jump of height J contributes J on any grid.
double tv_seminorm(const Field& u);

double regularizer(const TVTerm& tv, const Field& u);

/// 0.5 * sum_j ((G(u)_j - y_j) / sigma)^2.
double data_misfit(const ForwardModel& model, const ObservationSet& obs, const Field& u);
/// Same functional for an already computed prediction.
double data_misfit(const Vector& prediction, const ObservationSet& obs);

/// Onsager-Machlup functional Phi(u) + lambda ||u||_TV + 0.5 ||u||_E^2.
double omf(const CholeskyFactor& factor, const TVTerm& tv, const ForwardModel& model,
           const ObservationSet& obs, const Field& u);

}  // namespace tvg

#include "tvg/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace tvg {

TVTerm::TVTerm(double weight) : lambda(weight) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("TV weight must be finite and non-negative");
  }
}

double tv_seminorm(const Field& u) {
  const auto n = u.values.size();
  if (n < 2) throw std::invalid_argument("TV seminorm needs at least 2 nodes");
  return (u.values.tail(n - 1) - u.values.head(n - 1)).cwiseAbs().sum();
}

double regularizer(const TVTerm& tv, const Field& u) { return tv.lambda * tv_seminorm(u); }

double data_misfit(const Vector& prediction, const ObservationSet& obs) {
  if (prediction.size() != obs.y.size()) {
    throw std::invalid_argument("data misfit: prediction has " +
                                std::to_string(prediction.size()) + " values, data has " +
                                std::to_string(obs.y.size()));
  }
  return 0.5 * ((prediction - obs.y) / obs.noise_sd).squaredNorm();
}

double data_misfit(const ForwardModel& model, const ObservationSet& obs, const Field& u) {
  return data_misfit(model.apply(u), obs);
}

double omf(const CholeskyFactor& factor, const TVTerm& tv, const ForwardModel& model,
           const ObservationSet& obs, const Field& u) {
  return data_misfit(model, obs, u) + regularizer(tv, u) +
         0.5 * cameron_martin_norm_sq(factor, u);
}

}  // namespace tvg

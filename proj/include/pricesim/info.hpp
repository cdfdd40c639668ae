#pragma once

#include "pricesim/demand.hpp"

namespace pricesim {

struct ChernoffResult {
    double distance = 0.0;  // nats
    double t_star = 0.0;    // maximizer in [0, 1]
};

// Kullback-Leibler divergence between Bernoulli(alpha) and Bernoulli(beta),
// in nats. Inputs are clamped like every other probability in the library.
double kl_bernoulli(double alpha, double beta);

// Chernoff distance max_{t in [0,1]} -log mu(t) with
// mu(t) = (1-a)^(1-t) (1-b)^t + a^(1-t) b^t. mu is log-convex, so the
// objective is concave and golden-section search (tolerance 1e-10 in t)
// finds the maximum.
ChernoffResult chernoff_bernoulli(double alpha, double beta);

// Harmonic mean of the two one-sided KL divergences, a cheap stand-in for
// the Chernoff distance. Returns 0 when the distributions coincide.
double chernoff_harmonic_approx(double alpha, double beta);

enum class ExplorationMetric { chernoff, harmonic };

// The price whose observation distributions under the two models are hardest
// to confuse: maximizes the chosen divergence metric over the interval, with
// the same grid + refinement scheme as optimal_price. Ties resolve to the
// lowest price even when rounding noise separates mathematically equal
// maxima (mirror-symmetric pairs tie exactly, and which endpoint wins must
// not depend on ulp-level libm behaviour).
double exploration_price(const DemandModel& model_i, const DemandModel& model_h,
                         Interval interval, const GridConfig& grid = {},
                         ExplorationMetric metric = ExplorationMetric::chernoff);

}  // namespace pricesim

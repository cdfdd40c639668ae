#include "pricesim/info.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pricesim {

namespace {

double clamp_prob(double v) { return std::clamp(v, kProbEps, 1.0 - kProbEps); }

}  // namespace

double kl_bernoulli(double alpha, double beta) {
    const double a = clamp_prob(alpha);
    const double b = clamp_prob(beta);
    if (a == b) return 0.0;
    const double v =
        a * std::log(a / b) + (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    // Rounding can leave a tiny negative for near-equal inputs; KL is >= 0.
    return v > 0.0 ? v : 0.0;
}

ChernoffResult chernoff_bernoulli(double alpha, double beta) {
    const double a = clamp_prob(alpha);
    const double b = clamp_prob(beta);
    if (a == b) return {0.0, 0.0};

    const double la = std::log(a), lb = std::log(b);
    const double l1a = std::log1p(-a), l1b = std::log1p(-b);
    const auto neg_log_mu = [&](double t) {
        const double mu = std::exp((1.0 - t) * l1a + t * l1b) +
                          std::exp((1.0 - t) * la + t * lb);
        return -std::log(mu);
    };

    // Golden-section over t in [0, 1]; value ties shrink toward lower t.
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double c = hi - invphi * (hi - lo);
    double d = lo + invphi * (hi - lo);
    double fc = neg_log_mu(c);
    double fd = neg_log_mu(d);
    while (hi - lo > 1e-10) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = neg_log_mu(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = neg_log_mu(d);
        }
    }
    ChernoffResult r;
    r.t_star = (fd > fc) ? d : c;
    r.distance = std::max(0.0, std::max(fc, fd));
    return r;
}

double chernoff_harmonic_approx(double alpha, double beta) {
    const double i01 = kl_bernoulli(alpha, beta);
    const double i10 = kl_bernoulli(beta, alpha);
    if (i01 <= 0.0 || i10 <= 0.0) return 0.0;  // coinciding distributions
    return (i01 * i10) / (i01 + i10);
}

double exploration_price(const DemandModel& model_i, const DemandModel& model_h,
                         Interval interval, const GridConfig& grid,
                         ExplorationMetric metric) {
    if (!(interval.lo < interval.hi))
        throw std::invalid_argument("price interval must satisfy lo < hi");
    const auto objective = [&](double p) {
        const double a = eval(model_i, p);
        const double b = eval(model_h, p);
        return metric == ExplorationMetric::chernoff
                   ? chernoff_bernoulli(a, b).distance
                   : chernoff_harmonic_approx(a, b);
    };
    const auto [p_hat, v_hat] =
        maximize_scalar(objective, interval.lo, interval.hi, grid);

    // A mirror-symmetric pair separates equally well at two prices, and the
    // scan must not let rounding noise in the objective decide between them:
    // model evaluation lands the two "equal" points a few ulp apart, so the
    // exact-tie rule of maximize_scalar never fires. Rescan for the lowest
    // grid point matching the maximum to within rounding slack and re-refine
    // around it. Genuinely unique maxima are untouched — neighbouring grid
    // cells sit far more than the slack below the peak.
    const double slack = 1e-13 * (1.0 + std::abs(v_hat));
    const double span = interval.hi - interval.lo;
    const int n = grid.points;
    for (int j = 0; j < n; ++j) {
        const double x =
            (j == n - 1) ? interval.hi : interval.lo + span * j / (n - 1);
        if (x >= p_hat) break;  // incumbent is already the lowest match
        if (objective(x) < v_hat - slack) continue;
        const double a =
            (j == 0) ? interval.lo : interval.lo + span * (j - 1) / (n - 1);
        const double b =
            (j == n - 1) ? interval.hi : interval.lo + span * (j + 1) / (n - 1);
        const auto [p_low, v_low] = maximize_scalar(objective, a, b, grid);
        if (v_low >= v_hat - slack) return p_low;
        break;  // the low match was a grid coincidence; keep the true argmax
    }
    return p_hat;
}

}  // namespace pricesim

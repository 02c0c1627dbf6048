#include "loadctrl/estimator.hpp"

#include <stdexcept>

#include "loadctrl/errors.hpp"

namespace loadctrl {

EstimatorState::EstimatorState(int agent, const GridParams& params, double smoothing)
    : agent_(agent), params_(params), disc_(GridDiscretization::from(params)),
      smoothing_(smoothing) {
    if (!(smoothing >= 0.0 && smoothing < 1.0))
        throw ConfigError("estimator: smoothing must be in [0, 1)");
    if (!(disc_.gamma[0] != 0.0))
        throw ConfigError("estimator: model not invertible (T/M vanishes)");
}

ResidualEstimate estimate_residual(EstimatorState& est, double omega_hat_hz) {
    const double raw_dw = omega_hat_hz - est.params_.omega0_hz;
    const double dw = est.has_prev_ && est.smoothing_ > 0.0
                          ? est.smoothing_ * est.prev_dw_hz_ +
                                (1.0 - est.smoothing_) * raw_dw
                          : raw_dw;

    if (!est.has_prev_) {
        est.has_prev_ = true;
        est.prev_dw_hz_ = dw;
        est.k_ = 0;
        return {0.0, -1, est.agent_};
    }

    const GridDiscretization& d = est.disc_;
    const double u = (dw - d.phi[0][0] * est.prev_dw_hz_ -
                      d.phi[0][1] * est.p_gov_replica_mw_) /
                     d.gamma[0];

    // Advance the governor replica through the same transition.
    est.p_gov_replica_mw_ = d.phi[1][0] * est.prev_dw_hz_ +
                            d.phi[1][1] * est.p_gov_replica_mw_ + d.gamma[1] * u;
    est.prev_dw_hz_ = dw;
    est.k_ += 1;

    return {u, est.k_ - 1, est.agent_};
}

double governor_contribution(const EstimatorState& est) {
    return est.p_gov_replica_mw_;
}

}  // namespace loadctrl

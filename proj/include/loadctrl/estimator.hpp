#pragma once

#include <cstdint>

#include "loadctrl/grid.hpp"

namespace loadctrl {

// One agent's view of the balance residual r = sum_x - C, reconstructed from
// its own frequency measurements.
struct ResidualEstimate {
    double value_mw = 0.0;
    std::int64_t k_ref = -1;  // time index the estimate refers to; -1 = none yet
    int agent = 0;
};

// Unknown-input recovery from two consecutive frequency measurements.
//
// The grid transition gives
//   dw[k] = phi11 dw[k-1] + phi12 p_gov[k-1] + gamma1 u[k-1],
// so an agent that knows the model can invert for the aggregate input
//   u[k-1] = (dw[k] - phi11 dw[k-1] - phi12 p_rep[k-1]) / gamma1,
// where p_rep is a local replica of the governor state, itself driven purely
// by measured frequency. Since u = (g - g0) + sum_x + zeta and C = g0 - g,
// the residual is r = u - zeta: with noise off the recovery is exact, with
// noise on the error is mean-zero with bounded variance.
//
// Everything here is local to one agent: its own measurements, the public
// grid model, and its own history. Other agents' states never enter.
class EstimatorState {
  public:
    // smoothing in [0, 1): exponential pre-smoothing factor applied to the
    // measured deviation (0 = off; any smoothing trades lag for variance and
    // forfeits noiseless exactness).
    EstimatorState(int agent, const GridParams& params, double smoothing = 0.0);

    int agent() const { return agent_; }
    bool has_measurement() const { return has_prev_; }

    friend ResidualEstimate estimate_residual(EstimatorState& est,
                                              double omega_hat_hz);
    friend double governor_contribution(const EstimatorState& est);

  private:
    int agent_;
    GridParams params_;
    GridDiscretization disc_;
    double smoothing_;
    bool has_prev_ = false;
    double prev_dw_hz_ = 0.0;        // latest buffered (smoothed) deviation
    double p_gov_replica_mw_ = 0.0;  // replica synchronized to the buffered index
    std::int64_t k_ = -1;            // index of the buffered measurement
};

// Consume one frequency measurement. The first call only buffers and returns
// a zero estimate with k_ref = -1; each later call returns the residual of
// the transition that produced the new measurement.
ResidualEstimate estimate_residual(EstimatorState& est, double omega_hat_hz);

// Current governor-state replica (MW): the generator's own contribution that
// the inversion subtracts so the estimate tracks sum_x - C rather than the
// total imbalance.
double governor_contribution(const EstimatorState& est);

}  // namespace loadctrl

#ifndef BBDD_CLI_RUNNER_HPP_
#define BBDD_CLI_RUNNER_HPP_

#include <cstddef>

#include "bbdd/cli/config.hpp"
#include "bbdd/cli/csv.hpp"

namespace bbdd::cli {

/// One row per (protocol, sweep point) and per g (rtn), T (bath) and
/// omega0 dt (bath frames). Same seed and config give the same table for any
/// worker count.
Table run(const ExperimentConfig& config);

struct PlanRequest {
  double delta = 0.01;
  double epsilon = 0.05;
  std::size_t pilot = 2000;  // pilot draws used to measure sigma
};

/// Sample-size plan for each randomized protocol and sweep point: the
/// order-of-magnitude sigma (closed scenario with constant drift only), the
/// pilot sigma and K_min from the pilot sigma.
Table plan(const ExperimentConfig& config, const PlanRequest& request);

}  // namespace bbdd::cli

#endif  // BBDD_CLI_RUNNER_HPP_

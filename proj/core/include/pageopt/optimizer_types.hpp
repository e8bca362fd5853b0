#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pageopt/estimator.hpp"
#include "pageopt/vector.hpp"

namespace pageopt {

// One full run configuration. x0 absent means the origin. diagnostics_interval
// k > 0 records objective value, gradient norm and estimator error every k-th
// iterate (0 disables periodic diagnostics); these evaluations are free, they
// never touch the oracle counters.
struct PageConfig {
    double eta = 0.0;
    EstimatorParams params;
    std::size_t iters = 1;         // T
    double epsilon = 0.0;          // accuracy target, reporting only
    std::uint64_t seed = 0;
    std::optional<Vector> x0;
    std::size_t diagnostics_interval = 0;
};

struct TelemetryRecord {
    std::size_t t = 0;
    Branch branch = Branch::init;
    std::optional<double> f_val;
    std::optional<double> grad_norm_sq;
    std::optional<double> est_err_sq;   // ||g - grad f(x_t)||^2
    std::optional<double> lyapunov;     // f - f* + eta/(2p) * est_err_sq, needs f*
    std::uint64_t oracle_calls = 0;
    std::uint64_t paper_calls = 0;
};

struct RunResult {
    Vector x_hat;                  // the reported iterate x^(chosen_index)
    std::size_t chosen_index = 0;  // uniform over {0, ..., T-1}, drawn at run start
    std::vector<TelemetryRecord> trace;
    std::uint64_t oracle_calls = 0;
    std::uint64_t paper_calls = 0;
    bool aborted = false;
    std::optional<std::size_t> abort_iteration;  // first t with a non-finite or huge iterate
};

}  // namespace pageopt

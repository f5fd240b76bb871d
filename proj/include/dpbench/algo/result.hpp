#pragma once

#include <span>
#include <string>
#include <vector>

#include "dpbench/core.hpp"
#include "dpbench/dp/budget.hpp"
#include "dpbench/rng.hpp"

namespace dpbench {

/// Output of one mechanism run.
struct mechanism_result {
    std::vector<double> cell_estimates;
    std::vector<double> answers;
    double epsilon_spent = 0.0;
};

/// Randomness and budget bookkeeping for a single mechanism run.
class run_context {
public:
    explicit run_context(rng_stream rng, budget_ledger* ledger = nullptr) : rng_(rng), ledger_(ledger) {}

    rng_stream& rng() noexcept { return rng_; }

    void spend(const std::string& stage, double epsilon) {
        spent_ += epsilon;
        if (ledger_ != nullptr) ledger_->spend(stage, epsilon);
    }

    double spent() const noexcept { return spent_; }

private:
    rng_stream rng_;
    budget_ledger* ledger_;
    double spent_ = 0.0;
};

namespace detail {

inline mechanism_result finish(const workload& w, const domain& d, std::vector<double> cells, double spent) {
    mechanism_result r;
    r.answers = answer_workload<double>(w, d, cells);
    r.cell_estimates = std::move(cells);
    r.epsilon_spent = spent;
    return r;
}

inline void check_run_inputs(const data_vector& x, const workload& w, double epsilon) {
    require(w.dom() == x.dom(), "mechanism: workload and data have different domains");
    require(std::isfinite(epsilon) && epsilon > 0.0, "mechanism: epsilon must be positive and finite");
}

} // namespace detail
} // namespace dpbench

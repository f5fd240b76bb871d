#pragma once

// Trial execution: sample data vectors from a source, run an algorithm repeatedly on
// each, and collect scaled errors.

#include <atomic>
#include <bit>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dpbench/datagen/datagen.hpp"
#include "dpbench/harness/metrics.hpp"
#include "dpbench/harness/registry.hpp"

namespace dpbench {

struct trial_design {
    std::size_t n_vectors = 5;
    std::size_t n_runs = 10;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct trial_sample {
    std::size_t vector_id = 0;
    std::size_t run_id = 0;
    double error = 0.0;
    bool failed = false;
    std::string message;

    std::size_t trial(std::size_t n_runs) const { return vector_id * n_runs + run_id; }
};

/// One algorithm on one setting.
struct trial_report {
    std::string algorithm;
    std::string shape;
    std::int64_t scale = 0;
    std::string domain;
    double epsilon = 0.0;
    std::size_t n_runs = 0;
    std::vector<trial_sample> samples;
    sample_summary summary;

    std::vector<double> errors() const {
        std::vector<double> out;
        for (const auto& s : samples)
            if (!s.failed) out.push_back(s.error);
        return out;
    }

    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& s : samples) n += s.failed ? 1 : 0;
        return n;
    }
};

namespace detail {

inline std::uint64_t hash_text(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

/// Stream id for a setting; independent of the algorithm so every algorithm sees the
/// same data vectors.
inline std::uint64_t setting_key(const std::string& source, std::int64_t scale, const domain& d, double epsilon) {
    std::uint64_t k = hash_text(source);
    k = mix_ids(k, static_cast<std::uint64_t>(scale));
    k = mix_ids(k, hash_text(d.to_string()));
    return mix_ids(k, std::bit_cast<std::uint64_t>(epsilon));
}

/// Runs `job(i)` for i in [0, count) on `workers` threads.
template <typename Job>
void parallel_for(std::size_t count, std::size_t workers, Job&& job) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
}

} // namespace detail

/// The data vectors of a setting, drawn from the source shape at `scale`.
inline std::vector<data_vector> sample_vectors(const source_dataset& source, std::int64_t scale, const domain& d,
                                               double epsilon, const trial_design& design) {
    const std::uint64_t key = detail::setting_key(source.name, scale, d, epsilon);
    std::vector<data_vector> out;
    for (std::size_t v = 0; v < design.n_vectors; ++v) {
        rng_stream rng(design.seed, detail::mix_ids(detail::mix_ids(key, 0x64617461ULL), v));
        out.push_back(generate(source, d, scale, rng));
    }
    return out;
}

/// Every (vector, run) pair gets its own stream derived from (seed, setting, vector, run).
/// Mechanism exceptions are recorded on the sample and do not stop the run.
inline trial_report run_trials(const algorithm_info& alg, const source_dataset& source, std::int64_t scale,
                               const domain& d, double epsilon, const workload& w, const trial_design& design,
                               const run_settings& settings = {}) {
    detail::require(design.n_vectors >= 1 && design.n_runs >= 1, "run_trials: empty trial design");
    detail::require(w.dom() == d, "run_trials: workload domain differs from the target domain");
    const auto vectors = sample_vectors(source, scale, d, epsilon, design);
    std::vector<std::vector<double>> truths;
    for (const auto& x : vectors) truths.push_back(answer_workload(w, x));
    const std::uint64_t key = detail::setting_key(source.name, scale, d, epsilon);

    trial_report rep{alg.name, source.name, scale, d.to_string(), epsilon, design.n_runs, {}, {}};
    rep.samples.resize(design.n_vectors * design.n_runs);
    detail::parallel_for(rep.samples.size(), design.workers, [&](std::size_t i) {
        const std::size_t v = i / design.n_runs, r = i % design.n_runs;
        auto& s = rep.samples[i];
        s.vector_id = v;
        s.run_id = r;
        try {
            run_context ctx(rng_stream(design.seed, detail::mix_ids(detail::mix_ids(key, v), r)));
            const auto res = alg.run(vectors[v], w, epsilon, ctx, settings);
            s.error = scaled_error(res.answers, truths[v], static_cast<double>(vectors[v].scale()));
            if (!std::isfinite(s.error)) throw error("non-finite error");
        } catch (const std::exception& e) {
            s.failed = true;
            s.message = e.what();
        }
    });
    const auto errs = rep.errors();
    rep.summary = summarize(errs);
    return rep;
}

} // namespace dpbench

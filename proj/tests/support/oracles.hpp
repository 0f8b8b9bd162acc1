#pragma once

// Test-only reference computations. These deliberately avoid the library's
// search, ordering and scheduling code paths so they can check them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "railrelay/railrelay.hpp"

namespace railrelay::support {

/// Direct evaluation of the slot-count formula with a plain ceil.
inline long reference_slots(double qos_bps, double rate_bps, long total_slots, const RadioParams& p)
{
    const double bits = qos_bps * (p.sched_phase_s + total_slots * p.slot_duration_s);
    const double x = bits / (rate_bps * p.slot_duration_s);
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) {
        return std::max(1L, static_cast<long>(r));
    }
    return std::max(1L, static_cast<long>(std::ceil(x)));
}

/// Is mode m allowed for flow i, read straight from the structural rules and thresholds.
inline bool reference_mode_ok(const Instance& inst, const ModeEvaluation& ev, std::size_t i, Mode m)
{
    const Flow& fl = inst.flows[i];
    const int f = fl.dest_mr;
    const int mrs = inst.scenario.mr_count();
    switch (m) {
    case Mode::Direct:
        if (inst.blocked.count(f) != 0) return false;
        break;
    case Mode::Left:
        if (f == 1 || inst.blocked.count(f - 1) != 0) return false;
        break;
    case Mode::Right:
        if (f == mrs || inst.blocked.count(f + 1) != 0) return false;
        break;
    case Mode::Uav:
        break;
    case Mode::Abandoned:
        return true;
    }
    const auto& p = inst.scenario.params;
    if (inst.total_slots <= 0) return false;
    const double tx = inst.total_slots * p.slot_duration_s;
    const double r_min = fl.qos_bps * (p.sched_phase_s + tx) / tx;
    const ModeValue& v = ev.at(m);
    return v.rate_bps > 0.0 && v.rate_bps >= r_min && v.sinr >= fl.sinr_min;
}

/// Largest number of slot counts that fit in the budget (smallest first).
inline int reference_fit_count(std::vector<long> slots, long budget)
{
    std::sort(slots.begin(), slots.end());
    long used = 0;
    int n = 0;
    for (long s : slots) {
        used += s;
        if (used > budget) break;
        ++n;
    }
    return n;
}

/// Plain base-5 enumeration of every assignment; returns the best completion count.
inline int brute_force_best_count(const Instance& inst, const std::vector<ModeEvaluation>& evals)
{
    const std::size_t n = inst.flows.size();
    const auto& p = inst.scenario.params;
    std::vector<int> digit(n, 0);
    int best = 0;
    while (true) {
        bool valid = true;
        std::vector<long> slots;
        for (std::size_t i = 0; i < n && valid; ++i) {
            const Mode m = static_cast<Mode>(digit[i]);
            if (!reference_mode_ok(inst, evals[i], i, m)) {
                valid = false;
            } else if (m != Mode::Abandoned) {
                slots.push_back(reference_slots(inst.flows[i].qos_bps, evals[i].at(m).rate_bps,
                                                inst.total_slots, p));
            }
        }
        if (valid) {
            best = std::max(best, reference_fit_count(slots, inst.total_slots));
        }
        std::size_t k = 0;
        while (k < n && ++digit[k] == 5) {
            digit[k] = 0;
            ++k;
        }
        if (k == n) break;
    }
    return best;
}

/// Completed flows when the given slot counts are served back to back in the given order.
inline int serial_completions(const std::vector<long>& slots, const std::vector<std::size_t>& order,
                              long budget)
{
    long used = 0;
    int done = 0;
    for (std::size_t idx : order) {
        used += slots[idx];
        if (used > budget) break;
        ++done;
    }
    return done;
}

/// Best completion count over every service order.
inline int best_over_permutations(const std::vector<long>& slots, long budget)
{
    std::vector<std::size_t> order(slots.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    int best = 0;
    do {
        best = std::max(best, serial_completions(slots, order, budget));
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

} // namespace railrelay::support

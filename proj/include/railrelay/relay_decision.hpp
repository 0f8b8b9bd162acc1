#pragma once

#include <limits>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "railrelay/blockage_graph.hpp"
#include "railrelay/channel.hpp"
#include "railrelay/mode.hpp"
#include "railrelay/scenario.hpp"

namespace railrelay {

/// Rate a flow must sustain so that its demand over the whole superframe
/// (scheduling phase plus M slots) fits into the M transmission slots.
/// Infinite when there are no slots.
inline double min_required_rate(const Flow& flow, long total_slots, const RadioParams& p)
{
    if (total_slots <= 0) {
        return std::numeric_limits<double>::infinity();
    }
    const double tx_time = static_cast<double>(total_slots) * p.slot_duration_s;
    return flow.qos_bps * (p.sched_phase_s + tx_time) / tx_time;
}

struct FlowChoice {
    Mode mode = Mode::Abandoned;
    double sinr = 0.0;
    double rate_bps = 0.0;

    bool operator==(const FlowChoice&) const = default;
};

/// One choice per flow, indexed like Instance::flows.
using ModeAssignment = std::vector<FlowChoice>;

/// Flow ids grouped by chosen mode; the five sets partition the flows.
struct ModeSets {
    std::set<int> direct;
    std::set<int> left;
    std::set<int> right;
    std::set<int> uav;
    std::set<int> abandoned;

    bool operator==(const ModeSets&) const = default;

    std::set<int>& of(Mode m)
    {
        switch (m) {
        case Mode::Direct: return direct;
        case Mode::Left: return left;
        case Mode::Right: return right;
        case Mode::Uav: return uav;
        case Mode::Abandoned: break;
        }
        return abandoned;
    }
};

inline ModeSets group_by_mode(const Instance& inst, const ModeAssignment& a)
{
    ModeSets sets;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sets.of(a[i].mode).insert(inst.flows[i].id);
    }
    return sets;
}

/// True when a mode value meets both the minimum SINR and the minimum rate.
inline bool meets_thresholds(const ModeValue& v, const Flow& flow, long total_slots,
                             const RadioParams& p)
{
    return v.rate_bps > 0.0 && v.sinr >= flow.sinr_min
           && v.rate_bps >= min_required_rate(flow, total_slots, p);
}

struct Decision {
    ModeAssignment assignment;
    ModeSets sets;
};

/// Relay decision for every flow. A non-blocked flow whose direct link meets
/// the thresholds goes direct; otherwise the highest-rate surviving relay
/// mode is tried (ties Left, Right, Uav) and the flow is abandoned if that
/// mode misses a threshold. Modes in `disabled` are treated as unavailable.
inline Decision decide(const Instance& inst, const BlockageGraph& graph,
                       std::span<const ModeEvaluation> evals, ModeSet disabled = {})
{
    const auto& p = inst.scenario.params;
    Decision out;
    out.assignment.resize(inst.flows.size());

    for (std::size_t i = 0; i < inst.flows.size(); ++i) {
        const Flow& flow = inst.flows[i];
        const ModeEvaluation& ev = evals[i];
        const ModeSet forbidden = graph.forbidden_modes(flow.dest_mr);
        FlowChoice& choice = out.assignment[i];

        if (!inst.is_blocked(flow.dest_mr) && !forbidden.contains(Mode::Direct)
            && !disabled.contains(Mode::Direct)
            && meets_thresholds(ev.at(Mode::Direct), flow, inst.total_slots, p)) {
            choice = {Mode::Direct, ev.at(Mode::Direct).sinr, ev.at(Mode::Direct).rate_bps};
            continue;
        }

        std::optional<Mode> best;
        for (Mode m : kRelayModes) {
            if (forbidden.contains(m) || disabled.contains(m)) {
                continue;
            }
            if (!best || ev.at(m).rate_bps > ev.at(*best).rate_bps) {
                best = m;
            }
        }
        if (best && meets_thresholds(ev.at(*best), flow, inst.total_slots, p)) {
            choice = {*best, ev.at(*best).sinr, ev.at(*best).rate_bps};
        } else {
            choice = {};
        }
    }
    out.sets = group_by_mode(inst, out.assignment);
    return out;
}

/// Structural and threshold feasibility of an assignment: one mode per flow,
/// no left relay for MR_1 or right relay for MR_F, no direct link for blocked
/// MRs, no relaying through a blocked neighbour, and thresholds met by every
/// non-abandoned flow.
inline bool assignment_satisfies_p1_constraints(const Instance& inst, const BlockageGraph& graph,
                                                const ModeAssignment& a)
{
    if (a.size() != inst.flows.size()) {
        return false;
    }
    const auto& p = inst.scenario.params;
    const int mrs = inst.scenario.mr_count();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Flow& flow = inst.flows[i];
        const FlowChoice& c = a[i];
        const int f = flow.dest_mr;
        switch (c.mode) {
        case Mode::Abandoned:
            if (c.rate_bps != 0.0) {
                return false;
            }
            continue;
        case Mode::Direct:
            if (inst.is_blocked(f)) {
                return false;
            }
            break;
        case Mode::Left:
            if (f == 1 || inst.is_blocked(f - 1)) {
                return false;
            }
            break;
        case Mode::Right:
            if (f == mrs || inst.is_blocked(f + 1)) {
                return false;
            }
            break;
        case Mode::Uav:
            break;
        }
        if (graph.forbidden_modes(f).contains(c.mode)) {
            return false;
        }
        if (!meets_thresholds({c.sinr, c.rate_bps}, flow, inst.total_slots, p)) {
            return false;
        }
    }
    return true;
}

} // namespace railrelay

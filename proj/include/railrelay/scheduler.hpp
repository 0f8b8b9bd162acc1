#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "railrelay/errors.hpp"
#include "railrelay/relay_decision.hpp"
#include "railrelay/scenario.hpp"

namespace railrelay {

/// Traffic a flow must deliver in one superframe, in bits.
inline double superframe_demand_bits(const Flow& flow, long total_slots, const RadioParams& p)
{
    return flow.qos_bps * (p.sched_phase_s + static_cast<double>(total_slots) * p.slot_duration_s);
}

/// Slots a flow occupies at the given rate: ceil(q (Ts + M dt) / (R dt)).
/// Empty when the rate is not positive.
inline std::optional<long> slots_needed(const Flow& flow, double rate_bps, long total_slots,
                                        const RadioParams& p)
{
    if (!(rate_bps > 0.0)) {
        return std::nullopt;
    }
    const double exact = superframe_demand_bits(flow, total_slots, p) / (rate_bps * p.slot_duration_s);
    // Snap values that are integral up to rounding noise, so R = r_f gives exactly M.
    const double nearest = std::round(exact);
    const double slots = std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact) ? nearest
                                                                                  : std::ceil(exact);
    return std::max(1L, static_cast<long>(slots));
}

inline double priority(long delta)
{
    if (delta < 1) {
        throw DomainError("priority needs at least one slot");
    }
    return 1.0 / static_cast<double>(delta);
}

struct ScheduleResult {
    std::vector<bool> completed;    // C_f, indexed like Instance::flows
    int flows_completed = 0;        // A
    double throughput_bits = 0.0;   // I, counting every served slot
    double delivered_bits = 0.0;    // demand of completed flows only
    long slots_used = 0;
    std::vector<long> per_flow_slots; // delta_f; 0 for abandoned flows
    std::vector<int> order;           // flow ids in service order
};

/// One schedulable flow as seen by the slot loop.
struct ServiceItem {
    std::size_t index = 0; // position in Instance::flows
    long slots = 0;        // delta_f
    double rate_bps = 0.0;
};

/// Serial TDMA service of `items` in the given order over `total_slots` slots.
/// Each stage serves one flow until it has received its slots; the next flow
/// starts in the following slot. Every served slot adds R dt to the throughput.
inline void serve_in_order(std::span<const ServiceItem> items, long total_slots, double slot_s,
                           ScheduleResult& out)
{
    std::size_t next = 0;
    bool busy = false;
    long remaining = 0;
    const ServiceItem* current = nullptr;
    for (long t = 1; t <= total_slots; ++t) {
        if (!busy) {
            if (next == items.size()) {
                break;
            }
            current = &items[next++];
            remaining = current->slots;
            busy = true;
        }
        remaining -= 1;
        out.throughput_bits += current->rate_bps * slot_s;
        out.slots_used = t;
        if (remaining <= 0) {
            out.completed[current->index] = true;
            out.flows_completed += 1;
            busy = false;
        }
    }
}

/// Ascending-slot-count order (highest priority first), ties by flow id.
inline std::vector<ServiceItem> service_order(const Instance& inst, const ModeAssignment& a,
                                              std::vector<long>* per_flow_slots = nullptr)
{
    const auto& p = inst.scenario.params;
    std::vector<ServiceItem> items;
    if (per_flow_slots != nullptr) {
        per_flow_slots->assign(inst.flows.size(), 0);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].mode == Mode::Abandoned) {
            continue;
        }
        const auto delta = slots_needed(inst.flows[i], a[i].rate_bps, inst.total_slots, p);
        if (!delta) {
            continue;
        }
        items.push_back({i, *delta, a[i].rate_bps});
        if (per_flow_slots != nullptr) {
            (*per_flow_slots)[i] = *delta;
        }
    }
    std::stable_sort(items.begin(), items.end(), [&](const ServiceItem& x, const ServiceItem& y) {
        if (x.slots != y.slots) {
            return x.slots < y.slots;
        }
        return inst.flows[x.index].id < inst.flows[y.index].id;
    });
    return items;
}

inline ScheduleResult schedule(const ModeAssignment& a, const Instance& inst)
{
    const auto& p = inst.scenario.params;
    ScheduleResult out;
    out.completed.assign(inst.flows.size(), false);
    const auto items = service_order(inst, a, &out.per_flow_slots);
    for (const auto& it : items) {
        out.order.push_back(inst.flows[it.index].id);
    }
    serve_in_order(items, inst.total_slots, p.slot_duration_s, out);
    for (std::size_t i = 0; i < inst.flows.size(); ++i) {
        if (out.completed[i]) {
            out.delivered_bits += superframe_demand_bits(inst.flows[i], inst.total_slots, p);
        }
    }
    return out;
}

/// Completion count and throughput of the ascending-order serial schedule,
/// computed from prefix sums instead of the per-slot loop. `items` must
/// already be in service order.
struct ScheduleSummary {
    int flows_completed = 0;
    double throughput_bits = 0.0;
};

inline ScheduleSummary summarize_schedule(std::span<const ServiceItem> items, long total_slots,
                                          double slot_s)
{
    ScheduleSummary s;
    long used = 0;
    for (const auto& it : items) {
        const long left = total_slots - used;
        if (left <= 0) {
            break;
        }
        const long served = std::min(left, it.slots);
        s.throughput_bits += static_cast<double>(served) * it.rate_bps * slot_s;
        used += served;
        if (served == it.slots) {
            s.flows_completed += 1;
        } else {
            break;
        }
    }
    return s;
}

/// Seconds covered by one superframe.
inline double superframe_seconds(long total_slots, const RadioParams& p)
{
    return p.sched_phase_s + static_cast<double>(total_slots) * p.slot_duration_s;
}

} // namespace railrelay

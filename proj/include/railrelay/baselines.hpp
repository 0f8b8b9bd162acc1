#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "railrelay/blockage_graph.hpp"
#include "railrelay/channel.hpp"
#include "railrelay/errors.hpp"
#include "railrelay/relay_decision.hpp"
#include "railrelay/rng.hpp"
#include "railrelay/scheduler.hpp"

namespace railrelay {

struct SchemeOutcome {
    ModeAssignment assignment;
    ScheduleResult schedule;
};

/// The full heuristic: relay decision followed by ascending-slot scheduling.
inline SchemeOutcome run_umra(const Instance& inst, const BlockageGraph& graph,
                              std::span<const ModeEvaluation> evals)
{
    auto d = decide(inst, graph, evals);
    auto s = schedule(d.assignment, inst);
    return {std::move(d.assignment), std::move(s)};
}

/// Same pipeline with the UAV relay removed.
inline SchemeOutcome mra(const Instance& inst, std::span<const ModeEvaluation> evals)
{
    const auto graph = build_graph(inst.blocked, inst.scenario.mr_count());
    auto d = decide(inst, graph, evals, ModeSet{Mode::Uav});
    auto s = schedule(d.assignment, inst);
    return {std::move(d.assignment), std::move(s)};
}

/// Modes a flow could structurally use: not ruled out by blockage or by
/// sitting at either end of the train.
inline std::vector<Mode> structurally_available(const Flow& flow, const BlockageGraph& graph)
{
    const ModeSet forbidden = graph.forbidden_modes(flow.dest_mr);
    std::vector<Mode> out;
    for (Mode m : kTransmitModes) {
        if (!forbidden.contains(m)) {
            out.push_back(m);
        }
    }
    return out;
}

/// Random mode selection: a uniform pick among structurally available modes,
/// abandoned when the pick misses a threshold. Each MR has its own stream so
/// picks are stable across sweeps that change other flows.
inline SchemeOutcome ra(const Instance& inst, const BlockageGraph& graph,
                        std::span<const ModeEvaluation> evals, std::uint64_t seed)
{
    const auto& p = inst.scenario.params;
    ModeAssignment a(inst.flows.size());
    for (std::size_t i = 0; i < inst.flows.size(); ++i) {
        const Flow& flow = inst.flows[i];
        const auto modes = structurally_available(flow, graph);
        if (modes.empty()) {
            continue;
        }
        Rng rng(hash_seed({seed, static_cast<std::uint64_t>(flow.dest_mr)}));
        const Mode pick = modes[rng.index(modes.size())];
        const ModeValue& v = evals[i].at(pick);
        if (meets_thresholds(v, flow, inst.total_slots, p)) {
            a[i] = {pick, v.sinr, v.rate_bps};
        }
    }
    auto s = schedule(a, inst);
    return {std::move(a), std::move(s)};
}

struct OracleOptions {
    int max_flows = 12;
    bool allow_oversize = false;
    bool prune = true;
};

struct OracleResult {
    int best_count = 0;
    double best_throughput_bits = 0.0;
    ModeAssignment best_assignment;
    long long nodes_explored = 0;
};

namespace detail {

struct OracleOption {
    FlowChoice choice;
    long slots = 0;              // 0 for Abandoned
    double bits_if_complete = 0; // slots * R * dt
};

class OracleSearch {
public:
    OracleSearch(const Instance& inst, const BlockageGraph& graph,
                 std::span<const ModeEvaluation> evals, bool prune)
        : inst_(inst), prune_(prune), slot_s_(inst.scenario.params.slot_duration_s)
    {
        const auto& p = inst.scenario.params;
        const std::size_t n = inst.flows.size();
        options_.resize(n);
        min_slots_.assign(n, 0);
        max_bits_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const Flow& flow = inst.flows[i];
            const ModeSet forbidden = graph.forbidden_modes(flow.dest_mr);
            for (Mode m : kTransmitModes) {
                const ModeValue& v = evals[i].at(m);
                if (forbidden.contains(m) || !meets_thresholds(v, flow, inst.total_slots, p)) {
                    continue;
                }
                const long slots = *slots_needed(flow, v.rate_bps, inst.total_slots, p);
                const double bits = static_cast<double>(slots) * v.rate_bps * slot_s_;
                options_[i].push_back({{m, v.sinr, v.rate_bps}, slots, bits});
                min_slots_[i] = min_slots_[i] == 0 ? slots : std::min(min_slots_[i], slots);
                max_bits_[i] = std::max(max_bits_[i], bits);
                max_rate_ = std::max(max_rate_, v.rate_bps);
            }
            options_[i].push_back({{}, 0, 0.0});
        }
        current_.resize(n);
    }

    OracleResult run()
    {
        visit(0);
        OracleResult r;
        r.best_assignment = best_;
        r.nodes_explored = nodes_;
        return r;
    }

private:
    static constexpr double kTieTolerance = 1e-12;

    bool better(int count, double bits) const
    {
        if (count != best_count_) {
            return count > best_count_;
        }
        return bits > best_bits_ * (1.0 + kTieTolerance);
    }

    std::vector<ServiceItem> items_for(std::size_t depth, bool optimistic) const
    {
        std::vector<ServiceItem> items;
        for (std::size_t i = 0; i < inst_.flows.size(); ++i) {
            if (i < depth) {
                const auto& o = options_[i][current_[i]];
                if (o.slots > 0) {
                    items.push_back({i, o.slots, o.choice.rate_bps});
                }
            } else if (optimistic && min_slots_[i] > 0) {
                items.push_back({i, min_slots_[i], 0.0});
            }
        }
        std::sort(items.begin(), items.end(), [&](const ServiceItem& x, const ServiceItem& y) {
            if (x.slots != y.slots) {
                return x.slots < y.slots;
            }
            return inst_.flows[x.index].id < inst_.flows[y.index].id;
        });
        return items;
    }

    /// Upper bounds on completion count and throughput below this node. The
    /// count bound is exact: shrinking any flow's slot count never lowers the
    /// number of flows that fit.
    std::pair<int, double> bound(std::size_t depth) const
    {
        const auto items = items_for(depth, true);
        int count = 0;
        long used = 0;
        for (const auto& it : items) {
            used += it.slots;
            if (used > inst_.total_slots) {
                break;
            }
            ++count;
        }
        double bits = 0.0;
        for (std::size_t i = 0; i < inst_.flows.size(); ++i) {
            bits += i < depth ? options_[i][current_[i]].bits_if_complete : max_bits_[i];
        }
        bits = std::min(bits, static_cast<double>(inst_.total_slots) * slot_s_ * max_rate_);
        return {count, bits};
    }

    void visit(std::size_t depth)
    {
        ++nodes_;
        if (depth == inst_.flows.size()) {
            const auto items = items_for(depth, false);
            const auto s = summarize_schedule(items, inst_.total_slots, slot_s_);
            if (!have_best_ || better(s.flows_completed, s.throughput_bits)) {
                have_best_ = true;
                best_count_ = s.flows_completed;
                best_bits_ = s.throughput_bits;
                best_.resize(current_.size());
                for (std::size_t i = 0; i < current_.size(); ++i) {
                    best_[i] = options_[i][current_[i]].choice;
                }
            }
            return;
        }
        if (prune_ && have_best_) {
            const auto [count, bits] = bound(depth);
            if (count < best_count_
                || (count == best_count_ && bits <= best_bits_ * (1.0 + kTieTolerance))) {
                return;
            }
        }
        for (std::size_t k = 0; k < options_[depth].size(); ++k) {
            current_[depth] = k;
            visit(depth + 1);
        }
    }

    const Instance& inst_;
    bool prune_;
    double slot_s_;
    std::vector<std::vector<OracleOption>> options_;
    std::vector<long> min_slots_;
    std::vector<double> max_bits_;
    double max_rate_ = 0.0;
    std::vector<std::size_t> current_;
    bool have_best_ = false;
    int best_count_ = 0;
    double best_bits_ = 0.0;
    ModeAssignment best_;
    long long nodes_ = 0;
};

} // namespace detail

/// Exhaustive search over {Direct, Left, Right, Uav, Abandoned} per flow.
/// Infeasible modes are skipped; each assignment is scored by the same
/// ascending-slot scheduler as the heuristic. Maximises completed flows, then
/// throughput, then the lexicographically first assignment.
inline OracleResult exhaustive_optimal(const Instance& inst, const BlockageGraph& graph,
                                       std::span<const ModeEvaluation> evals,
                                       const OracleOptions& opts = {})
{
    if (static_cast<int>(inst.flows.size()) > opts.max_flows && !opts.allow_oversize) {
        throw SizeGuardError("exhaustive search limited to " + std::to_string(opts.max_flows)
                             + " flows, got " + std::to_string(inst.flows.size()));
    }
    detail::OracleSearch search(inst, graph, evals, opts.prune);
    auto r = search.run();
    const auto s = schedule(r.best_assignment, inst);
    r.best_count = s.flows_completed;
    r.best_throughput_bits = s.throughput_bits;
    return r;
}

/// Mean relative shortfall (os - heuristic) / os over points with os > 0.
/// Points with a zero optimum are skipped and counted in `excluded`.
inline double average_deviation(std::span<const double> os_counts,
                                std::span<const double> heuristic_counts,
                                int* excluded = nullptr)
{
    if (os_counts.size() != heuristic_counts.size()) {
        throw InvalidConfig("average_deviation needs equal-length inputs");
    }
    double sum = 0.0;
    int used = 0;
    int skipped = 0;
    for (std::size_t i = 0; i < os_counts.size(); ++i) {
        if (!(os_counts[i] > 0.0)) {
            ++skipped;
            continue;
        }
        sum += (os_counts[i] - heuristic_counts[i]) / os_counts[i];
        ++used;
    }
    if (excluded != nullptr) {
        *excluded = skipped;
    }
    return used == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / used;
}

} // namespace railrelay

#pragma once

// Random instance generator for property tests. Geometry, bandwidth, slot
// budget and thresholds are all varied so that thresholds and the slot
// budget actually bind in a good share of the draws.

#include <cstdint>

#include "railrelay/railrelay.hpp"

namespace railrelay::support {

struct GeneratedCase {
    Instance instance;
    BlockageGraph graph;
    std::vector<ModeEvaluation> evals;
};

inline GeneratedCase random_case(std::uint64_t seed, int max_mrs = 8, int min_mrs = 1)
{
    Rng rng(hash_seed({seed, 0xC0FFEE}));
    ScenarioConfig cfg;
    cfg.mr_count = min_mrs + static_cast<int>(rng.index(static_cast<std::size_t>(max_mrs - min_mrs + 1)));
    cfg.train_length_m = rng.uniform(40.0, 400.0);
    cfg.bs_offset_m = rng.uniform(5.0, 400.0);
    cfg.bs_height_m = rng.uniform(0.0, 40.0);
    cfg.uav_ahead_m = rng.uniform(-100.0, 400.0);
    cfg.uav_height_m = rng.uniform(20.0, 200.0);
    cfg.radio.bandwidth_hz = rng.uniform(2e6, 1200e6);
    cfg.radio.si_cancellation = rng.uniform(0.0, 1.0) < 0.2 ? 0.0 : std::pow(10.0, rng.uniform(-15.0, -10.0));
    cfg.radio.transceiver_efficiency = rng.uniform(0.3, 1.0);
    const Scenario scenario = build_scenario(cfg);

    const int flows = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(cfg.mr_count)));
    const int blocked = static_cast<int>(rng.index(static_cast<std::size_t>(cfg.mr_count + 1)));
    // QoS scaled to a typical link rate so flows need a sizeable share of the budget.
    const Flow mid{1, (cfg.mr_count + 1) / 2, 0.0, 0.0};
    const double typical_rate = evaluate_direct(mid, scenario).rate_bps;
    const double qos_lo = typical_rate * std::pow(10.0, rng.uniform(-1.5, -0.2));
    const QosRange qos{qos_lo, qos_lo * rng.uniform(1.0, 4.0)};
    const double sinr_min = rng.uniform(0.0, 1.0) < 0.3 ? 0.0 : std::pow(10.0, rng.uniform(0.0, 6.5));
    const long slots = static_cast<long>(rng.index(600));

    GeneratedCase c;
    c.instance = sample_instance(scenario, flows, blocked, qos, sinr_min, slots, seed);
    c.graph = build_graph(c.instance.blocked, scenario.mr_count());
    c.evals = evaluate_instance(c.instance, c.graph);
    return c;
}

} // namespace railrelay::support

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <stdexcept>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "railrelay/baselines.hpp"
#include "railrelay/blockage_graph.hpp"
#include "railrelay/channel.hpp"
#include "railrelay/errors.hpp"
#include "railrelay/rng.hpp"
#include "railrelay/scenario.hpp"
#include "railrelay/scheduler.hpp"

namespace railrelay {

enum class SweepKind { BlockedCount, FlowCount, UavPosition, SlotBudget, SinrMin, OracleCompare };

inline constexpr std::array<std::pair<SweepKind, std::string_view>, 6> kSweepNames = {{
    {SweepKind::BlockedCount, "blocked_count"},
    {SweepKind::FlowCount, "flow_count"},
    {SweepKind::UavPosition, "uav_position"},
    {SweepKind::SlotBudget, "slot_budget"},
    {SweepKind::SinrMin, "sinr_min"},
    {SweepKind::OracleCompare, "oracle_compare"},
}};

inline std::string_view to_string(SweepKind k)
{
    for (const auto& [kind, name] : kSweepNames) {
        if (kind == k) {
            return name;
        }
    }
    return "?";
}

inline SweepKind parse_sweep_kind(std::string_view name)
{
    for (const auto& [kind, n] : kSweepNames) {
        if (n == name) {
            return kind;
        }
    }
    throw InvalidConfig("unknown sweep kind '" + std::string(name) + "'");
}

enum class Scheme { Umra, Mra, Ra, Os };

inline constexpr std::array<Scheme, 4> kSchemes = {Scheme::Umra, Scheme::Mra, Scheme::Ra, Scheme::Os};

inline std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::Umra: return "UMRA";
    case Scheme::Mra: return "MRA";
    case Scheme::Ra: return "RA";
    case Scheme::Os: return "OS";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view name)
{
    for (Scheme s : kSchemes) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw InvalidConfig("unknown scheme '" + std::string(name) + "'");
}

/// Per-trial demand settings; the swept parameter overrides one of these
/// (or the UAV position in the scenario config).
struct Workload {
    int flow_count = 16;
    int blocked_count = 8;
    long total_slots = 2400;
    double sinr_min = 7e4;
    QosRange qos;
};

struct ExperimentSpec {
    std::string name = "experiment";
    SweepKind kind = SweepKind::BlockedCount;
    std::vector<double> sweep_values;
    int trials = 100;
    ScenarioConfig base;
    Workload workload;
    std::uint64_t seed = 1;
    bool include_oracle = false;
    OracleOptions oracle;
    unsigned threads = 0; // 0: hardware concurrency

    void validate() const
    {
        if (trials < 1) {
            throw InvalidConfig("trials must be at least 1");
        }
        if (sweep_values.empty()) {
            throw InvalidConfig("sweep_values must not be empty");
        }
    }
};

struct SweepRow {
    std::string sweep;
    std::string scheme;
    double value = 0.0;
    double mean_flows = 0.0;
    double mean_throughput_bps = 0.0;
    int trials = 0;
    double stderr_flows = 0.0;
    double stderr_throughput_bps = 0.0;
};

/// Completed flows and throughput (bit/s over the superframe) of each scheme in one trial.
struct TrialOutcome {
    std::array<int, 4> flows{};
    std::array<double, 4> throughput_bps{};
    bool has_oracle = false;

    int flows_of(Scheme s) const { return flows[static_cast<std::size_t>(s)]; }
};

/// Scenario config and workload after applying one sweep value.
inline std::pair<ScenarioConfig, Workload> resolve_point(const ExperimentSpec& spec, double value)
{
    ScenarioConfig cfg = spec.base;
    Workload w = spec.workload;
    auto as_count = [&](double v) {
        if (v < 0.0 || v != std::floor(v)) {
            throw InvalidConfig("sweep value must be a non-negative integer for this sweep");
        }
        return static_cast<long>(v);
    };
    switch (spec.kind) {
    case SweepKind::BlockedCount:
    case SweepKind::OracleCompare: w.blocked_count = static_cast<int>(as_count(value)); break;
    case SweepKind::FlowCount: w.flow_count = static_cast<int>(as_count(value)); break;
    case SweepKind::UavPosition: cfg.uav_ahead_m = value; break;
    case SweepKind::SlotBudget: w.total_slots = as_count(value); break;
    case SweepKind::SinrMin: w.sinr_min = value; break;
    }
    return {cfg, w};
}

inline bool wants_oracle(const ExperimentSpec& spec)
{
    return spec.include_oracle || spec.kind == SweepKind::OracleCompare;
}

/// Seed of trial `trial`. Independent of the sweep value so that every sweep
/// point sees the same random draws.
inline std::uint64_t trial_seed(std::uint64_t seed, int trial)
{
    return hash_seed({seed, static_cast<std::uint64_t>(trial)});
}

inline TrialOutcome evaluate_trial(const ExperimentSpec& spec, double value, int trial)
{
    const auto [cfg, w] = resolve_point(spec, value);
    const Scenario scenario = build_scenario(cfg);
    const std::uint64_t seed = trial_seed(spec.seed, trial);
    const Instance inst = sample_instance(scenario, w.flow_count, w.blocked_count, w.qos,
                                          w.sinr_min, w.total_slots, seed);
    const BlockageGraph graph = build_graph(inst.blocked, scenario.mr_count());
    const auto evals = evaluate_instance(inst, graph);
    const double frame_s = superframe_seconds(inst.total_slots, scenario.params);

    TrialOutcome out;
    auto record = [&](Scheme s, int flows, double bits) {
        out.flows[static_cast<std::size_t>(s)] = flows;
        out.throughput_bps[static_cast<std::size_t>(s)] = bits / frame_s;
    };
    const auto umra = run_umra(inst, graph, evals);
    record(Scheme::Umra, umra.schedule.flows_completed, umra.schedule.throughput_bits);
    const auto m = mra(inst, evals);
    record(Scheme::Mra, m.schedule.flows_completed, m.schedule.throughput_bits);
    const auto r = ra(inst, graph, evals, hash_seed({seed, 0x5241}));
    record(Scheme::Ra, r.schedule.flows_completed, r.schedule.throughput_bits);
    if (wants_oracle(spec)) {
        const auto os = exhaustive_optimal(inst, graph, evals, spec.oracle);
        record(Scheme::Os, os.best_count, os.best_throughput_bits);
        out.has_oracle = true;
    }
    return out;
}

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(int n, unsigned threads, Fn&& fn)
{
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1)));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (int i = next++; i < n; i = next++) {
                        fn(i);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                    next = n;
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

inline std::vector<SweepRow> run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    if (wants_oracle(spec)) {
        for (double v : spec.sweep_values) {
            const auto w = resolve_point(spec, v).second;
            if (w.flow_count > spec.oracle.max_flows && !spec.oracle.allow_oversize) {
                throw SizeGuardError("oracle requested for " + std::to_string(w.flow_count)
                                     + " flows; guard is " + std::to_string(spec.oracle.max_flows));
            }
        }
    }

    std::vector<SweepRow> rows;
    const std::string sweep(to_string(spec.kind));
    for (double value : spec.sweep_values) {
        std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(spec.trials));
        parallel_for(spec.trials, spec.threads,
                     [&](int t) { outcomes[static_cast<std::size_t>(t)] = evaluate_trial(spec, value, t); });

        for (Scheme s : kSchemes) {
            if (s == Scheme::Os && !wants_oracle(spec)) {
                continue;
            }
            const auto k = static_cast<std::size_t>(s);
            double sum_f = 0.0, sum_f2 = 0.0, sum_t = 0.0, sum_t2 = 0.0;
            for (const auto& o : outcomes) {
                sum_f += o.flows[k];
                sum_f2 += static_cast<double>(o.flows[k]) * o.flows[k];
                sum_t += o.throughput_bps[k];
                sum_t2 += o.throughput_bps[k] * o.throughput_bps[k];
            }
            const double n = spec.trials;
            auto std_error = [n](double sum, double sum2) {
                if (n < 2) {
                    return 0.0;
                }
                const double var = std::max(0.0, (sum2 - sum * sum / n) / (n - 1));
                return std::sqrt(var / n);
            };
            rows.push_back({sweep, std::string(to_string(s)), value, sum_f / n, sum_t / n,
                            spec.trials, std_error(sum_f, sum_f2), std_error(sum_t, sum_t2)});
        }
    }
    return rows;
}

// Presets reproducing the reference experiments.

inline ExperimentSpec preset(std::string_view name)
{
    ExperimentSpec spec;
    spec.name = std::string(name);
    auto range = [](double lo, double hi, double step) {
        std::vector<double> v;
        for (double x = lo; x <= hi + step * 1e-9; x += step) {
            v.push_back(std::round(x * 1e6) / 1e6);
        }
        return v;
    };
    if (name == "blocked_count") {
        spec.kind = SweepKind::BlockedCount;
        spec.sweep_values = range(0, 16, 1);
    } else if (name == "flow_count") {
        spec.kind = SweepKind::FlowCount;
        spec.sweep_values = range(1, 16, 1);
    } else if (name == "uav_position") {
        spec.kind = SweepKind::UavPosition;
        spec.sweep_values = range(0, 240, 20);
    } else if (name == "slot_budget") {
        spec.kind = SweepKind::SlotBudget;
        spec.sweep_values = {10, 20, 40, 60, 80, 100, 200, 400, 800, 1200, 1600, 2000, 2400, 2800, 3200, 3600, 4000};
    } else if (name == "sinr_min") {
        spec.kind = SweepKind::SinrMin;
        spec.sweep_values = range(0, 1.3e5, 1e4);
    } else if (name == "oracle_compare") {
        spec.kind = SweepKind::OracleCompare;
        spec.sweep_values = range(0, 10, 1);
        spec.trials = 50;
        spec.base.mr_count = 10;
        spec.workload.flow_count = 10;
        spec.workload.total_slots = 1400;
    } else {
        throw InvalidConfig("unknown experiment preset '" + std::string(name) + "'");
    }
    return spec;
}

/// Reads an experiment description. Keys mirror ExperimentSpec and Workload;
/// "base" holds scenario-config overrides.
inline ExperimentSpec parse_experiment(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw InvalidConfig("experiment spec must be a JSON object");
    }
    static const std::set<std::string> known = {
        "name", "sweep_kind", "sweep_values", "trials", "seed", "base", "flow_count",
        "blocked_count", "total_slots", "sinr_min", "qos_min_bps", "qos_max_bps",
        "include_oracle", "oracle_max_flows", "threads"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw InvalidConfig("unknown experiment key '" + key + "'");
        }
    }
    ExperimentSpec spec;
    using detail::take;
    std::string kind;
    if (!take(j, "sweep_kind", kind)) {
        throw InvalidConfig("experiment spec needs 'sweep_kind'");
    }
    spec.kind = parse_sweep_kind(kind);
    if (spec.kind == SweepKind::OracleCompare) {
        spec = preset("oracle_compare");
    }
    spec.name = std::string(to_string(spec.kind));
    take(j, "name", spec.name);
    take(j, "sweep_values", spec.sweep_values);
    take(j, "trials", spec.trials);
    take(j, "seed", spec.seed);
    if (auto it = j.find("base"); it != j.end()) {
        apply_overrides(*it, spec.base);
    }
    take(j, "flow_count", spec.workload.flow_count);
    take(j, "blocked_count", spec.workload.blocked_count);
    take(j, "total_slots", spec.workload.total_slots);
    take(j, "sinr_min", spec.workload.sinr_min);
    take(j, "qos_min_bps", spec.workload.qos.lo_bps);
    take(j, "qos_max_bps", spec.workload.qos.hi_bps);
    take(j, "include_oracle", spec.include_oracle);
    take(j, "oracle_max_flows", spec.oracle.max_flows);
    take(j, "threads", spec.threads);
    spec.validate();
    return spec;
}

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr std::string_view kCsvHeader = "sweep,scheme,value,mean_flows,mean_throughput_bps,trials";

inline void write_csv(std::span<const SweepRow> rows, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.sweep << ',' << r.scheme << ',' << format_double(r.value) << ','
           << format_double(r.mean_flows) << ',' << format_double(r.mean_throughput_bps) << ','
           << r.trials << '\n';
    }
    if (!os) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

inline void write_stderr_csv(std::span<const SweepRow> rows, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    os << "sweep,scheme,value,stderr_flows,stderr_throughput_bps\n";
    for (const auto& r : rows) {
        os << r.sweep << ',' << r.scheme << ',' << format_double(r.value) << ','
           << format_double(r.stderr_flows) << ',' << format_double(r.stderr_throughput_bps) << '\n';
    }
    if (!os) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

inline std::vector<SweepRow> read_csv(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) {
        throw InvalidConfig("unexpected CSV header in " + path.string());
    }
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::array<std::string, 6> cells;
        for (auto& c : cells) {
            if (!std::getline(ls, c, ',')) {
                throw InvalidConfig("short CSV row: " + line);
            }
        }
        SweepRow r;
        r.sweep = cells[0];
        r.scheme = cells[1];
        r.value = std::stod(cells[2]);
        r.mean_flows = std::stod(cells[3]);
        r.mean_throughput_bps = std::stod(cells[4]);
        r.trials = std::stoi(cells[5]);
        rows.push_back(r);
    }
    return rows;
}

inline nlohmann::json metadata_json(const ExperimentSpec& spec, const ScenarioConfig& resolved)
{
    nlohmann::json j;
    j["experiment"] = spec.name;
    j["sweep_kind"] = to_string(spec.kind);
    j["sweep_values"] = spec.sweep_values;
    j["trials"] = spec.trials;
    j["seed"] = spec.seed;
    j["scenario"] = resolved;
    j["workload"] = {{"flow_count", spec.workload.flow_count},
                     {"blocked_count", spec.workload.blocked_count},
                     {"total_slots", spec.workload.total_slots},
                     {"sinr_min_linear", spec.workload.sinr_min},
                     {"qos_min_bps", spec.workload.qos.lo_bps},
                     {"qos_max_bps", spec.workload.qos.hi_bps}};
    j["model"] = {
        {"speed_of_light_mps", kSpeedOfLight},
        {"k0", "(lambda / 4 pi)^2"},
        {"beam_alignment", "perfect boresight at both ends"},
        {"transceiver_efficiency", resolved.radio.transceiver_efficiency},
        {"relay_transmit_power", "same as BS transmit power"},
        {"bs_placement", "lateral offset bs_offset_m, along-track at train midpoint"},
        {"uav_placement", "uav_ahead_m ahead of the locomotive above the centreline"},
        {"blockage", "explicit blocked set, uniform without replacement"},
        {"sinr_thresholds", "linear"},
    };
    j["rules"] = {
        {"relay_tie_break", "Left > Right > Uav"},
        {"relay_selection", "argmax rate, reporting that mode's SINR"},
        {"schedule_order", "ascending slot count, ties by flow id"},
        {"throughput", "every served slot counts R*dt; bps = bits / (Ts + M*dt)"},
        {"ra_choice", "uniform over structurally available modes"},
        {"oracle_tie_break", "count, then throughput, then lexicographic assignment"},
        {"trial_seed", "hash(seed, trial)"},
    };
    j["schemes"] = wants_oracle(spec) ? nlohmann::json{"UMRA", "MRA", "RA", "OS"}
                                      : nlohmann::json{"UMRA", "MRA", "RA"};
    return j;
}

inline void write_metadata(const ExperimentSpec& spec, const ScenarioConfig& resolved,
                           const std::filesystem::path& path, const nlohmann::json& extra = {})
{
    auto j = metadata_json(spec, resolved);
    if (extra.is_object()) {
        j.update(extra);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    os << j.dump(2) << '\n';
    if (!os) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

} // namespace railrelay

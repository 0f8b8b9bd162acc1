#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "railrelay/errors.hpp"
#include "railrelay/rng.hpp"

namespace railrelay {

/// Point in metres. x runs along the track (train tail at 0, locomotive at
/// the train length), y is the lateral offset, z the height.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec3&) const = default;
};

inline double distance(const Vec3& a, const Vec3& b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

/// Global radio parameters. Defaults are the reference simulation settings.
struct RadioParams {
    double transmit_power_mw = 1000.0;
    double carrier_freq_hz = 28e9;
    double bandwidth_hz = 1200e6;
    double noise_psd_dbm_per_mhz = -134.0;
    double path_loss_exponent = 2.0;
    double half_power_beamwidth_deg = 30.0;
    double slot_duration_s = 18e-6;
    double sched_phase_s = 850e-6;
    double si_cancellation = 1e-13; // -130 dB
    double transceiver_efficiency = 1.0;

    bool operator==(const RadioParams&) const = default;

    void validate() const
    {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw InvalidConfig(std::string(name) + " must be positive and finite");
            }
        };
        positive(transmit_power_mw, "transmit_power_mw");
        positive(carrier_freq_hz, "carrier_freq_hz");
        positive(bandwidth_hz, "bandwidth_hz");
        positive(path_loss_exponent, "path_loss_exponent");
        positive(half_power_beamwidth_deg, "half_power_beamwidth_deg");
        positive(slot_duration_s, "slot_duration_s");
        if (!std::isfinite(noise_psd_dbm_per_mhz)) {
            throw InvalidConfig("noise_psd_dbm_per_mhz must be finite");
        }
        if (!(sched_phase_s >= 0.0) || !std::isfinite(sched_phase_s)) {
            throw InvalidConfig("sched_phase_s must be non-negative");
        }
        if (!(si_cancellation >= 0.0) || !std::isfinite(si_cancellation)) {
            throw InvalidConfig("si_cancellation must be non-negative");
        }
        if (!(transceiver_efficiency > 0.0 && transceiver_efficiency <= 1.0)) {
            throw InvalidConfig("transceiver_efficiency must lie in (0, 1]");
        }
        if (half_power_beamwidth_deg >= 180.0) {
            throw InvalidConfig("half_power_beamwidth_deg must be below 180");
        }
    }
};

/// Geometry knobs for one deployment. The BS sits beside the track at the
/// train midpoint; the UAV hovers over the centreline ahead of the locomotive.
struct ScenarioConfig {
    double train_length_m = 200.0;
    int mr_count = 16;
    double bs_offset_m = 50.0;
    double bs_height_m = 10.0;
    double uav_ahead_m = 40.0;
    double uav_height_m = 100.0;
    double mr_height_m = 2.5;
    RadioParams radio;

    bool operator==(const ScenarioConfig&) const = default;
};

struct Scenario {
    Vec3 bs_pos;
    Vec3 uav_pos;
    std::vector<Vec3> mr_pos; // MR_1 .. MR_F, left to right
    double train_length_m = 0.0;
    RadioParams params;

    bool operator==(const Scenario&) const = default;

    int mr_count() const { return static_cast<int>(mr_pos.size()); }

    /// 1-based MR lookup.
    const Vec3& mr(int f) const { return mr_pos.at(static_cast<std::size_t>(f - 1)); }

    void validate() const
    {
        params.validate();
        if (mr_pos.empty()) {
            throw InvalidConfig("scenario needs at least one MR");
        }
        for (std::size_t i = 1; i < mr_pos.size(); ++i) {
            if (!(mr_pos[i].x > mr_pos[i - 1].x)) {
                throw InvalidConfig("MR positions must strictly increase along the track");
            }
        }
        auto nonneg_height = [](const Vec3& p) { return p.z >= 0.0; };
        if (!nonneg_height(bs_pos) || !nonneg_height(uav_pos)
            || !std::all_of(mr_pos.begin(), mr_pos.end(), nonneg_height)) {
            throw InvalidConfig("node heights must be non-negative");
        }
    }
};

/// Downlink demand from the BS to one MR.
struct Flow {
    int id = 0;       // 1-based
    int dest_mr = 0;  // 1-based MR index
    double qos_bps = 0.0;
    double sinr_min = 0.0; // linear

    bool operator==(const Flow&) const = default;
};

struct Instance {
    Scenario scenario;
    std::vector<Flow> flows;
    std::set<int> blocked; // 1-based MR indices
    long total_slots = 0;
    std::uint64_t seed = 0;

    bool operator==(const Instance&) const = default;

    bool is_blocked(int mr) const { return blocked.contains(mr); }
};

struct QosRange {
    double lo_bps = 10e6;
    double hi_bps = 40e6;
};

inline Scenario build_scenario(const ScenarioConfig& cfg)
{
    if (cfg.mr_count <= 0) {
        throw InvalidConfig("mr_count must be positive");
    }
    if (!(cfg.train_length_m > 0.0)) {
        throw InvalidConfig("train_length_m must be positive");
    }
    if (cfg.bs_height_m < 0.0 || cfg.uav_height_m < 0.0 || cfg.mr_height_m < 0.0) {
        throw InvalidConfig("heights must be non-negative");
    }

    Scenario s;
    s.train_length_m = cfg.train_length_m;
    s.params = cfg.radio;
    const double spacing = cfg.train_length_m / cfg.mr_count;
    s.mr_pos.reserve(static_cast<std::size_t>(cfg.mr_count));
    for (int f = 1; f <= cfg.mr_count; ++f) {
        s.mr_pos.push_back({(f - 0.5) * spacing, 0.0, cfg.mr_height_m});
    }
    s.bs_pos = {cfg.train_length_m / 2.0, cfg.bs_offset_m, cfg.bs_height_m};
    s.uav_pos = {cfg.train_length_m + cfg.uav_ahead_m, 0.0, cfg.uav_height_m};
    s.validate();
    return s;
}

/// Draws QoS demands and the blocked set for one trial. QoS is drawn per MR
/// index and the blocked set and destinations are permutation prefixes, so
/// instances from the same seed are nested across flow and blocked counts.
inline Instance sample_instance(const Scenario& scenario, int flow_count, int blocked_count,
                                QosRange qos, double sinr_min, long total_slots,
                                std::uint64_t seed)
{
    const int mrs = scenario.mr_count();
    if (flow_count < 0 || flow_count > mrs) {
        throw InvalidConfig("flow_count must lie in [0, MR count]");
    }
    if (blocked_count < 0 || blocked_count > mrs) {
        throw InvalidConfig("blocked_count must lie in [0, MR count]");
    }
    if (!(qos.lo_bps > 0.0) || qos.hi_bps < qos.lo_bps) {
        throw InvalidConfig("QoS range must be positive with lo <= hi");
    }
    if (!(sinr_min >= 0.0)) {
        throw InvalidConfig("sinr_min must be non-negative");
    }
    if (total_slots < 0) {
        throw InvalidConfig("total_slots must be non-negative");
    }

    Instance inst;
    inst.scenario = scenario;
    inst.total_slots = total_slots;
    inst.seed = seed;

    Rng qos_rng(hash_seed({seed, 1}));
    std::vector<double> demand(static_cast<std::size_t>(mrs));
    for (auto& q : demand) {
        q = qos_rng.uniform(qos.lo_bps, qos.hi_bps);
    }

    Rng block_rng(hash_seed({seed, 2}));
    const auto block_order = block_rng.permutation(static_cast<std::size_t>(mrs));
    for (int i = 0; i < blocked_count; ++i) {
        inst.blocked.insert(static_cast<int>(block_order[static_cast<std::size_t>(i)]) + 1);
    }

    std::vector<int> dests;
    if (flow_count == mrs) {
        for (int f = 1; f <= mrs; ++f) {
            dests.push_back(f);
        }
    } else {
        Rng dest_rng(hash_seed({seed, 3}));
        const auto order = dest_rng.permutation(static_cast<std::size_t>(mrs));
        for (int i = 0; i < flow_count; ++i) {
            dests.push_back(static_cast<int>(order[static_cast<std::size_t>(i)]) + 1);
        }
        std::sort(dests.begin(), dests.end());
    }

    int id = 1;
    for (int mr : dests) {
        inst.flows.push_back({id++, mr, demand[static_cast<std::size_t>(mr - 1)], sinr_min});
    }
    return inst;
}

// JSON (de)serialization. Missing keys keep their defaults; unknown keys are
// rejected so that typos surface as configuration errors.

inline void to_json(nlohmann::json& j, const RadioParams& p)
{
    j = nlohmann::json{{"transmit_power_mw", p.transmit_power_mw},
                       {"carrier_freq_hz", p.carrier_freq_hz},
                       {"bandwidth_hz", p.bandwidth_hz},
                       {"noise_psd_dbm_per_mhz", p.noise_psd_dbm_per_mhz},
                       {"path_loss_exponent", p.path_loss_exponent},
                       {"half_power_beamwidth_deg", p.half_power_beamwidth_deg},
                       {"slot_duration_s", p.slot_duration_s},
                       {"sched_phase_s", p.sched_phase_s},
                       {"si_cancellation", p.si_cancellation},
                       {"transceiver_efficiency", p.transceiver_efficiency}};
}

inline void to_json(nlohmann::json& j, const ScenarioConfig& c)
{
    j = nlohmann::json{{"train_length_m", c.train_length_m}, {"mr_count", c.mr_count},
                       {"bs_offset_m", c.bs_offset_m},       {"bs_height_m", c.bs_height_m},
                       {"uav_ahead_m", c.uav_ahead_m},       {"uav_height_m", c.uav_height_m},
                       {"mr_height_m", c.mr_height_m}};
    nlohmann::json radio = c.radio;
    j.update(radio);
}

namespace detail {

template <typename T>
bool take(const nlohmann::json& j, const char* key, T& out)
{
    auto it = j.find(key);
    if (it == j.end()) {
        return false;
    }
    try {
        out = it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidConfig(std::string("bad value for '") + key + "'");
    }
    return true;
}

} // namespace detail

/// Applies the keys present in `j` on top of `cfg`.
inline void apply_overrides(const nlohmann::json& j, ScenarioConfig& cfg)
{
    if (!j.is_object()) {
        throw InvalidConfig("scenario config must be a JSON object");
    }
    static const std::set<std::string> known = {
        "train_length_m", "mr_count", "bs_offset_m", "bs_height_m", "uav_ahead_m",
        "uav_height_m", "mr_height_m", "transmit_power_mw", "carrier_freq_hz",
        "bandwidth_hz", "noise_psd_dbm_per_mhz", "path_loss_exponent",
        "half_power_beamwidth_deg", "slot_duration_s", "sched_phase_s", "si_cancellation",
        "transceiver_efficiency"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw InvalidConfig("unknown scenario key '" + key + "'");
        }
    }
    using detail::take;
    take(j, "train_length_m", cfg.train_length_m);
    take(j, "mr_count", cfg.mr_count);
    take(j, "bs_offset_m", cfg.bs_offset_m);
    take(j, "bs_height_m", cfg.bs_height_m);
    take(j, "uav_ahead_m", cfg.uav_ahead_m);
    take(j, "uav_height_m", cfg.uav_height_m);
    take(j, "mr_height_m", cfg.mr_height_m);
    auto& r = cfg.radio;
    take(j, "transmit_power_mw", r.transmit_power_mw);
    take(j, "carrier_freq_hz", r.carrier_freq_hz);
    take(j, "bandwidth_hz", r.bandwidth_hz);
    take(j, "noise_psd_dbm_per_mhz", r.noise_psd_dbm_per_mhz);
    take(j, "path_loss_exponent", r.path_loss_exponent);
    take(j, "half_power_beamwidth_deg", r.half_power_beamwidth_deg);
    take(j, "slot_duration_s", r.slot_duration_s);
    take(j, "sched_phase_s", r.sched_phase_s);
    take(j, "si_cancellation", r.si_cancellation);
    take(j, "transceiver_efficiency", r.transceiver_efficiency);
}

inline void from_json(const nlohmann::json& j, ScenarioConfig& cfg)
{
    cfg = ScenarioConfig{};
    apply_overrides(j, cfg);
}

} // namespace railrelay

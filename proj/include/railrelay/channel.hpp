#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "railrelay/blockage_graph.hpp"
#include "railrelay/errors.hpp"
#include "railrelay/mode.hpp"
#include "railrelay/scenario.hpp"

namespace railrelay {

/// Propagation speed used for wavelength and Doppler (3e8 m/s, the usual
/// link-budget rounding).
inline constexpr double kSpeedOfLight = 3e8;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// IEEE 802.15.3c reference pattern: Gaussian main lobe, flat side lobe.
struct AntennaPattern {
    double theta_3db_deg = 30.0;

    double theta_ml_deg() const { return 2.6 * theta_3db_deg; }

    double g0_db() const
    {
        const double half = theta_3db_deg / 2.0 * std::numbers::pi / 180.0;
        return 20.0 * std::log10(1.6162 / std::sin(half));
    }

    // Fitted to the beamwidth in degrees.
    double gsl_db() const { return -0.4111 * std::log(theta_3db_deg) - 10.579; }
};

inline double antenna_gain_db(double theta_deg, const AntennaPattern& pattern)
{
    if (!(theta_deg >= 0.0 && theta_deg <= 180.0)) {
        throw DomainError("antenna angle must lie in [0, 180] degrees");
    }
    if (theta_deg <= pattern.theta_ml_deg() / 2.0) {
        const double u = 2.0 * theta_deg / pattern.theta_3db_deg;
        return pattern.g0_db() - 3.01 * u * u;
    }
    return pattern.gsl_db();
}

/// Pointing error at each end of a link, in degrees off boresight.
struct AlignmentModel {
    double tx_offset_deg = 0.0;
    double rx_offset_deg = 0.0;
};

inline double wavelength_m(const RadioParams& p) { return kSpeedOfLight / p.carrier_freq_hz; }

/// Friis-style LOS budget k0 * Pt * Gt * Gr * d^-alpha with k0 = (lambda / 4 pi)^2.
inline double received_power_mw(const Vec3& tx, const Vec3& rx, const RadioParams& p,
                                const AlignmentModel& align = {})
{
    const double d = distance(tx, rx);
    if (!(d > 0.0)) {
        throw DomainError("received power needs distinct transmitter and receiver");
    }
    const AntennaPattern pattern{p.half_power_beamwidth_deg};
    const double gt = db_to_linear(antenna_gain_db(align.tx_offset_deg, pattern));
    const double gr = db_to_linear(antenna_gain_db(align.rx_offset_deg, pattern));
    const double k0 = std::pow(wavelength_m(p) / (4.0 * std::numbers::pi), 2.0);
    return k0 * p.transmit_power_mw * gt * gr * std::pow(d, -p.path_loss_exponent);
}

inline double noise_power_mw(const RadioParams& p)
{
    if (!(p.bandwidth_hz > 0.0)) {
        throw DomainError("bandwidth must be positive");
    }
    return db_to_linear(p.noise_psd_dbm_per_mhz) * (p.bandwidth_hz / 1e6);
}

/// Residual full-duplex self-interference at a relay receiver.
inline double si_power_mw(const RadioParams& p) { return p.si_cancellation * p.transmit_power_mw; }

inline double shannon_rate_bps(double sinr, const RadioParams& p)
{
    return p.transceiver_efficiency * p.bandwidth_hz * std::log2(1.0 + sinr);
}

struct HopBudget {
    double received_power_mw = 0.0;
    double noise_power_mw = 0.0;
    bool si_flag = false;
    double si_power_mw = 0.0;
    double sinr = 0.0;
    double rate_bps = 0.0;
};

inline HopBudget evaluate_hop(const Vec3& tx, const Vec3& rx, const RadioParams& p, bool si_flag,
                              const AlignmentModel& align = {})
{
    HopBudget h;
    h.received_power_mw = received_power_mw(tx, rx, p, align);
    h.noise_power_mw = noise_power_mw(p);
    h.si_flag = si_flag;
    h.si_power_mw = si_power_mw(p);
    h.sinr = h.received_power_mw / (h.noise_power_mw + (si_flag ? h.si_power_mw : 0.0));
    h.rate_bps = shannon_rate_bps(h.sinr, p);
    return h;
}

inline HopBudget evaluate_direct(const Flow& flow, const Scenario& s)
{
    return evaluate_hop(s.bs_pos, s.mr(flow.dest_mr), s.params, false);
}

/// Two-hop result; `available` is false when the relay node does not exist.
struct RelayEvaluation {
    bool available = false;
    HopBudget hop1;
    HopBudget hop2;
    double sinr = 0.0;
    double rate_bps = 0.0;
};

/// BS -> relay -> MR. The relay receives while it forwards, so only the first
/// hop carries self-interference. The link is limited by its weaker hop.
inline RelayEvaluation evaluate_relay(const Flow& flow, Mode relay, const Scenario& s)
{
    const int f = flow.dest_mr;
    const Vec3* relay_pos = nullptr;
    switch (relay) {
    case Mode::Left:
        if (f > 1) {
            relay_pos = &s.mr(f - 1);
        }
        break;
    case Mode::Right:
        if (f < s.mr_count()) {
            relay_pos = &s.mr(f + 1);
        }
        break;
    case Mode::Uav:
        relay_pos = &s.uav_pos;
        break;
    default:
        throw DomainError("evaluate_relay needs a relay mode");
    }

    RelayEvaluation r;
    if (relay_pos == nullptr) {
        return r;
    }
    r.available = true;
    r.hop1 = evaluate_hop(s.bs_pos, *relay_pos, s.params, true);
    r.hop2 = evaluate_hop(*relay_pos, s.mr(f), s.params, false);
    r.sinr = std::min(r.hop1.sinr, r.hop2.sinr);
    r.rate_bps = std::min(r.hop1.rate_bps, r.hop2.rate_bps);
    return r;
}

struct ModeValue {
    double sinr = 0.0;
    double rate_bps = 0.0;

    bool operator==(const ModeValue&) const = default;
};

/// SINR and rate of every transmit mode for one flow; zero where unavailable.
struct ModeEvaluation {
    std::array<ModeValue, 4> values{};

    const ModeValue& at(Mode m) const { return values.at(static_cast<std::size_t>(m)); }
    ModeValue& at(Mode m) { return values.at(static_cast<std::size_t>(m)); }

    bool operator==(const ModeEvaluation&) const = default;
};

inline ModeEvaluation evaluate_all_modes(const Flow& flow, const Scenario& s,
                                         const BlockageGraph& graph)
{
    ModeEvaluation out;
    const ModeSet forbidden = graph.forbidden_modes(flow.dest_mr);
    if (!forbidden.contains(Mode::Direct)) {
        const auto h = evaluate_direct(flow, s);
        out.at(Mode::Direct) = {h.sinr, h.rate_bps};
    }
    for (Mode m : kRelayModes) {
        if (forbidden.contains(m)) {
            continue;
        }
        const auto r = evaluate_relay(flow, m, s);
        if (r.available) {
            out.at(m) = {r.sinr, r.rate_bps};
        }
    }
    return out;
}

inline std::vector<ModeEvaluation> evaluate_instance(const Instance& inst, const BlockageGraph& graph)
{
    std::vector<ModeEvaluation> evals;
    evals.reserve(inst.flows.size());
    for (const auto& flow : inst.flows) {
        evals.push_back(evaluate_all_modes(flow, inst.scenario, graph));
    }
    return evals;
}

/// Blocked set from a received-power threshold: MRs whose direct power is at or below epsilon.
inline std::set<int> blocked_by_threshold(const Scenario& s, double epsilon_mw)
{
    std::set<int> blocked;
    for (int f = 1; f <= s.mr_count(); ++f) {
        if (received_power_mw(s.bs_pos, s.mr(f), s.params) <= epsilon_mw) {
            blocked.insert(f);
        }
    }
    return blocked;
}

// Doppler utilities.

inline double max_doppler_hz(double speed_mps, double carrier_hz)
{
    if (speed_mps < 0.0) {
        throw DomainError("speed must be non-negative");
    }
    return speed_mps / kSpeedOfLight * carrier_hz;
}

inline double doppler_shift_hz(double speed_mps, double carrier_hz, double theta_deg)
{
    return max_doppler_hz(speed_mps, carrier_hz) * std::cos(theta_deg * std::numbers::pi / 180.0);
}

/// Scales an estimator's relative shift in [-1, 1] to Hz.
inline double doppler_from_relative(double rel, double speed_mps, double carrier_hz)
{
    if (!(rel >= -1.0 && rel <= 1.0)) {
        throw DomainError("relative Doppler shift must lie in [-1, 1]");
    }
    return rel * max_doppler_hz(speed_mps, carrier_hz);
}

} // namespace railrelay

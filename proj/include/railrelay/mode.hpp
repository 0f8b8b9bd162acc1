#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace railrelay {

/// Transmission mode of one flow. The enumerator order is also the
/// lexicographic order used by the exhaustive search.
enum class Mode : std::uint8_t { Direct, Left, Right, Uav, Abandoned };

inline constexpr std::array<Mode, 4> kTransmitModes = {Mode::Direct, Mode::Left, Mode::Right,
                                                       Mode::Uav};
inline constexpr std::array<Mode, 3> kRelayModes = {Mode::Left, Mode::Right, Mode::Uav};

constexpr std::string_view to_string(Mode m)
{
    switch (m) {
    case Mode::Direct: return "S";
    case Mode::Left: return "L";
    case Mode::Right: return "R";
    case Mode::Uav: return "U";
    case Mode::Abandoned: return "X";
    }
    return "?";
}

/// Small bitset over Mode.
class ModeSet {
public:
    constexpr ModeSet() = default;
    constexpr ModeSet(std::initializer_list<Mode> modes)
    {
        for (auto m : modes) {
            insert(m);
        }
    }

    constexpr void insert(Mode m) { bits_ |= bit(m); }
    constexpr void erase(Mode m) { bits_ &= static_cast<std::uint8_t>(~bit(m)); }
    constexpr bool contains(Mode m) const { return (bits_ & bit(m)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(static_cast<unsigned>(bits_)); }

    constexpr bool operator==(const ModeSet&) const = default;

private:
    static constexpr std::uint8_t bit(Mode m) { return static_cast<std::uint8_t>(1U << static_cast<unsigned>(m)); }
    std::uint8_t bits_ = 0;
};

} // namespace railrelay

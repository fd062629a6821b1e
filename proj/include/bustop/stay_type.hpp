#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bustop {

enum class StayType : std::uint8_t { BusStop = 0, Signal, Congestion, Turn, AdHoc };

inline constexpr std::size_t kNumStayTypes = 5;
inline constexpr std::array<StayType, kNumStayTypes> kAllStayTypes = {
    StayType::BusStop, StayType::Signal, StayType::Congestion, StayType::Turn, StayType::AdHoc};

std::string_view to_string(StayType t);
std::optional<StayType> parse_stay_type(std::string_view name);

// Small value set of stay types, stored as a bitmask.
class TypeSet {
 public:
  constexpr TypeSet() = default;
  constexpr TypeSet(std::initializer_list<StayType> types) {
    for (auto t : types) insert(t);
  }

  static constexpr TypeSet from_bits(std::uint8_t bits) {
    TypeSet s;
    s.bits_ = bits & 0x1F;
    return s;
  }

  constexpr void insert(StayType t) { bits_ |= bit(t); }
  constexpr void erase(StayType t) { bits_ &= static_cast<std::uint8_t>(~bit(t)); }
  constexpr bool contains(StayType t) const { return (bits_ & bit(t)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  std::size_t size() const;
  std::vector<StayType> members() const;

  // AdHoc may only appear alone.
  constexpr bool adhoc_exclusive() const {
    return !contains(StayType::AdHoc) || bits_ == bit(StayType::AdHoc);
  }

  constexpr TypeSet operator|(TypeSet o) const { return from_bits(bits_ | o.bits_); }
  constexpr bool operator==(const TypeSet&) const = default;

 private:
  static constexpr std::uint8_t bit(StayType t) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t));
  }
  std::uint8_t bits_ = 0;
};

// `|`-separated names, e.g. "BusStop|Signal". Empty set formats as "".
std::string format_type_set(TypeSet s);
// Throws Error(MalformedRecord) on unknown names.
TypeSet parse_type_set(std::string_view text);

}  // namespace bustop

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace drampn {

enum class CoordKind : std::uint8_t { Rank, Bank };

// Position of a node in the device hierarchy. A Rank coordinate carries only
// the rank index; a Bank coordinate also carries the bank index and, when the
// device has bank groups, the group index.
struct Coordinate {
  CoordKind kind = CoordKind::Rank;
  std::uint32_t rank = 0;
  std::optional<std::uint32_t> group;
  std::optional<std::uint32_t> bank;

  static Coordinate of_rank(std::uint32_t r) { return {CoordKind::Rank, r, std::nullopt, std::nullopt}; }

  static Coordinate of_bank(std::uint32_t r, std::uint32_t b,
                            std::optional<std::uint32_t> g = std::nullopt) {
    return {CoordKind::Bank, r, g, b};
  }

  bool is_bank() const { return kind == CoordKind::Bank; }

  friend auto operator<=>(const Coordinate&, const Coordinate&) = default;
  friend bool operator==(const Coordinate&, const Coordinate&) = default;

  // rR[.gG][.bB]
  std::string to_string() const {
    std::string s = "r" + std::to_string(rank);
    if (group) s += ".g" + std::to_string(*group);
    if (bank) s += ".b" + std::to_string(*bank);
    return s;
  }
};

// Scope predicates over coordinate pairs, ordered tightest first.
enum class Scope : std::uint8_t { IntraBank, IntraBankGroup, IntraRank, Global };

inline const char* scope_name(Scope s) {
  switch (s) {
    case Scope::IntraBank: return "intra_bank";
    case Scope::IntraBankGroup: return "intra_bank_group";
    case Scope::IntraRank: return "intra_rank";
    case Scope::Global: return "global";
  }
  return "?";
}

inline std::optional<Scope> scope_from_name(const std::string& s) {
  if (s == "intra_bank") return Scope::IntraBank;
  if (s == "intra_bank_group") return Scope::IntraBankGroup;
  if (s == "intra_rank") return Scope::IntraRank;
  if (s == "global") return Scope::Global;
  return std::nullopt;
}

// Bank-level scopes only relate two bank coordinates; a rank-level endpoint
// can only be paired under IntraRank or Global.
inline bool scope_admits(Scope s, const Coordinate& a, const Coordinate& b) {
  switch (s) {
    case Scope::IntraBank:
      return a.is_bank() && b.is_bank() && a == b;
    case Scope::IntraBankGroup:
      return a.is_bank() && b.is_bank() && a.rank == b.rank && a.group == b.group;
    case Scope::IntraRank:
      return a.rank == b.rank;
    case Scope::Global:
      return true;
  }
  return false;
}

}  // namespace drampn

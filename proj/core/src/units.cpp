#include "redmash/units.hpp"

#include <array>
#include <string>

#include "redmash/errors.hpp"

namespace redmash::units {

namespace {

enum class Dimension { energy, length, mass, dipole, time };

struct UnitEntry {
  std::string_view name;
  Dimension dim;
  double in_atomic;
};

constexpr std::array<UnitEntry, 11> kUnits{{
    {"Ha", Dimension::energy, 1.0},
    {"eV", Dimension::energy, ev},
    {"cm-1", Dimension::energy, wavenumber},
    {"K", Dimension::energy, kelvin},
    {"bohr", Dimension::length, 1.0},
    {"A", Dimension::length, angstrom},
    {"me", Dimension::mass, 1.0},
    {"amu", Dimension::mass, amu},
    {"au_dipole", Dimension::dipole, 1.0},
    {"D", Dimension::dipole, debye},
    {"fs", Dimension::time, femtosecond},
}};

const UnitEntry& lookup(std::string_view name) {
  static constexpr UnitEntry au_time{"au_time", Dimension::time, 1.0};
  if (name == au_time.name) return au_time;
  for (const auto& u : kUnits) {
    if (u.name == name) return u;
  }
  throw UnknownUnit("unknown unit '" + std::string(name) + "'");
}

}  // namespace

double unit_convert(double value, std::string_view from, std::string_view to) {
  const UnitEntry& a = lookup(from);
  const UnitEntry& b = lookup(to);
  if (a.dim != b.dim) {
    throw UnknownUnit("cannot convert '" + std::string(from) + "' to '" + std::string(to) + "'");
  }
  if (a.in_atomic == b.in_atomic) return value;
  return value * a.in_atomic / b.in_atomic;
}

}  // namespace redmash::units

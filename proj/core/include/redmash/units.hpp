#pragma once

#include <string_view>

namespace redmash::units {

// Atomic units (hbar = m_e = e = a0 = 1). CODATA 2018.
inline constexpr double hartree_in_ev = 27.211386245988;
inline constexpr double ev = 1.0 / hartree_in_ev;               // 0.0367493221757 Ha
inline constexpr double wavenumber = 4.556335252912e-6;         // 1 cm^-1 in Ha
inline constexpr double kelvin = 3.166811563456e-6;             // k_B * 1 K in Ha
inline constexpr double angstrom = 1.0 / 0.529177210903;        // bohr per Angstrom
inline constexpr double amu = 1822.888486209;                   // electron masses
inline constexpr double debye = 0.3934302694;                   // e a0 per Debye
inline constexpr double femtosecond = 1.0 / 0.024188843265857;  // atomic time units per fs
inline constexpr double speed_of_light = 137.035999084;

// Converts between units of the same dimension. Recognised names:
//   energy: Ha, eV, cm-1, K;  length: bohr, A;  mass: me, amu;
//   dipole: au_dipole, D;  time: au_time, fs.
// Throws UnknownUnit for unrecognised names or mismatched dimensions.
double unit_convert(double value, std::string_view from, std::string_view to);

}  // namespace redmash::units

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "redmash/models.hpp"

namespace redmash {

// Times are in the model's own unit: 1/delta for the spin-boson model
// (energies there are in units of delta), atomic units for the cavity.
struct RunSettings {
  Method method = Method::mash;
  std::optional<double> dt;     // empty: default for (model, method)
  std::optional<double> t_max;  // empty: default for the model
  std::size_t n_traj = 10000;
  std::uint64_t seed = 1;
  std::size_t n_output = 1000;
  int bisections = 10;
};

struct Config {
  ModelKind model = ModelKind::spin_boson;
  SpinBosonConfig spin_boson;
  CavityConfig cavity;
  RunSettings run;

  double dt() const;
  double t_max() const;
  void validate() const;
};

double default_dt(ModelKind model, Method method);
double default_t_max(ModelKind model);

// Strict parse: unknown keys, wrong types and malformed JSON raise
// ConfigInvalid naming the field or the line and column.
Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

// Every field written explicitly, defaults included.
std::string dump_config(const Config& cfg);

}  // namespace redmash

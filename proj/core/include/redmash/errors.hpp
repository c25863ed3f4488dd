#pragma once

#include <stdexcept>
#include <string>

namespace redmash {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gap below the configured floor; the NAC diverges there.
class DegenerateGap : public Error {
 public:
  using Error::Error;
};

// S_z == 0 exactly, so sgn S_z and the active state are undefined.
class EquatorUndefined : public Error {
 public:
  using Error::Error;
};

class NotNormalized : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  QuadratureNotConverged(const std::string& what, double achieved)
      : Error(what), achieved_error_(achieved) {}
  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class ScheduleGap : public Error {
 public:
  using Error::Error;
};

class NoCrossing : public Error {
 public:
  using Error::Error;
};

// Hop requested where the coupling vector vanishes; the rescaling
// direction is undefined.
class ZeroNac : public Error {
 public:
  using Error::Error;
};

class ZeroDenominator : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class UnknownUnit : public Error {
 public:
  using Error::Error;
};

}  // namespace redmash

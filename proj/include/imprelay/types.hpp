#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace imprelay {

inline constexpr const char* kVersion = "0.1.0";

using Complex = std::complex<double>;

/// Engine behind every stochastic draw. One instance per frame substream.
using Rng = std::mt19937_64;

enum class NoiseState : std::uint8_t { good = 0, bad = 1 };

using StateSequence = std::vector<NoiseState>;

inline char to_char(NoiseState s) { return s == NoiseState::good ? 'G' : 'B'; }

// Error hierarchy. The C API maps each class onto a status code.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter outside its mathematical domain (probability > 1, negative SNR, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computation that produced (or was about to produce) a non-finite value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected during parsing or validation. `symbol()` names the
/// offending parameter.
class ConfigError : public Error {
 public:
  ConfigError(std::string symbol, const std::string& what)
      : Error(what), symbol_(std::move(symbol)) {}
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Per-frame substream. Master seed, frame index and stream are chained
/// through splitmix64, so neighbouring seeds do not alias each other's frames.
/// `stream` separates independent consumers inside one frame so that adding
/// draws to one consumer never shifts another.
Rng make_substream(std::uint64_t master_seed, std::uint64_t frame_index,
                   std::uint64_t stream);

}  // namespace imprelay

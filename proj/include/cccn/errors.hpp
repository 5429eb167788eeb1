#pragma once

#include <stdexcept>
#include <string>

namespace cccn {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InversionOfZero : Error {
  InversionOfZero() : Error("inversion of zero field element") {}
};

struct SingularMatrix : Error {
  SingularMatrix() : Error("singular matrix") {}
};

struct InconsistentStructure : Error {
  explicit InconsistentStructure(const std::string& what) : Error(what) {}
};

struct InvalidParameters : Error {
  explicit InvalidParameters(const std::string& what) : Error(what) {}
};

struct CyclicDeliveryGraph : Error {
  CyclicDeliveryGraph() : Error("delivery graph contains a cycle") {}
};

struct MixedGeneration : Error {
  MixedGeneration() : Error("symbols from different content objects") {}
};

struct NothingToEncode : Error {
  NothingToEncode() : Error("no inputs and no local segments") {}
};

struct NothingLeft : Error {
  NothingLeft() : Error("interest fully satisfied, nothing to forward") {}
};

struct InsufficientRank : Error {
  InsufficientRank() : Error("coding vectors do not reach full rank") {}
};

struct ZeroWindow : Error {
  ZeroWindow() : Error("empty measurement window") {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace cccn

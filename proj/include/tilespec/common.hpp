#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tilespec {

// Hard cap on materialized supertile size (letters / cells).
inline constexpr std::uint64_t kDefaultCellCap = 100'000'000;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rule-file syntax problems carry a source location.
struct SyntaxError : Error {
  int line = 0;
  int col = 0;
  SyntaxError(int line_, int col_, const std::string& msg)
      : Error("line " + std::to_string(line_) + ":" + std::to_string(col_) +
              ": " + msg),
        line(line_),
        col(col_) {}
};

struct UnknownSymbol : Error {
  using Error::Error;
};
struct DuplicateDefinition : Error {
  using Error::Error;
};
struct SemanticError : Error {
  using Error::Error;
};

struct LevelOverflow : Error {
  using Error::Error;
};
struct LevelOutOfRange : Error {
  using Error::Error;
};
struct PlacementCollision : Error {
  using Error::Error;
};
struct AlphabetMismatch : Error {
  using Error::Error;
};
struct NotIrreducible : Error {
  using Error::Error;
};
struct NotPrimitive : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct NoFixedPoint : Error {
  using Error::Error;
};
struct NotConstantLength : Error {
  using Error::Error;
};
struct PatchNotFound : Error {
  using Error::Error;
};
struct EmptyReturnSample : Error {
  using Error::Error;
};
struct NotConverged : Error {
  using Error::Error;
};
struct DepthTooShallow : Error {
  using Error::Error;
};

}  // namespace tilespec

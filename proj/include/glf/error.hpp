#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glf {

// Every failure the library reports carries one of these names; the HTTP
// layer forwards them verbatim in error bodies.
enum class Errc {
  DuplicateKey,
  UnknownVertex,
  UnknownEdge,
  NoMatch,
  TransformFailed,
  SyntaxError,
  ArityError,
  UnknownOperator,
  UnboundArgument,
  InvalidRef,
  NotAHypothesis,
  NotAGoal,
  NotApplicable,
  AmbiguousBranchGoal,
  ScopeError,
  InvalidConclusion,
  NonMatchingMP,
  NecessitationUnderHypothesis,
  NothingToUndo,
  ImportError,
  UnknownRule,
  UnknownStrategy,
  UnknownSystem,
  DuplicateName,
  InvalidSystem,
  WrongStyle,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code), detail_(detail) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace glf

#include "glf/error.hpp"

namespace glf {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::UnknownEdge: return "UnknownEdge";
    case Errc::NoMatch: return "NoMatch";
    case Errc::TransformFailed: return "TransformFailed";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::ArityError: return "ArityError";
    case Errc::UnknownOperator: return "UnknownOperator";
    case Errc::UnboundArgument: return "UnboundArgument";
    case Errc::InvalidRef: return "InvalidRef";
    case Errc::NotAHypothesis: return "NotAHypothesis";
    case Errc::NotAGoal: return "NotAGoal";
    case Errc::NotApplicable: return "NotApplicable";
    case Errc::AmbiguousBranchGoal: return "AmbiguousBranchGoal";
    case Errc::ScopeError: return "ScopeError";
    case Errc::InvalidConclusion: return "InvalidConclusion";
    case Errc::NonMatchingMP: return "NonMatchingMP";
    case Errc::NecessitationUnderHypothesis: return "NecessitationUnderHypothesis";
    case Errc::NothingToUndo: return "NothingToUndo";
    case Errc::ImportError: return "ImportError";
    case Errc::UnknownRule: return "UnknownRule";
    case Errc::UnknownStrategy: return "UnknownStrategy";
    case Errc::UnknownSystem: return "UnknownSystem";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::InvalidSystem: return "InvalidSystem";
    case Errc::WrongStyle: return "WrongStyle";
  }
  return "Unknown";
}

}  // namespace glf

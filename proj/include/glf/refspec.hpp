#pragma once

// Relative formula references: functions from a frame formula to a set of
// formulas, built from Identity / SuperOf / SubOf and the Both / Either / And /
// That combinators, plus Arg which names a rule argument and ignores the frame.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "glf/formula.hpp"

namespace glf {

namespace syntax {
struct Term;
}

// Required principal symbol of a referenced formula.  `op` matches compound
// formulas by operator; `atom` matches one specific atom.
struct Constraint {
  std::optional<std::string> op;
  std::optional<std::string> atom;

  bool accepts(const Formula& f) const;
  bool empty() const { return !op && !atom; }
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

class RefSpec {
 public:
  enum class Kind { Identity, SuperOf, SubOf, Both, Either, And, That, Arg };

  static RefSpec identity(Constraint c = {});
  static RefSpec super_of(Constraint c = {}, std::optional<int> operand = std::nullopt);
  static RefSpec sub_of(Constraint c = {}, std::optional<int> operand = std::nullopt);
  static RefSpec both(RefSpec a, RefSpec b);
  static RefSpec either(RefSpec a, RefSpec b);  // union
  static RefSpec and_then(RefSpec a, RefSpec b);
  static RefSpec that(RefSpec r);
  static RefSpec arg(std::string name);

  Kind kind() const { return kind_; }
  const Constraint& constraint() const { return constraint_; }
  std::optional<int> operand() const { return operand_; }
  const RefSpec& lhs() const { return *lhs_; }
  const RefSpec& rhs() const { return *rhs_; }
  const std::string& arg_name() const { return arg_; }

  // Surface syntax, e.g. "And(Arg(major), SubOf(operand=1))".
  std::string to_string() const;
  static RefSpec parse(std::string_view text);
  static RefSpec from_term(const syntax::Term& t);

  // Internal: raw constructor used by parsing so validation can report
  // misplaced operand indices instead of rejecting them outright.
  static RefSpec make(Kind k, Constraint c, std::optional<int> operand, std::string arg = {});

 private:
  Kind kind_ = Kind::Identity;
  Constraint constraint_;
  std::optional<int> operand_;
  std::shared_ptr<const RefSpec> lhs_;
  std::shared_ptr<const RefSpec> rhs_;
  std::string arg_;
};

struct RefContext {
  Formula frame;
  const FormulaSet* universe = nullptr;  // required by SuperOf
  const std::map<std::string, Formula>* args = nullptr;
};

// Throws UnboundArgument when an Arg name has no binding.
FormulaSet eval_ref(const RefSpec& spec, const RefContext& ctx);

struct RefIssue {
  enum class Kind { UnboundArgument, MisplacedOperandIndex, BadOperandIndex };
  Kind kind;
  std::string detail;
  friend bool operator==(const RefIssue&, const RefIssue&) = default;
};

std::vector<RefIssue> validate_ref(const RefSpec& spec, const std::vector<std::string>& rule_args);
std::string_view ref_issue_name(RefIssue::Kind k);

}  // namespace glf

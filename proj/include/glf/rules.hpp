#pragma once

// Declarative inference rules.
//
// A backward rule names its arguments, each drawn from a formula source, and
// lists the branches it opens on the goal: a goal expression plus any new
// hypotheses.  Linear (Fitch / Hilbert) rules cite earlier lines through
// premise patterns and state a conclusion; they may also open or close
// subproofs.  Hilbert axioms are schema formulas whose atoms are
// metavariables.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "glf/formula.hpp"
#include "glf/graphstore.hpp"
#include "glf/refspec.hpp"

namespace glf {

namespace syntax {
struct Term;
}

enum class Style { Backward, Fitch, Hilbert };
std::string_view style_name(Style s);
std::optional<Style> parse_style(std::string_view s);

// A formula-valued expression: a reference, or a schema whose atoms are
// replaced by bound argument formulas.
class FormulaExpr {
 public:
  FormulaExpr() = default;
  static FormulaExpr ref(RefSpec r);
  static FormulaExpr schema(Formula f);

  bool is_schema() const { return schema_.has_value(); }
  const RefSpec& refspec() const { return *ref_; }
  const Formula& schema_formula() const { return *schema_; }

  // Throws UnboundArgument for an unbound schema atom or Arg.
  FormulaSet eval(const RefContext& ctx) const;
  std::vector<std::string> names_used() const;
  std::string to_string() const;

 private:
  std::optional<RefSpec> ref_;
  std::optional<Formula> schema_;
  std::set<std::string> atoms_;
};

// Replaces every atom that has a binding; other atoms stay.
Formula substitute(const Formula& f, const std::map<std::string, Formula>& bindings);
// Binds the atoms of `schema` so that it becomes `instance`, extending
// `bindings`.  False when no consistent binding exists.
bool match_schema(const Formula& schema, const Formula& instance, std::map<std::string, Formula>& bindings);
std::set<std::string> atoms_of(const Formula& f);

struct ArgSource {
  enum class Kind { Ref, Universe, Hypotheses };
  Kind kind = Kind::Ref;
  RefSpec ref;
  Constraint constraint;

  std::string to_string() const;
};

struct BranchSpec {
  std::string role;
  FormulaExpr goal;
  std::vector<FormulaExpr> hypotheses;
};

struct PremiseSpec {
  std::string role;
  RefSpec pattern;  // frame: the cited line's formula; must be nonempty
};

enum class SubproofAction { None, OpenHypothesis, OpenStrict, CloseHypothesis, CloseStrict };

struct Rule {
  std::string name;
  Style style = Style::Backward;
  std::string description;

  // Backward.
  std::vector<std::pair<std::string, ArgSource>> args;
  std::vector<BranchSpec> branches;
  bool leaf_hypothesis = false;

  // Linear.
  std::vector<PremiseSpec> premises;
  std::vector<FormulaExpr> conclusion;  // alternatives; empty = user supplied
  SubproofAction subproof = SubproofAction::None;
  bool crosses_strict = false;
  bool closed = false;     // premises may not rest on open hypotheses
  bool symmetric = false;  // two premises may be cited in either order
  std::optional<Formula> axiom;

  std::vector<std::string> arg_names() const;
  // Number of child deductions an application produces.
  std::size_t premise_count() const;
  // Empty when the rule is well formed.
  std::vector<std::string> problems(const OperatorTable& table) const;

  nlohmann::json describe(const OperatorTable& table) const;

  // `name` overrides any name= field.
  static Rule from_term(const syntax::Term& t, const OperatorTable& table, Style default_style,
                        std::string name = {});
  static Rule axiom_from_term(const syntax::Term& t, const OperatorTable& table, std::string name = {});
};

// Per-tactic filter over a rule's candidate assignments.
struct Enumerator {
  bool nocycle = false;     // no repeated (goal, hypotheses) pair / no re-derived line,
                            // and no linear step once the target is derived
  bool hypotheses = false;  // formula arguments come from hypotheses in scope
  bool negation = false;    // assumption rules offer the negated target
  bool subformula = false;  // new formulas stay within the proof's universe
  bool sought = false;      // linear conclusions must be a current target or aim

  bool empty() const { return !nocycle && !hypotheses && !negation && !subformula && !sought; }
  std::string to_string() const;
  static Enumerator from_term(const syntax::Term& list);
  friend bool operator==(const Enumerator&, const Enumerator&) = default;
};

struct Assignment {
  std::optional<graph::VertexId> target;  // backward; unset means the focus
  std::map<std::string, Formula> args;    // formula arguments / metavariables
  std::map<std::string, int> lines;       // cited lines by premise role
  std::optional<Formula> result;

  nlohmann::json to_json() const;
  // Strings are formulas, integers are line numbers.
  static Assignment from_json(const nlohmann::json& j, const OperatorTable& table);
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// The part of a deductive system the engine needs: its formula language and
// rules.  Rules are shared, so systems that include another reuse the very
// same rule objects.
struct Calculus {
  std::string name;
  Style style = Style::Backward;
  OperatorTable table;
  std::vector<std::shared_ptr<const Rule>> rules;

  const Rule* find_rule(std::string_view rule) const;
  // Throws UnknownRule.
  const Rule& rule(std::string_view rule) const;
};

}  // namespace glf

#pragma once

// Tactic combinators with list-of-successes backtracking.
//
//   Atomic(rule [, filters])  one application; alternatives are the rule's
//                             candidate assignments in enumeration order
//   Try(t)                    t's successes; the unchanged state only if t
//                             has none
//   Many(t)                   t ; Many(t) while t succeeds, the unchanged
//                             state once it fails
//   AndThen(t1, t2)           every success of t1 followed by t2
//   Some(t)                   AndThen(t, Many(t))
//   OrElse(t1, t2)            AndThen(Try(t1), t2)
//
// A run stops at the first success of the whole tactic, so alternatives are
// only explored when something later fails.  Fuel counts rule applications
// across the run, including those later undone.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glf/engine.hpp"

namespace glf {

namespace syntax {
struct Term;
}

class Tactic {
 public:
  enum class Kind { Atomic, Many, Try, AndThen, Some, OrElse };

  static Tactic atomic(std::string rule, std::optional<Enumerator> filter = std::nullopt);
  static Tactic many(Tactic t);
  static Tactic attempt(Tactic t);
  static Tactic and_then(Tactic a, Tactic b);
  static Tactic some(Tactic t);
  static Tactic or_else(Tactic a, Tactic b);

  Kind kind() const { return kind_; }
  const std::string& rule() const { return rule_; }
  const std::optional<Enumerator>& filter() const { return filter_; }
  const Tactic& first() const { return *a_; }
  const Tactic& second() const { return *b_; }

  // Some and OrElse replaced by their definitions, recursively.
  Tactic desugared() const;
  std::vector<std::string> rules_used() const;
  std::string to_string() const;

  // Resolves bare names to named strategies.
  using Resolver = std::function<std::optional<Tactic>(const std::string&)>;
  static Tactic parse(std::string_view text, const Resolver& resolve = {});
  static Tactic from_term(const syntax::Term& t, const Resolver& resolve = {});

 private:
  Kind kind_ = Kind::Atomic;
  std::string rule_;
  std::optional<Enumerator> filter_;
  std::shared_ptr<const Tactic> a_;
  std::shared_ptr<const Tactic> b_;
};

struct TacticOutcome {
  enum class Status { Success, Failure, FuelExhausted };
  Status status = Status::Failure;
  std::vector<Step> trace;
  std::string reason;
  std::size_t applications = 0;

  bool success() const { return status == Status::Success; }
  nlohmann::json to_json() const;
};

std::string_view outcome_name(TacticOutcome::Status s);

inline constexpr std::size_t kDefaultFuel = 10000;

struct RunOptions {
  std::size_t fuel = kDefaultFuel;
  // Only accept runs that leave a complete proof.
  bool require_complete = false;
};

// On anything but Success the proof is restored to its state before the
// run.  Errors thrown by the engine are rethrown after the same rollback.
TacticOutcome run(const Tactic& t, Proof& p, const RunOptions& opts = {});

}  // namespace glf

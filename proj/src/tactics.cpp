#include "glf/tactics.hpp"

#include <pthread.h>

#include <algorithm>
#include <exception>

#include "glf/syntax.hpp"

namespace glf {

using syntax::Term;

Tactic Tactic::atomic(std::string rule, std::optional<Enumerator> filter) {
  Tactic t;
  t.kind_ = Kind::Atomic;
  t.rule_ = std::move(rule);
  t.filter_ = filter;
  return t;
}

Tactic Tactic::many(Tactic inner) {
  Tactic t;
  t.kind_ = Kind::Many;
  t.a_ = std::make_shared<const Tactic>(std::move(inner));
  return t;
}

Tactic Tactic::attempt(Tactic inner) {
  Tactic t;
  t.kind_ = Kind::Try;
  t.a_ = std::make_shared<const Tactic>(std::move(inner));
  return t;
}

Tactic Tactic::some(Tactic inner) {
  Tactic t;
  t.kind_ = Kind::Some;
  t.a_ = std::make_shared<const Tactic>(std::move(inner));
  return t;
}

Tactic Tactic::and_then(Tactic a, Tactic b) {
  Tactic t;
  t.kind_ = Kind::AndThen;
  t.a_ = std::make_shared<const Tactic>(std::move(a));
  t.b_ = std::make_shared<const Tactic>(std::move(b));
  return t;
}

Tactic Tactic::or_else(Tactic a, Tactic b) {
  Tactic t;
  t.kind_ = Kind::OrElse;
  t.a_ = std::make_shared<const Tactic>(std::move(a));
  t.b_ = std::make_shared<const Tactic>(std::move(b));
  return t;
}

Tactic Tactic::desugared() const {
  switch (kind_) {
    case Kind::Atomic: return *this;
    case Kind::Many: return many(a_->desugared());
    case Kind::Try: return attempt(a_->desugared());
    case Kind::AndThen: return and_then(a_->desugared(), b_->desugared());
    case Kind::Some: {
      Tactic body = a_->desugared();
      return and_then(body, many(body));
    }
    case Kind::OrElse: return and_then(attempt(a_->desugared()), b_->desugared());
  }
  return *this;
}

std::vector<std::string> Tactic::rules_used() const {
  if (kind_ == Kind::Atomic) return {rule_};
  auto out = a_->rules_used();
  if (b_) {
    auto more = b_->rules_used();
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

std::string Tactic::to_string() const {
  switch (kind_) {
    case Kind::Atomic:
      if (filter_) return "Atomic(" + rule_ + ", " + filter_->to_string() + ")";
      return "Atomic(" + rule_ + ")";
    case Kind::Many: return "Many(" + a_->to_string() + ")";
    case Kind::Try: return "Try(" + a_->to_string() + ")";
    case Kind::Some: return "Some(" + a_->to_string() + ")";
    case Kind::AndThen: return "AndThen(" + a_->to_string() + ", " + b_->to_string() + ")";
    case Kind::OrElse: return "OrElse(" + a_->to_string() + ", " + b_->to_string() + ")";
  }
  return "?";
}

Tactic Tactic::from_term(const Term& t, const Resolver& resolve) {
  if (t.is(Term::Kind::Ident)) {
    if (resolve) {
      if (auto found = resolve(t.text)) return *found;
    }
    throw Error(Errc::UnknownStrategy, "no strategy named '" + t.text + "' at " + t.where());
  }
  if (!t.is(Term::Kind::Call)) syntax::fail_at(t, "expected a tactic");
  if (t.text == "Atomic") {
    if (t.items.empty() || t.items.size() > 2) syntax::fail_at(t, "Atomic takes a rule name and optional filters");
    std::optional<Enumerator> filter;
    if (t.items.size() == 2) filter = Enumerator::from_term(t.items[1]);
    for (const auto& [k, v] : t.named) {
      if (k == "enumerator" || k == "filter") filter = Enumerator::from_term(v);
      else syntax::fail_at(v, "unknown Atomic parameter '" + k + "'");
    }
    return atomic(t.items[0].word(), filter);
  }
  if (!t.named.empty()) syntax::fail_at(t, t.text + " takes only tactics");
  auto one = [&]() {
    if (t.items.size() != 1) syntax::fail_at(t, t.text + " takes one tactic");
    return from_term(t.items[0], resolve);
  };
  auto fold = [&](Tactic (*make)(Tactic, Tactic)) {
    if (t.items.size() < 2) syntax::fail_at(t, t.text + " takes at least two tactics");
    Tactic acc = from_term(t.items.back(), resolve);
    for (std::size_t i = t.items.size() - 1; i-- > 0;) acc = make(from_term(t.items[i], resolve), std::move(acc));
    return acc;
  };
  if (t.text == "Many") return many(one());
  if (t.text == "Try") return attempt(one());
  if (t.text == "Some") return some(one());
  if (t.text == "AndThen") return fold(&Tactic::and_then);
  if (t.text == "OrElse") return fold(&Tactic::or_else);
  syntax::fail_at(t, "unknown tactic combinator '" + t.text + "'");
}

Tactic Tactic::parse(std::string_view text, const Resolver& resolve) {
  return from_term(syntax::parse_term(text), resolve);
}

std::string_view outcome_name(TacticOutcome::Status s) {
  switch (s) {
    case TacticOutcome::Status::Success: return "Success";
    case TacticOutcome::Status::Failure: return "Failure";
    case TacticOutcome::Status::FuelExhausted: return "FuelExhausted";
  }
  return "?";
}

nlohmann::json TacticOutcome::to_json() const {
  nlohmann::json j;
  j["status"] = std::string(outcome_name(status));
  auto tr = nlohmann::json::array();
  for (const auto& s : trace) {
    nlohmann::json e = s.assignment.to_json();
    e["rule"] = s.rule;
    tr.push_back(std::move(e));
  }
  j["trace"] = tr;
  j["applications"] = applications;
  if (!reason.empty()) j["reason"] = reason;
  return j;
}

namespace {

// Continuation-passing interpreter.  Each combinator receives the rest of
// the run as `k`; returning true means the whole run has succeeded and the
// state must be kept, false means the caller should try its next
// alternative.  Every path that returns false has undone its own work.
class Interpreter {
 public:
  using K = std::function<bool()>;

  Interpreter(Proof& p, std::size_t fuel) : p_(p), fuel_(fuel) {}

  bool exhausted() const { return exhausted_; }
  std::size_t applications() const { return used_; }

  bool run(const Tactic& t, const K& k) {
    switch (t.kind()) {
      case Tactic::Kind::Atomic: return atomic(t, k);
      case Tactic::Kind::Try: return attempt(t.first(), k);
      case Tactic::Kind::AndThen:
        return run(t.first(), [&] { return run(t.second(), k); });
      case Tactic::Kind::Many: return many(t.first(), k);
      case Tactic::Kind::Some:
        return run(t.first(), [&] { return many(t.first(), k); });
      case Tactic::Kind::OrElse:
        return attempt(t.first(), [&] { return run(t.second(), k); });
    }
    return false;
  }

 private:
  bool atomic(const Tactic& t, const K& k) {
    const Rule& rule = p_.calculus().rule(t.rule());
    const auto candidates = p_.applicable(rule, t.filter().value_or(Enumerator{}));
    for (const auto& a : candidates) {
      if (used_ >= fuel_) {
        exhausted_ = true;
        return false;
      }
      ++used_;
      p_.apply(rule, a);
      if (k()) return true;
      p_.undo();
      if (exhausted_) return false;
    }
    return false;
  }

  // Leaving the state alone is only an alternative when t has no success at
  // all; once t succeeds, backtracking stays among t's own alternatives.
  bool attempt(const Tactic& t, const K& k) {
    bool succeeded = false;
    if (run(t, [&] {
          succeeded = true;
          return k();
        }))
      return true;
    return !exhausted_ && !succeeded && k();
  }

  // Stops only when the body fails.  An iteration that leaves the proof
  // unchanged ends the loop, so a body that can succeed trivially still
  // terminates.
  bool many(const Tactic& body, const K& k) {
    const std::size_t before = p_.history_size();
    bool succeeded = false;
    if (run(body, [&] {
          succeeded = true;
          return p_.history_size() == before ? k() : many(body, k);
        }))
      return true;
    return !exhausted_ && !succeeded && k();
  }

  Proof& p_;
  std::size_t fuel_;
  std::size_t used_ = 0;
  bool exhausted_ = false;
};

}  // namespace

namespace {

// The interpreter recurses once per application on the current search path,
// so it gets a stack sized for the fuel rather than the caller's.
void on_big_stack(const std::function<void()>& f, std::size_t fuel) {
  const std::size_t want = std::clamp<std::size_t>(fuel * 16 * 1024, 8u << 20, 2048u << 20);
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, want);
  std::exception_ptr err;
  auto body = [&] {
    try {
      f();
    } catch (...) {
      err = std::current_exception();
    }
  };
  using Body = decltype(body);
  pthread_t th;
  int rc = pthread_create(
      &th, &attr, [](void* arg) -> void* {
        (*static_cast<Body*>(arg))();
        return nullptr;
      },
      &body);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    body();
  } else {
    pthread_join(th, nullptr);
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace

TacticOutcome run(const Tactic& t, Proof& p, const RunOptions& opts) {
  const std::size_t start_history = p.history_size();
  const std::size_t start_steps = p.steps().size();
  Interpreter in(p, opts.fuel);
  bool ok = false;
  try {
    on_big_stack([&] { ok = in.run(t, [&] { return !opts.require_complete || p.complete(); }); }, opts.fuel);
  } catch (...) {
    while (p.history_size() > start_history) p.undo();
    throw;
  }
  TacticOutcome out;
  out.applications = in.applications();
  if (ok) {
    out.status = TacticOutcome::Status::Success;
    out.trace.assign(p.steps().begin() + static_cast<std::ptrdiff_t>(start_steps), p.steps().end());
    for (auto& s : out.trace) s.assignment.target.reset();
  } else if (in.exhausted()) {
    out.status = TacticOutcome::Status::FuelExhausted;
    out.reason = "fuel of " + std::to_string(opts.fuel) + " applications exhausted";
  } else {
    out.status = TacticOutcome::Status::Failure;
    out.reason = opts.require_complete ? "no complete proof found" : "tactic failed";
  }
  return out;
}

}  // namespace glf

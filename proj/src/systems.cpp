#include "glf/systems.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "glf/syntax.hpp"

namespace glf {

using syntax::Term;

const Tactic* DeductiveSystem::find_strategy(std::string_view n) const {
  for (const auto& [k, t] : strategies)
    if (k == n) return &t;
  return nullptr;
}

const Tactic& DeductiveSystem::strategy(std::string_view n) const {
  if (const Tactic* t = find_strategy(n)) return *t;
  throw Error(Errc::UnknownStrategy, "system " + name + " has no strategy '" + std::string(n) + "'");
}

nlohmann::json DeductiveSystem::describe(bool with_rules) const {
  nlohmann::json j;
  j["name"] = name;
  j["style"] = std::string(style_name(style));
  if (!description.empty()) j["description"] = description;
  j["includes"] = includes;
  auto ops = nlohmann::json::array();
  for (const auto& op : table.operators())
    ops.push_back({{"symbol", op.symbol}, {"arity", op.arity}, {"infix", op.infix},
                   {"display", op.display.empty() ? op.symbol : op.display}});
  j["operators"] = ops;
  auto ex = nlohmann::json::array();
  for (const auto& e : examples) {
    nlohmann::json item{{"sexpr", e}};
    try {
      item["infix"] = render(table, parse_formula(table, e), RenderStyle::Infix);
    } catch (const Error&) {
    }
    ex.push_back(std::move(item));
  }
  j["examples"] = ex;
  auto st = nlohmann::json::array();
  for (const auto& [k, t] : strategies) st.push_back({{"name", k}, {"tactic", t.to_string()}});
  j["strategies"] = st;
  j["defaultStrategy"] = default_strategy;
  if (with_rules) {
    auto rs = nlohmann::json::array();
    for (const auto& r : rules) rs.push_back(r->describe(table));
    j["rules"] = rs;
  } else {
    auto rs = nlohmann::json::array();
    for (const auto& r : rules) rs.push_back(r->name);
    j["rules"] = rs;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Authoring files

namespace {

struct Block {
  std::string name;
  std::vector<std::string> includes;
  std::vector<Term> terms;  // starting with the System(...) term
};

std::vector<Block> split_blocks(std::string_view source) {
  std::vector<Block> out;
  for (auto& t : syntax::parse_terms(source)) {
    if (t.is_call("System")) {
      Block b;
      const Term* n = t.find("name");
      if (!n) syntax::fail_at(t, "System needs a name");
      b.name = n->word();
      out.push_back(std::move(b));
    } else if (out.empty()) {
      syntax::fail_at(t, "declaration before any System(...)");
    }
    if (t.is_call("Include")) {
      if (t.items.size() != 1) syntax::fail_at(t, "Include takes one system name");
      out.back().includes.push_back(t.items[0].word());
    }
    out.back().terms.push_back(std::move(t));
  }
  return out;
}

using Lookup = std::function<std::shared_ptr<const DeductiveSystem>(const std::string&)>;

Operator operator_from(const Term& t) {
  Operator op;
  for (const auto& [k, v] : t.named) {
    if (k == "symbol") op.symbol = v.word();
    else if (k == "arity") {
      if (!v.is(Term::Kind::Int)) syntax::fail_at(v, "arity must be an integer");
      op.arity = static_cast<int>(v.number);
    } else if (k == "infix") {
      if (v.is_word("true")) op.infix = true;
      else if (v.is_word("false")) op.infix = false;
      else syntax::fail_at(v, "expected true or false");
    } else if (k == "display") op.display = v.word();
    else syntax::fail_at(v, "unknown Operator field '" + k + "'");
  }
  if (op.symbol.empty()) syntax::fail_at(t, "Operator needs a symbol");
  return op;
}

void merge_table(OperatorTable& into, const OperatorTable& from) {
  for (const auto& op : from.operators()) {
    if (const Operator* have = into.find(op.symbol)) {
      if (have->arity != op.arity)
        throw Error(Errc::InvalidSystem, "operator " + op.symbol + " declared with arities " +
                                             std::to_string(have->arity) + " and " + std::to_string(op.arity));
      continue;
    }
    into.add(op);
  }
}

DeductiveSystem build(const Block& b, const Lookup& lookup) {
  DeductiveSystem sys;
  sys.name = b.name;
  const Term& head = b.terms.front();
  for (const auto& [k, v] : head.named) {
    if (k == "name") continue;
    if (k == "style") {
      auto s = parse_style(v.word());
      if (!s) syntax::fail_at(v, "unknown style '" + v.word() + "'");
      sys.style = *s;
    } else if (k == "description") {
      sys.description = v.word();
    } else if (k == "defaultStrategy") {
      sys.default_strategy = v.word();
    } else {
      syntax::fail_at(v, "unknown System field '" + k + "'");
    }
  }

  // The operator table has to be complete before rules and examples parse.
  OperatorTable full;
  std::vector<std::shared_ptr<const DeductiveSystem>> included;
  for (const auto& inc : b.includes) {
    if (!lookup) throw Error(Errc::UnknownSystem, "system " + sys.name + " includes unknown system '" + inc + "'");
    auto dep = lookup(inc);
    merge_table(full, dep->table);
    included.push_back(dep);
  }
  for (const auto& t : b.terms)
    if (t.is_call("Operator")) {
      Operator op = operator_from(t);
      sys.table.add(op);
      merge_table(full, OperatorTable({op}));
    }

  auto resolver = [&](const std::string& n) -> std::optional<Tactic> {
    if (const Tactic* t = sys.find_strategy(n)) return *t;
    for (const auto& dep : included)
      if (const Tactic* t = dep->find_strategy(n)) return *t;
    return std::nullopt;
  };

  for (std::size_t i = 1; i < b.terms.size(); ++i) {
    const Term& t = b.terms[i];
    if (t.is_call("Include") || t.is_call("Operator")) continue;
    if (t.is_call("Example")) {
      if (t.items.size() != 1 || !t.items[0].is(Term::Kind::String)) syntax::fail_at(t, "Example takes one formula string");
      sys.examples.push_back(to_sexpr(parse_formula(full, t.items[0].text)));
    } else if (t.is_call("Strategy")) {
      if (t.items.size() != 2) syntax::fail_at(t, "Strategy takes a name and a tactic");
      std::string n = t.items[0].word();
      Tactic tac = Tactic::from_term(t.items[1], resolver);
      auto it = std::find_if(sys.strategies.begin(), sys.strategies.end(), [&](const auto& s) { return s.first == n; });
      if (it != sys.strategies.end()) throw Error(Errc::DuplicateName, "strategy " + n + " declared twice in " + sys.name);
      sys.strategies.emplace_back(n, std::move(tac));
    } else if (t.is(Term::Kind::Bind) || t.is_call("Rule") || t.is_call("Axiom")) {
      const Term& body = t.is(Term::Kind::Bind) ? t.items.front() : t;
      std::string n = t.is(Term::Kind::Bind) ? t.text : std::string();
      Rule r = body.is_call("Axiom") ? Rule::axiom_from_term(body, full, n)
                                     : Rule::from_term(body, full, sys.style, n);
      sys.rules.push_back(std::make_shared<const Rule>(std::move(r)));
    } else {
      syntax::fail_at(t, "unknown declaration");
    }
  }
  sys.includes = b.includes;
  return sys;
}

}  // namespace

std::vector<DeductiveSystem> parse_systems(std::string_view source) {
  std::vector<DeductiveSystem> out;
  std::map<std::string, std::shared_ptr<const DeductiveSystem>> local;
  for (const auto& b : split_blocks(source)) {
    out.push_back(build(b, [&](const std::string& n) {
      auto it = local.find(n);
      if (it == local.end()) throw Error(Errc::UnknownSystem, "system " + b.name + " includes unknown system '" + n + "'");
      return it->second;
    }));
    auto seen = std::make_shared<DeductiveSystem>(out.back());
    for (const auto& inc : b.includes) merge_table(seen->table, local.at(inc)->table);
    local[b.name] = std::move(seen);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Registry

void Registry::add(DeductiveSystem sys) {
  {
    std::lock_guard lock(*mu_);
    if (declared_.contains(sys.name)) throw Error(Errc::DuplicateName, "system " + sys.name + " is already registered");
    declared_.emplace(sys.name, std::make_shared<const DeductiveSystem>(sys));
    order_.push_back(sys.name);
    cache_.clear();
  }
  try {
    check(sys.name);
  } catch (...) {
    std::lock_guard lock(*mu_);
    declared_.erase(sys.name);
    order_.pop_back();
    cache_.clear();
    throw;
  }
}

void Registry::replace(DeductiveSystem sys) {
  std::shared_ptr<const DeductiveSystem> old;
  {
    std::lock_guard lock(*mu_);
    auto it = declared_.find(sys.name);
    if (it == declared_.end()) throw Error(Errc::UnknownSystem, "no system named '" + sys.name + "'");
    old = it->second;
    it->second = std::make_shared<const DeductiveSystem>(sys);
    cache_.clear();
  }
  try {
    for (const auto& n : names()) check(n);
  } catch (...) {
    std::lock_guard lock(*mu_);
    declared_[sys.name] = old;
    cache_.clear();
    throw;
  }
}

void Registry::load(std::string_view source) {
  auto blocks = split_blocks(source);
  // Add in include order so a file may declare a system before the ones it
  // includes.
  std::set<std::string> pending;
  for (const auto& b : blocks) pending.insert(b.name);
  while (!blocks.empty()) {
    auto ready = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) {
      return std::none_of(b.includes.begin(), b.includes.end(), [&](const auto& i) { return pending.contains(i); });
    });
    if (ready == blocks.end())
      throw Error(Errc::InvalidSystem, "include cycle among systems starting at " + blocks.front().name);
    add(build(*ready, [this](const std::string& n) { return get(n); }));
    pending.erase(ready->name);
    blocks.erase(ready);
  }
}

void Registry::load_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".glf") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw Error(Errc::InvalidSystem, "cannot read " + f.string());
    std::stringstream ss;
    ss << in.rdbuf();
    all += ss.str();
    all += "\n";
  }
  load(all);
}

std::vector<std::string> Registry::names() const {
  std::lock_guard lock(*mu_);
  return order_;
}

bool Registry::contains(std::string_view name) const {
  std::lock_guard lock(*mu_);
  return declared_.contains(name);
}

std::shared_ptr<const DeductiveSystem> Registry::get(std::string_view name) const {
  std::lock_guard lock(*mu_);
  std::vector<std::string> stack;
  return resolve(std::string(name), stack);
}

std::shared_ptr<const DeductiveSystem> Registry::resolve(const std::string& name, std::vector<std::string>& stack) const {
  if (auto it = cache_.find(name); it != cache_.end()) return it->second;
  auto it = declared_.find(name);
  if (it == declared_.end()) throw Error(Errc::UnknownSystem, "no system named '" + name + "'");
  if (std::find(stack.begin(), stack.end(), name) != stack.end())
    throw Error(Errc::InvalidSystem, "system " + name + " includes itself");
  stack.push_back(name);
  const DeductiveSystem& own = *it->second;
  auto full = std::make_shared<DeductiveSystem>(own);
  full->table = OperatorTable();
  full->rules.clear();
  full->strategies.clear();
  std::set<std::string> seen;
  for (const auto& inc : own.includes) {
    auto dep = resolve(inc, stack);
    if (dep->style != own.style)
      throw Error(Errc::InvalidSystem, "system " + name + " (" + std::string(style_name(own.style)) + ") includes " +
                                           inc + " (" + std::string(style_name(dep->style)) + ")");
    merge_table(full->table, dep->table);
    for (const auto& r : dep->rules)
      if (seen.insert(r->name).second) full->rules.push_back(r);
    for (const auto& s : dep->strategies)
      if (!own.find_strategy(s.first) && !full->find_strategy(s.first)) full->strategies.push_back(s);
  }
  merge_table(full->table, own.table);
  for (const auto& r : own.rules) {
    if (!seen.insert(r->name).second) throw Error(Errc::InvalidSystem, "rule " + r->name + " declared twice in " + name);
    full->rules.push_back(r);
  }
  // Own strategies first: they take precedence and lead the catalog.
  full->strategies.insert(full->strategies.begin(), own.strategies.begin(), own.strategies.end());
  stack.pop_back();
  cache_.emplace(name, full);
  return full;
}

void Registry::check(const std::string& name) const {
  auto sys = get(name);
  std::vector<std::string> issues;
  for (const auto& r : sys->rules) {
    if (r->style != sys->style && !(sys->style == Style::Hilbert && r->axiom))
      issues.push_back("rule " + r->name + " is a " + std::string(style_name(r->style)) + " rule");
    for (const auto& p : r->problems(sys->table)) issues.push_back("rule " + r->name + ": " + p);
  }
  for (const auto& [n, t] : sys->strategies)
    for (const auto& r : t.rules_used())
      if (!sys->find_rule(r)) issues.push_back("strategy " + n + " uses unknown rule " + r);
  if (!sys->find_strategy(sys->default_strategy) && !sys->strategies.empty())
    issues.push_back("default strategy " + sys->default_strategy + " is not declared");
  for (const auto& e : sys->examples) {
    try {
      parse_formula(sys->table, e);
    } catch (const Error& err) {
      issues.push_back("example " + e + ": " + err.what());
    }
  }
  if (!issues.empty()) {
    std::string all;
    for (const auto& i : issues) all += (all.empty() ? "" : "; ") + i;
    throw Error(Errc::InvalidSystem, "system " + name + ": " + all);
  }
}

nlohmann::json Registry::catalog() const {
  auto out = nlohmann::json::array();
  for (const auto& n : names()) out.push_back(get(n)->describe(false));
  return out;
}

Registry Registry::builtin() {
  Registry r;
  std::string all;
  for (const auto& [file, text] : builtin_sources()) all += text + "\n";
  r.load(all);
  return r;
}

// ---------------------------------------------------------------------------

ProveResult prove_with_strategy(std::shared_ptr<const DeductiveSystem> sys, const Formula& goal,
                                std::string_view strategy, std::size_t fuel) {
  const Tactic& t = sys->strategy(strategy);
  ProveResult res;
  res.proof = Proof::create(sys, goal);
  RunOptions opts;
  opts.fuel = fuel;
  opts.require_complete = true;
  res.outcome = run(t, *res.proof, opts);
  return res;
}

}  // namespace glf

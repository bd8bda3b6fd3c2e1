#pragma once

// Declaration terms shared by the system-authoring files and the tactic
// language:
//
//   term    := primary ("=:" term)?
//   primary := STRING | INT | IDENT ("(" [arg ("," arg)*] ")")? | "[" [term ("," term)*] "]"
//   arg     := IDENT "=" term | term
//
// "--" starts a comment running to the end of the line.  Identifiers are any
// run of characters other than whitespace, quotes, brackets, commas, '=' and
// ':', so operator symbols such as -> can appear bare (operator=->).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "glf/error.hpp"

namespace glf::syntax {

struct Term {
  enum class Kind { Ident, String, Int, Call, List, Bind };

  Kind kind = Kind::Ident;
  std::string text;  // identifier, string contents, call name, or bound name
  std::int64_t number = 0;
  std::vector<Term> items;  // call positional args, list items, or [value] for Bind
  std::vector<std::pair<std::string, Term>> named;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is(Kind k) const { return kind == k; }
  bool is_call(std::string_view name) const { return kind == Kind::Call && text == name; }
  // Bare identifier or a call with no arguments.
  bool is_word(std::string_view name) const;
  const Term* find(std::string_view key) const;
  // Identifier or string contents.
  std::string word() const;
  std::string where() const;
  std::string to_string() const;
};

std::vector<Term> parse_terms(std::string_view source);
Term parse_term(std::string_view source);

[[noreturn]] void fail_at(const Term& t, const std::string& what);

}  // namespace glf::syntax

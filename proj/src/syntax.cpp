#include "glf/syntax.hpp"

#include <cctype>

namespace glf::syntax {

namespace {

class TermParser {
 public:
  explicit TermParser(std::string_view src) : src_(src) {}

  std::vector<Term> all() {
    std::vector<Term> out;
    skip();
    while (pos_ < src_.size()) {
      out.push_back(term());
      skip();
      // Top-level declarations may optionally be separated by commas or ';'.
      while (pos_ < src_.size() && (src_[pos_] == ',' || src_[pos_] == ';')) {
        ++pos_;
        skip();
      }
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::SyntaxError, what + " at line " + std::to_string(line_) + ", column " + std::to_string(col()));
  }

  std::size_t col() const { return pos_ - line_start_ + 1; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  static bool ident_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != '[' && c != ']' &&
           c != ',' && c != '"' && c != '=' && c != ':' && c != ';';
  }

  bool at(char c) {
    skip();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool at_bind() {
    skip();
    return pos_ + 1 < src_.size() && src_[pos_] == '=' && src_[pos_ + 1] == ':';
  }

  void expect(char c) {
    if (!at(c)) fail(std::string("expected '") + c + "'");
    advance();
  }

  Term stamp() const {
    Term t;
    t.line = line_;
    t.column = col();
    return t;
  }

  Term term() {
    Term t = primary();
    if (at_bind()) {
      if (!t.is(Term::Kind::String) && !t.is(Term::Kind::Ident)) fail("'=:' must follow a name");
      pos_ += 2;
      Term b = t;
      b.kind = Term::Kind::Bind;
      b.items = {term()};
      return b;
    }
    return t;
  }

  Term primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    Term t = stamp();
    char c = src_[pos_];
    if (c == '"') {
      advance();
      std::string s;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
        s += src_[pos_];
        advance();
      }
      if (pos_ >= src_.size()) fail("unterminated string");
      advance();
      t.kind = Term::Kind::String;
      t.text = std::move(s);
      return t;
    }
    if (c == '[') {
      advance();
      t.kind = Term::Kind::List;
      if (!at(']')) {
        t.items.push_back(term());
        while (at(',')) {
          advance();
          t.items.push_back(term());
        }
      }
      expect(']');
      return t;
    }
    if (!ident_char(c)) fail(std::string("unexpected '") + c + "'");
    std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
    std::string word(src_.substr(start, pos_ - start));
    bool digits = !word.empty();
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(word[i])) && !(i == 0 && word[i] == '-' && word.size() > 1))
        digits = false;
    }
    if (digits) {
      t.kind = Term::Kind::Int;
      t.number = std::stoll(word);
      t.text = word;
      return t;
    }
    t.text = std::move(word);
    // A call's '(' must follow the name directly.
    if (pos_ < src_.size() && src_[pos_] == '(') {
      advance();
      t.kind = Term::Kind::Call;
      if (!at(')')) {
        argument(t);
        while (at(',')) {
          advance();
          argument(t);
        }
      }
      expect(')');
      return t;
    }
    t.kind = Term::Kind::Ident;
    return t;
  }

  void argument(Term& call) {
    skip();
    std::size_t save_pos = pos_, save_line = line_, save_start = line_start_;
    if (pos_ < src_.size() && ident_char(src_[pos_])) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
      std::string key(src_.substr(start, pos_ - start));
      skip();
      if (pos_ < src_.size() && src_[pos_] == '=' && !(pos_ + 1 < src_.size() && src_[pos_ + 1] == ':')) {
        advance();
        call.named.emplace_back(std::move(key), term());
        return;
      }
      pos_ = save_pos;
      line_ = save_line;
      line_start_ = save_start;
    }
    call.items.push_back(term());
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

}  // namespace

bool Term::is_word(std::string_view name) const {
  return (kind == Kind::Ident && text == name) ||
         (kind == Kind::Call && text == name && items.empty() && named.empty());
}

const Term* Term::find(std::string_view key) const {
  for (const auto& [k, v] : named)
    if (k == key) return &v;
  return nullptr;
}

std::string Term::word() const {
  if (kind == Kind::Ident || kind == Kind::String || kind == Kind::Int) return text;
  if (kind == Kind::Call && items.empty() && named.empty()) return text;
  fail_at(*this, "expected a name");
}

std::string Term::where() const { return "line " + std::to_string(line) + ", column " + std::to_string(column); }

std::string Term::to_string() const {
  switch (kind) {
    case Kind::Ident:
    case Kind::Int:
      return text;
    case Kind::String:
      return "\"" + text + "\"";
    case Kind::Bind:
      return "\"" + text + "\" =: " + items.front().to_string();
    case Kind::List: {
      std::string out = "[";
      for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i].to_string();
      return out + "]";
    }
    case Kind::Call: {
      std::string out = text + "(";
      bool first = true;
      for (const auto& it : items) {
        out += (first ? "" : ", ") + it.to_string();
        first = false;
      }
      for (const auto& [k, v] : named) {
        out += (first ? "" : ", ") + k + "=" + v.to_string();
        first = false;
      }
      return out + ")";
    }
  }
  return {};
}

std::vector<Term> parse_terms(std::string_view source) { return TermParser(source).all(); }

Term parse_term(std::string_view source) {
  auto terms = parse_terms(source);
  if (terms.size() != 1) throw Error(Errc::SyntaxError, "expected exactly one term, found " + std::to_string(terms.size()));
  return std::move(terms.front());
}

void fail_at(const Term& t, const std::string& what) {
  throw Error(Errc::SyntaxError, what + " at " + t.where());
}

}  // namespace glf::syntax

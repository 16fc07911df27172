#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "contracts/rcl.hpp"

namespace contracts {

std::string format_diagnostic(const Diagnostic& d, const std::string& file) {
  std::string sev = d.severity == Severity::Error ? "error" : "warning";
  return file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.col) + ": " +
         sev + "[" + d.code + "]: " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void sort_diagnostics(std::vector<Diagnostic>& ds) {
  std::stable_sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.span.line, a.span.col, a.code) < std::tie(b.span.line, b.span.col, b.code);
  });
}

namespace {

enum class Tok {
  End, Ident, Number,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma, Semi, Colon, Bar, Dot, Plus, Slash,
  EqEq, Assign, Ne, Lt, Le, Gt, Ge, Arrow, IffArrow, FnArrow, NotIn,
  // keywords
  KwNode, KwContext, KwInputs, KwOutputs, KwTopics, KwMatches, KwAssume, KwGuarantee,
  KwForall, KwExists, KwExistsUnique, KwIn, KwOut, KwAnd, KwOr, KwNot, KwTrue, KwFalse,
  KwReal, KwNatural, KwBool,
};

struct Keyword {
  const char* text;
  Tok tok;
};

constexpr Keyword kKeywords[] = {
    {"node", Tok::KwNode},         {"context", Tok::KwContext},
    {"inputs", Tok::KwInputs},     {"outputs", Tok::KwOutputs},
    {"topics", Tok::KwTopics},     {"matches", Tok::KwMatches},
    {"assume", Tok::KwAssume},     {"guarantee", Tok::KwGuarantee},
    {"forall", Tok::KwForall},     {"exists", Tok::KwExists},
    {"in", Tok::KwIn},             {"out", Tok::KwOut},
    {"and", Tok::KwAnd},           {"or", Tok::KwOr},
    {"not", Tok::KwNot},           {"TRUE", Tok::KwTrue},
    {"FALSE", Tok::KwFalse},       {"REAL", Tok::KwReal},
    {"NATURAL", Tok::KwNatural},   {"BOOL", Tok::KwBool},
};

bool is_keyword_tok(Tok t) { return t >= Tok::KwNode; }

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Span span;
};

struct ParseError {
  Diagnostic diag;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) break;
    }
    return out;
  }

 private:
  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  char peek(size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token make(Tok k, size_t start, int line, int col) {
    Token t;
    t.kind = k;
    t.text = std::string(src_.substr(start, pos_ - start));
    t.span = {line, col, static_cast<int>(pos_ - start)};
    return t;
  }

  Token next() {
    int line = line_, col = col_;
    size_t start = pos_;
    if (pos_ >= src_.size()) {
      Token t;
      t.kind = Tok::End;
      t.span = {line, col, 0};
      return t;
    }
    char c = peek();
    if (ident_start(c)) {
      while (ident_char(peek())) advance();
      while (peek() == '\'') advance();
      std::string_view word = src_.substr(start, pos_ - start);
      if (word == "exists" && peek() == '!' && peek(1) != '=') {
        advance();
        return make(Tok::KwExistsUnique, start, line, col);
      }
      for (auto& kw : kKeywords)
        if (word == kw.text) return make(kw.tok, start, line, col);
      return make(Tok::Ident, start, line, col);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      return make(Tok::Number, start, line, col);
    }
    auto single = [&](Tok k) {
      advance();
      return make(k, start, line, col);
    };
    auto multi = [&](Tok k, int n) {
      for (int i = 0; i < n; ++i) advance();
      return make(k, start, line, col);
    };
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case ',': return single(Tok::Comma);
      case ';': return single(Tok::Semi);
      case ':': return single(Tok::Colon);
      case '|': return single(Tok::Bar);
      case '.': return single(Tok::Dot);
      case '+': return single(Tok::Plus);
      case '/': return single(Tok::Slash);
      case '=':
        if (peek(1) == '=') return multi(Tok::EqEq, 2);
        return single(Tok::Assign);
      case '!':
        if (peek(1) == '=') return multi(Tok::Ne, 2);
        if (peek(1) == 'i' && peek(2) == 'n' && !ident_char(peek(3)) && peek(3) != '\'')
          return multi(Tok::NotIn, 3);
        break;
      case '<':
        if (peek(1) == '-' && peek(2) == '>') return multi(Tok::IffArrow, 3);
        if (peek(1) == '=') return multi(Tok::Le, 2);
        return single(Tok::Lt);
      case '>':
        if (peek(1) == '=') return multi(Tok::Ge, 2);
        return single(Tok::Gt);
      case '-':
        if (peek(1) == '-' && peek(2) == '>') return multi(Tok::FnArrow, 3);
        if (peek(1) == '>') return multi(Tok::Arrow, 2);
        break;
      default:
        break;
    }
    std::string shown = (c >= 32 && c < 127) ? std::string("'") + c + "'"
                                             : "byte " + std::to_string(static_cast<unsigned char>(c));
    throw ParseError{error_at({line, col, 1}, "unexpected-char", "unexpected character " + shown)};
  }
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Document document(std::vector<Diagnostic>& diags) {
    Document doc;
    if (at(Tok::End)) {
      diags.push_back(error_at(cur().span, "empty-document", "expected at least one clause"));
      return doc;
    }
    while (!at(Tok::End)) {
      try {
        if (at(Tok::KwContext)) {
          doc.contexts.push_back(context_clause());
          doc.order.push_back(ClauseKind::Context);
        } else if (at(Tok::KwNode)) {
          doc.contracts.push_back(node_clause());
          doc.order.push_back(ClauseKind::Node);
        } else {
          fail("syntax", "expected 'node' or 'context' but found " + describe(cur()));
        }
      } catch (ParseError& e) {
        diags.push_back(e.diag);
        // resynchronise on the next clause keyword
        if (!at(Tok::End)) ++pos_;
        while (!at(Tok::End) && !at(Tok::KwNode) && !at(Tok::KwContext)) ++pos_;
      }
    }
    return doc;
  }

  FormulaPtr formula_only() {
    auto f = formula();
    if (!at(Tok::End)) fail("syntax", "unexpected " + describe(cur()) + " after formula");
    return f;
  }

  TermPtr term_only() {
    auto t = term();
    if (!at(Tok::End)) fail("syntax", "unexpected " + describe(cur()) + " after term");
    return t;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& look(size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return cur().kind == k; }

  [[noreturn]] void fail(const std::string& code, const std::string& msg) const {
    throw ParseError{error_at(cur().span, code, msg)};
  }

  Token take() {
    Token t = cur();
    if (t.kind != Tok::End) ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }

  Token expect(Tok k, const char* what) {
    if (!at(k)) {
      if (at(Tok::End)) fail("unterminated", std::string("expected ") + what + " before end of input");
      fail("syntax", std::string("expected ") + what + " but found " + describe(cur()));
    }
    return take();
  }

  Token ident(const char* what) {
    if (is_keyword_tok(cur().kind))
      fail("keyword-ident", "'" + cur().text + "' is a keyword and cannot be used as " + what);
    return expect(Tok::Ident, what);
  }

  // ---- context ----

  ContextBlock context_clause() {
    ContextBlock b;
    b.span = take().span;
    expect(Tok::LBrace, "'{'");
    std::set<std::string> seen;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail("unterminated", "unterminated context clause");
      ContextDecl d;
      Token name = ident("a type name");
      d.name = name.text;
      d.span = name.span;
      if (accept(Tok::Assign)) {
        d.is_constant = true;
      } else {
        expect(Tok::Colon, "':' or '='");
      }
      d.body = type_part();
      expect(Tok::Semi, "';'");
      b.decls.push_back(std::move(d));
    }
    take();
    return b;
  }

  TypeRef base_type(const char* what) {
    switch (cur().kind) {
      case Tok::KwReal: take(); return TypeRef::real();
      case Tok::KwNatural: take(); return TypeRef::natural();
      case Tok::KwBool: take(); return TypeRef::boolean();
      default: break;
    }
    return TypeRef::named(ident(what).text);
  }

  bool looks_like_sequence() const {
    if (at(Tok::LBracket)) return true;
    return at(Tok::Ident) && (cur().text == "seq" || cur().text == "sequence");
  }

  TypeExpr type_part() {
    TypeExpr t;
    if (looks_like_sequence())
      fail("unsupported-sequence", "sequence types are not supported");
    if (accept(Tok::LBrace)) {
      if (accept(Tok::RBrace)) {
        t.kind = TypeExpr::Kind::Empty;
        return t;
      }
      bool ctor_set = look(1).kind == Tok::LParen;
      t.kind = ctor_set ? TypeExpr::Kind::CtorSet : TypeExpr::Kind::Enum;
      do {
        Token name = ident(ctor_set ? "a constructor name" : "an enum member");
        if (ctor_set) {
          Ctor c;
          c.name = name.text;
          expect(Tok::LParen, "'(' after constructor name");
          if (!at(Tok::RParen)) {
            do c.args.push_back(base_type("a constructor argument type"));
            while (accept(Tok::Comma));
          }
          expect(Tok::RParen, "')'");
          t.ctors.push_back(std::move(c));
        } else {
          if (at(Tok::LParen))
            fail("syntax", "enum members and constructors cannot be mixed in one set");
          t.members.push_back(name.text);
        }
      } while (accept(Tok::Comma));
      expect(Tok::RBrace, "'}'");
      return t;
    }
    t.kind = TypeExpr::Kind::Function;
    t.domain.push_back(base_type("a type"));
    while (at(Tok::Ident) && cur().text == "x") {
      take();
      t.domain.push_back(base_type("a type"));
    }
    if (looks_like_sequence()) fail("unsupported-sequence", "sequence types are not supported");
    expect(Tok::FnArrow, "'-->'");
    t.codomain = base_type("a result type");
    return t;
  }

  // ---- node ----

  Contract node_clause() {
    Contract c;
    c.span = take().span;
    c.node_name = ident("a node name").text;
    expect(Tok::LBrace, "'{'");
    expect(Tok::KwInputs, "'inputs'");
    c.inputs = io_vars(Dir::In);
    expect(Tok::KwOutputs, "'outputs'");
    c.outputs = io_vars(Dir::Out);
    c.topics_declared = false;
    if (accept(Tok::KwTopics)) {
      c.topics_declared = true;
      expect(Tok::LParen, "'('");
      if (!at(Tok::RParen)) {
        do c.topics.push_back(topic());
        while (accept(Tok::Comma));
      }
      expect(Tok::RParen, "')'");
    }
    while (at(Tok::KwAssume)) {
      take();
      expect(Tok::LParen, "'('");
      c.assumes.push_back(formula());
      expect(Tok::RParen, "')'");
    }
    while (at(Tok::KwGuarantee)) {
      take();
      expect(Tok::LParen, "'('");
      c.guarantees.push_back(formula());
      expect(Tok::RParen, "')'");
    }
    if (at(Tok::End)) fail("unterminated", "unterminated node clause '" + c.node_name + "'");
    if (!at(Tok::RBrace)) {
      if (at(Tok::KwAssume)) fail("syntax", "assume clauses must precede guarantee clauses");
      fail("syntax", "expected 'guarantee' or '}' but found " + describe(cur()));
    }
    if (c.guarantees.empty()) fail("no-guarantee", "at least one guarantee required");
    take();
    return c;
  }

  std::vector<IoVar> io_vars(Dir d) {
    std::vector<IoVar> out;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      do {
        IoVar v;
        v.dir = d;
        Token n = ident("a variable name");
        v.name = n.text;
        v.span = n.span;
        expect(Tok::Colon, "':'");
        v.type = base_type("a type");
        out.push_back(std::move(v));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    return out;
  }

  TopicBinding topic() {
    TopicBinding t;
    Token first = ident("a message type");
    t.span = first.span;
    t.message_type = first.text;
    while (accept(Tok::Slash)) t.message_type += "/" + ident("a message type segment").text;
    t.topic_name = ident("a topic name").text;
    if (accept(Tok::KwMatches)) {
      expect(Tok::LParen, "'('");
      TopicRef r;
      if (at(Tok::KwIn) || at(Tok::KwOut)) {
        r.dir = take().kind == Tok::KwIn ? Dir::In : Dir::Out;
        expect(Tok::Dot, "'.'");
      }
      r.var = ident("a variable name").text;
      expect(Tok::RParen, "')'");
      t.binding = r;
    }
    return t;
  }

  // ---- formulas ----

  FormulaPtr formula() { return iff(); }

  FormulaPtr iff() {
    auto lhs = implication();
    while (at(Tok::IffArrow)) {
      Span s = take().span;
      lhs = mk_binary(Formula::Kind::Iff, lhs, implication(), s);
    }
    return lhs;
  }

  FormulaPtr implication() {
    auto lhs = disjunction();
    if (at(Tok::Arrow)) {
      Span s = take().span;
      return mk_binary(Formula::Kind::Implies, lhs, implication(), s);
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    auto lhs = conjunction();
    while (at(Tok::KwOr)) {
      Span s = take().span;
      lhs = mk_binary(Formula::Kind::Or, lhs, conjunction(), s);
    }
    return lhs;
  }

  FormulaPtr conjunction() {
    auto lhs = unary();
    while (at(Tok::KwAnd)) {
      Span s = take().span;
      lhs = mk_binary(Formula::Kind::And, lhs, unary(), s);
    }
    return lhs;
  }

  FormulaPtr unary() {
    if (at(Tok::KwNot)) {
      Span s = take().span;
      return mk_not(unary(), s);
    }
    return primary();
  }

  FormulaPtr primary() {
    if (at(Tok::KwForall) || at(Tok::KwExists) || at(Tok::KwExistsUnique)) return quantifier();
    if (at(Tok::LParen)) {
      take();
      auto f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (at(Tok::End)) fail("unterminated", "expected a formula before end of input");
    Span s = cur().span;
    auto t = term();
    std::optional<CmpOp> op;
    switch (cur().kind) {
      case Tok::EqEq:
      case Tok::Assign: op = CmpOp::Eq; break;
      case Tok::Ne: op = CmpOp::Ne; break;
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      case Tok::Ge: op = CmpOp::Ge; break;
      default: break;
    }
    if (op) {
      take();
      return mk_compare(t, *op, term(), s);
    }
    if ((at(Tok::KwIn) && look(1).kind == Tok::LBrace) || at(Tok::NotIn)) {
      bool negated = take().kind == Tok::NotIn;
      expect(Tok::LBrace, "'{'");
      std::vector<std::string> members;
      if (!at(Tok::RBrace)) {
        do members.push_back(ident("a set member").text);
        while (accept(Tok::Comma));
      }
      expect(Tok::RBrace, "'}'");
      return mk_member(t, std::move(members), negated, s);
    }
    if (t->kind == Term::Kind::Bool) return mk_bool(t->bval, s);
    return mk_atom(t, s);
  }

  FormulaPtr quantifier() {
    Token q = take();
    auto kind = q.kind == Tok::KwForall   ? Formula::Kind::Forall
                : q.kind == Tok::KwExists ? Formula::Kind::Exists
                                          : Formula::Kind::ExistsUnique;
    expect(Tok::LParen, "'(' after quantifier");
    std::vector<TypedVar> vars;
    std::vector<std::string> pending;
    for (;;) {
      pending.push_back(ident("a bound variable").text);
      if (accept(Tok::Comma)) continue;
      expect(Tok::KwIn, "'in' or ','");
      TypeRef ty = base_type("a quantifier domain");
      for (auto& n : pending) vars.push_back({n, ty});
      pending.clear();
      if (accept(Tok::Comma)) continue;
      break;
    }
    expect(Tok::Bar, "'|'");
    auto body = formula();
    expect(Tok::RParen, "')'");
    return mk_binder(kind, std::move(vars), body, q.span);
  }

  // ---- terms ----

  TermPtr term() {
    auto t = primary_term();
    while (at(Tok::Plus)) {
      Span s = take().span;
      if (!at(Tok::Number) || cur().text.find('.') != std::string::npos)
        fail("syntax", "only natural-number literals may be added");
      t = mk_sum(t, mk_num(take().text, s), t->span);
    }
    return t;
  }

  std::vector<TermPtr> arg_list() {
    std::vector<TermPtr> args;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      do args.push_back(term());
      while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    return args;
  }

  TermPtr io_rest(Dir d, std::string node, Span s) {
    expect(Tok::Dot, "'.'");
    std::string name = ident("a variable name").text;
    if (at(Tok::LParen)) return mk_io(d, name, arg_list(), true, std::move(node), s);
    return mk_io(d, name, {}, false, std::move(node), s);
  }

  TermPtr primary_term() {
    Span s = cur().span;
    switch (cur().kind) {
      case Tok::Number: return mk_num(take().text, s);
      case Tok::KwTrue: take(); return mk_bool_term(true, s);
      case Tok::KwFalse: take(); return mk_bool_term(false, s);
      case Tok::KwIn: take(); return io_rest(Dir::In, {}, s);
      case Tok::KwOut: take(); return io_rest(Dir::Out, {}, s);
      case Tok::Ident: {
        std::string name = take().text;
        if (at(Tok::Dot) && (look(1).kind == Tok::KwIn || look(1).kind == Tok::KwOut)) {
          take();
          Dir d = take().kind == Tok::KwIn ? Dir::In : Dir::Out;
          return io_rest(d, name, s);
        }
        if (at(Tok::LParen)) return mk_app(name, arg_list(), s);
        return mk_var(name, s);
      }
      case Tok::End: fail("unterminated", "expected a term before end of input");
      default: break;
    }
    if (is_keyword_tok(cur().kind))
      fail("keyword-ident", "'" + cur().text + "' is a keyword and cannot be used as a term");
    fail("syntax", "expected a term but found " + describe(cur()));
  }
};

template <class T, class F>
Result<T> run_parser(std::string_view src, F body) {
  Result<T> r;
  try {
    Parser p(Lexer(src).run());
    r.value = body(p, r.diags);
  } catch (ParseError& e) {
    r.value.reset();
    r.diags.push_back(e.diag);
  }
  if (has_errors(r.diags)) r.value.reset();
  return r;
}

}  // namespace

bool is_rcl_keyword(std::string_view word) {
  if (word == "exists!") return true;
  for (auto& kw : kKeywords)
    if (word == kw.text) return true;
  return false;
}

Result<Document> parse_document(std::string_view source) {
  return run_parser<Document>(source, [](Parser& p, std::vector<Diagnostic>& d) {
    return p.document(d);
  });
}

Result<FormulaPtr> parse_formula(std::string_view source) {
  return run_parser<FormulaPtr>(source, [](Parser& p, std::vector<Diagnostic>&) {
    return p.formula_only();
  });
}

Result<TermPtr> parse_term(std::string_view source) {
  return run_parser<TermPtr>(source, [](Parser& p, std::vector<Diagnostic>&) {
    return p.term_only();
  });
}

}  // namespace contracts

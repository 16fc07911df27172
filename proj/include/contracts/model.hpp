#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace contracts {

struct Span {
  int line = 1;
  int col = 1;
  int len = 0;
};

enum class Base { Real, Natural, Bool, Named };

struct TypeRef {
  Base kind = Base::Bool;
  std::string name;  // only for Named

  static TypeRef real() { return {Base::Real, {}}; }
  static TypeRef natural() { return {Base::Natural, {}}; }
  static TypeRef boolean() { return {Base::Bool, {}}; }
  static TypeRef named(std::string n) { return {Base::Named, std::move(n)}; }

  bool operator==(const TypeRef&) const = default;
  std::string str() const;
};

struct Ctor {
  std::string name;
  std::vector<TypeRef> args;
  bool operator==(const Ctor&) const = default;
};

struct TypeExpr {
  enum class Kind { Enum, Function, CtorSet, Empty };
  Kind kind = Kind::Empty;
  std::vector<std::string> members;  // Enum
  std::vector<TypeRef> domain;       // Function
  TypeRef codomain;                  // Function
  std::vector<Ctor> ctors;           // CtorSet

  bool operator==(const TypeExpr&) const = default;
};

struct ContextDecl {
  std::string name;
  TypeExpr body;
  bool is_constant = false;  // written `Name = ...;`
  Span span;

  bool same(const ContextDecl& o) const {
    return name == o.name && body == o.body && is_constant == o.is_constant;
  }
};

enum class Dir { In, Out };
inline const char* dir_str(Dir d) { return d == Dir::In ? "in" : "out"; }

struct IoVar {
  Dir dir = Dir::In;
  std::string name;
  TypeRef type;
  Span span;
};

struct TopicRef {
  std::optional<Dir> dir;  // absent for a bare `matches(name)`
  std::string var;
};

struct TopicBinding {
  std::string message_type;
  std::string topic_name;
  std::optional<TopicRef> binding;
  Span span;
};

// ---- terms ----

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Io, App, Num, Sum, Bool };
  Kind kind = Kind::Var;
  std::string name;  // Var, Io var, App ctor
  std::string node;  // Io qualifier, empty for local access
  Dir dir = Dir::In;
  bool applied = false;  // Io written with an argument list
  std::vector<TermPtr> args;
  std::string text;  // Num literal as written
  bool bval = false;
  Span span;

  bool is_real_literal() const { return text.find('.') != std::string::npos; }
  double number() const { return std::stod(text); }
};

TermPtr mk_var(std::string name, Span s = {});
TermPtr mk_io(Dir d, std::string name, std::vector<TermPtr> args = {}, bool applied = false,
              std::string node = {}, Span s = {});
TermPtr mk_app(std::string ctor, std::vector<TermPtr> args, Span s = {});
TermPtr mk_num(std::string text, Span s = {});
TermPtr mk_sum(TermPtr lhs, TermPtr rhs, Span s = {});
TermPtr mk_bool_term(bool v, Span s = {});

// ---- formulas ----

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
const char* cmp_str(CmpOp op);

struct TypedVar {
  std::string name;
  TypeRef type;
  bool operator==(const TypedVar&) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind {
    Forall, Exists, ExistsUnique,
    And, Or, Not, Implies, Iff,
    Member, Compare, Bool, Atom
  };
  Kind kind = Kind::Bool;
  std::vector<TypedVar> vars;  // binders
  FormulaPtr lhs, rhs;         // body in lhs for binders and Not
  TermPtr t1, t2;              // Compare uses both, Member/Atom use t1
  CmpOp op = CmpOp::Eq;
  std::vector<std::string> members;
  bool negated = false;  // Member
  bool bval = true;
  Span span;

  bool is_binder() const {
    return kind == Kind::Forall || kind == Kind::Exists || kind == Kind::ExistsUnique;
  }
};

FormulaPtr mk_bool(bool v, Span s = {});
FormulaPtr mk_not(FormulaPtr f, Span s = {});
FormulaPtr mk_binary(Formula::Kind k, FormulaPtr a, FormulaPtr b, Span s = {});
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_binder(Formula::Kind k, std::vector<TypedVar> vars, FormulaPtr body, Span s = {});
FormulaPtr mk_compare(TermPtr a, CmpOp op, TermPtr b, Span s = {});
FormulaPtr mk_member(TermPtr t, std::vector<std::string> members, bool negated, Span s = {});
FormulaPtr mk_atom(TermPtr t, Span s = {});

// Structural equality ignoring spans.
bool term_equal(const TermPtr& a, const TermPtr& b);
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

// Equality up to consistent renaming of bound variables.
bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b);

// Conjunction of a list, TRUE when empty; folds left.
FormulaPtr conjoin(const std::vector<FormulaPtr>& fs);

// `exists v. body and forall v'. body[v'/v] -> v' == v`
FormulaPtr desugar_exists_unique(const FormulaPtr& f);

// Capture-free substitution of free variables by terms.
FormulaPtr substitute_vars(const FormulaPtr& f,
                           const std::vector<std::pair<std::string, TermPtr>>& sub);

// ---- contracts ----

struct Contract {
  std::string node_name;
  std::vector<IoVar> inputs;
  std::vector<IoVar> outputs;
  std::vector<TopicBinding> topics;
  bool topics_declared = true;
  std::vector<FormulaPtr> assumes;
  std::vector<FormulaPtr> guarantees;
  Span span;

  FormulaPtr assumption() const { return conjoin(assumes); }
  FormulaPtr guarantee() const { return conjoin(guarantees); }
  const IoVar* find_var(Dir d, const std::string& name) const;
};

bool contract_equal(const Contract& a, const Contract& b);

struct ContextBlock {
  std::vector<ContextDecl> decls;
  Span span;
};

enum class ClauseKind { Context, Node };

struct Document {
  std::vector<ContextBlock> contexts;
  std::vector<Contract> contracts;
  std::vector<ClauseKind> order;

  std::vector<ContextDecl> all_decls() const;
};

bool document_equal(const Document& a, const Document& b);

// ---- composition artefacts ----

struct Obligation {
  std::vector<TypedVar> quantified_vars;
  FormulaPtr antecedent;
  FormulaPtr consequent;
};

struct Eventually {
  bool eventually = true;
  FormulaPtr formula;
};

struct DerivedProperty {
  std::vector<TypedVar> quantified_vars;
  FormulaPtr antecedent;
  std::vector<Eventually> consequents;
};

}  // namespace contracts

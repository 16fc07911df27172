#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contracts/diagnostic.hpp"
#include "contracts/model.hpp"

namespace contracts {

// Literal carried by events and event-type patterns.
struct Lit {
  enum class Kind { Num, Str, Bool };
  Kind kind = Kind::Str;
  double num = 0;
  std::string str;
  bool b = false;

  static Lit number(double v);
  static Lit string(std::string s);
  static Lit boolean(bool v);

  // RML surface form: identifiers bare, other strings quoted.
  std::string text() const;
  bool operator==(const Lit& o) const;
  bool operator<(const Lit& o) const;
};

struct EtArg {
  enum class Kind { Var, Const, Wild, Offset };
  Kind kind = Kind::Const;
  std::string var;  // Var, Offset
  Lit value;        // Const
  double offset = 0;

  static EtArg variable(std::string v);
  static EtArg constant(Lit l);
  static EtArg wildcard();
  static EtArg plus(std::string v, double c);

  std::string text() const;
  bool operator==(const EtArg& o) const;
};

struct PatternValue {
  bool is_param = false;
  std::string name;  // parameter or internal guard variable
  Lit value;
};

// `with v OP bound` on an internal pattern variable.
struct Guard {
  std::string var;
  CmpOp op = CmpOp::Lt;
  double bound = 0;
};

struct EventType {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::pair<std::string, PatternValue>> pattern;
  std::optional<Guard> guard;

  std::string topic() const;
};

struct RmlTerm;
using RmlPtr = std::shared_ptr<const RmlTerm>;

struct RmlTerm {
  // Not only appears in untranslated output and is removed by simplify_term.
  enum class Kind { Et, NegEt, Concat, And, Or, Let, Star, Any, None, Eps, Not };
  Kind kind = Kind::Eps;
  std::string name;           // Et, NegEt
  std::vector<EtArg> args;    // Et, NegEt
  std::vector<RmlPtr> kids;   // Concat(2), And/Or(n), Let/Star/Not(1)
  std::string var;            // Let
  std::vector<Lit> excluded;  // Let: values already handled by earlier branches
  std::string key;            // canonical structural text
};

namespace rml {
RmlPtr et(std::string name, std::vector<EtArg> args = {});
RmlPtr neg_et(std::string name, std::vector<EtArg> args = {});
RmlPtr concat(RmlPtr a, RmlPtr b);
RmlPtr conj(std::vector<RmlPtr> kids);
RmlPtr disj(std::vector<RmlPtr> kids);
RmlPtr let(std::string var, RmlPtr body, std::vector<Lit> excluded = {});
RmlPtr lets(const std::vector<std::string>& vars, RmlPtr body);
RmlPtr star(RmlPtr t);
RmlPtr any();
RmlPtr none();
RmlPtr eps();
RmlPtr negation(RmlPtr t);
}  // namespace rml

struct RmlSpec {
  std::vector<EventType> event_types;
  std::vector<std::pair<std::string, RmlPtr>> terms;

  RmlPtr main() const;
  const EventType* find(const std::string& name, size_t arity) const;
};

// Pushes negation inward: ET flips, De Morgan on And/Or, through Let into its body.
RmlPtr negate(const RmlPtr& t);
// True if every trace the term denotes has exactly one event.
bool single_event(const RmlPtr& t);
bool uses_var(const RmlPtr& t, const std::string& v);
RmlPtr simplify_term(const RmlPtr& t);

bool rml_alpha_equal(const RmlPtr& a, const RmlPtr& b);
bool et_alpha_equal(const EventType& a, const EventType& b);

std::string render_term(const RmlPtr& t, bool unicode = false);
std::string render_event_type(const EventType& et);
std::string emit_rml(const RmlSpec& spec);

// Accepts ASCII (`!`, `\/`, `/\`) and Unicode (`¬`, `∨`, `∧`) connectives.
Result<RmlSpec> parse_rml(std::string_view source);

}  // namespace contracts

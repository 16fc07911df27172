#include "contracts/model.hpp"

#include <functional>
#include <map>
#include <set>

namespace contracts {

std::string TypeRef::str() const {
  switch (kind) {
    case Base::Real: return "REAL";
    case Base::Natural: return "NATURAL";
    case Base::Bool: return "BOOL";
    case Base::Named: return name;
  }
  return name;
}

const char* cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "==";
}

TermPtr mk_var(std::string name, Span s) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Var;
  t->name = std::move(name);
  t->span = s;
  return t;
}

TermPtr mk_io(Dir d, std::string name, std::vector<TermPtr> args, bool applied, std::string node,
              Span s) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Io;
  t->dir = d;
  t->name = std::move(name);
  t->args = std::move(args);
  t->applied = applied || !t->args.empty();
  t->node = std::move(node);
  t->span = s;
  return t;
}

TermPtr mk_app(std::string ctor, std::vector<TermPtr> args, Span s) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::App;
  t->name = std::move(ctor);
  t->args = std::move(args);
  t->span = s;
  return t;
}

TermPtr mk_num(std::string text, Span s) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Num;
  t->text = std::move(text);
  t->span = s;
  return t;
}

TermPtr mk_sum(TermPtr lhs, TermPtr rhs, Span s) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Sum;
  t->args = {std::move(lhs), std::move(rhs)};
  t->span = s;
  return t;
}

TermPtr mk_bool_term(bool v, Span s) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Bool;
  t->bval = v;
  t->span = s;
  return t;
}

FormulaPtr mk_bool(bool v, Span s) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Bool;
  f->bval = v;
  f->span = s;
  return f;
}

FormulaPtr mk_not(FormulaPtr g, Span s) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Not;
  f->lhs = std::move(g);
  f->span = s;
  return f;
}

FormulaPtr mk_binary(Formula::Kind k, FormulaPtr a, FormulaPtr b, Span s) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  f->span = s;
  return f;
}

FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) {
  return mk_binary(Formula::Kind::And, std::move(a), std::move(b));
}
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) {
  return mk_binary(Formula::Kind::Or, std::move(a), std::move(b));
}
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) {
  return mk_binary(Formula::Kind::Implies, std::move(a), std::move(b));
}

FormulaPtr mk_binder(Formula::Kind k, std::vector<TypedVar> vars, FormulaPtr body, Span s) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->vars = std::move(vars);
  f->lhs = std::move(body);
  f->span = s;
  return f;
}

FormulaPtr mk_compare(TermPtr a, CmpOp op, TermPtr b, Span s) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Compare;
  f->t1 = std::move(a);
  f->op = op;
  f->t2 = std::move(b);
  f->span = s;
  return f;
}

FormulaPtr mk_member(TermPtr t, std::vector<std::string> members, bool negated, Span s) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Member;
  f->t1 = std::move(t);
  f->members = std::move(members);
  f->negated = negated;
  f->span = s;
  return f;
}

FormulaPtr mk_atom(TermPtr t, Span s) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->t1 = std::move(t);
  f->span = s;
  return f;
}

namespace {

// Bound-variable correspondence for alpha comparison. Each scope level
// maps a name on one side to its partner on the other.
struct AlphaEnv {
  std::vector<std::pair<std::map<std::string, std::string>, std::map<std::string, std::string>>>
      scopes;
  bool alpha = true;

  bool vars_match(const std::string& a, const std::string& b) const {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto fa = it->first.find(a);
      auto fb = it->second.find(b);
      if (fa == it->first.end() && fb == it->second.end()) continue;
      return fa != it->first.end() && fb != it->second.end() && fa->second == b &&
             fb->second == a;
    }
    return a == b;
  }
};

bool term_eq(const TermPtr& a, const TermPtr& b, const AlphaEnv& env) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var:
      return env.vars_match(a->name, b->name);
    case Term::Kind::Num:
      return a->text == b->text;
    case Term::Kind::Bool:
      return a->bval == b->bval;
    case Term::Kind::Io:
      if (a->node != b->node || a->dir != b->dir || a->name != b->name ||
          a->applied != b->applied)
        return false;
      break;
    case Term::Kind::App:
      if (a->name != b->name) return false;
      break;
    case Term::Kind::Sum:
      break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!term_eq(a->args[i], b->args[i], env)) return false;
  return true;
}

bool formula_eq(const FormulaPtr& a, const FormulaPtr& b, AlphaEnv& env) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  using K = Formula::Kind;
  switch (a->kind) {
    case K::Forall:
    case K::Exists:
    case K::ExistsUnique: {
      if (a->vars.size() != b->vars.size()) return false;
      std::map<std::string, std::string> ab, ba;
      for (size_t i = 0; i < a->vars.size(); ++i) {
        if (a->vars[i].type != b->vars[i].type) return false;
        if (!env.alpha && a->vars[i].name != b->vars[i].name) return false;
        ab[a->vars[i].name] = b->vars[i].name;
        ba[b->vars[i].name] = a->vars[i].name;
      }
      env.scopes.emplace_back(std::move(ab), std::move(ba));
      bool r = formula_eq(a->lhs, b->lhs, env);
      env.scopes.pop_back();
      return r;
    }
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff:
      return formula_eq(a->lhs, b->lhs, env) && formula_eq(a->rhs, b->rhs, env);
    case K::Not:
      return formula_eq(a->lhs, b->lhs, env);
    case K::Member:
      return a->negated == b->negated && a->members == b->members && term_eq(a->t1, b->t1, env);
    case K::Compare:
      return a->op == b->op && term_eq(a->t1, b->t1, env) && term_eq(a->t2, b->t2, env);
    case K::Bool:
      return a->bval == b->bval;
    case K::Atom:
      return term_eq(a->t1, b->t1, env);
  }
  return false;
}

void term_names(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == Term::Kind::Var) out.insert(t->name);
  for (auto& a : t->args) term_names(a, out);
}

void formula_names(const FormulaPtr& f, std::set<std::string>& out) {
  if (!f) return;
  for (auto& v : f->vars) out.insert(v.name);
  formula_names(f->lhs, out);
  formula_names(f->rhs, out);
  term_names(f->t1, out);
  term_names(f->t2, out);
}

TermPtr subst_term(const TermPtr& t, const std::map<std::string, TermPtr>& sub) {
  if (!t) return t;
  if (t->kind == Term::Kind::Var) {
    auto it = sub.find(t->name);
    return it == sub.end() ? t : it->second;
  }
  if (t->args.empty()) return t;
  auto copy = std::make_shared<Term>(*t);
  for (auto& a : copy->args) a = subst_term(a, sub);
  return copy;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  std::string n = base + "'";
  while (used.count(n)) n += "'";
  return n;
}

FormulaPtr subst_formula(const FormulaPtr& f, std::map<std::string, TermPtr> sub,
                         const std::set<std::string>& avoid) {
  if (!f || sub.empty()) return f;
  auto copy = std::make_shared<Formula>(*f);
  if (f->is_binder()) {
    std::set<std::string> replacement_names;
    for (auto& [k, v] : sub) term_names(v, replacement_names);
    std::set<std::string> used = avoid;
    formula_names(f, used);
    used.insert(replacement_names.begin(), replacement_names.end());
    for (auto& v : copy->vars) {
      sub.erase(v.name);
      if (replacement_names.count(v.name)) {
        // rename binder to dodge capture
        std::string nn = fresh_name(v.name, used);
        used.insert(nn);
        sub[v.name] = mk_var(nn);
        v.name = nn;
      }
    }
    copy->lhs = subst_formula(f->lhs, sub, used);
    return copy;
  }
  copy->lhs = subst_formula(f->lhs, sub, avoid);
  copy->rhs = subst_formula(f->rhs, sub, avoid);
  copy->t1 = subst_term(f->t1, sub);
  copy->t2 = subst_term(f->t2, sub);
  return copy;
}

}  // namespace

bool term_equal(const TermPtr& a, const TermPtr& b) {
  AlphaEnv env;
  env.alpha = false;
  return term_eq(a, b, env);
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  AlphaEnv env;
  env.alpha = false;
  return formula_eq(a, b, env);
}

bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) {
  AlphaEnv env;
  return formula_eq(a, b, env);
}

FormulaPtr conjoin(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return mk_bool(true);
  FormulaPtr acc = fs.front();
  for (size_t i = 1; i < fs.size(); ++i) acc = mk_and(acc, fs[i]);
  return acc;
}

FormulaPtr substitute_vars(const FormulaPtr& f,
                           const std::vector<std::pair<std::string, TermPtr>>& sub) {
  std::map<std::string, TermPtr> m(sub.begin(), sub.end());
  return subst_formula(f, m, {});
}

FormulaPtr desugar_exists_unique(const FormulaPtr& f) {
  if (!f || f->kind != Formula::Kind::ExistsUnique) return f;
  std::set<std::string> used;
  formula_names(f, used);
  std::vector<TypedVar> primed;
  std::vector<std::pair<std::string, TermPtr>> sub;
  FormulaPtr eqs;
  for (auto& v : f->vars) {
    std::string n = fresh_name(v.name, used);
    used.insert(n);
    primed.push_back({n, v.type});
    sub.emplace_back(v.name, mk_var(n));
    auto eq = mk_compare(mk_var(n), CmpOp::Eq, mk_var(v.name));
    eqs = eqs ? mk_and(eqs, eq) : eq;
  }
  auto other = substitute_vars(f->lhs, sub);
  auto uniq = mk_binder(Formula::Kind::Forall, primed, mk_implies(other, eqs));
  return mk_binder(Formula::Kind::Exists, f->vars, mk_and(f->lhs, uniq), f->span);
}

const IoVar* Contract::find_var(Dir d, const std::string& name) const {
  auto& vs = d == Dir::In ? inputs : outputs;
  for (auto& v : vs)
    if (v.name == name) return &v;
  return nullptr;
}

bool contract_equal(const Contract& a, const Contract& b) {
  auto io_eq = [](const std::vector<IoVar>& x, const std::vector<IoVar>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (x[i].dir != y[i].dir || x[i].name != y[i].name || x[i].type != y[i].type) return false;
    return true;
  };
  auto fs_eq = [](const std::vector<FormulaPtr>& x, const std::vector<FormulaPtr>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!formula_equal(x[i], y[i])) return false;
    return true;
  };
  if (a.node_name != b.node_name || a.topics_declared != b.topics_declared) return false;
  if (!io_eq(a.inputs, b.inputs) || !io_eq(a.outputs, b.outputs)) return false;
  if (a.topics.size() != b.topics.size()) return false;
  for (size_t i = 0; i < a.topics.size(); ++i) {
    auto& x = a.topics[i];
    auto& y = b.topics[i];
    if (x.message_type != y.message_type || x.topic_name != y.topic_name) return false;
    if (x.binding.has_value() != y.binding.has_value()) return false;
    if (x.binding && (x.binding->dir != y.binding->dir || x.binding->var != y.binding->var))
      return false;
  }
  return fs_eq(a.assumes, b.assumes) && fs_eq(a.guarantees, b.guarantees);
}

std::vector<ContextDecl> Document::all_decls() const {
  std::vector<ContextDecl> out;
  for (auto& b : contexts) out.insert(out.end(), b.decls.begin(), b.decls.end());
  return out;
}

bool document_equal(const Document& a, const Document& b) {
  if (a.order != b.order || a.contexts.size() != b.contexts.size() ||
      a.contracts.size() != b.contracts.size())
    return false;
  for (size_t i = 0; i < a.contexts.size(); ++i) {
    auto& x = a.contexts[i].decls;
    auto& y = b.contexts[i].decls;
    if (x.size() != y.size()) return false;
    for (size_t j = 0; j < x.size(); ++j)
      if (!x[j].same(y[j])) return false;
  }
  for (size_t i = 0; i < a.contracts.size(); ++i)
    if (!contract_equal(a.contracts[i], b.contracts[i])) return false;
  return true;
}

}  // namespace contracts

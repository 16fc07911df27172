#include "contracts/discharge.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "contracts/rcl.hpp"

namespace contracts {

Value Value::boolean(bool v) {
  Value x;
  x.kind = Kind::Bool;
  x.b = v;
  return x;
}
Value Value::natural(long long v) {
  Value x;
  x.kind = Kind::Natural;
  x.n = v;
  return x;
}
Value Value::real(double v) {
  Value x;
  x.kind = Kind::Real;
  x.r = v;
  return x;
}
Value Value::member(std::string m) {
  Value x;
  x.kind = Kind::Enum;
  x.name = std::move(m);
  return x;
}
Value Value::ctor(std::string c, std::vector<Value> args) {
  Value x;
  x.kind = Kind::Ctor;
  x.name = std::move(c);
  x.args = std::move(args);
  return x;
}

std::string Value::str() const {
  switch (kind) {
    case Kind::Bool: return b ? "TRUE" : "FALSE";
    case Kind::Natural: return std::to_string(n);
    case Kind::Real: {
      std::ostringstream ss;
      ss << std::setprecision(15) << r;
      return ss.str();
    }
    case Kind::Enum: return name;
    case Kind::Ctor: {
      if (args.empty()) return name;
      std::string s = name + "(";
      for (size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].str();
      return s + ")";
    }
  }
  return "?";
}

namespace {
int rank(const Value& v) {
  if (v.numeric()) return 1;
  switch (v.kind) {
    case Value::Kind::Bool: return 0;
    case Value::Kind::Enum:
    case Value::Kind::Ctor: return 2;  // a nullary constructor reads like a member
    default: return 3;
  }
}
}  // namespace

bool Value::operator==(const Value& o) const { return !(*this < o) && !(o < *this); }

bool Value::operator<(const Value& o) const {
  int ra = rank(*this), rb = rank(o);
  if (ra != rb) return ra < rb;
  if (numeric()) return num() < o.num();
  if (kind == Kind::Bool) return b < o.b;
  if (name != o.name) return name < o.name;
  return args < o.args;
}

std::string Assignment::str() const {
  std::string s;
  for (auto& [k, v] : scalars) s += k + " = " + v.str() + "\n";
  for (auto& [k, t] : functions) {
    s += k + " = {";
    bool first = true;
    for (auto& [args, v] : t.cells) {
      s += first ? "" : ", ";
      first = false;
      s += "(";
      for (size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].str();
      s += "): " + v.str();
    }
    if (t.otherwise) s += std::string(first ? "" : ", ") + "otherwise: " + t.otherwise->str();
    s += "}\n";
  }
  return s;
}

const char* verdict_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::ValidBounded: return "ValidBounded";
    case Verdict::Kind::Counterexample: return "Counterexample";
    case Verdict::Kind::Unknown: return "Unknown";
  }
  return "?";
}

// ---- bounds file ----

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Constant terms only; identifiers become enum members or nullary constructors.
std::optional<Value> literal(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Num:
      if (t->is_real_literal()) return Value::real(t->number());
      return Value::natural(std::stoll(t->text));
    case Term::Kind::Bool: return Value::boolean(t->bval);
    case Term::Kind::Var: return Value::member(t->name);
    case Term::Kind::App: {
      std::vector<Value> args;
      for (auto& a : t->args) {
        auto v = literal(a);
        if (!v) return std::nullopt;
        args.push_back(*v);
      }
      return Value::ctor(t->name, args);
    }
    default: return std::nullopt;
  }
}

// Splits on commas outside parentheses.
std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace

Result<DomainBounds> parse_bounds(std::string_view text) {
  Result<DomainBounds> r;
  DomainBounds b;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  auto err = [&](const std::string& code, const std::string& msg) {
    r.diags.push_back(error_at({line, 1, static_cast<int>(raw.size())}, code, msg));
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    auto colon = s.find(':');
    if (colon == std::string::npos) {
      err("syntax", "expected 'key: value'");
      continue;
    }
    std::string key = trim(s.substr(0, colon));
    std::string rest = trim(s.substr(colon + 1));
    std::vector<Value> values;
    bool ok = true;
    for (auto& item : split_top(rest)) {
      auto t = parse_term(item);
      std::optional<Value> v;
      if (t.ok()) v = literal(*t.value);
      if (!v) {
        err("syntax", "'" + item + "' is not a constant");
        ok = false;
        break;
      }
      values.push_back(*v);
    }
    if (!ok) continue;
    auto single_int = [&](const char* what) -> std::optional<long long> {
      if (values.size() != 1 || values[0].kind != Value::Kind::Natural) {
        err("syntax", std::string(what) + " takes one natural number");
        return std::nullopt;
      }
      return values[0].n;
    };
    if (key == "real_grid" || key == "REAL") {
      std::vector<double> grid;
      for (auto& v : values) {
        if (!v.numeric()) {
          err("syntax", "real_grid values must be numbers");
          ok = false;
          break;
        }
        grid.push_back(v.num());
      }
      if (!ok) continue;
      if (grid.empty()) err("bounds", "real_grid must not be empty");
      for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i - 1] < grid[i])) {
          err("bounds", "real_grid must be strictly ascending");
          break;
        }
      b.real_grid = grid;
    } else if (key == "natural_bound") {
      if (auto n = single_int("natural_bound")) b.natural_bound = *n;
    } else if (key == "max_nodes") {
      if (auto n = single_int("max_nodes")) b.max_nodes = static_cast<std::uint64_t>(*n);
    } else if (key == "max_function_domain") {
      if (auto n = single_int("max_function_domain")) b.max_function_domain = static_cast<size_t>(*n);
    } else if (key.rfind("type ", 0) == 0 || key == "NATURAL") {
      std::string name = key == "NATURAL" ? key : trim(key.substr(5));
      if (values.empty()) err("bounds", "override for '" + name + "' is empty");
      b.overrides[name] = values;
    } else {
      err("syntax", "unknown key '" + key + "'");
    }
  }
  if (!has_errors(r.diags)) r.value = std::move(b);
  return r;
}

// ---- default grid ----

namespace {

void term_constants(const TermPtr& t, std::set<double>& out) {
  if (t->kind == Term::Kind::Num) out.insert(t->number());
  for (auto& a : t->args) term_constants(a, out);
}

void formula_constants(const FormulaPtr& f, std::set<double>& out) {
  if (!f) return;
  if (f->t1) term_constants(f->t1, out);
  if (f->t2) term_constants(f->t2, out);
  formula_constants(f->lhs, out);
  formula_constants(f->rhs, out);
}

}  // namespace

std::vector<double> default_real_grid(const std::vector<FormulaPtr>& fs) {
  std::set<double> cs;
  for (auto& f : fs) formula_constants(f, cs);
  if (cs.empty()) return {0, 1};
  std::set<double> grid;
  std::optional<double> prev;
  for (double c : cs) {
    grid.insert({c - 1, c, c + 1});
    if (prev) grid.insert((*prev + c) / 2);
    prev = c;
  }
  return {grid.begin(), grid.end()};
}

// ---- three-valued evaluation ----

namespace {

enum class Tri { F, T, U };

Tri tri(bool b) { return b ? Tri::T : Tri::F; }

struct EvalError {
  std::string code;
  std::string message;
};

// The first unassigned symbol an evaluation ran into.
struct Demand {
  std::string symbol;
  std::optional<std::vector<Value>> cell;
};

struct Res {
  Tri v = Tri::U;
  std::optional<Demand> d;
};

struct TermRes {
  std::optional<Value> v;
  std::optional<Demand> d;
};

std::string symbol_name(const Term& t) {
  if (t.kind == Term::Kind::Io)
    return (t.node.empty() ? "" : t.node + ".") + dir_str(t.dir) + "." + t.name;
  return t.name;
}

class Evaluator {
 public:
  Evaluator(const ContextTable& ctx, const DomainBounds& b, const SymbolTypes& types,
            std::vector<double> grid)
      : ctx_(ctx), b_(b), types_(types), grid_(std::move(grid)) {}

  const Assignment* env = nullptr;
  bool strict = false;  // unassigned symbols are errors rather than unknowns

  // Values of a scalar type, in enumeration order.
  std::vector<Value> domain(const TypeRef& t) const {
    std::string key = t.kind == Base::Named ? t.name : t.kind == Base::Natural ? "NATURAL" : "REAL";
    auto expr = ctx_.expr_of(t);
    if (t.kind != Base::Bool && !(expr && expr->kind == TypeExpr::Kind::Enum)) {
      auto it = b_.overrides.find(key);
      if (it != b_.overrides.end()) {
        std::vector<Value> vs;
        for (auto& v : it->second) vs.push_back(coerce(v, t));
        return vs;
      }
    }
    switch (t.kind) {
      case Base::Bool: return {Value::boolean(false), Value::boolean(true)};
      case Base::Natural: {
        std::vector<Value> vs;
        for (long long i = 0; i <= b_.natural_bound; ++i) vs.push_back(Value::natural(i));
        return vs;
      }
      case Base::Real: {
        std::vector<Value> vs;
        for (double r : grid_) vs.push_back(Value::real(r));
        return vs;
      }
      case Base::Named: break;
    }
    if (!expr) throw EvalError{"unknown-type", "unknown type '" + t.name + "'"};
    std::vector<Value> vs;
    switch (expr->kind) {
      case TypeExpr::Kind::Enum:
        for (auto& m : expr->members) vs.push_back(Value::member(m));
        break;
      case TypeExpr::Kind::Empty: break;
      case TypeExpr::Kind::Function:
        throw EvalError{"unbounded", "cannot enumerate the function type '" + t.name + "'"};
      case TypeExpr::Kind::CtorSet:
        for (auto& c : expr->ctors) {
          std::vector<std::vector<Value>> tuples{{}};
          for (auto& a : c.args) {
            std::vector<std::vector<Value>> next;
            for (auto& prefix : tuples)
              for (auto& v : domain(a)) {
                next.push_back(prefix);
                next.back().push_back(v);
              }
            tuples = std::move(next);
          }
          for (auto& tup : tuples) vs.push_back(Value::ctor(c.name, tup));
        }
        break;
    }
    return vs;
  }

  Value coerce(const Value& v, const TypeRef& t) const {
    if (t.kind == Base::Real && v.kind == Value::Kind::Natural) return Value::real(v.num());
    if (v.kind == Value::Kind::Ctor || v.kind == Value::Kind::Enum) {
      auto expr = ctx_.expr_of(t);
      if (expr && expr->kind == TypeExpr::Kind::CtorSet) {
        for (auto& c : expr->ctors)
          if (c.name == v.name && c.args.size() == v.args.size()) {
            std::vector<Value> args;
            for (size_t i = 0; i < v.args.size(); ++i) args.push_back(coerce(v.args[i], c.args[i]));
            return Value::ctor(v.name, args);
          }
      }
    }
    return v;
  }

  bool fits(const Value& v, const TypeRef& t) const {
    switch (t.kind) {
      case Base::Bool: return v.kind == Value::Kind::Bool;
      case Base::Natural: return v.kind == Value::Kind::Natural && v.n >= 0;
      case Base::Real: return v.numeric();
      case Base::Named: break;
    }
    auto expr = ctx_.expr_of(t);
    if (!expr) return false;
    switch (expr->kind) {
      case TypeExpr::Kind::Enum:
        return v.kind == Value::Kind::Enum &&
               std::find(expr->members.begin(), expr->members.end(), v.name) != expr->members.end();
      case TypeExpr::Kind::CtorSet:
        for (auto& c : expr->ctors)
          if ((v.kind == Value::Kind::Ctor || v.kind == Value::Kind::Enum) && c.name == v.name &&
              c.args.size() == v.args.size()) {
            bool ok = true;
            for (size_t i = 0; i < c.args.size(); ++i) ok = ok && fits(v.args[i], c.args[i]);
            return ok;
          }
        return false;
      default: return false;
    }
  }

  std::optional<TypeRef> type_of(const std::string& sym) const {
    auto it = types_.find(sym);
    if (it == types_.end()) return std::nullopt;
    return it->second;
  }

  TermRes term(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Num:
        if (t->is_real_literal()) return {Value::real(t->number()), {}};
        return {Value::natural(std::stoll(t->text)), {}};
      case Term::Kind::Bool: return {Value::boolean(t->bval), {}};
      case Term::Kind::Sum: {
        auto a = term(t->args[0]);
        if (!a.v) return a;
        auto c = term(t->args[1]);
        if (!c.v) return c;
        if (!a.v->numeric() || !c.v->numeric())
          throw EvalError{"type-mismatch", "addition of non-numbers"};
        if (a.v->kind == Value::Kind::Natural && c.v->kind == Value::Kind::Natural)
          return {Value::natural(a.v->n + c.v->n), {}};
        return {Value::real(a.v->num() + c.v->num()), {}};
      }
      case Term::Kind::App: {
        std::vector<Value> args;
        for (auto& a : t->args) {
          auto r = term(a);
          if (!r.v) return r;
          args.push_back(*r.v);
        }
        return {Value::ctor(t->name, args), {}};
      }
      case Term::Kind::Var: {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
          if (it->first == t->name) return {it->second, {}};
        if (env->scalars.count(t->name) || types_.count(t->name)) return scalar(t->name);
        if (!ctx_.enums_with(t->name).empty()) return {Value::member(t->name), {}};
        if (!ctx_.ctors_named(t->name).empty()) return {Value::ctor(t->name), {}};
        return scalar(t->name);
      }
      case Term::Kind::Io: {
        std::string sym = symbol_name(*t);
        if (!t->applied) return scalar(sym);
        std::vector<Value> args;
        for (auto& a : t->args) {
          auto r = term(a);
          if (!r.v) return r;
          args.push_back(*r.v);
        }
        return cell(sym, std::move(args));
      }
    }
    return {};
  }

  TermRes scalar(const std::string& sym) {
    auto it = env->scalars.find(sym);
    if (it == env->scalars.end()) {
      if (strict) throw EvalError{"unbound", "unbound symbol '" + sym + "'"};
      return {std::nullopt, Demand{sym, std::nullopt}};
    }
    if (auto ty = type_of(sym); ty && !fits(it->second, *ty))
      throw EvalError{"type-mismatch",
                      "value " + it->second.str() + " of '" + sym + "' is not a " + ty->str()};
    return {it->second, {}};
  }

  TermRes cell(const std::string& sym, std::vector<Value> args) {
    if (auto ty = type_of(sym)) {
      if (auto expr = ctx_.expr_of(*ty); expr && expr->kind == TypeExpr::Kind::Function)
        for (size_t i = 0; i < args.size() && i < expr->domain.size(); ++i)
          args[i] = coerce(args[i], expr->domain[i]);
    }
    auto ft = env->functions.find(sym);
    if (ft != env->functions.end()) {
      auto c = ft->second.cells.find(args);
      if (c != ft->second.cells.end()) return {c->second, {}};
      if (ft->second.otherwise) return {*ft->second.otherwise, {}};
    }
    if (strict) throw EvalError{"unbound", "no value for '" + sym + "' at this argument"};
    return {std::nullopt, Demand{sym, std::move(args)}};
  }

  Res formula(const FormulaPtr& f) {
    using K = Formula::Kind;
    switch (f->kind) {
      case K::Bool: return {tri(f->bval), {}};
      case K::Atom: {
        auto r = term(f->t1);
        if (!r.v) return {Tri::U, r.d};
        if (r.v->kind != Value::Kind::Bool)
          throw EvalError{"type-mismatch", r.v->str() + " is not a truth value"};
        return {tri(r.v->b), {}};
      }
      case K::Member: {
        auto r = term(f->t1);
        if (!r.v) return {Tri::U, r.d};
        bool in = false;
        for (auto& m : f->members) in = in || (r.v->kind != Value::Kind::Bool && r.v->name == m);
        return {tri(in != f->negated), {}};
      }
      case K::Compare: {
        auto a = term(f->t1);
        if (!a.v) return {Tri::U, a.d};
        auto c = term(f->t2);
        if (!c.v) return {Tri::U, c.d};
        return {tri(compare(*a.v, f->op, *c.v)), {}};
      }
      case K::Not: {
        auto r = formula(f->lhs);
        if (r.v == Tri::U) return r;
        return {r.v == Tri::T ? Tri::F : Tri::T, {}};
      }
      case K::And:
      case K::Or: {
        Tri stop = f->kind == K::And ? Tri::F : Tri::T;
        auto a = formula(f->lhs);
        if (a.v == stop) return a;
        auto c = formula(f->rhs);
        if (c.v == stop) return c;
        if (a.v == Tri::U) return a;
        return c;
      }
      case K::Implies: {
        auto a = formula(f->lhs);
        if (a.v == Tri::F) return {Tri::T, {}};
        auto c = formula(f->rhs);
        if (c.v == Tri::T) return c;
        if (a.v == Tri::U) return a;
        return c;
      }
      case K::Iff: {
        auto a = formula(f->lhs);
        if (a.v == Tri::U) return a;
        auto c = formula(f->rhs);
        if (c.v == Tri::U) return c;
        return {tri(a.v == c.v), {}};
      }
      case K::Forall:
      case K::Exists:
      case K::ExistsUnique: return binder(f);
    }
    return {};
  }

 private:
  bool compare(const Value& a, CmpOp op, const Value& b) const {
    switch (op) {
      case CmpOp::Eq: return a == b;
      case CmpOp::Ne: return !(a == b);
      default: break;
    }
    if (!a.numeric() || !b.numeric())
      throw EvalError{"type-mismatch", "ordering comparison of " + a.str() + " and " + b.str()};
    double x = a.num(), y = b.num();
    switch (op) {
      case CmpOp::Lt: return x < y;
      case CmpOp::Le: return x <= y;
      case CmpOp::Gt: return x > y;
      case CmpOp::Ge: return x >= y;
      default: return false;
    }
  }

  Res binder(const FormulaPtr& f) {
    using K = Formula::Kind;
    std::vector<std::vector<Value>> doms;
    for (auto& v : f->vars) doms.push_back(domain(v.type));
    std::optional<Res> first_unknown;
    int trues = 0, unknowns = 0;
    std::vector<size_t> idx(doms.size(), 0);
    for (auto& d : doms)
      if (d.empty()) goto done;
    for (;;) {
      for (size_t i = 0; i < doms.size(); ++i) scopes_.push_back({f->vars[i].name, doms[i][idx[i]]});
      Res r = formula(f->lhs);
      scopes_.resize(scopes_.size() - doms.size());
      if (r.v == Tri::U) {
        ++unknowns;
        if (!first_unknown) first_unknown = r;
      } else if (r.v == Tri::T) {
        ++trues;
        if (f->kind == K::Exists) return {Tri::T, {}};
        if (f->kind == K::ExistsUnique && trues > 1) return {Tri::F, {}};
      } else if (f->kind == K::Forall) {
        return {Tri::F, {}};
      }
      size_t k = doms.size();
      while (k > 0) {
        --k;
        if (++idx[k] < doms[k].size()) break;
        idx[k] = 0;
        if (k == 0) goto done;
      }
      if (doms.empty()) goto done;
    }
  done:
    if (unknowns) return *first_unknown;
    switch (f->kind) {
      case K::Forall: return {Tri::T, {}};
      case K::Exists: return {Tri::F, {}};
      default: return {tri(trues == 1), {}};
    }
  }

  const ContextTable& ctx_;
  const DomainBounds& b_;
  const SymbolTypes& types_;
  std::vector<double> grid_;
  std::vector<std::pair<std::string, Value>> scopes_;
};

}  // namespace

Result<bool> eval_formula(const FormulaPtr& f, const Assignment& env, const ContextTable& ctx,
                          const DomainBounds& bounds, const SymbolTypes& types) {
  Result<bool> r;
  auto grid = bounds.real_grid.empty() ? default_real_grid({f}) : bounds.real_grid;
  Evaluator ev(ctx, bounds, types, grid);
  ev.env = &env;
  ev.strict = true;
  try {
    auto res = ev.formula(f);
    r.value = res.v == Tri::T;
  } catch (const EvalError& e) {
    r.diags.push_back(error_at(f->span, e.code, e.message));
  }
  return r;
}

namespace {

class Search {
 public:
  Search(const Obligation& ob, const ContextTable& ctx, const DomainBounds& b)
      : ob_(ob),
        ctx_(ctx),
        b_(b),
        ev_(ctx, b, types_,
            b.real_grid.empty() ? default_real_grid({ob.antecedent, ob.consequent}) : b.real_grid) {
    for (auto& v : ob.quantified_vars) types_[v.name] = v.type;
  }

  Verdict run() {
    Verdict v;
    try {
      auto r = dfs();
      if (r == Outcome::Counter) {
        v.kind = Verdict::Kind::Counterexample;
        v.assignment = complete(asg_);
      } else if (unknown_) {
        v.kind = Verdict::Kind::Unknown;
        v.reason = *unknown_;
      } else {
        v.kind = Verdict::Kind::ValidBounded;
      }
    } catch (const EvalError& e) {
      v.kind = Verdict::Kind::Unknown;
      v.reason = e.message;
    }
    v.nodes = nodes_;
    return v;
  }

 private:
  enum class Outcome { Valid, Counter, Abort };

  Outcome dfs() {
    if (++nodes_ > b_.max_nodes) {
      unknown_ = "search exceeded " + std::to_string(b_.max_nodes) + " nodes";
      return Outcome::Abort;
    }
    ev_.env = &asg_;
    Res c = ev_.formula(ob_.consequent);
    if (c.v == Tri::T) return Outcome::Valid;
    Res a = ev_.formula(ob_.antecedent);
    if (a.v == Tri::F) return Outcome::Valid;
    if (a.v == Tri::T && c.v == Tri::F) return Outcome::Counter;
    Demand d = c.v == Tri::U ? *c.d : *a.d;

    auto ty = ev_.type_of(d.symbol);
    if (!ty) throw EvalError{"unbound", "no type known for symbol '" + d.symbol + "'"};
    std::vector<Value> values;
    if (d.cell) {
      auto expr = ctx_.expr_of(*ty);
      if (!expr || expr->kind != TypeExpr::Kind::Function)
        throw EvalError{"not-a-function", "'" + d.symbol + "' is applied but is not a function"};
      size_t points = 1;
      for (auto& dt : expr->domain) points *= ev_.domain(dt).size();
      if (points > b_.max_function_domain) {
        if (!unknown_)
          unknown_ = "function '" + d.symbol + "' has " + std::to_string(points) +
                     " domain points (limit " + std::to_string(b_.max_function_domain) +
                     "); add a per-type override to shrink its argument domains";
        return Outcome::Valid;
      }
      values = ev_.domain(expr->codomain);
    } else {
      values = ev_.domain(*ty);
    }

    for (auto& v : values) {
      if (d.cell)
        asg_.functions[d.symbol].cells[*d.cell] = v;
      else
        asg_.scalars[d.symbol] = v;
      auto r = dfs();
      if (r == Outcome::Counter) return r;
      if (r == Outcome::Abort) {
        undo(d);
        return r;
      }
    }
    undo(d);
    return Outcome::Valid;
  }

  void undo(const Demand& d) {
    if (d.cell) {
      auto& t = asg_.functions[d.symbol];
      t.cells.erase(*d.cell);
      if (t.cells.empty()) asg_.functions.erase(d.symbol);
    } else {
      asg_.scalars.erase(d.symbol);
    }
  }

  // Any completion keeps a three-valued verdict, so the first domain value is used.
  Assignment complete(Assignment a) {
    for (auto& v : ob_.quantified_vars) {
      auto expr = ctx_.expr_of(v.type);
      if (expr && expr->kind == TypeExpr::Kind::Function) {
        auto& t = a.functions[v.name];
        auto cod = ev_.domain(expr->codomain);
        if (!t.otherwise && !cod.empty()) t.otherwise = cod.front();
      } else if (!a.scalars.count(v.name)) {
        auto dom = ev_.domain(v.type);
        if (!dom.empty()) a.scalars[v.name] = dom.front();
      }
    }
    return a;
  }

  const Obligation& ob_;
  const ContextTable& ctx_;
  const DomainBounds& b_;
  SymbolTypes types_;
  Evaluator ev_;
  Assignment asg_;
  std::uint64_t nodes_ = 0;
  std::optional<std::string> unknown_;
};

}  // namespace

Verdict discharge(const Obligation& ob, const ContextTable& ctx, const DomainBounds& bounds) {
  Search s(ob, ctx, bounds);
  return s.run();
}

}  // namespace contracts

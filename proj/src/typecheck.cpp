#include "contracts/typecheck.hpp"

#include <set>

namespace contracts {

void ContextTable::add(const std::string& name, TypeExpr t) {
  if (!types_.count(name)) order_.push_back(name);
  types_[name] = std::move(t);
}

const TypeExpr* ContextTable::find(const std::string& name) const {
  auto it = types_.find(name);
  return it == types_.end() ? nullptr : &it->second;
}

std::vector<std::string> ContextTable::enums_with(const std::string& member) const {
  std::vector<std::string> out;
  for (auto& n : order_) {
    auto& t = types_.at(n);
    if (t.kind != TypeExpr::Kind::Enum) continue;
    for (auto& m : t.members)
      if (m == member) {
        out.push_back(n);
        break;
      }
  }
  return out;
}

std::vector<std::pair<std::string, const Ctor*>> ContextTable::ctors_named(
    const std::string& ctor) const {
  std::vector<std::pair<std::string, const Ctor*>> out;
  for (auto& n : order_) {
    auto& t = types_.at(n);
    if (t.kind != TypeExpr::Kind::CtorSet) continue;
    for (auto& c : t.ctors)
      if (c.name == ctor) out.emplace_back(n, &c);
  }
  return out;
}

const TypeExpr* ContextTable::expr_of(const TypeRef& t) const {
  return t.kind == Base::Named ? find(t.name) : nullptr;
}

bool ContextTable::is_enum(const TypeRef& t) const {
  auto e = expr_of(t);
  return e && e->kind == TypeExpr::Kind::Enum;
}

bool ContextTable::is_function(const TypeRef& t) const {
  auto e = expr_of(t);
  return e && e->kind == TypeExpr::Kind::Function;
}

Result<ContextTable> resolve_context(const std::vector<ContextDecl>& decls) {
  Result<ContextTable> r;
  ContextTable table;
  std::set<std::string> names;
  for (auto& d : decls) {
    if (!names.insert(d.name).second)
      r.diags.push_back(error_at(d.span, "duplicate-type", "duplicate type name '" + d.name + "'"));
  }
  auto check_ref = [&](const TypeRef& t, const ContextDecl& d) {
    if (t.kind == Base::Named && !names.count(t.name))
      r.diags.push_back(error_at(d.span, "unknown-type",
                                 "'" + d.name + "' refers to undeclared type '" + t.name + "'"));
  };
  std::set<std::string> seen;
  for (auto& d : decls) {
    if (!seen.insert(d.name).second) continue;
    auto& b = d.body;
    switch (b.kind) {
      case TypeExpr::Kind::Enum: {
        std::set<std::string> ms;
        for (auto& m : b.members)
          if (!ms.insert(m).second)
            r.diags.push_back(error_at(d.span, "duplicate-member",
                                       "enum member '" + m + "' repeated in '" + d.name + "'"));
        break;
      }
      case TypeExpr::Kind::CtorSet: {
        std::set<std::string> cs;
        for (auto& c : b.ctors) {
          if (!cs.insert(c.name).second)
            r.diags.push_back(error_at(d.span, "duplicate-ctor",
                                       "constructor '" + c.name + "' repeated in '" + d.name + "'"));
          for (auto& a : c.args) check_ref(a, d);
        }
        break;
      }
      case TypeExpr::Kind::Function:
        for (auto& a : b.domain) check_ref(a, d);
        check_ref(b.codomain, d);
        break;
      case TypeExpr::Kind::Empty:
        break;
    }
    table.add(d.name, b);
  }
  sort_diagnostics(r.diags);
  if (!has_errors(r.diags)) r.value = std::move(table);
  return r;
}

const TopicBinding* TypedContract::topic_for(Dir d, const std::string& var) const {
  auto it = topic_index.find({d, var});
  return it == topic_index.end() ? nullptr : &contract.topics[it->second];
}

namespace {

bool is_numeric(const TypeRef& t) { return t.kind == Base::Real || t.kind == Base::Natural; }

bool is_nat_literal(const TermPtr& t) {
  return t->kind == Term::Kind::Num && !t->is_real_literal();
}

class Checker {
 public:
  Checker(const Contract& c, const ContextTable& ctx, TypedContract& out,
          std::vector<Diagnostic>& diags)
      : c_(c), ctx_(ctx), out_(out), diags_(diags) {}

  void formula(const FormulaPtr& f, bool in_assume) {
    in_assume_ = in_assume;
    visit(f);
  }

 private:
  const Contract& c_;
  const ContextTable& ctx_;
  TypedContract& out_;
  std::vector<Diagnostic>& diags_;
  std::vector<std::vector<TypedVar>> scopes_;
  bool in_assume_ = false;

  void error(Span s, const std::string& code, const std::string& msg) {
    diags_.push_back(error_at(s, code, msg));
  }

  static std::string show(const TypeRef& t) { return t.str(); }

  // NATURAL literals may stand where REAL is expected.
  bool fits(const TermPtr& term, const TypeRef& actual, const TypeRef& expected) {
    if (actual == expected) return true;
    return expected.kind == Base::Real && actual.kind == Base::Natural && is_nat_literal(term);
  }

  std::optional<TypeRef> lookup_bound(const std::string& n) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      for (auto v = it->rbegin(); v != it->rend(); ++v)
        if (v->name == n) return v->type;
    return std::nullopt;
  }

  std::optional<TypeRef> record(const TermPtr& t, std::optional<TypeRef> ty) {
    if (ty) out_.symbol_table[t.get()] = *ty;
    return ty;
  }

  void check_args(const TermPtr& t, const std::vector<TypeRef>& params, const std::string& what) {
    if (t->args.size() != params.size()) {
      error(t->span, "arity",
            what + " expects " + std::to_string(params.size()) + " argument(s) but got " +
                std::to_string(t->args.size()));
      for (auto& a : t->args) term(a);
      return;
    }
    for (size_t i = 0; i < params.size(); ++i) {
      auto at = term(t->args[i]);
      if (at && !fits(t->args[i], *at, params[i]))
        error(t->args[i]->span, "type-mismatch",
              "argument " + std::to_string(i + 1) + " of " + what + " has type " + show(*at) +
                  ", expected " + show(params[i]));
    }
  }

  std::optional<TypeRef> term(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Num:
        return record(t, t->is_real_literal() ? TypeRef::real() : TypeRef::natural());
      case Term::Kind::Bool:
        return record(t, TypeRef::boolean());
      case Term::Kind::Sum: {
        auto lt = term(t->args[0]);
        term(t->args[1]);
        if (lt && lt->kind != Base::Natural) {
          error(t->span, "type-mismatch", "addition requires a NATURAL operand, found " + show(*lt));
          return std::nullopt;
        }
        return record(t, TypeRef::natural());
      }
      case Term::Kind::Var: {
        if (auto b = lookup_bound(t->name)) return record(t, b);
        auto enums = ctx_.enums_with(t->name);
        if (enums.size() == 1) return record(t, TypeRef::named(enums[0]));
        if (enums.size() > 1) {
          error(t->span, "ambiguous", "'" + t->name + "' is a member of several enum types");
          return std::nullopt;
        }
        for (auto& [set, ctor] : ctx_.ctors_named(t->name))
          if (ctor->args.empty()) return record(t, TypeRef::named(set));
        error(t->span, "unbound", "unbound variable '" + t->name + "'");
        return std::nullopt;
      }
      case Term::Kind::App: {
        auto cands = ctx_.ctors_named(t->name);
        if (cands.empty()) {
          error(t->span, "unknown-ctor", "unknown constructor '" + t->name + "'");
          for (auto& a : t->args) term(a);
          return std::nullopt;
        }
        if (cands.size() > 1) {
          error(t->span, "ambiguous", "constructor '" + t->name + "' is declared in several sets");
          return std::nullopt;
        }
        check_args(t, cands[0].second->args, "constructor '" + t->name + "'");
        return record(t, TypeRef::named(cands[0].first));
      }
      case Term::Kind::Io: {
        if (!t->node.empty()) {
          error(t->span, "qualified-access",
                "node-qualified access '" + t->node + "." + dir_str(t->dir) + "." + t->name +
                    "' is not allowed inside a contract");
          return std::nullopt;
        }
        if (in_assume_ && t->dir == Dir::Out)
          error(t->span, "out-in-assume", "assumptions may only refer to inputs, found 'out." +
                                              t->name + "'");
        auto v = c_.find_var(t->dir, t->name);
        if (!v) {
          error(t->span, "unknown-var",
                std::string("no ") + (t->dir == Dir::In ? "input" : "output") + " named '" +
                    t->name + "'");
          for (auto& a : t->args) term(a);
          return std::nullopt;
        }
        auto fn = ctx_.expr_of(v->type);
        bool is_fn = fn && fn->kind == TypeExpr::Kind::Function;
        if (t->applied) {
          if (!is_fn) {
            error(t->span, "not-a-function",
                  std::string(dir_str(t->dir)) + "." + t->name + " of type " + show(v->type) +
                      " cannot be applied");
            for (auto& a : t->args) term(a);
            return std::nullopt;
          }
          check_args(t, fn->domain, std::string(dir_str(t->dir)) + "." + t->name);
          return record(t, fn->codomain);
        }
        if (is_fn) {
          error(t->span, "unapplied-function",
                std::string(dir_str(t->dir)) + "." + t->name + " is a function and must be applied");
          return std::nullopt;
        }
        return record(t, v->type);
      }
    }
    return std::nullopt;
  }

  void visit(const FormulaPtr& f) {
    using K = Formula::Kind;
    switch (f->kind) {
      case K::Forall:
      case K::Exists:
      case K::ExistsUnique:
        for (auto& v : f->vars) {
          bool ok = v.type.kind != Base::Named || ctx_.is_enum(v.type);
          if (v.type.kind == Base::Named && !ctx_.find(v.type.name))
            error(f->span, "unknown-type", "unknown type '" + v.type.name + "'");
          else if (!ok)
            error(f->span, "bad-domain",
                  "quantifier domain '" + v.type.name + "' must be REAL, NATURAL, BOOL or an enum");
        }
        scopes_.push_back(f->vars);
        visit(f->lhs);
        scopes_.pop_back();
        return;
      case K::And:
      case K::Or:
      case K::Implies:
      case K::Iff:
        visit(f->lhs);
        visit(f->rhs);
        return;
      case K::Not:
        visit(f->lhs);
        return;
      case K::Bool:
        return;
      case K::Atom: {
        auto t = term(f->t1);
        if (t && t->kind != Base::Bool)
          error(f->span, "type-mismatch", "a formula atom must be BOOL, found " + show(*t));
        return;
      }
      case K::Member: {
        auto t = term(f->t1);
        if (!t) return;
        auto e = ctx_.expr_of(*t);
        if (!e || e->kind != TypeExpr::Kind::Enum) {
          error(f->span, "type-mismatch", "membership requires an enum-typed term, found " + show(*t));
          return;
        }
        for (auto& m : f->members) {
          bool found = false;
          for (auto& x : e->members) found = found || x == m;
          if (!found)
            error(f->span, "type-mismatch", "'" + m + "' is not a member of " + t->name);
        }
        return;
      }
      case K::Compare: {
        auto a = term(f->t1);
        auto b = term(f->t2);
        if (!a || !b) return;
        if (f->op != CmpOp::Eq && f->op != CmpOp::Ne) {
          if (!is_numeric(*a) || !is_numeric(*b)) {
            error(f->span, "type-mismatch",
                  std::string("'") + cmp_str(f->op) + "' needs numeric operands, found " + show(*a) +
                      " and " + show(*b));
            return;
          }
        }
        if (!fits(f->t1, *a, *b) && !fits(f->t2, *b, *a))
          error(f->span, "type-mismatch",
                "cannot compare " + show(*a) + " with " + show(*b));
        return;
      }
    }
  }
};

}  // namespace

Result<TypedContract> check_contract(const Contract& c, const ContextTable& ctx) {
  Result<TypedContract> r;
  TypedContract out;
  out.contract = c;
  auto& diags = r.diags;

  std::set<std::pair<Dir, std::string>> seen;
  for (auto* vs : {&c.inputs, &c.outputs}) {
    for (auto& v : *vs) {
      if (!seen.insert({v.dir, v.name}).second)
        diags.push_back(error_at(v.span, "duplicate-var",
                                 std::string("duplicate ") + dir_str(v.dir) + " variable '" +
                                     v.name + "'"));
      if (v.type.kind == Base::Named && !ctx.find(v.type.name))
        diags.push_back(
            error_at(v.span, "unknown-type", "unknown type '" + v.type.name + "' for '" + v.name + "'"));
    }
  }

  for (size_t i = 0; i < c.topics.size(); ++i) {
    auto& t = c.topics[i];
    if (!t.binding) continue;
    auto& b = *t.binding;
    if (b.dir) {
      if (!c.find_var(*b.dir, b.var)) {
        diags.push_back(error_at(t.span, "dangling-topic",
                                 "topic '" + t.topic_name + "' matches " + dir_str(*b.dir) + "." +
                                     b.var + ", which is not declared"));
        continue;
      }
      out.topic_index[{*b.dir, b.var}] = i;
      continue;
    }
    bool in = c.find_var(Dir::In, b.var) != nullptr;
    bool o = c.find_var(Dir::Out, b.var) != nullptr;
    if (in && o) {
      diags.push_back(error_at(t.span, "ambiguous-topic",
                               "topic '" + t.topic_name + "' matches '" + b.var +
                                   "', which is both an input and an output"));
    } else if (!in && !o) {
      diags.push_back(error_at(t.span, "dangling-topic",
                               "topic '" + t.topic_name + "' matches '" + b.var +
                                   "', which is not declared"));
    } else {
      out.topic_index[{in ? Dir::In : Dir::Out, b.var}] = i;
    }
  }

  Checker ck(c, ctx, out, diags);
  for (auto& a : c.assumes) ck.formula(a, true);
  for (auto& g : c.guarantees) ck.formula(g, false);

  sort_diagnostics(diags);
  if (!has_errors(diags)) r.value = std::move(out);
  return r;
}

const TypedContract* CheckedDocument::find(const std::string& node) const {
  for (auto& c : contracts)
    if (c.contract.node_name == node) return &c;
  return nullptr;
}

Result<CheckedDocument> check_documents(const std::vector<Document>& docs) {
  Result<CheckedDocument> r;
  std::vector<ContextDecl> decls;
  std::vector<int> decl_source;
  for (size_t i = 0; i < docs.size(); ++i)
    for (auto& d : docs[i].all_decls()) {
      decls.push_back(d);
      decl_source.push_back(static_cast<int>(i));
    }
  auto ctx = resolve_context(decls);
  for (auto d : ctx.diags) {
    // attribute to the first document declaring a type at that position
    for (size_t k = 0; k < decls.size(); ++k)
      if (decls[k].span.line == d.span.line && decls[k].span.col == d.span.col) {
        d.source = decl_source[k];
        break;
      }
    r.diags.push_back(d);
  }
  if (!ctx.value) return r;

  CheckedDocument out;
  out.context = *ctx.value;
  std::set<std::string> nodes;
  for (size_t i = 0; i < docs.size(); ++i) {
    for (auto& c : docs[i].contracts) {
      if (!nodes.insert(c.node_name).second)
        r.diags.push_back(error_at(c.span, "duplicate-node", "duplicate node '" + c.node_name + "'"));
      auto tc = check_contract(c, out.context);
      for (auto d : tc.diags) {
        d.source = static_cast<int>(i);
        r.diags.push_back(d);
      }
      if (tc.value) out.contracts.push_back(std::move(*tc.value));
    }
  }
  if (!has_errors(r.diags)) r.value = std::move(out);
  return r;
}

}  // namespace contracts

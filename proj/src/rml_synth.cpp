#include "contracts/rml_synth.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace contracts {

namespace {

struct Slot {
  std::string field;
  std::string param;
};

void push_slot(std::vector<Slot>& out, std::string field, std::string param) {
  auto taken = [&](auto pred) { return std::any_of(out.begin(), out.end(), pred); };
  std::string f = field, p = param;
  for (int k = 2; taken([&](const Slot& s) { return s.field == f; }); ++k) f = field + std::to_string(k);
  for (int k = 2; taken([&](const Slot& s) { return s.param == p; }); ++k) p = param + std::to_string(k);
  out.push_back({f, p});
}

// One slot per type; consecutive REALs pair up as coordinates.
void type_slots(const std::vector<TypeRef>& ts, const ContextTable& ctx, std::vector<Slot>& out) {
  for (size_t i = 0; i < ts.size(); ++i) {
    const TypeRef& t = ts[i];
    if (t.kind == Base::Real && i + 1 < ts.size() && ts[i + 1].kind == Base::Real) {
      push_slot(out, "posX", "x");
      push_slot(out, "posY", "y");
      ++i;
    } else if (t.kind == Base::Real) {
      push_slot(out, "value", "v");
    } else if (t.kind == Base::Natural) {
      push_slot(out, "id", "i");
    } else if (t.kind == Base::Bool) {
      push_slot(out, "data", "b");
    } else if (ctx.is_enum(t)) {
      push_slot(out, "level", "Lvl");
    } else if (auto* e = ctx.expr_of(t); e && e->kind == TypeExpr::Kind::CtorSet) {
      push_slot(out, "command", "Cmd");
    } else {
      push_slot(out, "value", "v");
    }
  }
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (size_t i = 0; i < name.size();) {
    if (name[i] == '\'') {
      size_t n = 0;
      while (i < name.size() && name[i] == '\'') ++n, ++i;
      out += std::to_string(n);
    } else {
      out += name[i++];
    }
  }
  return out;
}

std::string number_token(double c) {
  std::ostringstream ss;
  ss << c;
  std::string s = ss.str();
  for (auto& ch : s) {
    if (ch == '.') ch = 'p';
    if (ch == '-') ch = 'm';
  }
  return s;
}

const char* op_token(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "lt";
    case CmpOp::Le: return "le";
    case CmpOp::Gt: return "gt";
    case CmpOp::Ge: return "ge";
    case CmpOp::Eq: return "eq";
    case CmpOp::Ne: return "ne";
  }
  return "?";
}

CmpOp flip(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
  }
}

void collect_io(const TermPtr& t, std::vector<const Term*>& out) {
  if (!t) return;
  if (t->kind == Term::Kind::Io) out.push_back(t.get());
  for (auto& a : t->args) collect_io(a, out);
}

void collect_io(const FormulaPtr& f, std::vector<const Term*>& out) {
  if (!f) return;
  collect_io(f->lhs, out);
  collect_io(f->rhs, out);
  collect_io(f->t1, out);
  collect_io(f->t2, out);
}

class Translator {
 public:
  Translator(const TypedContract& c, const ContextTable& ctx, std::vector<EventType>& ets,
             std::vector<Diagnostic>& diags)
      : c_(c), ctx_(ctx), ets_(ets), diags_(diags) {
    for (auto& g : c.contract.guarantees) {
      std::vector<const Term*> ios;
      collect_io(g, ios);
      for (auto* t : ios) dirs_[t->name].insert(t->dir);
    }
  }

  RmlPtr run(const FormulaPtr& f) {
    scope_.clear();
    used_.clear();
    return formula(f);
  }

 private:
  using FK = Formula::Kind;

  RmlPtr formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FK::Bool: return f->bval ? rml::any() : rml::none();
      case FK::Not: return rml::negation(formula(f->lhs));
      case FK::And: return rml::conj({formula(f->lhs), formula(f->rhs)});
      case FK::Or: return rml::disj({formula(f->lhs), formula(f->rhs)});
      case FK::Implies: {
        auto a = formula(f->lhs), b = formula(f->rhs);
        return rml::disj({rml::conj({rml::negation(a), b}),
                          rml::conj({rml::negation(a), rml::negation(b)}), rml::conj({a, b})});
      }
      case FK::Iff: {
        auto a = formula(f->lhs), b = formula(f->rhs);
        return rml::disj({rml::conj({a, b}), rml::conj({rml::negation(a), rml::negation(b)})});
      }
      case FK::Exists:
      case FK::ExistsUnique:
      case FK::Forall: {
        if (f->kind == FK::ExistsUnique)
          diags_.push_back(warning_at(f->span, "exists-unique",
                                      "uniqueness is not checked at runtime; translated as exists"));
        std::vector<std::string> names;
        for (auto& v : f->vars) names.push_back(bind(v.name));
        auto body = formula(f->lhs);
        scope_.resize(scope_.size() - f->vars.size());
        if (f->kind == FK::Forall) return rml::negation(rml::lets(names, rml::negation(body)));
        return rml::lets(names, body);
      }
      case FK::Atom: {
        if (f->t1->kind != Term::Kind::Io) return unsupported(f->span, "boolean atom without an io access");
        return equality(*f->t1, mk_bool_term(true), CmpOp::Eq, f->span);
      }
      case FK::Member: return membership(f);
      case FK::Compare: return compare(f);
    }
    return rml::none();
  }

  std::string bind(const std::string& rcl) {
    std::string base = sanitize(rcl), name = base;
    for (int k = 2; used_.count(name); ++k) name = base + "_" + std::to_string(k);
    used_.insert(name);
    scope_.emplace_back(rcl, name);
    return name;
  }

  const std::string* lookup(const std::string& rcl) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == rcl) return &it->second;
    return nullptr;
  }

  RmlPtr unsupported(Span s, const std::string& what) {
    diags_.push_back(error_at(s, "rml-unsupported", "cannot translate to RML: " + what));
    return rml::none();
  }

  // ---- event types ----

  struct IoInfo {
    const IoVar* var = nullptr;
    std::vector<TypeRef> domain;
    TypeRef value;
    bool function = false;
    const TypeExpr* value_expr = nullptr;

    bool bool_codomain() const { return function && value.kind == Base::Bool; }
    bool ctor_valued() const { return value_expr && value_expr->kind == TypeExpr::Kind::CtorSet; }
  };

  std::optional<IoInfo> info(const Term& io, Span s) {
    IoInfo r;
    r.var = c_.contract.find_var(io.dir, io.name);
    if (!r.var) {
      unsupported(s, std::string("unknown variable ") + dir_str(io.dir) + "." + io.name);
      return std::nullopt;
    }
    auto* e = ctx_.expr_of(r.var->type);
    if (e && e->kind == TypeExpr::Kind::Function) {
      r.function = true;
      r.domain = e->domain;
      r.value = e->codomain;
    } else {
      r.value = r.var->type;
    }
    r.value_expr = ctx_.expr_of(r.value);
    return r;
  }

  std::string base_name(const Term& io) {
    auto& ds = dirs_[io.name];
    if (ds.size() > 1) return io.name + (io.dir == Dir::In ? "_in" : "_out");
    return io.name;
  }

  std::string topic_of(const Term& io, const std::string& fallback, Span s) {
    if (!c_.contract.topics_declared) {
      if (warned_.insert(fallback).second)
        diags_.push_back(warning_at(s, "no-topics",
                                    "node has no topics clause; event type '" + fallback +
                                        "' uses its own name as topic"));
      return fallback;
    }
    auto* b = c_.topic_for(io.dir, io.name);
    if (!b) {
      diags_.push_back(error_at(s, "unbound-topic",
                                std::string("'") + dir_str(io.dir) + "." + io.name +
                                    "' has no topic binding"));
      return fallback;
    }
    return topic_path(*b, c_, ctx_, &diags_);
  }

  // Declares (or reuses) the event type for an io access; `ctor` selects a constructor shape.
  std::string ensure_et(const Term& io, const IoInfo& in, const Ctor* ctor, Span s) {
    std::vector<Slot> slots;
    type_slots(in.domain, ctx_, slots);
    if (ctor) {
      push_slot(slots, "command", "Cmd");
      type_slots(ctor->args, ctx_, slots);
    } else if (!in.bool_codomain()) {
      type_slots({in.value}, ctx_, slots);
    }
    EventType et;
    std::string base = base_name(io);
    et.name = base;
    et.pattern.emplace_back("topic", PatternValue{false, {}, Lit::string(topic_of(io, base, s))});
    for (auto& sl : slots) {
      et.params.push_back(sl.param);
      et.pattern.emplace_back(sl.field, PatternValue{true, sl.param, {}});
    }
    return declare(et, ctor ? base + "_" + ctor->name : base);
  }

  std::string declare(EventType et, const std::string& alt) {
    for (auto& e : ets_) {
      if (e.name != et.name || e.params.size() != et.params.size()) continue;
      if (et_alpha_equal(e, et)) return e.name;
      et.name = alt;
      for (auto& e2 : ets_)
        if (et_alpha_equal(e2, et)) return e2.name;
      break;
    }
    ets_.push_back(et);
    return et.name;
  }

  // ---- arguments ----

  std::optional<EtArg> arg(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Var:
        if (auto* v = lookup(t->name)) return EtArg::variable(*v);
        return EtArg::constant(Lit::string(t->name));
      case Term::Kind::Num: return EtArg::constant(Lit::number(t->number()));
      case Term::Kind::Bool: return EtArg::constant(Lit::boolean(t->bval));
      case Term::Kind::App:
        if (t->args.empty()) return EtArg::constant(Lit::string(t->name));
        break;
      case Term::Kind::Sum: {
        auto& a = t->args[0];
        auto& b = t->args[1];
        auto var_num = [&](const TermPtr& v, const TermPtr& n) -> std::optional<EtArg> {
          if (v->kind != Term::Kind::Var || n->kind != Term::Kind::Num) return std::nullopt;
          auto* name = lookup(v->name);
          if (!name) return std::nullopt;
          return EtArg::plus(*name, n->number());
        };
        if (auto r = var_num(a, b)) return r;
        if (auto r = var_num(b, a)) return r;
        break;
      }
      default: break;
    }
    return std::nullopt;
  }

  bool prefix_args(const Term& io, std::vector<EtArg>& out, Span s) {
    for (auto& a : io.args) {
      auto e = arg(a);
      if (!e) {
        unsupported(s, "io argument must be a variable, a literal or variable plus a constant");
        return false;
      }
      out.push_back(*e);
    }
    return true;
  }

  const Ctor* find_ctor(const IoInfo& in, const std::string& name) {
    for (auto& c : in.value_expr->ctors)
      if (c.name == name) return &c;
    return nullptr;
  }

  // ---- atoms ----

  RmlPtr compare(const FormulaPtr& f) {
    TermPtr lhs = f->t1, rhs = f->t2;
    CmpOp op = f->op;
    bool l_io = lhs->kind == Term::Kind::Io, r_io = rhs->kind == Term::Kind::Io;
    if (!l_io && !r_io) return unsupported(f->span, "comparison without an io access");
    if (l_io && r_io) return io_equality(*lhs, *rhs, op, f->span);
    if (!l_io) {
      std::swap(lhs, rhs);
      op = flip(op);
    }
    if (op == CmpOp::Eq || op == CmpOp::Ne) return equality(*lhs, rhs, op, f->span);
    return ordering(*lhs, rhs, op, f->span);
  }

  RmlPtr equality(const Term& io, const TermPtr& rhs, CmpOp op, Span s) {
    auto in = info(io, s);
    if (!in) return rml::none();
    std::vector<EtArg> args;
    if (!prefix_args(io, args, s)) return rml::none();
    bool positive = op == CmpOp::Eq;

    if (in->bool_codomain()) {
      if (rhs->kind != Term::Kind::Bool) return unsupported(s, "boolean function compared with a non-literal");
      if (!rhs->bval) positive = !positive;
      auto name = ensure_et(io, *in, nullptr, s);
      return positive ? rml::et(name, args) : rml::neg_et(name, args);
    }
    if (in->ctor_valued()) {
      bool app = rhs->kind == Term::Kind::App || (rhs->kind == Term::Kind::Var && !lookup(rhs->name));
      if (!app) return unsupported(s, "constructor-valued io compared with a non-constructor");
      const Ctor* ctor = find_ctor(*in, rhs->name);
      if (!ctor) return unsupported(s, "unknown constructor '" + rhs->name + "'");
      args.push_back(EtArg::constant(Lit::string(ctor->name)));
      for (auto& a : rhs->args) {
        auto e = arg(a);
        if (!e) return unsupported(s, "constructor argument must be a variable or a literal");
        args.push_back(*e);
      }
      auto name = ensure_et(io, *in, ctor, s);
      return positive ? rml::et(name, args) : rml::neg_et(name, args);
    }
    auto e = arg(rhs);
    if (!e) return unsupported(s, "right-hand side must be a variable, a literal or variable plus a constant");
    args.push_back(*e);
    auto name = ensure_et(io, *in, nullptr, s);
    return positive ? rml::et(name, args) : rml::neg_et(name, args);
  }

  // Two io accesses share a fresh value variable.
  RmlPtr io_equality(const Term& a, const Term& b, CmpOp op, Span s) {
    if (op != CmpOp::Eq && op != CmpOp::Ne) return unsupported(s, "ordering between two io accesses");
    auto ia = info(a, s), ib = info(b, s);
    if (!ia || !ib) return rml::none();
    if (ia->bool_codomain() || ib->bool_codomain() || ia->ctor_valued() || ib->ctor_valued())
      return unsupported(s, "io equality over boolean functions or constructors");
    std::string v = bind("v");
    scope_.pop_back();
    std::vector<EtArg> aa, ba;
    if (!prefix_args(a, aa, s) || !prefix_args(b, ba, s)) return rml::none();
    aa.push_back(EtArg::variable(v));
    ba.push_back(EtArg::variable(v));
    auto na = ensure_et(a, *ia, nullptr, s), nb = ensure_et(b, *ib, nullptr, s);
    auto rb = op == CmpOp::Eq ? rml::et(nb, ba) : rml::neg_et(nb, ba);
    return rml::let(v, rml::conj({rml::et(na, aa), rb}));
  }

  // Ordering against a numeric literal becomes a guarded event type.
  RmlPtr ordering(const Term& io, const TermPtr& rhs, CmpOp op, Span s) {
    auto in = info(io, s);
    if (!in) return rml::none();
    if (rhs->kind != Term::Kind::Num) return unsupported(s, "ordering against a non-literal");
    if (in->value.kind != Base::Real && in->value.kind != Base::Natural)
      return unsupported(s, "ordering on a non-numeric io");
    std::vector<EtArg> args;
    if (!prefix_args(io, args, s)) return rml::none();
    std::vector<Slot> slots;
    type_slots(in->domain, ctx_, slots);
    std::string internal = "v";
    for (int k = 0; std::any_of(slots.begin(), slots.end(), [&](auto& sl) { return sl.param == internal; }); ++k)
      internal = "v" + std::to_string(k);
    std::string base = base_name(io);
    double c = rhs->number();
    EventType et;
    et.name = base + "_" + op_token(op) + "_" + number_token(c);
    et.pattern.emplace_back("topic", PatternValue{false, {}, Lit::string(topic_of(io, base, s))});
    for (auto& sl : slots) {
      et.params.push_back(sl.param);
      et.pattern.emplace_back(sl.field, PatternValue{true, sl.param, {}});
    }
    std::vector<Slot> vs = slots;
    type_slots({in->value}, ctx_, vs);
    et.pattern.emplace_back(vs.back().field, PatternValue{false, internal, {}});
    et.guard = Guard{internal, op, c};
    auto name = declare(et, et.name + "_2");
    return rml::et(name, args);
  }

  RmlPtr membership(const FormulaPtr& f) {
    if (f->t1->kind != Term::Kind::Io) return unsupported(f->span, "membership without an io access");
    const Term& io = *f->t1;
    auto in = info(io, f->span);
    if (!in) return rml::none();
    std::vector<std::string> universe;
    if (in->value_expr && in->value_expr->kind == TypeExpr::Kind::Enum)
      universe = in->value_expr->members;
    else if (in->ctor_valued())
      for (auto& c : in->value_expr->ctors) universe.push_back(c.name);
    else
      return unsupported(f->span, "membership on a type without named members");
    std::vector<EtArg> prefix;
    if (!prefix_args(io, prefix, f->span)) return rml::none();

    std::vector<std::string> pos, neg;
    for (auto& m : universe) {
      bool listed = std::find(f->members.begin(), f->members.end(), m) != f->members.end();
      (listed != f->negated ? pos : neg).push_back(m);
    }
    auto atom = [&](const std::string& m, bool positive) {
      auto args = prefix;
      args.push_back(EtArg::constant(Lit::string(m)));
      const Ctor* ctor = in->ctor_valued() ? find_ctor(*in, m) : nullptr;
      if (ctor)
        for (size_t k = 0; k < ctor->args.size(); ++k) args.push_back(EtArg::wildcard());
      auto name = ensure_et(io, *in, ctor, f->span);
      return positive ? rml::et(name, args) : rml::neg_et(name, args);
    };
    // Whichever of the set and its complement is smaller.
    std::vector<RmlPtr> ks;
    if (pos.size() <= neg.size()) {
      for (auto& m : pos) ks.push_back(atom(m, true));
      return rml::disj(ks);
    }
    for (auto& m : neg) ks.push_back(atom(m, false));
    return rml::conj(ks);
  }

  const TypedContract& c_;
  const ContextTable& ctx_;
  std::vector<EventType>& ets_;
  std::vector<Diagnostic>& diags_;
  std::map<std::string, std::set<Dir>> dirs_;
  std::vector<std::pair<std::string, std::string>> scope_;
  std::set<std::string> used_;
  std::set<std::string> warned_;
};

bool has_package(const std::string& t) { return t.find('/') != std::string::npos; }

}  // namespace

std::string topic_path(const TopicBinding& b, const TypedContract& c, const ContextTable& ctx,
                       std::vector<Diagnostic>* diags) {
  (void)ctx;
  if (has_package(b.message_type)) return b.message_type;
  std::string pkg;
  for (auto& t : c.contract.topics) {
    if (has_package(t.message_type)) {
      pkg = t.message_type.substr(0, t.message_type.find('/'));
      break;
    }
  }
  const IoVar* v = nullptr;
  if (b.binding) {
    if (b.binding->dir)
      v = c.contract.find_var(*b.binding->dir, b.binding->var);
    else if (!(v = c.contract.find_var(Dir::In, b.binding->var)))
      v = c.contract.find_var(Dir::Out, b.binding->var);
  }
  if (!pkg.empty() && v && v->type.kind == Base::Named) {
    std::string path = pkg + "/" + v->type.name;
    if (diags)
      diags->push_back(warning_at(b.span, "builtin-topic",
                                  "builtin message type '" + b.message_type + "' for '" + b.topic_name +
                                      "' mapped to '" + path + "'"));
    return path;
  }
  std::string t = b.message_type;
  if (!t.empty()) t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
  return "std_msgs/" + t;
}

Result<RmlPtr> translate_formula(const FormulaPtr& f, const TypedContract& c, const ContextTable& ctx,
                                 std::vector<EventType>& ets) {
  Result<RmlPtr> r;
  Translator tr(c, ctx, ets, r.diags);
  auto t = tr.run(f);
  if (!has_errors(r.diags)) r.value = t;
  return r;
}

Result<RmlSpec> synthesize_rml(const TypedContract& c, const ContextTable& ctx) {
  Result<RmlSpec> r;
  RmlSpec spec;
  Translator tr(c, ctx, spec.event_types, r.diags);
  int n = 0;
  for (auto& g : c.contract.guarantees) {
    auto t = simplify_term(rml::star(simplify_term(tr.run(g))));
    spec.terms.emplace_back("t" + std::to_string(++n), t);
  }
  // Diagnostics from the shared topic mapping repeat per event type.
  std::vector<Diagnostic> uniq;
  for (auto& d : r.diags) {
    bool dup = std::any_of(uniq.begin(), uniq.end(), [&](const Diagnostic& u) {
      return u.code == d.code && u.message == d.message && u.span.line == d.span.line &&
             u.span.col == d.span.col;
    });
    if (!dup) uniq.push_back(d);
  }
  r.diags = std::move(uniq);
  if (!has_errors(r.diags)) r.value = std::move(spec);
  return r;
}

Result<std::vector<EventType>> derive_event_types(const TypedContract& c, const ContextTable& ctx) {
  Result<std::vector<EventType>> r;
  auto s = synthesize_rml(c, ctx);
  r.diags = s.diags;
  if (s.ok()) r.value = s.value->event_types;
  return r;
}

Result<MonitorConfig> monitor_config(const TypedContract& c, const ContextTable& ctx,
                                     const std::string& log_path) {
  Result<MonitorConfig> r;
  MonitorConfig cfg;
  cfg.monitor_id = "monitor_" + c.contract.node_name;
  cfg.log_path = log_path.empty() ? "./" + c.contract.node_name + "_log.txt" : log_path;
  for (auto& b : c.contract.topics) {
    MonitorTopic t;
    t.name = topic_path(b, c, ctx, &r.diags);
    t.type = t.name;
    auto slash = t.type.find('/');
    t.type.replace(slash, 1, ".msg.");
    cfg.topics.push_back(t);
  }
  r.value = std::move(cfg);
  return r;
}

std::string emit_monitor_config(const MonitorConfig& cfg) {
  std::string s = "monitors:\n- monitor:\n";
  s += "    id: " + cfg.monitor_id + "\n";
  s += "    log: " + cfg.log_path + "\n";
  if (cfg.topics.empty()) return s + "    topics: []\n";
  s += "    topics:\n";
  for (auto& t : cfg.topics)
    s += "     - {action: " + t.action + ", name: " + t.name + ", type: " + t.type + "}\n";
  return s;
}

}  // namespace contracts

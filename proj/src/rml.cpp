#include "contracts/rml.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace contracts {

// ---- literals and arguments ----

Lit Lit::number(double v) {
  Lit l;
  l.kind = Kind::Num;
  l.num = v;
  return l;
}
Lit Lit::string(std::string s) {
  Lit l;
  l.kind = Kind::Str;
  l.str = std::move(s);
  return l;
}
Lit Lit::boolean(bool v) {
  Lit l;
  l.kind = Kind::Bool;
  l.b = v;
  return l;
}

namespace {

std::string number_text(double v) {
  if (std::floor(v) == v && std::fabs(v) < 1e15) return std::to_string(static_cast<long long>(v));
  std::ostringstream ss;
  ss << std::setprecision(15) << v;
  return ss.str();
}

bool is_ident(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return s != "_" && s != "true" && s != "false";
}

}  // namespace

std::string Lit::text() const {
  switch (kind) {
    case Kind::Num: return number_text(num);
    case Kind::Bool: return b ? "true" : "false";
    case Kind::Str: {
      if (is_ident(str)) return str;
      std::string s = "'";
      for (char c : str) {
        if (c == '\'' || c == '\\') s += '\\';
        s += c;
      }
      return s + "'";
    }
  }
  return "?";
}

bool Lit::operator==(const Lit& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Num: return num == o.num;
    case Kind::Str: return str == o.str;
    case Kind::Bool: return b == o.b;
  }
  return false;
}

bool Lit::operator<(const Lit& o) const {
  if (kind != o.kind) return kind < o.kind;
  switch (kind) {
    case Kind::Num: return num < o.num;
    case Kind::Str: return str < o.str;
    case Kind::Bool: return b < o.b;
  }
  return false;
}

EtArg EtArg::variable(std::string v) {
  EtArg a;
  a.kind = Kind::Var;
  a.var = std::move(v);
  return a;
}
EtArg EtArg::constant(Lit l) {
  EtArg a;
  a.kind = Kind::Const;
  a.value = std::move(l);
  return a;
}
EtArg EtArg::wildcard() {
  EtArg a;
  a.kind = Kind::Wild;
  return a;
}
EtArg EtArg::plus(std::string v, double c) {
  EtArg a;
  a.kind = Kind::Offset;
  a.var = std::move(v);
  a.offset = c;
  return a;
}

std::string EtArg::text() const {
  switch (kind) {
    case Kind::Var: return var;
    case Kind::Const: return value.text();
    case Kind::Wild: return "_";
    case Kind::Offset:
      return offset < 0 ? var + "-" + number_text(-offset) : var + "+" + number_text(offset);
  }
  return "?";
}

bool EtArg::operator==(const EtArg& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Var: return var == o.var;
    case Kind::Const: return value == o.value;
    case Kind::Wild: return true;
    case Kind::Offset: return var == o.var && offset == o.offset;
  }
  return false;
}

std::string EventType::topic() const {
  for (auto& [k, v] : pattern)
    if (k == "topic" && !v.is_param) return v.value.str;
  return {};
}

// ---- constructors ----

namespace rml {

namespace {

std::string args_key(const std::vector<EtArg>& args) {
  std::string s = "(";
  for (size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i].text();
  return s + ")";
}

std::shared_ptr<RmlTerm> node(RmlTerm::Kind k) {
  auto t = std::make_shared<RmlTerm>();
  t->kind = k;
  return t;
}

RmlPtr finish(std::shared_ptr<RmlTerm> t) {
  using K = RmlTerm::Kind;
  std::string k;
  switch (t->kind) {
    case K::Et: k = t->name + args_key(t->args); break;
    case K::NegEt: k = "!" + t->name + args_key(t->args); break;
    case K::Any: k = "any"; break;
    case K::None: k = "none"; break;
    case K::Eps: k = "eps"; break;
    case K::Let: {
      k = "let " + t->var;
      if (!t->excluded.empty()) {
        k += "\\{";
        for (size_t i = 0; i < t->excluded.size(); ++i) k += (i ? "," : "") + t->excluded[i].text();
        k += "}";
      }
      k += ";" + t->kids[0]->key;
      k = "{" + k + "}";
      break;
    }
    default: {
      const char* tag = t->kind == K::Concat ? "." : t->kind == K::And ? "&" : t->kind == K::Or ? "|"
                      : t->kind == K::Star ? "*" : "~";
      k = std::string(tag) + "(";
      for (size_t i = 0; i < t->kids.size(); ++i) k += (i ? "," : "") + t->kids[i]->key;
      k += ")";
    }
  }
  t->key = std::move(k);
  return t;
}

}  // namespace

RmlPtr et(std::string name, std::vector<EtArg> args) {
  auto t = node(RmlTerm::Kind::Et);
  t->name = std::move(name);
  t->args = std::move(args);
  return finish(t);
}
RmlPtr neg_et(std::string name, std::vector<EtArg> args) {
  auto t = node(RmlTerm::Kind::NegEt);
  t->name = std::move(name);
  t->args = std::move(args);
  return finish(t);
}
RmlPtr concat(RmlPtr a, RmlPtr b) {
  auto t = node(RmlTerm::Kind::Concat);
  t->kids = {std::move(a), std::move(b)};
  return finish(t);
}
RmlPtr conj(std::vector<RmlPtr> kids) {
  if (kids.size() == 1) return kids[0];
  if (kids.empty()) return any();
  auto t = node(RmlTerm::Kind::And);
  t->kids = std::move(kids);
  return finish(t);
}
RmlPtr disj(std::vector<RmlPtr> kids) {
  if (kids.size() == 1) return kids[0];
  if (kids.empty()) return none();
  auto t = node(RmlTerm::Kind::Or);
  t->kids = std::move(kids);
  return finish(t);
}
RmlPtr let(std::string var, RmlPtr body, std::vector<Lit> excluded) {
  auto t = node(RmlTerm::Kind::Let);
  t->var = std::move(var);
  t->kids = {std::move(body)};
  std::sort(excluded.begin(), excluded.end());
  excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
  t->excluded = std::move(excluded);
  return finish(t);
}
RmlPtr lets(const std::vector<std::string>& vars, RmlPtr body) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = let(*it, body);
  return body;
}
RmlPtr star(RmlPtr t) {
  auto s = node(RmlTerm::Kind::Star);
  s->kids = {std::move(t)};
  return finish(s);
}
RmlPtr any() { return finish(node(RmlTerm::Kind::Any)); }
RmlPtr none() { return finish(node(RmlTerm::Kind::None)); }
RmlPtr eps() { return finish(node(RmlTerm::Kind::Eps)); }
RmlPtr negation(RmlPtr t) {
  auto n = node(RmlTerm::Kind::Not);
  n->kids = {std::move(t)};
  return finish(n);
}

}  // namespace rml

RmlPtr RmlSpec::main() const {
  std::vector<RmlPtr> ts;
  for (auto& [_, t] : terms) ts.push_back(t);
  return ts.empty() ? rml::star(rml::any()) : rml::conj(ts);
}

const EventType* RmlSpec::find(const std::string& name, size_t arity) const {
  for (auto& e : event_types)
    if (e.name == name && e.params.size() == arity) return &e;
  return nullptr;
}

// ---- negation and simplification ----

RmlPtr negate(const RmlPtr& t) {
  using K = RmlTerm::Kind;
  switch (t->kind) {
    case K::Et: return rml::neg_et(t->name, t->args);
    case K::NegEt: return rml::et(t->name, t->args);
    case K::Any: return rml::none();
    case K::None: return rml::any();
    case K::Not: return t->kids[0];
    case K::And:
    case K::Or: {
      std::vector<RmlPtr> ks;
      for (auto& k : t->kids) ks.push_back(negate(k));
      return t->kind == K::And ? rml::disj(ks) : rml::conj(ks);
    }
    case K::Let: return rml::let(t->var, negate(t->kids[0]), t->excluded);
    default: return rml::negation(t);
  }
}

bool single_event(const RmlPtr& t) {
  using K = RmlTerm::Kind;
  switch (t->kind) {
    case K::Et:
    case K::NegEt:
    case K::Any:
    case K::None: return true;
    case K::And:
      return std::any_of(t->kids.begin(), t->kids.end(), [](auto& k) { return single_event(k); });
    case K::Or:
      return std::all_of(t->kids.begin(), t->kids.end(), [](auto& k) { return single_event(k); });
    case K::Let:
    case K::Not: return single_event(t->kids[0]);
    default: return false;
  }
}

bool uses_var(const RmlPtr& t, const std::string& v) {
  if (t->kind == RmlTerm::Kind::Et || t->kind == RmlTerm::Kind::NegEt) {
    for (auto& a : t->args)
      if ((a.kind == EtArg::Kind::Var || a.kind == EtArg::Kind::Offset) && a.var == v) return true;
    return false;
  }
  if (t->kind == RmlTerm::Kind::Let && t->var == v) return false;
  for (auto& k : t->kids)
    if (uses_var(k, v)) return true;
  return false;
}

namespace {

using K = RmlTerm::Kind;

bool all_single(const std::vector<RmlPtr>& ks) {
  return std::all_of(ks.begin(), ks.end(), [](auto& k) { return single_event(k); });
}

bool is_literal(const RmlPtr& t) { return t->kind == K::Et || t->kind == K::NegEt; }

std::vector<RmlPtr> members_of(const RmlPtr& t, K kind) {
  if (t->kind == kind) return t->kids;
  return {t};
}

int index_of(const std::vector<RmlPtr>& ks, const std::string& key, size_t skip = SIZE_MAX) {
  for (size_t i = 0; i < ks.size(); ++i)
    if (i != skip && ks[i]->key == key) return static_cast<int>(i);
  return -1;
}

RmlPtr simp(const RmlPtr& t);

RmlPtr rebuild(K kind, std::vector<RmlPtr> ks) {
  return kind == K::And ? rml::conj(std::move(ks)) : rml::disj(std::move(ks));
}

// One pass of the rules over an n-ary And/Or; returns nullptr when nothing applies.
RmlPtr step(K kind, const std::vector<RmlPtr>& ks) {
  const K dual = kind == K::And ? K::Or : K::And;
  const bool single = all_single(ks);
  auto unit = kind == K::And ? rml::any() : rml::none();   // identity element
  auto zero = kind == K::And ? rml::none() : rml::any();   // absorbing element

  // flatten, identities, duplicates
  std::vector<RmlPtr> flat;
  bool changed = false;
  for (auto& k : ks) {
    if (k->kind == kind) {
      for (auto& g : k->kids) flat.push_back(g);
      changed = true;
    } else if (k->key == unit->key && (kind == K::Or || single)) {
      changed = true;
    } else if (k->key == zero->key && (kind == K::And || single)) {
      return zero;
    } else if (index_of(flat, k->key) >= 0) {
      changed = true;
    } else {
      flat.push_back(k);
    }
  }
  if (changed) return rebuild(kind, flat);

  // complementary pair: p or neg p is any; p and neg p is none for event types only
  for (size_t i = 0; i < ks.size(); ++i) {
    if (!single_event(ks[i])) continue;
    if (kind == K::And && !is_literal(ks[i])) continue;
    int j = index_of(ks, simp(negate(ks[i]))->key, i);
    if (j < 0) continue;
    if (kind == K::And) return rml::none();
    std::vector<RmlPtr> rest;
    for (size_t m = 0; m < ks.size(); ++m)
      if (m != i && m != static_cast<size_t>(j)) rest.push_back(ks[m]);
    rest.insert(rest.begin() + std::min(i, static_cast<size_t>(j)), rml::any());
    return rebuild(kind, rest);
  }

  // factoring: (C and p) or (C and neg p) -> C, and its dual
  for (size_t i = 0; i < ks.size(); ++i) {
    for (size_t j = i + 1; j < ks.size(); ++j) {
      auto a = members_of(ks[i], dual), b = members_of(ks[j], dual);
      if (a.size() != b.size() || a.size() < 2) continue;
      std::vector<RmlPtr> only_a, only_b, common;
      for (auto& x : a) (index_of(b, x->key) >= 0 ? common : only_a).push_back(x);
      for (auto& x : b)
        if (index_of(a, x->key) < 0) only_b.push_back(x);
      if (only_a.size() != 1 || only_b.size() != 1) continue;
      auto p = only_a[0];
      if (kind == K::Or && !(single_event(ks[i]) && single_event(ks[j]))) continue;
      if (kind == K::And && !is_literal(p)) continue;
      if (simp(negate(p))->key != only_b[0]->key) continue;
      std::vector<RmlPtr> out;
      for (size_t m = 0; m < ks.size(); ++m) {
        if (m == j) continue;
        out.push_back(m == i ? rebuild(dual, common) : ks[m]);
      }
      return rebuild(kind, out);
    }
  }

  // absorption: x or (x and r) -> x, and its dual
  for (size_t i = 0; i < ks.size(); ++i) {
    if (ks[i]->kind != dual) continue;
    for (size_t j = 0; j < ks.size(); ++j) {
      if (j == i) continue;
      if (index_of(ks[i]->kids, ks[j]->key) >= 0) {
        std::vector<RmlPtr> out = ks;
        out.erase(out.begin() + i);
        return rebuild(kind, out);
      }
    }
  }

  // reduction: neg q or (q and r) -> neg q or r, and its dual
  for (size_t i = 0; i < ks.size(); ++i) {
    if (ks[i]->kind != dual) continue;
    if (kind == K::Or && !single_event(ks[i])) continue;
    auto& conj = ks[i]->kids;
    for (size_t c = 0; c < conj.size(); ++c) {
      auto q = conj[c];
      if (kind == K::Or && !single_event(q)) continue;
      if (kind == K::And && !is_literal(q)) continue;
      if (index_of(ks, simp(negate(q))->key, i) < 0) continue;
      std::vector<RmlPtr> rest = conj;
      rest.erase(rest.begin() + c);
      std::vector<RmlPtr> out = ks;
      out[i] = rest.empty() ? rebuild(dual, {}) : rebuild(dual, rest);
      return rebuild(kind, out);
    }
  }
  return nullptr;
}

RmlPtr simp(const RmlPtr& t) {
  switch (t->kind) {
    case K::Not: {
      auto n = negate(simp(t->kids[0]));
      return n->kind == K::Not ? n : simp(n);
    }
    case K::And:
    case K::Or: {
      std::vector<RmlPtr> ks;
      for (auto& k : t->kids) ks.push_back(simp(k));
      RmlPtr cur = rebuild(t->kind, ks);
      for (;;) {
        if (cur->kind != t->kind) return cur->kind == K::And || cur->kind == K::Or ? simp(cur) : cur;
        auto next = step(cur->kind, cur->kids);
        if (!next) return cur;
        if (next->kind == K::And || next->kind == K::Or) {
          std::vector<RmlPtr> nk;
          for (auto& k : next->kids) nk.push_back(simp(k));
          next = rebuild(next->kind, nk);
        } else {
          next = simp(next);
        }
        cur = next;
      }
    }
    case K::Let: {
      auto body = simp(t->kids[0]);
      if (!uses_var(body, t->var)) return body;
      return rml::let(t->var, body, t->excluded);
    }
    case K::Star: {
      auto k = simp(t->kids[0]);
      if (k->kind == K::Star) return k;
      if (k->kind == K::Eps || k->kind == K::None) return rml::eps();
      return rml::star(k);
    }
    case K::Concat: {
      auto a = simp(t->kids[0]), b = simp(t->kids[1]);
      if (a->kind == K::None || b->kind == K::None) return rml::none();
      if (a->kind == K::Eps) return b;
      if (b->kind == K::Eps) return a;
      return rml::concat(a, b);
    }
    default: return t;
  }
}

}  // namespace

RmlPtr simplify_term(const RmlPtr& t) { return simp(t); }

// ---- alpha equivalence ----

namespace {

using VarMap = std::vector<std::pair<std::string, std::string>>;

bool arg_eq(const EtArg& a, const EtArg& b, const VarMap& m) {
  if (a.kind != b.kind) return false;
  auto var_eq = [&](const std::string& x, const std::string& y) {
    for (auto it = m.rbegin(); it != m.rend(); ++it) {
      if (it->first == x || it->second == y) return it->first == x && it->second == y;
    }
    return x == y;
  };
  switch (a.kind) {
    case EtArg::Kind::Var: return var_eq(a.var, b.var);
    case EtArg::Kind::Offset: return a.offset == b.offset && var_eq(a.var, b.var);
    default: return a == b;
  }
}

bool alpha(const RmlPtr& a, const RmlPtr& b, VarMap& m) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case K::Et:
    case K::NegEt: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!arg_eq(a->args[i], b->args[i], m)) return false;
      return true;
    }
    case K::Let: {
      if (a->excluded.size() != b->excluded.size()) return false;
      m.emplace_back(a->var, b->var);
      bool ok = alpha(a->kids[0], b->kids[0], m);
      m.pop_back();
      return ok;
    }
    case K::And:
    case K::Or: {
      // kids may appear in any order
      if (a->kids.size() != b->kids.size()) return false;
      std::vector<bool> used(b->kids.size(), false);
      std::function<bool(size_t)> match = [&](size_t i) {
        if (i == a->kids.size()) return true;
        for (size_t j = 0; j < b->kids.size(); ++j) {
          if (used[j] || !alpha(a->kids[i], b->kids[j], m)) continue;
          used[j] = true;
          if (match(i + 1)) return true;
          used[j] = false;
        }
        return false;
      };
      return match(0);
    }
    default: {
      if (a->kids.size() != b->kids.size()) return false;
      for (size_t i = 0; i < a->kids.size(); ++i)
        if (!alpha(a->kids[i], b->kids[i], m)) return false;
      return true;
    }
  }
}

}  // namespace

bool rml_alpha_equal(const RmlPtr& a, const RmlPtr& b) {
  VarMap m;
  return alpha(a, b, m);
}

bool et_alpha_equal(const EventType& a, const EventType& b) {
  if (a.name != b.name || a.params.size() != b.params.size()) return false;
  if (a.pattern.size() != b.pattern.size()) return false;
  std::map<std::string, std::string> ren;
  for (size_t i = 0; i < a.params.size(); ++i) ren[a.params[i]] = b.params[i];
  for (auto& [k, v] : a.pattern) {
    auto it = std::find_if(b.pattern.begin(), b.pattern.end(), [&](auto& p) { return p.first == k; });
    if (it == b.pattern.end()) return false;
    auto& w = it->second;
    if (v.is_param != w.is_param) return false;
    if (v.is_param) {
      if (ren.count(v.name) ? ren[v.name] != w.name : v.name != w.name) return false;
    } else if (v.name.empty() != w.name.empty() || (v.name.empty() && !(v.value == w.value))) {
      return false;
    }
  }
  if (a.guard.has_value() != b.guard.has_value()) return false;
  if (a.guard && (a.guard->op != b.guard->op || a.guard->bound != b.guard->bound)) return false;
  return true;
}

// ---- rendering ----

namespace {

int prec(const RmlPtr& t) {
  switch (t->kind) {
    case K::Or: return 1;
    case K::And: return 2;
    case K::Concat: return 3;
    case K::Star: return 4;
    default: return 5;
  }
}

std::string render(const RmlPtr& t, bool uni);

std::string wrap(const RmlPtr& t, int need, bool uni) {
  std::string s = render(t, uni);
  return prec(t) < need ? "(" + s + ")" : s;
}

std::string et_text(const std::string& name, const std::vector<EtArg>& args) {
  if (args.empty()) return name;
  std::string s = name + "(";
  for (size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].text();
  return s + ")";
}

std::string render(const RmlPtr& t, bool uni) {
  const char* neg = uni ? "\xC2\xAC" : "!";
  switch (t->kind) {
    case K::Et: return et_text(t->name, t->args);
    case K::NegEt: return neg + et_text(t->name, t->args);
    case K::Any: return "any";
    case K::None: return "none";
    case K::Eps: return "empty";
    case K::Not: return std::string(neg) + "(" + render(t->kids[0], uni) + ")";
    case K::Or:
    case K::And: {
      std::string op = t->kind == K::Or ? (uni ? " \xE2\x88\xA8 " : " \\/ ")
                                        : (uni ? " \xE2\x88\xA7 " : " /\\ ");
      std::string s;
      for (size_t i = 0; i < t->kids.size(); ++i)
        s += (i ? op : "") + wrap(t->kids[i], prec(t) + 1, uni);
      return s;
    }
    case K::Concat: return wrap(t->kids[0], 3, uni) + " " + wrap(t->kids[1], 4, uni);
    case K::Star: return wrap(t->kids[0], 5, uni) + "*";
    case K::Let: {
      std::string vars;
      RmlPtr cur = t;
      while (cur->kind == K::Let) {
        vars += (vars.empty() ? "" : ", ") + cur->var;
        if (!cur->excluded.empty()) {
          vars += " \\ [";
          for (size_t i = 0; i < cur->excluded.size(); ++i)
            vars += (i ? ", " : "") + cur->excluded[i].text();
          vars += "]";
          cur = cur->kids[0];
          break;
        }
        cur = cur->kids[0];
      }
      return "{let " + vars + "; " + render(cur, uni) + "}";
    }
  }
  return "?";
}

const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

}  // namespace

std::string render_term(const RmlPtr& t, bool unicode) { return render(t, unicode); }

std::string render_event_type(const EventType& et) {
  std::string s = et.name;
  if (!et.params.empty()) {
    s += "(";
    for (size_t i = 0; i < et.params.size(); ++i) s += (i ? ", " : "") + et.params[i];
    s += ")";
  }
  s += " matches {";
  for (size_t i = 0; i < et.pattern.size(); ++i) {
    auto& [k, v] = et.pattern[i];
    s += (i ? ", " : " ") + k + ": ";
    if (!v.name.empty())
      s += v.name;
    else if (v.value.kind == Lit::Kind::Str)
      s += "'" + v.value.str + "'";
    else
      s += v.value.text();
  }
  s += et.pattern.empty() ? "}" : " }";
  if (et.guard) s += " with " + et.guard->var + " " + cmp_text(et.guard->op) + " " + number_text(et.guard->bound);
  return s + ";";
}

std::string emit_rml(const RmlSpec& spec) {
  std::string s;
  for (auto& et : spec.event_types) s += render_event_type(et) + "\n";
  for (auto& [name, t] : spec.terms) s += "\n" + name + " = " + render_term(t) + ";\n";
  return s;
}

// ---- parser ----

namespace {

enum class Tok {
  Ident, Num, Str, LParen, RParen, LBrace, RBrace, Comma, Semi, Colon, Assign,
  Star, Or, And, Not, Plus, Minus, Cmp, End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  CmpOp op = CmpOp::Eq;
  Span span;
};

struct RmlParseError {
  Span span;
  std::string message;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      Token t;
      t.span = {line_, col_, 1};
      if (i_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      char c = s_[i_];
      auto two = [&](const char* p) { return s_.substr(i_, 2) == p; };
      auto three = [&](const char* p) { return s_.substr(i_, std::strlen(p)) == p; };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t b = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' ||
                                  s_[i_] == '\''))
          adv();
        t.kind = Tok::Ident;
        t.text = std::string(s_.substr(b, i_ - b));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t b = i_;
        while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.'))
          adv();
        t.kind = Tok::Num;
        t.text = std::string(s_.substr(b, i_ - b));
      } else if (c == '\'' || c == '"') {
        adv();
        while (i_ < s_.size() && s_[i_] != c) {
          if (s_[i_] == '\\' && i_ + 1 < s_.size()) adv();
          t.text += s_[i_];
          adv();
        }
        if (i_ >= s_.size()) throw RmlParseError{t.span, "unterminated string"};
        adv();
        t.kind = Tok::Str;
      } else if (three("\xC2\xAC")) {
        adv(2);
        t.kind = Tok::Not;
      } else if (three("\xE2\x88\xA8")) {
        adv(3);
        t.kind = Tok::Or;
      } else if (three("\xE2\x88\xA7")) {
        adv(3);
        t.kind = Tok::And;
      } else if (two("\\/")) {
        adv(2);
        t.kind = Tok::Or;
      } else if (two("/\\")) {
        adv(2);
        t.kind = Tok::And;
      } else if (two("<=") || two(">=") || two("==") || two("!=")) {
        t.kind = Tok::Cmp;
        t.op = two("<=") ? CmpOp::Le : two(">=") ? CmpOp::Ge : two("==") ? CmpOp::Eq : CmpOp::Ne;
        adv(2);
      } else {
        adv();
        switch (c) {
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '{': t.kind = Tok::LBrace; break;
          case '}': t.kind = Tok::RBrace; break;
          case ',': t.kind = Tok::Comma; break;
          case ';': t.kind = Tok::Semi; break;
          case ':': t.kind = Tok::Colon; break;
          case '=': t.kind = Tok::Assign; break;
          case '*': t.kind = Tok::Star; break;
          case '!': t.kind = Tok::Not; break;
          case '+': t.kind = Tok::Plus; break;
          case '-': t.kind = Tok::Minus; break;
          case '<': t.kind = Tok::Cmp; t.op = CmpOp::Lt; break;
          case '>': t.kind = Tok::Cmp; t.op = CmpOp::Gt; break;
          default: throw RmlParseError{t.span, std::string("unexpected character '") + c + "'"};
        }
      }
      out.push_back(t);
    }
  }

 private:
  void adv(size_t n = 1) {
    for (size_t k = 0; k < n && i_ < s_.size(); ++k) {
      if (s_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(s_[i_]) & 0xC0) != 0x80) {
        ++col_;
      }
      ++i_;
    }
  }
  void skip() {
    for (;;) {
      while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) adv();
      if (s_.substr(i_, 2) == "//") {
        while (i_ < s_.size() && s_[i_] != '\n') adv();
        continue;
      }
      return;
    }
  }

  std::string_view s_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  RmlSpec spec() {
    RmlSpec s;
    while (peek().kind != Tok::End) {
      Token name = expect(Tok::Ident, "a declaration");
      std::vector<std::string> params;
      if (peek().kind == Tok::LParen) {
        next();
        if (peek().kind != Tok::RParen) {
          params.push_back(expect(Tok::Ident, "a parameter").text);
          while (accept(Tok::Comma)) params.push_back(expect(Tok::Ident, "a parameter").text);
        }
        expect(Tok::RParen, "')'");
      }
      if (peek().kind == Tok::Ident && peek().text == "matches") {
        next();
        s.event_types.push_back(event_type(name.text, params));
      } else {
        if (!params.empty()) throw RmlParseError{name.span, "a term definition takes no parameters"};
        expect(Tok::Assign, "'matches' or '='");
        s.terms.emplace_back(name.text, term());
      }
      expect(Tok::Semi, "';'");
    }
    return s;
  }

  RmlPtr standalone() {
    auto t = term();
    if (peek().kind != Tok::End) throw RmlParseError{peek().span, "unexpected input after term"};
    return t;
  }

 private:
  EventType event_type(const std::string& name, const std::vector<std::string>& params) {
    EventType et;
    et.name = name;
    et.params = params;
    expect(Tok::LBrace, "'{'");
    std::vector<std::string> unresolved;
    if (peek().kind != Tok::RBrace) {
      do {
        std::string key = expect(Tok::Ident, "a field name").text;
        expect(Tok::Colon, "':'");
        PatternValue v;
        Token t = next();
        if (t.kind == Tok::Str) {
          v.value = Lit::string(t.text);
        } else if (t.kind == Tok::Num) {
          v.value = Lit::number(std::stod(t.text));
        } else if (t.kind == Tok::Minus && peek().kind == Tok::Num) {
          v.value = Lit::number(-std::stod(next().text));
        } else if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false")) {
          v.value = Lit::boolean(t.text == "true");
        } else if (t.kind == Tok::Ident) {
          v.name = t.text;
          v.is_param = std::find(params.begin(), params.end(), t.text) != params.end();
          if (!v.is_param) unresolved.push_back(t.text);
        } else {
          throw RmlParseError{t.span, "expected a pattern value"};
        }
        et.pattern.emplace_back(key, v);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RBrace, "'}'");
    if (peek().kind == Tok::Ident && peek().text == "with") {
      next();
      Guard g;
      g.var = expect(Tok::Ident, "a guard variable").text;
      Token op = expect(Tok::Cmp, "a comparison");
      g.op = op.op;
      bool minus = accept(Tok::Minus);
      g.bound = std::stod(expect(Tok::Num, "a number").text) * (minus ? -1 : 1);
      et.guard = g;
    }
    // Pattern identifiers that are neither parameters nor the guard variable are atoms.
    for (auto& [k, v] : et.pattern) {
      if (!v.name.empty() && !v.is_param && !(et.guard && et.guard->var == v.name)) {
        v.value = Lit::string(v.name);
        v.name.clear();
      }
    }
    for (auto& p : params) {
      bool used = std::any_of(et.pattern.begin(), et.pattern.end(),
                              [&](auto& kv) { return kv.second.is_param && kv.second.name == p; });
      if (!used) throw RmlParseError{peek().span, "parameter '" + p + "' of '" + name + "' is unused"};
    }
    bool has_topic = std::any_of(et.pattern.begin(), et.pattern.end(),
                                 [](auto& kv) { return kv.first == "topic"; });
    if (!has_topic) throw RmlParseError{peek().span, "event type '" + name + "' has no topic"};
    return et;
  }

  RmlPtr term() {
    std::vector<RmlPtr> ks{conj_term()};
    while (accept(Tok::Or)) ks.push_back(conj_term());
    return rml::disj(ks);
  }

  RmlPtr conj_term() {
    std::vector<RmlPtr> ks{cat_term()};
    while (accept(Tok::And)) ks.push_back(cat_term());
    return rml::conj(ks);
  }

  bool starts_primary() const {
    auto k = peek().kind;
    return k == Tok::Ident || k == Tok::LParen || k == Tok::LBrace || k == Tok::Not;
  }

  RmlPtr cat_term() {
    RmlPtr t = post_term();
    while (starts_primary()) t = rml::concat(t, post_term());
    return t;
  }

  RmlPtr post_term() {
    RmlPtr t = primary();
    while (accept(Tok::Star)) t = rml::star(t);
    return t;
  }

  RmlPtr primary() {
    Token t = next();
    switch (t.kind) {
      case Tok::LParen: {
        auto inner = term();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::LBrace: {
        if (peek().kind == Tok::Ident && peek().text == "let") {
          next();
          std::vector<std::string> vars{expect(Tok::Ident, "a variable").text};
          while (accept(Tok::Comma)) vars.push_back(expect(Tok::Ident, "a variable").text);
          expect(Tok::Semi, "';'");
          for (auto& v : vars) scope_.push_back(v);
          auto body = term();
          scope_.resize(scope_.size() - vars.size());
          expect(Tok::RBrace, "'}'");
          return rml::lets(vars, body);
        }
        auto inner = term();
        expect(Tok::RBrace, "'}'");
        return inner;
      }
      case Tok::Not: {
        if (peek().kind == Tok::LParen) {
          next();
          auto inner = term();
          expect(Tok::RParen, "')'");
          return rml::negation(inner);
        }
        Token name = expect(Tok::Ident, "an event type");
        return rml::neg_et(name.text, args());
      }
      case Tok::Ident: {
        if (t.text == "any") return rml::any();
        if (t.text == "none") return rml::none();
        if (t.text == "empty") return rml::eps();
        return rml::et(t.text, args());
      }
      default: throw RmlParseError{t.span, "expected a term"};
    }
  }

  std::vector<EtArg> args() {
    std::vector<EtArg> out;
    if (!accept(Tok::LParen)) return out;
    if (accept(Tok::RParen)) return out;
    do out.push_back(arg());
    while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    return out;
  }

  EtArg arg() {
    Token t = next();
    if (t.kind == Tok::Num) return EtArg::constant(Lit::number(std::stod(t.text)));
    if (t.kind == Tok::Minus) return EtArg::constant(Lit::number(-std::stod(expect(Tok::Num, "a number").text)));
    if (t.kind == Tok::Str) return EtArg::constant(Lit::string(t.text));
    if (t.kind != Tok::Ident) throw RmlParseError{t.span, "expected an argument"};
    if (t.text == "_") return EtArg::wildcard();
    if (t.text == "true" || t.text == "false") return EtArg::constant(Lit::boolean(t.text == "true"));
    bool bound = std::find(scope_.begin(), scope_.end(), t.text) != scope_.end();
    if (!bound) return EtArg::constant(Lit::string(t.text));
    if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool minus = next().kind == Tok::Minus;
      double c = std::stod(expect(Tok::Num, "a number").text);
      return EtArg::plus(t.text, minus ? -c : c);
    }
    return EtArg::variable(t.text);
  }

  const Token& peek() const { return t_[p_]; }
  Token next() {
    Token t = t_[p_];
    if (p_ + 1 < t_.size()) ++p_;
    return t;
  }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  Token expect(Tok k, const std::string& what) {
    if (peek().kind != k) throw RmlParseError{peek().span, "expected " + what};
    return next();
  }

  std::vector<Token> t_;
  size_t p_ = 0;
  std::vector<std::string> scope_;
};

}  // namespace

Result<RmlSpec> parse_rml(std::string_view source) {
  Result<RmlSpec> r;
  try {
    Parser p(Lexer(source).run());
    r.value = p.spec();
  } catch (const RmlParseError& e) {
    r.diags.push_back(error_at(e.span, "syntax", e.message));
  }
  return r;
}

}  // namespace contracts

#include "contracts/calculus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "contracts/rcl.hpp"

namespace contracts {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::R1: return "R1";
    case Rule::R2: return "R2";
    case Rule::R3: return "R3";
    case Rule::R4: return "R4";
  }
  return "?";
}

const TypedContract* SystemModel::find(const std::string& node) const {
  auto it = contracts.find(node);
  return it == contracts.end() ? nullptr : &it->second;
}

std::vector<std::pair<IoKey, IoKey>> SystemModel::wires() const {
  std::vector<std::pair<IoKey, IoKey>> out;
  for (auto& e : edges)
    for (auto& s : e.sources)
      for (auto& d : e.sinks) out.emplace_back(s, d);
  return out;
}

std::vector<std::pair<IoKey, IoKey>> SystemModel::wires_between(const std::string& from,
                                                                const std::string& to) const {
  std::vector<std::pair<IoKey, IoKey>> out;
  for (auto& w : wires())
    if (w.first.node == from && w.second.node == to) out.push_back(w);
  return out;
}

TypeRef SystemModel::type_of(const IoKey& k) const {
  auto c = find(k.node);
  if (!c) return {};
  auto v = c->contract.find_var(k.dir, k.var);
  return v ? v->type : TypeRef{};
}

namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

TermPtr qualify_term(const TermPtr& t, const std::string& node) {
  if (t->kind == Term::Kind::Io && t->node.empty()) {
    std::vector<TermPtr> args;
    for (auto& a : t->args) args.push_back(qualify_term(a, node));
    return mk_io(t->dir, t->name, args, t->applied, node, t->span);
  }
  if (t->args.empty()) return t;
  auto copy = std::make_shared<Term>(*t);
  for (auto& a : copy->args) a = qualify_term(a, node);
  return copy;
}

template <class F>
FormulaPtr map_terms(const FormulaPtr& f, F fn) {
  if (!f) return f;
  auto copy = std::make_shared<Formula>(*f);
  copy->lhs = map_terms(f->lhs, fn);
  copy->rhs = map_terms(f->rhs, fn);
  if (f->t1) copy->t1 = fn(f->t1);
  if (f->t2) copy->t2 = fn(f->t2);
  return copy;
}

TermPtr rename_io_term(const TermPtr& t, const std::map<IoKey, IoKey>& sub) {
  std::vector<TermPtr> args;
  for (auto& a : t->args) args.push_back(rename_io_term(a, sub));
  if (t->kind == Term::Kind::Io) {
    auto it = sub.find({t->node, t->dir, t->name});
    if (it != sub.end())
      return mk_io(it->second.dir, it->second.var, args, t->applied, it->second.node, t->span);
  }
  if (args.empty()) return t;
  auto copy = std::make_shared<Term>(*t);
  copy->args = args;
  return copy;
}

FormulaPtr rename_io(const FormulaPtr& f, const std::map<IoKey, IoKey>& sub) {
  return map_terms(f, [&](const TermPtr& t) { return rename_io_term(t, sub); });
}

void term_io(const TermPtr& t, std::vector<IoKey>& out) {
  if (t->kind == Term::Kind::Io) {
    IoKey k{t->node, t->dir, t->name};
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  for (auto& a : t->args) term_io(a, out);
}

void formula_io(const FormulaPtr& f, std::vector<IoKey>& out) {
  if (!f) return;
  if (f->t1) term_io(f->t1, out);
  if (f->t2) term_io(f->t2, out);
  formula_io(f->lhs, out);
  formula_io(f->rhs, out);
}

FormulaPtr conjoin_unique(const std::vector<FormulaPtr>& fs) {
  std::vector<FormulaPtr> kept;
  for (auto& f : fs) {
    bool dup = false;
    for (auto& k : kept) dup = dup || alpha_equal(k, f);
    if (!dup) kept.push_back(f);
  }
  return conjoin(kept);
}

std::vector<TypedVar> typed_symbols(const SystemModel& m, const std::vector<FormulaPtr>& fs) {
  std::vector<IoKey> keys;
  for (auto& f : fs) formula_io(f, keys);
  std::vector<TypedVar> out;
  for (auto& k : keys) out.push_back({k.str(), m.type_of(k)});
  return out;
}

Diagnostic rule_error(const std::string& code, const std::string& msg) {
  return error_at({1, 1, 0}, code, msg);
}

FormulaPtr A(const SystemModel& m, const std::string& n) {
  return qualify(m.find(n)->contract.assumption(), n);
}
FormulaPtr G(const SystemModel& m, const std::string& n) {
  return qualify(m.find(n)->contract.guarantee(), n);
}

bool check_nodes(const SystemModel& m, const std::vector<std::string>& nodes,
                 std::vector<Diagnostic>& diags) {
  std::set<std::string> seen;
  for (auto& n : nodes) {
    if (!m.find(n)) {
      diags.push_back(rule_error("unknown-node", "unknown node '" + n + "'"));
      return false;
    }
    if (!seen.insert(n).second) {
      diags.push_back(rule_error("circular", "node '" + n +
                                                 "' appears twice; circular compositions are only "
                                                 "supported through the R4 loop shape"));
      return false;
    }
  }
  return true;
}

// Wires from a participant back to an earlier participant are outside
// the rule; they are reported, not substituted.
void note_back_edges(const SystemModel& m, const std::vector<std::string>& nodes,
                     const std::set<std::pair<IoKey, IoKey>>& used,
                     std::vector<std::string>& notes) {
  std::set<std::string> part(nodes.begin(), nodes.end());
  for (auto& w : m.wires()) {
    if (!part.count(w.first.node) || !part.count(w.second.node)) continue;
    if (used.count(w)) continue;
    notes.push_back("wire " + w.first.str() + " -> " + w.second.str() +
                    " is a dependency outside this rule and was not substituted");
  }
}

LabelledObligation side_condition(const SystemModel& m, FormulaPtr antecedent,
                                  FormulaPtr consequent, std::string label) {
  LabelledObligation lo;
  lo.label = std::move(label);
  lo.obligation.antecedent = std::move(antecedent);
  lo.obligation.consequent = std::move(consequent);
  lo.obligation.quantified_vars =
      typed_symbols(m, {lo.obligation.antecedent, lo.obligation.consequent});
  return lo;
}

DerivedProperty derived(const SystemModel& m, FormulaPtr antecedent,
                        const std::vector<FormulaPtr>& eventually) {
  DerivedProperty p;
  p.antecedent = std::move(antecedent);
  std::vector<FormulaPtr> all = {p.antecedent};
  for (auto& g : eventually) {
    p.consequents.push_back({true, g});
    all.push_back(g);
  }
  p.quantified_vars = typed_symbols(m, all);
  return p;
}

std::string join_names(const std::vector<std::string>& ns, const std::string& prefix) {
  std::string s;
  for (size_t i = 0; i < ns.size(); ++i) s += (i ? " and " : "") + prefix + ns[i];
  return s;
}

}  // namespace

FormulaPtr qualify(const FormulaPtr& f, const std::string& node) {
  return map_terms(f, [&](const TermPtr& t) { return qualify_term(t, node); });
}

std::vector<IoKey> io_symbols(const FormulaPtr& f) {
  std::vector<IoKey> out;
  formula_io(f, out);
  return out;
}

Result<SystemModel> build_system_model(std::string_view wiring,
                                       const std::vector<TypedContract>& contracts,
                                       const ContextTable& ctx) {
  Result<SystemModel> r;
  SystemModel m;
  m.context = ctx;
  for (auto& c : contracts) {
    if (m.contracts.count(c.contract.node_name)) {
      r.diags.push_back(error_at(c.contract.span, "duplicate-node",
                                 "duplicate node '" + c.contract.node_name + "'"));
      continue;
    }
    m.contracts.emplace(c.contract.node_name, c);
    m.node_order.push_back(c.contract.node_name);
  }

  auto parse_ref = [&](const std::string& text, Dir want, int line, int col,
                       std::optional<IoKey>& out) {
    auto parts = split(text, '.');
    Span s{line, col, static_cast<int>(text.size())};
    if (parts.size() == 3 && (parts[1] == "in" || parts[1] == "out")) {
      Dir d = parts[1] == "in" ? Dir::In : Dir::Out;
      if (d != want) {
        r.diags.push_back(error_at(s, "direction",
                                   "'" + text + "' must be an " +
                                       (want == Dir::Out ? "output" : "input") + " here"));
        return;
      }
      parts = {parts[0], parts[2]};
    }
    if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
      r.diags.push_back(error_at(s, "syntax", "expected NODE.VAR but found '" + text + "'"));
      return;
    }
    auto c = m.find(parts[0]);
    if (!c) {
      r.diags.push_back(error_at(s, "unknown-node", "unknown node '" + parts[0] + "'"));
      return;
    }
    if (!c->contract.find_var(want, parts[1])) {
      bool other = c->contract.find_var(want == Dir::In ? Dir::Out : Dir::In, parts[1]);
      r.diags.push_back(error_at(
          s, other ? "direction" : "unknown-var",
          "node '" + parts[0] + "' has no " + (want == Dir::Out ? "output" : "input") + " named '" +
              parts[1] + "'"));
      return;
    }
    out = IoKey{parts[0], want, parts[1]};
  };

  std::istringstream in{std::string(wiring)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    int col = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
    auto arrow = text.find("->");
    if (arrow == std::string::npos) {
      r.diags.push_back(error_at({line, col, static_cast<int>(text.size())}, "syntax",
                                 "expected 'SRC.VAR -> DST.VAR'"));
      continue;
    }
    Edge e;
    e.line = line;
    bool ok = true;
    for (auto& s : split(text.substr(0, arrow), ',')) {
      std::optional<IoKey> k;
      parse_ref(s, Dir::Out, line, col, k);
      if (k) e.sources.push_back(*k); else ok = false;
    }
    for (auto& s : split(text.substr(arrow + 2), ',')) {
      std::optional<IoKey> k;
      parse_ref(s, Dir::In, line, col + static_cast<int>(arrow) + 2, k);
      if (k) e.sinks.push_back(*k); else ok = false;
    }
    if (!ok) continue;
    for (auto& s : e.sources)
      for (auto& d : e.sinks) {
        auto ts = m.type_of(s), td = m.type_of(d);
        if (ts != td) {
          r.diags.push_back(error_at({line, col, static_cast<int>(text.size())}, "type-mismatch",
                                     "cannot wire " + s.str() + " : " + ts.str() + " to " + d.str() +
                                         " : " + td.str()));
          ok = false;
        }
      }
    if (ok) m.edges.push_back(std::move(e));
  }
  if (!has_errors(r.diags)) r.value = std::move(m);
  return r;
}

Result<CompositionResult> apply_r1(const SystemModel& m, const std::vector<std::string>& chain) {
  Result<CompositionResult> r;
  if (chain.size() < 2) {
    r.diags.push_back(rule_error("chain-too-short", "R1 needs a chain of at least two nodes"));
    return r;
  }
  if (!check_nodes(m, chain, r.diags)) return r;
  CompositionResult res;
  res.rule = Rule::R1;
  std::set<std::pair<IoKey, IoKey>> used;
  for (size_t k = 0; k + 1 < chain.size(); ++k) {
    auto& from = chain[k];
    auto& to = chain[k + 1];
    auto wires = m.wires_between(from, to);
    std::map<IoKey, IoKey> sub;
    for (auto& w : wires) {
      if (!sub.count(w.first)) {
        sub[w.first] = w.second;
        res.substitution.push_back(w);
      }
      used.insert(w);
    }
    for (auto& o : m.find(from)->contract.outputs) {
      IoKey key{from, Dir::Out, o.name};
      if (!sub.count(key)) {
        r.diags.push_back(rule_error("not-wired", "chain not fully wired: " + key.str() +
                                                      " is not wired to '" + to + "'"));
      }
    }
    if (has_errors(r.diags)) return r;
    res.obligations.push_back(side_condition(m, rename_io(G(m, from), sub), A(m, to),
                                             "G_" + from + " => A_" + to));
  }
  res.derived = derived(m, A(m, chain.front()), {G(m, chain.back())});
  note_back_edges(m, chain, used, res.notes);
  r.value = std::move(res);
  return r;
}

Result<CompositionResult> apply_r2(const SystemModel& m, const std::string& root,
                                   const std::vector<std::string>& leaves) {
  Result<CompositionResult> r;
  if (leaves.empty()) {
    r.diags.push_back(rule_error("no-leaves", "R2 needs at least one leaf"));
    return r;
  }
  std::vector<std::string> all = {root};
  all.insert(all.end(), leaves.begin(), leaves.end());
  if (!check_nodes(m, all, r.diags)) return r;
  CompositionResult res;
  res.rule = Rule::R2;
  std::set<std::pair<IoKey, IoKey>> used;
  std::set<IoKey> covered;
  std::vector<FormulaPtr> goals;
  for (auto& leaf : leaves) {
    auto wires = m.wires_between(root, leaf);
    if (wires.empty()) {
      r.diags.push_back(rule_error("partition-incomplete",
                                   "leaf '" + leaf + "' receives no output of '" + root + "'"));
      continue;
    }
    std::map<IoKey, IoKey> sub;
    for (auto& w : wires) {
      if (!sub.count(w.first)) {
        sub[w.first] = w.second;
        res.substitution.push_back(w);
      }
      covered.insert(w.first);
      used.insert(w);
    }
    res.obligations.push_back(side_condition(m, rename_io(G(m, root), sub), A(m, leaf),
                                             "G_" + root + " => A_" + leaf));
    goals.push_back(G(m, leaf));
  }
  for (auto& o : m.find(root)->contract.outputs) {
    IoKey key{root, Dir::Out, o.name};
    if (!covered.count(key))
      r.diags.push_back(rule_error("partition-incomplete",
                                   "output " + key.str() + " is not wired to any leaf"));
  }
  if (has_errors(r.diags)) return r;
  res.derived = derived(m, A(m, root), goals);
  note_back_edges(m, all, used, res.notes);
  r.value = std::move(res);
  return r;
}

Result<CompositionResult> apply_r3(const SystemModel& m, const std::vector<std::string>& sources,
                                   const std::string& sink) {
  Result<CompositionResult> r;
  if (sources.empty()) {
    r.diags.push_back(rule_error("no-sources", "R3 needs at least one source"));
    return r;
  }
  std::vector<std::string> all = sources;
  all.push_back(sink);
  if (!check_nodes(m, all, r.diags)) return r;
  CompositionResult res;
  res.rule = Rule::R3;
  std::set<std::pair<IoKey, IoKey>> used;
  std::map<IoKey, IoKey> sub;
  std::vector<FormulaPtr> gs, as;
  for (auto& s : sources) {
    auto wires = m.wires_between(s, sink);
    for (auto& w : wires) {
      if (!sub.count(w.first)) {
        sub[w.first] = w.second;
        res.substitution.push_back(w);
      }
      used.insert(w);
    }
    if (wires.empty())
      r.diags.push_back(rule_error("union-incomplete",
                                   "source '" + s + "' has no output wired to '" + sink + "'"));
    gs.push_back(G(m, s));
    as.push_back(A(m, s));
  }
  std::set<std::string> src_set(sources.begin(), sources.end());
  for (auto& w : m.wires()) {
    if (w.second.node == sink && !src_set.count(w.first.node) && w.first.node != sink)
      r.diags.push_back(rule_error("union-incomplete", "input " + w.second.str() + " is fed by " +
                                                           w.first.str() +
                                                           ", which is not among the sources"));
  }
  if (has_errors(r.diags)) return r;
  res.obligations.push_back(side_condition(m, rename_io(conjoin_unique(gs), sub), A(m, sink),
                                           join_names(sources, "G_") + " => A_" + sink));
  res.derived = derived(m, conjoin_unique(as), {G(m, sink)});
  res.notes.push_back("R3 assumes source outputs persist once generated");
  note_back_edges(m, all, used, res.notes);
  r.value = std::move(res);
  return r;
}

Result<CompositionResult> apply_r4(const SystemModel& m, const std::string& n1,
                                   const std::string& n2, const std::string& n3,
                                   const std::string& n4) {
  Result<CompositionResult> r;
  if (!check_nodes(m, {n1, n2, n3, n4}, r.diags)) return r;
  auto need = [&](const std::string& a, const std::string& b) {
    if (m.wires_between(a, b).empty())
      r.diags.push_back(rule_error("shape-mismatch", "R4 needs a wire from '" + a + "' to '" + b +
                                                         "'"));
  };
  need(n1, n2);
  need(n2, n3);
  need(n3, n2);
  need(n3, n4);
  if (has_errors(r.diags)) return r;

  auto forward = [&](Result<CompositionResult> sub, const char* what) -> std::optional<CompositionResult> {
    if (!sub.value) {
      for (auto d : sub.diags) {
        d.code = "shape-mismatch";
        d.message = std::string(what) + ": " + d.message;
        r.diags.push_back(d);
      }
      return std::nullopt;
    }
    return std::move(*sub.value);
  };
  auto s1 = forward(apply_r1(m, {n2, n3}), "R1 on the loop");
  auto s2 = forward(apply_r2(m, n3, {n2, n4}), "R2 from the loop");
  auto s3 = forward(apply_r3(m, {n1, n3}, n2), "R3 into the loop");
  if (!s1 || !s2 || !s3) return r;

  CompositionResult res;
  res.rule = Rule::R4;
  auto sequent = [&](const CompositionResult& sub, std::string label) {
    LabelledObligation lo;
    lo.label = std::move(label);
    lo.sequent = true;
    lo.obligation.antecedent = sub.derived.antecedent;
    std::vector<FormulaPtr> gs;
    for (auto& c : sub.derived.consequents) gs.push_back(c.formula);
    lo.obligation.consequent = conjoin(gs);
    lo.obligation.quantified_vars = sub.derived.quantified_vars;
    return lo;
  };
  res.obligations.push_back(sequent(*s1, "A_" + n2 + " => <> G_" + n3));
  res.obligations.push_back(sequent(*s2, "A_" + n3 + " => <> G_" + n2 + " and <> G_" + n4));
  res.obligations.push_back(sequent(*s3, "A_" + n1 + " and A_" + n3 + " => <> G_" + n2));
  res.derived = derived(m, A(m, n1), {G(m, n4)});
  for (auto* s : {&*s1, &*s2, &*s3})
    for (auto& w : s->substitution)
      if (std::find(res.substitution.begin(), res.substitution.end(), w) == res.substitution.end())
        res.substitution.push_back(w);
  res.notes.push_back("R4 premises are discharged through their R1, R2 and R3 side conditions");
  res.premises = {std::move(*s1), std::move(*s2), std::move(*s3)};
  r.value = std::move(res);
  return r;
}

namespace {

std::string header(const std::vector<TypedVar>& vars) {
  if (vars.empty()) return {};
  std::string s = "forall ";
  for (size_t i = 0; i < vars.size(); ++i)
    s += (i ? ", " : "") + vars[i].name + " : " + vars[i].type.str();
  return s + "\n";
}

// Operand of `<>` is bracketed unless it is an atom or a binder.
std::string eventually(const FormulaPtr& g) {
  using K = Formula::Kind;
  std::string s = render_formula(g);
  switch (g->kind) {
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff:
    case K::Not:
      return "<> (" + s + ")";
    default:
      return "<> " + s;
  }
}

std::string lhs_text(const FormulaPtr& a) {
  std::string s = render_formula(a);
  if (a->kind == Formula::Kind::Implies || a->kind == Formula::Kind::Iff) return "(" + s + ")";
  return s;
}

}  // namespace

std::string render_fotl_body(const Obligation& ob, bool sequent) {
  if (sequent) return lhs_text(ob.antecedent) + " -> " + eventually(ob.consequent);
  return render_formula(mk_implies(ob.antecedent, ob.consequent));
}

std::string render_fotl(const Obligation& ob, bool sequent) {
  return header(ob.quantified_vars) + render_fotl_body(ob, sequent);
}

std::string render_fotl_body(const DerivedProperty& p) {
  std::string rhs;
  for (size_t i = 0; i < p.consequents.size(); ++i) {
    auto& c = p.consequents[i];
    std::string part = c.eventually ? eventually(c.formula) : render_formula(c.formula);
    if (!c.eventually && p.consequents.size() > 1 && c.formula->kind != Formula::Kind::Bool)
      part = "(" + part + ")";
    rhs += (i ? " and " : "") + part;
  }
  if (p.consequents.empty()) rhs = "TRUE";
  return lhs_text(p.antecedent) + " -> " + rhs;
}

std::string render_fotl(const DerivedProperty& p) {
  return header(p.quantified_vars) + render_fotl_body(p);
}

std::string render_stream_semantics(const TypedContract& tc) {
  auto& c = tc.contract;
  auto vec = [](const std::vector<IoVar>& vs, const char* dir, const char* rest) {
    std::string s = "[";
    for (size_t i = 0; i < vs.size(); ++i) s += (i ? ", " : "") + std::string(dir) + "." + vs[i].name;
    return s + (vs.empty() ? "" : " ") + "| " + rest + "]";
  };
  return "(InStream(" + vec(c.inputs, "in", "S") + ") and (" + render_formula(c.assumption()) +
         ") and OutStream(T)) -> <> (InStream(S) and (" + render_formula(c.guarantee()) +
         ") and OutStream(" + vec(c.outputs, "out", "T") + "))";
}

}  // namespace contracts

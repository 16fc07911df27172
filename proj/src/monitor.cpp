#include "contracts/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace contracts {

using K = RmlTerm::Kind;
using ojson = nlohmann::ordered_json;

// ---- events ----

const Lit* Event::get(const std::string& key) const {
  for (auto& [k, v] : fields)
    if (k == key) return &v;
  return nullptr;
}

std::string Event::topic() const {
  auto* t = get("topic");
  return t && t->kind == Lit::Kind::Str ? t->str : std::string{};
}

void Event::set(const std::string& key, Lit v) {
  for (auto& [k, old] : fields)
    if (k == key) {
      old = std::move(v);
      return;
    }
  fields.emplace_back(key, std::move(v));
}

Result<Trace> parse_trace(std::string_view source) {
  Result<Trace> r;
  Trace tr;
  std::istringstream in{std::string(source)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Span at{n, 1, 0};
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
      r.diags.push_back(error_at(at, "trace-json", std::string("malformed JSON: ") + e.what()));
      continue;
    }
    if (!j.is_object()) {
      r.diags.push_back(error_at(at, "trace-json", "event must be a JSON object"));
      continue;
    }
    Event ev;
    ev.line = n;
    bool ok = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      auto& v = it.value();
      if (v.is_boolean()) {
        ev.set(it.key(), Lit::boolean(v.get<bool>()));
      } else if (v.is_number()) {
        ev.set(it.key(), Lit::number(v.get<double>()));
      } else if (v.is_string()) {
        ev.set(it.key(), Lit::string(v.get<std::string>()));
      } else {
        r.diags.push_back(error_at(at, "trace-json", "field '" + it.key() + "' is not a number, string or boolean"));
        ok = false;
      }
    }
    if (!ok) continue;
    auto* topic = ev.get("topic");
    if (!topic || topic->kind != Lit::Kind::Str) {
      r.diags.push_back(error_at(at, "trace-topic", "event has no string 'topic' field"));
      continue;
    }
    tr.events.push_back(std::move(ev));
  }
  if (!has_errors(r.diags)) r.value = std::move(tr);
  return r;
}

std::string event_json(const Event& ev) {
  ojson j = ojson::object();
  for (auto& [k, v] : ev.fields) {
    switch (v.kind) {
      case Lit::Kind::Num:
        if (std::floor(v.num) == v.num && std::fabs(v.num) < 1e15)
          j[k] = static_cast<long long>(v.num);
        else
          j[k] = v.num;
        break;
      case Lit::Kind::Str: j[k] = v.str; break;
      case Lit::Kind::Bool: j[k] = v.b; break;
    }
  }
  return j.dump();
}

// ---- matching ----

namespace {

bool guard_holds(const Guard& g, double x) {
  switch (g.op) {
    case CmpOp::Eq: return x == g.bound;
    case CmpOp::Ne: return x != g.bound;
    case CmpOp::Lt: return x < g.bound;
    case CmpOp::Le: return x <= g.bound;
    case CmpOp::Gt: return x > g.bound;
    case CmpOp::Ge: return x >= g.bound;
  }
  return false;
}

// nullopt argument = wildcard
bool match_resolved(const EventType& et, const std::vector<std::optional<Lit>>& args, const Event& ev) {
  for (auto& [key, pv] : et.pattern) {
    const Lit* f = ev.get(key);
    if (!f) return false;
    if (pv.is_param) {
      auto p = std::find(et.params.begin(), et.params.end(), pv.name) - et.params.begin();
      if (p >= static_cast<long>(args.size())) return false;
      if (args[p] && !(*args[p] == *f)) return false;
    } else if (!pv.name.empty()) {
      if (!et.guard || et.guard->var != pv.name) return false;
      if (f->kind != Lit::Kind::Num || !guard_holds(*et.guard, f->num)) return false;
    } else if (!(pv.value == *f)) {
      return false;
    }
  }
  return true;
}

// Args still holding variables cannot match: the variable's value is fresh for this event.
bool match_term(const RmlTerm& t, const RmlSpec& spec, const Event& ev) {
  auto* et = spec.find(t.name, t.args.size());
  if (!et) return false;
  std::vector<std::optional<Lit>> args;
  for (auto& a : t.args) {
    if (a.kind == EtArg::Kind::Const)
      args.emplace_back(a.value);
    else if (a.kind == EtArg::Kind::Wild)
      args.emplace_back(std::nullopt);
    else
      return false;
  }
  return match_resolved(*et, args, ev);
}

}  // namespace

bool matches(const EventType& et, const std::vector<Lit>& args, const Event& ev) {
  std::vector<std::optional<Lit>> a(args.begin(), args.end());
  return match_resolved(et, a, ev);
}

// ---- normalizing constructors ----

namespace {

RmlPtr mk_or(std::vector<RmlPtr> ks);
RmlPtr mk_and(std::vector<RmlPtr> ks);

void flatten(K kind, const std::vector<RmlPtr>& in, std::vector<RmlPtr>& out) {
  for (auto& k : in) {
    if (k->kind == kind)
      flatten(kind, k->kids, out);
    else
      out.push_back(k);
  }
}

void sort_unique(std::vector<RmlPtr>& ks) {
  std::sort(ks.begin(), ks.end(), [](auto& a, auto& b) { return a->key < b->key; });
  ks.erase(std::unique(ks.begin(), ks.end(), [](auto& a, auto& b) { return a->key == b->key; }), ks.end());
}

RmlPtr mk_or(std::vector<RmlPtr> in) {
  std::vector<RmlPtr> ks;
  flatten(K::Or, in, ks);
  ks.erase(std::remove_if(ks.begin(), ks.end(), [](auto& k) { return k->kind == K::None; }), ks.end());
  sort_unique(ks);
  // empty adds nothing next to a nullable alternative
  bool other_nullable = std::any_of(ks.begin(), ks.end(), [](auto& k) { return k->kind != K::Eps && nullable(k); });
  if (other_nullable)
    ks.erase(std::remove_if(ks.begin(), ks.end(), [](auto& k) { return k->kind == K::Eps; }), ks.end());
  if (ks.empty()) return rml::none();
  return rml::disj(ks);
}

RmlPtr mk_and(std::vector<RmlPtr> in) {
  std::vector<RmlPtr> ks;
  flatten(K::And, in, ks);
  for (auto& k : ks)
    if (k->kind == K::None) return rml::none();
  sort_unique(ks);
  for (auto& k : ks) {
    if (k->kind != K::Eps) continue;
    // {empty} intersected with anything is empty or {empty}
    bool all = std::all_of(ks.begin(), ks.end(), [](auto& x) { return nullable(x); });
    return all ? rml::eps() : rml::none();
  }
  return rml::conj(ks);
}

RmlPtr mk_concat(const RmlPtr& a, const RmlPtr& b) {
  if (a->kind == K::None || b->kind == K::None) return rml::none();
  if (a->kind == K::Eps) return b;
  if (b->kind == K::Eps) return a;
  if (a->kind == K::Concat) return mk_concat(a->kids[0], mk_concat(a->kids[1], b));
  return rml::concat(a, b);
}

RmlPtr mk_star(const RmlPtr& t) {
  if (t->kind == K::Eps || t->kind == K::None) return rml::eps();
  if (t->kind == K::Star) return t;
  return rml::star(t);
}

RmlPtr mk_let(const std::string& var, const RmlPtr& body, std::vector<Lit> excluded) {
  if (body->kind == K::None) return body;
  if (!uses_var(body, var)) return body;
  return rml::let(var, body, std::move(excluded));
}

RmlPtr mk_not(const RmlPtr& t) {
  if (t->kind == K::Not) return t->kids[0];
  return rml::negation(t);
}

RmlPtr rebuild(const RmlPtr& t, std::vector<RmlPtr> kids) {
  switch (t->kind) {
    case K::Or: return mk_or(std::move(kids));
    case K::And: return mk_and(std::move(kids));
    case K::Concat: return mk_concat(kids[0], kids[1]);
    case K::Star: return mk_star(kids[0]);
    case K::Not: return mk_not(kids[0]);
    case K::Let: return mk_let(t->var, kids[0], t->excluded);
    default: return t;
  }
}

void offsets_of(const RmlPtr& t, const std::string& var, std::vector<double>& out) {
  if (t->kind == K::Et || t->kind == K::NegEt) {
    for (auto& a : t->args)
      if (a.kind == EtArg::Kind::Offset && a.var == var) out.push_back(a.offset);
    return;
  }
  if (t->kind == K::Let && t->var == var) return;
  for (auto& k : t->kids) offsets_of(k, var, out);
}

// Values an event can give a variable: its field values, and field - c for every `var+c`.
std::vector<Lit> candidates(const Event& ev, const std::vector<double>& offsets) {
  std::vector<Lit> out;
  for (auto& [_, v] : ev.fields) {
    out.push_back(v);
    if (v.kind == Lit::Kind::Num)
      for (double c : offsets) out.push_back(Lit::number(v.num - c));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

bool nullable(const RmlPtr& t) {
  switch (t->kind) {
    case K::Eps:
    case K::Star: return true;
    case K::Et:
    case K::NegEt:
    case K::Any:
    case K::None: return false;
    case K::Concat:
    case K::And:
      return std::all_of(t->kids.begin(), t->kids.end(), [](auto& k) { return nullable(k); });
    case K::Or:
      return std::any_of(t->kids.begin(), t->kids.end(), [](auto& k) { return nullable(k); });
    case K::Let: return nullable(t->kids[0]);
    case K::Not: return !nullable(t->kids[0]);
  }
  return false;
}

RmlPtr substitute(const RmlPtr& t, const std::string& var, const Lit& value) {
  if (t->kind == K::Et || t->kind == K::NegEt) {
    std::vector<EtArg> args = t->args;
    bool changed = false;
    for (auto& a : args) {
      if ((a.kind != EtArg::Kind::Var && a.kind != EtArg::Kind::Offset) || a.var != var) continue;
      changed = true;
      if (a.kind == EtArg::Kind::Var) {
        a = EtArg::constant(value);
      } else if (value.kind == Lit::Kind::Num) {
        a = EtArg::constant(Lit::number(value.num + a.offset));
      } else {
        return t->kind == K::Et ? rml::none() : rml::any();
      }
    }
    if (!changed) return t;
    return t->kind == K::Et ? rml::et(t->name, args) : rml::neg_et(t->name, args);
  }
  if (t->kind == K::Let && t->var == var) return t;
  if (t->kids.empty()) return t;
  std::vector<RmlPtr> kids;
  bool changed = false;
  for (auto& k : t->kids) {
    kids.push_back(substitute(k, var, value));
    changed |= kids.back() != k;
  }
  return changed ? rebuild(t, std::move(kids)) : t;
}

namespace {

class Deriver {
 public:
  Deriver(const Event& ev, const RmlSpec& spec) : ev_(ev), spec_(spec) {}

  RmlPtr d(const RmlPtr& t) {
    auto it = memo_.find(t->key);
    if (it != memo_.end()) return it->second;
    RmlPtr r = compute(t);
    memo_.emplace(t->key, r);
    return r;
  }

 private:
  RmlPtr compute(const RmlPtr& t) {
    switch (t->kind) {
      case K::Et: return match_term(*t, spec_, ev_) ? rml::eps() : rml::none();
      case K::NegEt: return match_term(*t, spec_, ev_) ? rml::none() : rml::eps();
      case K::Any: return rml::eps();
      case K::None:
      case K::Eps: return rml::none();
      case K::Concat: {
        auto first = mk_concat(d(t->kids[0]), t->kids[1]);
        if (!nullable(t->kids[0])) return first;
        return mk_or({first, d(t->kids[1])});
      }
      case K::And:
      case K::Or: {
        std::vector<RmlPtr> ks;
        for (auto& k : t->kids) ks.push_back(d(k));
        return t->kind == K::And ? mk_and(ks) : mk_or(ks);
      }
      case K::Star: return mk_concat(d(t->kids[0]), t);
      case K::Not: return mk_not(d(t->kids[0]));
      case K::Let: {
        const auto& body = t->kids[0];
        std::vector<double> offs;
        offsets_of(body, t->var, offs);
        std::vector<RmlPtr> branches;
        std::vector<Lit> excluded = t->excluded;
        for (auto& v : candidates(ev_, offs)) {
          if (std::binary_search(t->excluded.begin(), t->excluded.end(), v)) continue;
          branches.push_back(d(substitute(body, t->var, v)));
          excluded.push_back(v);
        }
        // every other value of the variable behaves alike on this event
        branches.push_back(mk_let(t->var, d(body), excluded));
        return mk_or(branches);
      }
    }
    return rml::none();
  }

  const Event& ev_;
  const RmlSpec& spec_;
  std::unordered_map<std::string, RmlPtr> memo_;
};

}  // namespace

RmlPtr derivative(const RmlPtr& t, const Event& ev, const RmlSpec& spec) {
  Deriver dv(ev, spec);
  return dv.d(t);
}

// ---- running ----

const char* monitor_verdict_name(MonitorVerdict v) {
  switch (v) {
    case MonitorVerdict::Accepted: return "accepted";
    case MonitorVerdict::Violated: return "violated";
    case MonitorVerdict::Incomplete: return "incomplete";
  }
  return "?";
}

Monitor::Monitor(const RmlSpec& spec, RmlPtr term) : spec_(spec), residual_(std::move(term)) {
  if (residual_->kind == K::None) violation_ = 0;
}

void Monitor::step(const Event& ev, std::size_t index) {
  if (violation_) return;
  residual_ = derivative(residual_, ev, spec_);
  if (residual_->kind == K::None) violation_ = index;
}

MonitorVerdict Monitor::verdict() const {
  if (violation_) return MonitorVerdict::Violated;
  return nullable(residual_) ? MonitorVerdict::Accepted : MonitorVerdict::Incomplete;
}

std::optional<std::set<std::string>> declared_topics(const RmlSpec& spec) {
  std::set<std::string> out;
  for (auto& et : spec.event_types) {
    bool fixed = false;
    for (auto& [k, v] : et.pattern)
      fixed |= k == "topic" && !v.is_param && v.name.empty() && v.value.kind == Lit::Kind::Str;
    if (!fixed) return std::nullopt;
    out.insert(et.topic());
  }
  return out;
}

MonitorReport run(const RmlSpec& spec, const Trace& trace) {
  MonitorReport r;
  auto topics = declared_topics(spec);
  std::vector<Monitor> ms;
  for (auto& [_, t] : spec.terms) ms.emplace_back(spec, t);
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    auto& ev = trace.events[i];
    if (topics && !topics->count(ev.topic())) {
      ++r.skipped;
      continue;
    }
    ++r.events;
    for (auto& m : ms) m.step(ev, i);
  }
  bool all_accepted = true;
  r.overall.term = "all";
  for (std::size_t k = 0; k < ms.size(); ++k) {
    TermVerdict tv{spec.terms[k].first, ms[k].verdict(), ms[k].violation_index()};
    if (tv.verdict == MonitorVerdict::Violated &&
        (!r.overall.violation_index || *tv.violation_index < *r.overall.violation_index))
      r.overall.violation_index = tv.violation_index;
    all_accepted &= tv.verdict == MonitorVerdict::Accepted;
    r.terms.push_back(tv);
  }
  r.overall.verdict = r.overall.violation_index ? MonitorVerdict::Violated
                      : all_accepted            ? MonitorVerdict::Accepted
                                                : MonitorVerdict::Incomplete;
  return r;
}

std::string report_json(const MonitorReport& r) {
  auto one = [](const TermVerdict& t) {
    ojson j;
    j["term"] = t.term;
    j["verdict"] = monitor_verdict_name(t.verdict);
    j["violation_index"] = t.violation_index ? ojson(*t.violation_index) : ojson(nullptr);
    return j;
  };
  ojson j;
  j["terms"] = ojson::array();
  for (auto& t : r.terms) j["terms"].push_back(one(t));
  j["verdict"] = monitor_verdict_name(r.overall.verdict);
  j["violation_index"] = r.overall.violation_index ? ojson(*r.overall.violation_index) : ojson(nullptr);
  j["events"] = r.events;
  j["skipped"] = r.skipped;
  return j.dump(2) + "\n";
}

std::string report_table(const MonitorReport& r) {
  std::ostringstream ss;
  auto row = [&](const TermVerdict& t) {
    ss << std::left << std::setw(8) << t.term << std::setw(12) << monitor_verdict_name(t.verdict)
       << (t.violation_index ? std::to_string(*t.violation_index) : "-") << "\n";
  };
  ss << std::left << std::setw(8) << "term" << std::setw(12) << "verdict" << "index\n";
  for (auto& t : r.terms) row(t);
  row(r.overall);
  ss << r.events << " events checked, " << r.skipped << " skipped\n";
  return ss.str();
}

// ---- naive oracle ----

namespace {

class Naive {
 public:
  Naive(const RmlSpec& spec, const Trace& tr, std::size_t bound) : spec_(spec), tr_(tr), bound_(bound) {
    for (auto& ev : tr.events)
      for (auto& [_, v] : ev.fields) values_.push_back(v);
  }

  bool mem(const RmlPtr& t, std::size_t i, std::size_t j) {
    std::string key = t->key + "@" + std::to_string(i) + ":" + std::to_string(j) + "|" + env_key();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool r = compute(t, i, j);
    memo_.emplace(std::move(key), r);
    return r;
  }

 private:
  std::string env_key() const {
    std::string s;
    for (auto& [x, v] : env_) s += x + "=" + v.text() + (v.kind == Lit::Kind::Num ? "#" : "") + ";";
    return s;
  }

  const Lit* lookup(const std::string& x) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->first == x) return &it->second;
    return nullptr;
  }

  bool event_matches(const RmlTerm& t, const Event& ev) {
    auto* et = spec_.find(t.name, t.args.size());
    if (!et) return false;
    std::vector<std::optional<Lit>> args;
    for (auto& a : t.args) {
      switch (a.kind) {
        case EtArg::Kind::Const: args.emplace_back(a.value); break;
        case EtArg::Kind::Wild: args.emplace_back(std::nullopt); break;
        case EtArg::Kind::Var: {
          auto* v = lookup(a.var);
          if (!v) return false;
          args.emplace_back(*v);
          break;
        }
        case EtArg::Kind::Offset: {
          auto* v = lookup(a.var);
          if (!v || v->kind != Lit::Kind::Num) return false;
          args.emplace_back(Lit::number(v->num + a.offset));
          break;
        }
      }
    }
    return match_resolved(*et, args, ev);
  }

  bool star(const RmlPtr& body, std::size_t i, std::size_t j, std::size_t count) {
    if (i == j) return true;
    if (count >= bound_) return false;
    for (std::size_t k = i + 1; k <= j; ++k)
      if (mem(body, i, k) && star(body, k, j, count + 1)) return true;
    return false;
  }

  bool compute(const RmlPtr& t, std::size_t i, std::size_t j) {
    std::size_t len = j - i;
    switch (t->kind) {
      case K::Et: return len == 1 && event_matches(*t, tr_.events[i]);
      case K::NegEt: return len == 1 && !event_matches(*t, tr_.events[i]);
      case K::Any: return len == 1;
      case K::None: return false;
      case K::Eps: return len == 0;
      case K::Not: return !mem(t->kids[0], i, j);
      case K::And:
        for (auto& k : t->kids)
          if (!mem(k, i, j)) return false;
        return true;
      case K::Or:
        for (auto& k : t->kids)
          if (mem(k, i, j)) return true;
        return false;
      case K::Concat:
        for (std::size_t k = i; k <= j; ++k)
          if (mem(t->kids[0], i, k) && mem(t->kids[1], k, j)) return true;
        return false;
      case K::Star: return star(t->kids[0], i, j, 0);
      case K::Let: {
        std::vector<double> offs;
        offsets_of(t->kids[0], t->var, offs);
        std::vector<Lit> dom;
        for (auto& v : values_) {
          dom.push_back(v);
          if (v.kind == Lit::Kind::Num)
            for (double c : offs) dom.push_back(Lit::number(v.num - c));
        }
        // one value that occurs nowhere in the trace stands for all such values
        dom.push_back(Lit::string("\x01unseen" + std::to_string(env_.size())));
        for (auto& v : dom) {
          if (std::find(t->excluded.begin(), t->excluded.end(), v) != t->excluded.end()) continue;
          env_.emplace_back(t->var, v);
          bool ok = mem(t->kids[0], i, j);
          env_.pop_back();
          if (ok) return true;
        }
        return false;
      }
    }
    return false;
  }

  const RmlSpec& spec_;
  const Trace& tr_;
  std::size_t bound_;
  std::vector<Lit> values_;
  std::vector<std::pair<std::string, Lit>> env_;
  std::unordered_map<std::string, bool> memo_;
};

}  // namespace

Result<bool> naive_membership(const RmlPtr& t, const RmlSpec& spec, const Trace& trace,
                              std::size_t star_unroll_bound) {
  Result<bool> r;
  if (trace.events.size() > star_unroll_bound * 4) {
    r.diags.push_back(error_at({}, "bound-exceeded",
                               "trace of " + std::to_string(trace.events.size()) +
                                   " events exceeds 4 x star unroll bound " + std::to_string(star_unroll_bound)));
    return r;
  }
  Naive n(spec, trace, star_unroll_bound);
  r.value = n.mem(t, 0, trace.events.size());
  return r;
}

}  // namespace contracts

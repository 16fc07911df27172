#include <sstream>

#include "contracts/rcl.hpp"

namespace contracts {

namespace {

int prec(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Not: return 5;
    default: return 6;
  }
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

// Groups consecutive binders of equal type: `x, y in REAL, i in NATURAL`.
template <class Name, class Type>
std::string binder_list(const std::vector<TypedVar>& vars, const char* in_kw, Name name,
                        Type type) {
  std::string out;
  for (size_t i = 0; i < vars.size(); ++i) {
    out += name(vars[i].name);
    bool last_of_group = i + 1 == vars.size() || vars[i + 1].type != vars[i].type;
    if (last_of_group) {
      out += std::string(" ") + in_kw + " " + type(vars[i].type);
      if (i + 1 != vars.size()) out += ", ";
    } else {
      out += ", ";
    }
  }
  return out;
}

std::string rcl_formula(const FormulaPtr& f, int need) {
  using K = Formula::Kind;
  std::string s;
  switch (f->kind) {
    case K::Forall:
    case K::Exists:
    case K::ExistsUnique: {
      const char* q = f->kind == K::Forall ? "forall" : f->kind == K::Exists ? "exists" : "exists!";
      s = std::string(q) + "(" +
          binder_list(
              f->vars, "in", [](const std::string& n) { return n; },
              [](const TypeRef& t) { return t.str(); }) +
          " | " + rcl_formula(f->lhs, 0) + ")";
      break;
    }
    case K::Iff: s = rcl_formula(f->lhs, 1) + " <-> " + rcl_formula(f->rhs, 2); break;
    case K::Implies: s = rcl_formula(f->lhs, 3) + " -> " + rcl_formula(f->rhs, 2); break;
    case K::Or: s = rcl_formula(f->lhs, 3) + " or " + rcl_formula(f->rhs, 4); break;
    case K::And: s = rcl_formula(f->lhs, 4) + " and " + rcl_formula(f->rhs, 5); break;
    case K::Not: s = "not " + rcl_formula(f->lhs, 5); break;
    case K::Member:
      s = render_term(f->t1) + (f->negated ? " !in {" : " in {") + join(f->members, ", ") + "}";
      break;
    case K::Compare:
      s = render_term(f->t1) + " " + cmp_str(f->op) + " " + render_term(f->t2);
      break;
    case K::Bool: s = f->bval ? "TRUE" : "FALSE"; break;
    case K::Atom: s = render_term(f->t1); break;
  }
  if (prec(f) < need) return "(" + s + ")";
  return s;
}

std::string render_args(const std::vector<TermPtr>& args) {
  std::vector<std::string> parts;
  for (auto& a : args) parts.push_back(render_term(a));
  return "(" + join(parts, ", ") + ")";
}

// ---- LaTeX ----

std::string tex_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '{' || c == '}' || c == '&' || c == '%' || c == '#') out += '\\';
    out += c;
  }
  return out;
}

std::string tex_type(const TypeRef& t) { return tex_escape(t.str()); }

std::string tex_term(const TermPtr& t);

std::string tex_args(const std::vector<TermPtr>& args) {
  std::vector<std::string> parts;
  for (auto& a : args) parts.push_back(tex_term(a));
  return "(" + join(parts, ", ") + ")";
}

std::string tex_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: return tex_escape(t->name);
    case Term::Kind::Num: return t->text;
    case Term::Kind::Bool: return t->bval ? "TRUE" : "FALSE";
    case Term::Kind::Sum: return tex_term(t->args[0]) + "+" + tex_term(t->args[1]);
    case Term::Kind::App: return tex_escape(t->name) + tex_args(t->args);
    case Term::Kind::Io: {
      std::string s = t->node.empty() ? "" : tex_escape(t->node) + ".";
      s += std::string(dir_str(t->dir)) + "." + tex_escape(t->name);
      if (t->applied) s += tex_args(t->args);
      return s;
    }
  }
  return {};
}

const char* tex_cmp(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "\\neq";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "\\leq";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return "\\geq";
  }
  return "=";
}

// A binder's body extends as far right as possible in the LaTeX notation,
// so a binder needs brackets unless it sits in the rightmost position.
std::string tex_formula(const FormulaPtr& f, int need, bool rightmost) {
  using K = Formula::Kind;
  std::string s;
  bool wrap = prec(f) < need;
  switch (f->kind) {
    case K::Forall:
    case K::Exists:
    case K::ExistsUnique: {
      const char* q = f->kind == K::Forall   ? "\\forall "
                      : f->kind == K::Exists ? "\\exists "
                                             : "\\exists!~ ";
      s = std::string(q) +
          binder_list(f->vars, "\\in", [](const std::string& n) { return tex_escape(n); },
                      tex_type) +
          " \\cdot " + tex_formula(f->lhs, 0, true);
      wrap = !rightmost;
      break;
    }
    case K::Iff:
      s = tex_formula(f->lhs, 1, false) + " \\iff " + tex_formula(f->rhs, 2, rightmost || wrap);
      break;
    case K::Implies:
      s = tex_formula(f->lhs, 3, false) + " \\implies " +
          tex_formula(f->rhs, 2, rightmost || wrap);
      break;
    case K::Or:
      s = tex_formula(f->lhs, 3, false) + " \\lor " + tex_formula(f->rhs, 4, rightmost || wrap);
      break;
    case K::And:
      s = tex_formula(f->lhs, 4, false) + " \\land " + tex_formula(f->rhs, 5, rightmost || wrap);
      break;
    case K::Not: s = "\\neg " + tex_formula(f->lhs, 5, rightmost || wrap); break;
    case K::Member: {
      std::vector<std::string> ms;
      for (auto& m : f->members) ms.push_back(tex_escape(m));
      s = tex_term(f->t1) + (f->negated ? " \\notin \\{" : " \\in \\{") + join(ms, ", ") + "\\}";
      break;
    }
    case K::Compare:
      s = tex_term(f->t1) + " " + tex_cmp(f->op) + " " + tex_term(f->t2);
      break;
    case K::Bool: s = f->bval ? "TRUE" : "FALSE"; break;
    case K::Atom: s = tex_term(f->t1); break;
  }
  return wrap ? "(" + s + ")" : s;
}

std::string io_list(const std::vector<IoVar>& vs) {
  std::vector<std::string> parts;
  for (auto& v : vs) parts.push_back(v.name + " : " + v.type.str());
  return join(parts, ", ");
}

std::string topic_text(const TopicBinding& t) {
  std::string s = t.message_type + " " + t.topic_name;
  if (t.binding) {
    s += " matches(";
    if (t.binding->dir) s += std::string(dir_str(*t.binding->dir)) + ".";
    s += t.binding->var + ")";
  }
  return s;
}

}  // namespace

std::string render_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: return t->name;
    case Term::Kind::Num: return t->text;
    case Term::Kind::Bool: return t->bval ? "TRUE" : "FALSE";
    case Term::Kind::Sum: return render_term(t->args[0]) + " + " + render_term(t->args[1]);
    case Term::Kind::App: return t->name + render_args(t->args);
    case Term::Kind::Io: {
      std::string s = t->node.empty() ? "" : t->node + ".";
      s += std::string(dir_str(t->dir)) + "." + t->name;
      if (t->applied) s += render_args(t->args);
      return s;
    }
  }
  return {};
}

std::string render_formula(const FormulaPtr& f) { return rcl_formula(f, 0); }

std::string render_type_expr(const TypeExpr& t) {
  switch (t.kind) {
    case TypeExpr::Kind::Empty: return "{}";
    case TypeExpr::Kind::Enum: return "{" + join(t.members, ", ") + "}";
    case TypeExpr::Kind::CtorSet: {
      std::vector<std::string> parts;
      for (auto& c : t.ctors) {
        std::vector<std::string> args;
        for (auto& a : c.args) args.push_back(a.str());
        parts.push_back(c.name + "(" + join(args, ", ") + ")");
      }
      return "{" + join(parts, ", ") + "}";
    }
    case TypeExpr::Kind::Function: {
      std::vector<std::string> dom;
      for (auto& d : t.domain) dom.push_back(d.str());
      return join(dom, " x ") + " --> " + t.codomain.str();
    }
  }
  return {};
}

std::string render_contract(const Contract& c) {
  std::ostringstream os;
  os << "node " << c.node_name << " {\n";
  os << "  inputs(" << io_list(c.inputs) << ")\n";
  os << "  outputs(" << io_list(c.outputs) << ")\n";
  if (c.topics_declared) {
    std::vector<std::string> ts;
    for (auto& t : c.topics) ts.push_back(topic_text(t));
    os << "  topics(" << join(ts, ",\n         ") << ")\n";
  }
  for (auto& a : c.assumes) os << "  assume(" << render_formula(a) << ")\n";
  for (auto& g : c.guarantees) os << "  guarantee(" << render_formula(g) << ")\n";
  os << "}\n";
  return os.str();
}

std::string render_rcl(const Document& doc) {
  std::ostringstream os;
  size_t ci = 0, ni = 0;
  for (size_t k = 0; k < doc.order.size(); ++k) {
    if (k) os << "\n";
    if (doc.order[k] == ClauseKind::Context) {
      auto& b = doc.contexts[ci++];
      if (b.decls.empty()) {
        os << "context{ }\n";
        continue;
      }
      os << "context{\n";
      for (auto& d : b.decls)
        os << "  " << d.name << (d.is_constant ? " = " : " : ") << render_type_expr(d.body)
           << ";\n";
      os << "}\n";
    } else {
      os << render_contract(doc.contracts[ni++]);
    }
  }
  return os.str();
}

std::string render_latex_formula(const FormulaPtr& f) { return tex_formula(f, 0, true); }

std::string render_latex(const Contract& c) {
  std::ostringstream os;
  os << "\\textbf{" << tex_escape(c.node_name) << "}\n\n";
  os << "inputs: $(" << tex_escape(io_list(c.inputs)) << ")$\n\n";
  os << "outputs: $(" << tex_escape(io_list(c.outputs)) << ")$\n\n";
  if (c.topics_declared) {
    std::vector<std::string> ts;
    for (auto& t : c.topics) {
      std::string s = tex_escape(t.message_type) + "~" + tex_escape(t.topic_name);
      if (t.binding) {
        s += "~matches:~";
        if (t.binding->dir) s += std::string(dir_str(*t.binding->dir)) + ".";
        s += tex_escape(t.binding->var);
      }
      ts.push_back(s);
    }
    os << "topics: $(" << join(ts, ", ") << ")$\n\n";
  }
  if (c.assumes.empty()) os << "assume: $TRUE$\n\n";
  for (auto& a : c.assumes) os << "assume: $" << render_latex_formula(a) << "$\n\n";
  for (auto& g : c.guarantees) os << "guarantee: $" << render_latex_formula(g) << "$\n\n";
  return os.str();
}

}  // namespace contracts

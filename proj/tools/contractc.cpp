// contractc: command-line driver for the contract toolchain.
//
// Exit codes: 0 success, 1 verification failure, 2 usage, parse or wiring error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "contracts/calculus.hpp"
#include "contracts/discharge.hpp"
#include "contracts/monitor.hpp"
#include "contracts/rcl.hpp"
#include "contracts/rml_synth.hpp"
#include "json.hpp"

using namespace contracts;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

struct Options {
  std::string format = "text";
  std::string bounds;
  std::string out = ".";
  bool json() const { return format == "json"; }
};

struct Input {
  std::vector<std::string> files;
  std::vector<Document> docs;
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "contractc: cannot read '" << path << "'\n";
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_diags(const std::vector<Diagnostic>& ds, const std::vector<std::string>& files,
                 const std::string& fallback = "<input>") {
  for (auto& d : ds) {
    std::string f = d.source >= 0 && d.source < static_cast<int>(files.size()) ? files[d.source] : fallback;
    std::cerr << format_diagnostic(d, f) << "\n";
  }
}

// Parses and checks every file together; prints diagnostics.
std::optional<CheckedDocument> load(const std::vector<std::string>& files) {
  Input in;
  bool ok = true;
  for (auto& f : files) {
    auto text = read_file(f);
    if (!text) return std::nullopt;
    auto r = parse_document(*text);
    print_diags(r.diags, {}, f);
    if (!r.ok()) {
      ok = false;
      continue;
    }
    in.files.push_back(f);
    in.docs.push_back(std::move(*r.value));
  }
  if (!ok) return std::nullopt;
  auto c = check_documents(in.docs);
  print_diags(c.diags, in.files);
  if (!c.ok()) return std::nullopt;
  return std::move(*c.value);
}

// ---- check ----

int cmd_check(const Options& o, const std::vector<std::string>& files) {
  auto d = load(files);
  if (!d) return kError;
  if (o.json()) {
    ojson j;
    j["status"] = "ok";
    j["contracts"] = ojson::array();
    for (auto& c : d->contracts) j["contracts"].push_back(c.contract.node_name);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "ok: " << d->contracts.size() << " contracts, " << d->context.size() << " context types\n";
  }
  return kOk;
}

// ---- compose / discharge ----

struct ComposeArgs {
  std::vector<std::string> files;
  std::string wiring;
  std::string rule;
  std::vector<std::string> nodes;
  bool discharge = false;
};

Result<CompositionResult> apply_rule(const SystemModel& m, const ComposeArgs& a) {
  auto& n = a.nodes;
  Result<CompositionResult> bad;
  auto usage = [&](const std::string& msg) {
    bad.diags.push_back(error_at({}, "usage", msg));
    return bad;
  };
  if (a.rule == "R1") return apply_r1(m, n);
  if (a.rule == "R2") {
    if (n.size() < 2) return usage("R2 takes a root followed by its leaves");
    return apply_r2(m, n[0], {n.begin() + 1, n.end()});
  }
  if (a.rule == "R3") {
    if (n.size() < 2) return usage("R3 takes the sources followed by the sink");
    return apply_r3(m, {n.begin(), n.end() - 1}, n.back());
  }
  if (a.rule == "R4") {
    if (n.size() != 4) return usage("R4 takes exactly four nodes n1 n2 n3 n4");
    return apply_r4(m, n[0], n[1], n[2], n[3]);
  }
  return usage("unknown rule '" + a.rule + "'");
}

ojson assignment_json(const Assignment& a) {
  ojson j = ojson::object();
  for (auto& [k, v] : a.scalars) j[k] = v.str();
  for (auto& [k, f] : a.functions) {
    ojson t = ojson::object();
    for (auto& [args, v] : f.cells) {
      std::string key = "(";
      for (size_t i = 0; i < args.size(); ++i) key += (i ? ", " : "") + args[i].str();
      t[key + ")"] = v.str();
    }
    if (f.otherwise) t["otherwise"] = f.otherwise->str();
    j[k] = t;
  }
  return j;
}

int cmd_compose(const Options& o, const ComposeArgs& a) {
  auto d = load(a.files);
  if (!d) return kError;
  auto wtext = read_file(a.wiring);
  if (!wtext) return kError;
  auto m = build_system_model(*wtext, d->contracts, d->context);
  print_diags(m.diags, {}, a.wiring);
  if (!m.ok()) return kError;
  auto r = apply_rule(*m.value, a);
  print_diags(r.diags, {}, a.wiring);
  if (!r.ok()) return kError;

  std::optional<DomainBounds> bounds;
  if (!o.bounds.empty()) {
    auto text = read_file(o.bounds);
    if (!text) return kError;
    auto b = parse_bounds(*text);
    print_diags(b.diags, {}, o.bounds);
    if (!b.ok()) return kError;
    bounds = *b.value;
  } else if (a.discharge) {
    bounds = DomainBounds{};
  }

  int code = kOk;
  ojson jobs = ojson::array();
  std::ostringstream text;
  text << "rule " << rule_name(r.value->rule) << "\n";
  int n = 0;
  for (auto& lo : r.value->obligations) {
    ++n;
    ojson jo;
    jo["label"] = lo.label;
    jo["formula"] = render_fotl(lo.obligation, lo.sequent);
    text << "obligation " << n << ": " << lo.label << "\n" << render_fotl(lo.obligation, lo.sequent) << "\n";
    if (bounds) {
      auto v = discharge(lo.obligation, m.value->context, *bounds);
      // The bounded check ignores <>, so it cannot refute an eventuality.
      if (lo.sequent && v.kind == Verdict::Kind::Counterexample) {
        v.kind = Verdict::Kind::Unknown;
        v.reason = "counterexample to the untimed implication does not refute the eventuality";
      }
      jo["verdict"] = verdict_name(v.kind);
      jo["nodes"] = v.nodes;
      text << "verdict: " << verdict_name(v.kind) << " (" << v.nodes << " nodes)\n";
      if (v.kind == Verdict::Kind::Counterexample) {
        code = kFail;
        jo["assignment"] = assignment_json(v.assignment);
        text << v.assignment.str();
      } else if (v.kind == Verdict::Kind::Unknown) {
        jo["reason"] = v.reason;
        text << "reason: " << v.reason << "\n";
      }
    }
    jobs.push_back(jo);
  }
  text << "derived:\n" << render_fotl(r.value->derived) << "\n";
  for (auto& note : r.value->notes) text << "note: " << note << "\n";

  if (o.json()) {
    ojson j;
    j["rule"] = rule_name(r.value->rule);
    j["obligations"] = jobs;
    j["derived"] = render_fotl(r.value->derived);
    j["notes"] = r.value->notes;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text.str();
  }
  return code;
}

// ---- synth ----

bool write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  out.close();
  if (!out) {
    std::cerr << "contractc: cannot write '" << p.string() << "'\n";
    return false;
  }
  return true;
}

int cmd_synth(const Options& o, const std::vector<std::string>& files, const std::vector<std::string>& nodes) {
  auto d = load(files);
  if (!d) return kError;
  std::error_code ec;
  fs::create_directories(o.out, ec);
  ojson written = ojson::array();
  int code = kOk;
  for (auto& tc : d->contracts) {
    auto& name = tc.contract.node_name;
    if (!nodes.empty() && std::find(nodes.begin(), nodes.end(), name) == nodes.end()) continue;
    auto spec = synthesize_rml(tc, d->context);
    print_diags(spec.diags, files);
    auto cfg = monitor_config(tc, d->context);
    if (!spec.ok() || !cfg.ok()) {
      code = kError;
      continue;
    }
    fs::path rml = fs::path(o.out) / (name + ".rml");
    fs::path yaml = fs::path(o.out) / (name + "_config.yaml");
    if (!write_file(rml, emit_rml(*spec.value)) || !write_file(yaml, emit_monitor_config(*cfg.value)))
      return kError;
    written.push_back(rml.string());
    written.push_back(yaml.string());
  }
  for (auto& n : nodes) {
    if (!d->find(n)) {
      std::cerr << "contractc: no contract named '" << n << "'\n";
      code = kError;
    }
  }
  if (o.json()) {
    std::cout << ojson{{"written", written}}.dump(2) << "\n";
  } else {
    for (auto& w : written) std::cout << w.get<std::string>() << "\n";
  }
  return code;
}

// ---- monitor ----

int cmd_monitor(const Options& o, const std::string& rml_path, const std::string& trace_path) {
  auto rtext = read_file(rml_path);
  auto ttext = read_file(trace_path);
  if (!rtext || !ttext) return kError;
  auto spec = parse_rml(*rtext);
  print_diags(spec.diags, {}, rml_path);
  if (!spec.ok()) return kError;
  auto trace = parse_trace(*ttext);
  print_diags(trace.diags, {}, trace_path);
  if (!trace.ok()) return kError;
  auto report = run(*spec.value, *trace.value);
  std::cout << (o.json() ? report_json(report) : report_table(report));
  return report.overall.verdict == MonitorVerdict::Violated ? kFail : kOk;
}

// ---- latex ----

int cmd_latex(const Options& o, const std::vector<std::string>& files, const std::vector<std::string>& nodes) {
  auto d = load(files);
  if (!d) return kError;
  ojson j = ojson::object();
  bool first = true;
  for (auto& tc : d->contracts) {
    if (!nodes.empty() && std::find(nodes.begin(), nodes.end(), tc.contract.node_name) == nodes.end()) continue;
    auto tex = render_latex(tc.contract);
    if (o.json()) {
      j[tc.contract.node_name] = tex;
    } else {
      if (!first) std::cout << "\n";
      std::cout << tex;
      first = false;
    }
  }
  if (o.json()) std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contract toolchain: check, compose, discharge, synth, monitor, latex"};
  app.require_subcommand(1);
  Options o;
  // Global flags are accepted before or after the subcommand and listed in every --help.
  auto add_globals = [&](CLI::App* a) {
    a->add_option("--format", o.format, "Output format: text or json")->check(CLI::IsMember({"text", "json"}));
    a->add_option("--bounds", o.bounds, "Domain bounds file for discharge");
    a->add_option("--out", o.out, "Output directory for synth");
  };
  add_globals(&app);

  std::vector<std::string> files;
  std::vector<std::string> nodes;

  auto* check = app.add_subcommand("check", "Parse and typecheck RCL files");
  check->add_option("files", files, "RCL files")->required();

  ComposeArgs ca;
  auto add_compose = [&](CLI::App* sub) {
    sub->add_option("files", ca.files, "RCL files")->required();
    sub->add_option("--wiring,-w", ca.wiring, "Wiring file")->required();
    sub->add_option("--rule,-r", ca.rule, "R1, R2, R3 or R4")->required()->check(CLI::IsMember({"R1", "R2", "R3", "R4"}));
    sub->add_option("--nodes,-n", ca.nodes,
                    "R1: the chain; R2: root then leaves; R3: sources then sink; R4: n1 n2 n3 n4")
        ->required()
        ->delimiter(',');
  };
  auto* compose = app.add_subcommand("compose", "Apply a composition rule and print its obligations");
  add_compose(compose);
  compose->add_flag("--discharge", ca.discharge, "Discharge obligations with default bounds");
  auto* discharge_cmd = app.add_subcommand("discharge", "Compose and discharge every obligation");
  add_compose(discharge_cmd);

  auto* synth = app.add_subcommand("synth", "Write <node>.rml and <node>_config.yaml per contract");
  synth->add_option("files", files, "RCL files")->required();
  synth->add_option("--node", nodes, "Only these nodes")->delimiter(',');

  std::string rml_path, trace_path;
  auto* monitor = app.add_subcommand("monitor", "Check a JSONL trace against an RML specification");
  monitor->add_option("rml", rml_path, "RML file")->required();
  monitor->add_option("trace", trace_path, "JSONL trace")->required();

  auto* latex = app.add_subcommand("latex", "Render contracts as LaTeX");
  latex->add_option("files", files, "RCL files")->required();
  latex->add_option("--node", nodes, "Only these nodes")->delimiter(',');

  for (auto* sub : app.get_subcommands({})) add_globals(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  if (*check) return cmd_check(o, files);
  if (*compose) return cmd_compose(o, ca);
  if (*discharge_cmd) {
    ca.discharge = true;
    return cmd_compose(o, ca);
  }
  if (*synth) return cmd_synth(o, files, nodes);
  if (*monitor) return cmd_monitor(o, rml_path, trace_path);
  if (*latex) return cmd_latex(o, files, nodes);
  return kError;
}

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "contracts/diagnostic.hpp"
#include "contracts/model.hpp"
#include "contracts/typecheck.hpp"

namespace contracts {

struct IoKey {
  std::string node;
  Dir dir = Dir::In;
  std::string var;

  auto operator<=>(const IoKey&) const = default;
  std::string str() const { return node + "." + dir_str(dir) + "." + var; }
};

// One wiring line: every source output is equated with every sink input.
struct Edge {
  std::vector<IoKey> sources;
  std::vector<IoKey> sinks;
  int line = 0;
};

struct SystemModel {
  ContextTable context;
  std::map<std::string, TypedContract> contracts;
  std::vector<std::string> node_order;
  std::vector<Edge> edges;

  const TypedContract* find(const std::string& node) const;
  // All (source output, sink input) pairs, in file order.
  std::vector<std::pair<IoKey, IoKey>> wires() const;
  std::vector<std::pair<IoKey, IoKey>> wires_between(const std::string& from,
                                                     const std::string& to) const;
  TypeRef type_of(const IoKey& k) const;
};

Result<SystemModel> build_system_model(std::string_view wiring,
                                       const std::vector<TypedContract>& contracts,
                                       const ContextTable& ctx);

enum class Rule { R1, R2, R3, R4 };
const char* rule_name(Rule r);

struct LabelledObligation {
  Obligation obligation;
  std::string label;     // e.g. "G_Navigation and G_RadiationSensor => A_agent"
  bool sequent = false;  // consequent is an eventuality (R4 premises)
};

struct CompositionResult {
  Rule rule = Rule::R1;
  std::vector<LabelledObligation> obligations;
  DerivedProperty derived;
  std::vector<std::pair<IoKey, IoKey>> substitution;  // (node, out) -> (node, in)
  std::vector<std::string> notes;
  std::vector<CompositionResult> premises;  // R4 only
};

Result<CompositionResult> apply_r1(const SystemModel& m, const std::vector<std::string>& chain);
Result<CompositionResult> apply_r2(const SystemModel& m, const std::string& root,
                                   const std::vector<std::string>& leaves);
Result<CompositionResult> apply_r3(const SystemModel& m, const std::vector<std::string>& sources,
                                   const std::string& sink);
Result<CompositionResult> apply_r4(const SystemModel& m, const std::string& n1,
                                   const std::string& n2, const std::string& n3,
                                   const std::string& n4);

// Every io access in `f` gains the node qualifier.
FormulaPtr qualify(const FormulaPtr& f, const std::string& node);

// Free io symbols in order of first occurrence.
std::vector<IoKey> io_symbols(const FormulaPtr& f);

std::string render_fotl(const Obligation& ob, bool sequent = false);
std::string render_fotl(const DerivedProperty& p);
// The second line of render_fotl, without the quantifier header.
std::string render_fotl_body(const DerivedProperty& p);
std::string render_fotl_body(const Obligation& ob, bool sequent = false);

std::string render_stream_semantics(const TypedContract& c);

}  // namespace contracts

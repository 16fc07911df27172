#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "contracts/rcl.hpp"
#include "contracts/rml.hpp"
#include "contracts/rml_synth.hpp"
#include "test_util.hpp"

using namespace contracts;

namespace {

CheckedDocument checked(const std::string& src) {
  auto r = check_documents({testutil::document(src)});
  if (!r.ok()) throw std::runtime_error("document does not check");
  return *r.value;
}

const CheckedDocument& corpus() {
  static CheckedDocument d = checked(testutil::corpus("remote_inspection.rcl"));
  return d;
}

RmlSpec spec_of(const std::string& text) {
  auto r = parse_rml(text);
  if (!r.ok()) {
    std::string msg = "bad rml";
    for (auto& d : r.diags) msg += "\n  " + format_diagnostic(d, "<rml>");
    throw std::runtime_error(msg);
  }
  return *r.value;
}

RmlPtr term(const std::string& src) {
  auto s = spec_of("a matches { topic: 'a' };\nb matches { topic: 'b' };\nc matches { topic: 'c' };\nt = " +
                   src + ";\n");
  return s.terms[0].second;
}

RmlSpec synth(const CheckedDocument& d, const std::string& node) {
  auto r = synthesize_rml(*d.find(node), d.context);
  EXPECT_TRUE(r.ok());
  return *r.value;
}

// Single-event denotation over nullary event types a, b, c.
bool denotes(const RmlPtr& t, unsigned matches) {
  auto bit = [&](const std::string& n) { return (matches >> (n[0] - 'a')) & 1u; };
  switch (t->kind) {
    case RmlTerm::Kind::Et: return bit(t->name);
    case RmlTerm::Kind::NegEt: return !bit(t->name);
    case RmlTerm::Kind::Any: return true;
    case RmlTerm::Kind::None: return false;
    case RmlTerm::Kind::Not: return !denotes(t->kids[0], matches);
    case RmlTerm::Kind::And:
      for (auto& k : t->kids)
        if (!denotes(k, matches)) return false;
      return true;
    case RmlTerm::Kind::Or:
      for (auto& k : t->kids)
        if (denotes(k, matches)) return true;
      return false;
    default: throw std::runtime_error("not propositional");
  }
}

RmlPtr random_prop(std::mt19937& rng, int depth) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  std::string names[] = {"a", "b", "c"};
  if (depth == 0 || pick(4) == 0) {
    switch (pick(8)) {
      case 0: return rml::any();
      case 1: return rml::none();
      case 2:
      case 3: return rml::neg_et(names[pick(3)]);
      default: return rml::et(names[pick(3)]);
    }
  }
  switch (pick(3)) {
    case 0: return rml::negation(random_prop(rng, depth - 1));
    case 1: {
      std::vector<RmlPtr> ks;
      for (int n = 2 + pick(2); n > 0; --n) ks.push_back(random_prop(rng, depth - 1));
      return rml::conj(ks);
    }
    default: {
      std::vector<RmlPtr> ks;
      for (int n = 2 + pick(2); n > 0; --n) ks.push_back(random_prop(rng, depth - 1));
      return rml::disj(ks);
    }
  }
}

void collect_refs(const RmlPtr& t, std::vector<std::pair<std::string, size_t>>& out) {
  if (t->kind == RmlTerm::Kind::Et || t->kind == RmlTerm::Kind::NegEt) out.emplace_back(t->name, t->args.size());
  for (auto& k : t->kids) collect_refs(k, out);
}

}  // namespace

TEST(RmlParse, Listing5) {
  auto s = spec_of(testutil::data("listing5.rml"));
  ASSERT_EQ(s.event_types.size(), 6u);
  ASSERT_EQ(s.terms.size(), 3u);
  EXPECT_EQ(s.event_types[1].topic(), "gazebo_radiation_plugins/WayP");
  EXPECT_EQ(render_event_type(s.event_types[3]),
            "command(Cmd, x, y) matches { topic: 'gazebo_radiation_plugins/Command', command: Cmd, posX: x, posY: y };");
  for (auto& [_, t] : s.terms) EXPECT_EQ(t->kind, RmlTerm::Kind::Star);
}

TEST(RmlParse, ConstantsVariablesAndWildcards) {
  auto s = spec_of(testutil::data("listing5.rml"));
  std::vector<std::pair<std::string, size_t>> refs;
  auto t1 = s.terms[0].second;
  EXPECT_NE(render_term(t1).find("!wayP(x1, y1, _)"), std::string::npos);
  EXPECT_NE(render_term(t1).find("wayP(x2, y2, i+1)"), std::string::npos);
  auto t2 = term("{let i; a(i, inspect, 'two words', 3, true)}");
  auto& args = t2->kids[0]->args;
  EXPECT_EQ(args[0].kind, EtArg::Kind::Var);
  EXPECT_EQ(args[1].kind, EtArg::Kind::Const);
  EXPECT_EQ(args[1].value.str, "inspect");
  EXPECT_EQ(args[2].value.text(), "'two words'");
  EXPECT_EQ(args[3].value.kind, Lit::Kind::Num);
  EXPECT_EQ(args[4].value.kind, Lit::Kind::Bool);
}

TEST(RmlParse, RoundTripsThroughAsciiAndUnicode) {
  auto s = spec_of(testutil::data("listing5.rml"));
  auto ascii = spec_of(emit_rml(s));
  for (size_t k = 0; k < s.terms.size(); ++k) {
    EXPECT_TRUE(rml_alpha_equal(s.terms[k].second, ascii.terms[k].second)) << render_term(s.terms[k].second);
    auto uni = term(render_term(s.terms[k].second, true));
    EXPECT_TRUE(rml_alpha_equal(s.terms[k].second, uni));
  }
  for (size_t k = 0; k < s.event_types.size(); ++k)
    EXPECT_TRUE(et_alpha_equal(s.event_types[k], ascii.event_types[k]));
}

TEST(RmlParse, GuardedEventType) {
  auto s = spec_of("hot matches { topic: 'rad', value: v } with v >= 250;\nt = hot*;\n");
  ASSERT_TRUE(s.event_types[0].guard.has_value());
  EXPECT_EQ(s.event_types[0].guard->bound, 250);
  EXPECT_EQ(render_event_type(s.event_types[0]), "hot matches { topic: 'rad', value: v } with v >= 250;");
}

TEST(RmlParse, Errors) {
  EXPECT_FALSE(parse_rml("a matches { id: 1 };").ok());              // no topic
  EXPECT_FALSE(parse_rml("a(x) matches { topic: 'a' };").ok());      // unused parameter
  EXPECT_FALSE(parse_rml("t = a \\/ ;").ok());
  EXPECT_FALSE(parse_rml("t = {let x; a(x);").ok());
}

TEST(RmlAlpha, RenamingAndOrder) {
  EXPECT_TRUE(rml_alpha_equal(term("{let x; a(x) \\/ b(x)}"), term("{let y; b(y) \\/ a(y)}")));
  EXPECT_FALSE(rml_alpha_equal(term("{let x, y; a(x, y)}"), term("{let x, y; a(y, x)}")));
  EXPECT_FALSE(rml_alpha_equal(term("a b"), term("b a")));
}

TEST(RmlSimplify, ImpliesThreeWayCollapses) {
  auto a = rml::et("a"), b = rml::et("b");
  auto raw = rml::disj({rml::conj({rml::negation(a), b}), rml::conj({rml::negation(a), rml::negation(b)}),
                        rml::conj({a, b})});
  EXPECT_EQ(render_term(simplify_term(raw)), "!a \\/ b");
}

TEST(RmlSimplify, NegationOfConjunction) {
  EXPECT_EQ(render_term(simplify_term(rml::negation(term("a /\\ b")))), "!a \\/ !b");
}

TEST(RmlSimplify, Idempotence) { EXPECT_EQ(render_term(simplify_term(term("a \\/ a"))), "a"); }

TEST(RmlSimplify, IffAndConstants) {
  auto a = rml::et("a"), b = rml::et("b");
  auto iff = rml::disj({rml::conj({a, b}), rml::conj({rml::negation(a), rml::negation(b)})});
  EXPECT_EQ(render_term(simplify_term(iff)), "a /\\ b \\/ !a /\\ !b");
  EXPECT_EQ(render_term(simplify_term(term("a \\/ !a"))), "any");
  EXPECT_EQ(render_term(simplify_term(term("a /\\ !a"))), "none");
  EXPECT_EQ(render_term(simplify_term(term("(a \\/ none)*"))), "a*");
  EXPECT_EQ(render_term(simplify_term(term("{let x; a}"))), "a");
}

TEST(RmlSimplify, LeavesSequencesAlone) {
  // Complement rules only hold for single events.
  auto t = term("a b \\/ !(a b)");
  EXPECT_NE(simplify_term(t)->kind, RmlTerm::Kind::Any);
  auto u = term("a b /\\ a b");
  EXPECT_EQ(render_term(simplify_term(u)), "a b");
}

TEST(RmlSimplify, PreservesSingleEventDenotation) {
  std::mt19937 rng(20261018);
  for (int n = 0; n < 2000; ++n) {
    auto t = random_prop(rng, 4);
    auto s = simplify_term(t);
    for (unsigned m = 0; m < 8; ++m)
      ASSERT_EQ(denotes(t, m), denotes(s, m)) << render_term(t) << "  =>  " << render_term(s) << " @" << m;
  }
}

TEST(RmlSimplify, ReachesFixpoint) {
  std::mt19937 rng(7);
  for (int n = 0; n < 500; ++n) {
    auto s = simplify_term(random_prop(rng, 4));
    ASSERT_EQ(simplify_term(s)->key, s->key) << render_term(s);
  }
}

TEST(RmlSynth, AgentEventTypesMatchListing5) {
  auto ours = synth(corpus(), "agent");
  auto paper = spec_of(testutil::data("listing5.rml"));
  ASSERT_EQ(ours.event_types.size(), paper.event_types.size());
  for (auto& e : paper.event_types) {
    bool found = std::any_of(ours.event_types.begin(), ours.event_types.end(),
                             [&](const EventType& o) { return et_alpha_equal(o, e); });
    EXPECT_TRUE(found) << render_event_type(e);
  }
}

TEST(RmlSynth, AgentT2MatchesListing5) {
  auto ours = synth(corpus(), "agent");
  auto paper = spec_of(testutil::data("listing5.rml"));
  EXPECT_TRUE(rml_alpha_equal(ours.terms[1].second, simplify_term(paper.terms[1].second)))
      << render_term(ours.terms[1].second);
}

TEST(RmlSynth, AgentGolden) {
  EXPECT_EQ(emit_rml(synth(corpus(), "agent")), testutil::data("agent.rml"));
}

TEST(RmlSynth, AgentGoldenParsesBack) {
  auto ours = synth(corpus(), "agent");
  auto back = spec_of(testutil::data("agent.rml"));
  ASSERT_EQ(back.terms.size(), ours.terms.size());
  for (size_t k = 0; k < ours.terms.size(); ++k)
    EXPECT_TRUE(rml_alpha_equal(ours.terms[k].second, back.terms[k].second));
}

TEST(RmlSynth, RawImpliesIsThreeWay) {
  auto d = checked(
      "context{ T : {p, q}; }\n"
      "node N{ inputs( a : BOOL ) outputs( b : BOOL ) topics( std/A a matches(in.a), std/B b matches(out.b) )\n"
      "assume( TRUE ) guarantee( in.a == TRUE -> out.b == TRUE ) }\n");
  auto& tc = *d.find("N");
  std::vector<EventType> ets;
  auto raw = translate_formula(tc.contract.guarantees[0], tc, d.context, ets);
  ASSERT_TRUE(raw.ok());
  EXPECT_EQ(render_term(*raw.value), "!(a(true)) /\\ b(true) \\/ !(a(true)) /\\ !(b(true)) \\/ a(true) /\\ b(true)");
  EXPECT_EQ(render_term(simplify_term(*raw.value)), "!a(true) \\/ b(true)");
  ASSERT_EQ(ets.size(), 2u);
  EXPECT_EQ(render_event_type(ets[0]), "a(b) matches { topic: 'std/A', data: b };");
}

TEST(RmlSynth, MembershipUsesSmallerSide) {
  auto d = checked(
      "context{ L : {red, orange, green}; }\n"
      "node N{ inputs( s : L ) outputs( o : L ) topics( std/S s matches(in.s), std/O o matches(out.o) )\n"
      "assume( TRUE ) guarantee( in.s !in {red, orange} ) guarantee( in.s in {red, orange} )\n"
      "guarantee( in.s in {red, orange, green} ) guarantee( in.s !in {red, orange, green} ) }\n");
  auto s = synth(d, "N");
  EXPECT_EQ(render_term(s.terms[0].second), "s(green)*");
  EXPECT_EQ(render_term(s.terms[1].second), "!s(green)*");
  EXPECT_EQ(render_term(s.terms[2].second), "any*");
  EXPECT_EQ(render_term(s.terms[3].second), "empty");
}

TEST(RmlSynth, OrderingBecomesGuard) {
  auto s = synth(corpus(), "RadiationSensor");
  auto* g = s.find("r_lt_120", 0);
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(render_event_type(*g),
            "r_lt_120 matches { topic: 'gazebo_radiation_plugins/Simulated_Radiation_Msg', value: v } with v < 120;");
}

TEST(RmlSynth, EveryTermStarredAndDeclared) {
  auto d = corpus();
  auto arm = checked(testutil::corpus("arm.rcl"));
  for (auto* doc : {&d, &arm}) {
    for (auto& tc : doc->contracts) {
      auto s = synth(*doc, tc.contract.node_name);
      EXPECT_EQ(s.terms.size(), tc.contract.guarantees.size());
      for (auto& [name, t] : s.terms) {
        EXPECT_EQ(t->kind, RmlTerm::Kind::Star) << tc.contract.node_name << " " << name;
        std::vector<std::pair<std::string, size_t>> refs;
        collect_refs(t, refs);
        for (auto& [n, arity] : refs) EXPECT_NE(s.find(n, arity), nullptr) << n;
      }
    }
  }
}

TEST(RmlSynth, ArmServer) {
  auto arm = checked(testutil::corpus("arm.rcl"));
  auto r = synthesize_rml(*arm.find("ArmServer"), arm.context);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(emit_rml(*r.value),
            "arm_result(b) matches { topic: 'arm_result', data: b };\n\nt1 = arm_result(true)*;\n");
  ASSERT_EQ(r.diags.size(), 1u);
  EXPECT_EQ(r.diags[0].code, "no-topics");
}

TEST(RmlSynth, ArmClientSplitsDirections) {
  auto arm = checked(testutil::corpus("arm.rcl"));
  auto s = synth(arm, "ArmClient");
  std::set<std::string> names;
  for (auto& e : s.event_types) names.insert(e.name);
  EXPECT_EQ(names, (std::set<std::string>{"arm_down_in", "arm_down_out", "arm_result_in", "arm_result_out"}));
  EXPECT_EQ(render_term(s.terms[0].second), "{let v; arm_down_in(v) /\\ arm_down_out(v)}*");
}

TEST(RmlSynth, ExistsUniqueWarns) {
  auto r = synthesize_rml(*corpus().find("Localisation"), corpus().context);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(render_term(r.value->terms[0].second), "{let x, y; position(x, y)}*");
  ASSERT_FALSE(r.diags.empty());
  EXPECT_EQ(r.diags[0].code, "exists-unique");
}

TEST(RmlSynth, UnboundTopicIsAnError) {
  auto d = checked(
      "node N{ inputs( a : BOOL ) outputs( b : BOOL ) topics( std/A a matches(in.a) )\n"
      "assume( TRUE ) guarantee( out.b == TRUE ) }\n");
  auto r = synthesize_rml(*d.find("N"), d.context);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.diags[0].code, "unbound-topic");
}

TEST(MonitorConfig, AgentMatchesListing6) {
  auto r = monitor_config(*corpus().find("agent"), corpus().context);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(emit_monitor_config(*r.value), testutil::data("agent_config.yaml"));
  // wayP and radiationStatus are declared with builtin message types.
  EXPECT_EQ(r.diags.size(), 2u);
}

TEST(MonitorConfig, ZeroTopics) {
  auto arm = checked(testutil::corpus("arm.rcl"));
  auto r = monitor_config(*arm.find("ArmServer"), arm.context);
  EXPECT_EQ(emit_monitor_config(*r.value),
            "monitors:\n- monitor:\n    id: monitor_ArmServer\n    log: ./ArmServer_log.txt\n    topics: []\n");
}

TEST(MonitorConfig, BuiltinWithoutPackageFallsBackToStdMsgs) {
  auto d = checked(
      "node N{ inputs( a : NATURAL ) outputs( b : BOOL ) topics( int16 a matches(in.a), bool b matches(out.b) )\n"
      "assume( TRUE ) guarantee( out.b == TRUE ) }\n");
  auto r = monitor_config(*d.find("N"), d.context);
  ASSERT_EQ(r.value->topics.size(), 2u);
  EXPECT_EQ(r.value->topics[0].name, "std_msgs/Int16");
  EXPECT_EQ(r.value->topics[1].type, "std_msgs.msg.Bool");
}

#include <gtest/gtest.h>

#include "contracts/calculus.hpp"
#include "test_util.hpp"

using namespace contracts;

namespace {

Result<SystemModel> build(const std::string& rcl, const std::string& wiring) {
  auto checked = check_documents({testutil::document(rcl)});
  if (!checked.ok()) throw std::runtime_error("corpus does not typecheck");
  return build_system_model(wiring, checked.value->contracts, checked.value->context);
}

SystemModel remote() {
  auto r = build(testutil::corpus("remote_inspection.rcl"),
                 testutil::corpus("remote_inspection.wiring"));
  EXPECT_TRUE(r.ok());
  return *r.value;
}

// Small synthetic nodes over NATURAL so every rule has a clean instance.
const char* kSynthetic = R"(context{ Mode : {idle, busy}; }
node N1 { inputs(e : NATURAL) outputs(a : NATURAL) assume(in.e > 0) guarantee(out.a == in.e) }
node N2 { inputs(a : NATURAL, c : NATURAL) outputs(b : NATURAL) assume(in.a > 0) guarantee(out.b == in.a + 1) }
node N3 { inputs(b : NATURAL) outputs(c : NATURAL, d : NATURAL) assume(in.b > 1) guarantee(out.c == in.b and out.d == in.b) }
node N4 { inputs(d : NATURAL) outputs(f : NATURAL) assume(in.d > 1) guarantee(out.f == in.d) }
node Id { inputs(x : NATURAL) outputs(y : NATURAL) guarantee(TRUE) }
)";

std::string codes(const std::vector<Diagnostic>& ds) {
  std::string s;
  for (auto& d : ds) s += d.code + " ";
  return s;
}

}  // namespace

TEST(Wiring, CorpusBuilds) {
  auto m = remote();
  EXPECT_EQ(m.contracts.size(), 4u);
  EXPECT_EQ(m.edges.size(), 5u);
  EXPECT_EQ(m.wires().size(), 6u);
  EXPECT_EQ(m.wires_between("RadiationSensor", "agent").size(), 2u);
}

TEST(Wiring, Errors) {
  auto rcl = testutil::corpus("remote_inspection.rcl");
  EXPECT_EQ(codes(build(rcl, "Nowhere.x -> agent.at\n").diags), "unknown-node ");
  EXPECT_EQ(codes(build(rcl, "Navigation.nope -> agent.at\n").diags), "unknown-var ");
  EXPECT_EQ(codes(build(rcl, "Navigation.at -> agent.wayP\n").diags), "type-mismatch ");
  EXPECT_EQ(codes(build(rcl, "agent.in.at -> Navigation.position\n").diags), "direction ");
  EXPECT_EQ(codes(build(rcl, "Navigation.at agent.at\n").diags), "syntax ");
  auto r = build(rcl, "# comment\n\nNavigation.out.at -> agent.in.at\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value->edges[0].line, 3);
}

TEST(Qualify, RenamesEveryIoAccess) {
  auto f = qualify(testutil::formula("forall(x in REAL | in.p(x) == TRUE -> out.q == move(x, x))"), "N");
  EXPECT_EQ(render_formula(f), "forall(x in REAL | N.in.p(x) == TRUE -> N.out.q == move(x, x))");
  auto syms = io_symbols(f);
  ASSERT_EQ(syms.size(), 2u);
  EXPECT_EQ(syms[0].str(), "N.in.p");
  EXPECT_EQ(syms[1].str(), "N.out.q");
}

TEST(R1, LocalisationIntoNavigation) {
  auto m = remote();
  auto r = apply_r1(m, {"Localisation", "Navigation"});
  ASSERT_TRUE(r.ok()) << codes(r.diags);
  auto& res = *r.value;
  ASSERT_EQ(res.obligations.size(), 1u);
  auto& ob = res.obligations[0].obligation;
  EXPECT_EQ(render_formula(ob.antecedent), "exists!(x, y in REAL | Navigation.in.position(x, y))");
  EXPECT_EQ(render_formula(ob.consequent),
            "exists!(x, y in REAL | Navigation.in.position(x, y) == TRUE)");
  EXPECT_EQ(render_fotl(res.derived),
            "forall Navigation.in.command : CommandSet, Navigation.in.position : PositionType, "
            "Navigation.out.at : AtType\n"
            "TRUE -> <> forall(x, y in REAL | Navigation.in.command == move(x, y) and "
            "Navigation.in.position(x, y) == TRUE <-> Navigation.out.at(x, y) == TRUE)");
  // agent.command feeds Navigation but sits outside the chain.
  EXPECT_TRUE(res.notes.empty());
}

TEST(R1, Preconditions) {
  auto m = remote();
  EXPECT_EQ(codes(apply_r1(m, {"Navigation"}).diags), "chain-too-short ");
  EXPECT_EQ(codes(apply_r1(m, {"Navigation", "Localisation"}).diags), "not-wired ");
  EXPECT_EQ(codes(apply_r1(m, {"Navigation", "Navigation"}).diags), "circular ");
  EXPECT_EQ(codes(apply_r1(m, {"Navigation", "Ghost"}).diags), "unknown-node ");
}

TEST(R1, IdentityNodeIsTransparent) {
  auto checked = check_documents({testutil::document(kSynthetic)});
  ASSERT_TRUE(checked.ok());
  auto m = build_system_model("N1.a -> Id.x\nId.y -> N2.a\n", checked.value->contracts,
                              checked.value->context);
  ASSERT_TRUE(m.ok()) << codes(m.diags);
  auto r = apply_r1(*m.value, {"N1", "Id", "N2"});
  ASSERT_TRUE(r.ok()) << codes(r.diags);
  ASSERT_EQ(r.value->obligations.size(), 2u);
  EXPECT_EQ(render_fotl(r.value->obligations[0].obligation),
            "forall Id.in.x : NATURAL, N1.in.e : NATURAL\nId.in.x == N1.in.e -> TRUE");
  EXPECT_EQ(render_fotl_body(r.value->obligations[1].obligation), "TRUE -> N2.in.a > 0");
  EXPECT_EQ(render_fotl_body(r.value->derived), "N1.in.e > 0 -> <> N2.out.b == N2.in.a + 1");
}

TEST(R2, FanOut) {
  auto checked = check_documents({testutil::document(kSynthetic)});
  auto m = build_system_model("N3.c -> N2.c\nN3.d -> N4.d\n", checked.value->contracts,
                              checked.value->context);
  ASSERT_TRUE(m.ok());
  auto r = apply_r2(*m.value, "N3", {"N2", "N4"});
  ASSERT_TRUE(r.ok()) << codes(r.diags);
  ASSERT_EQ(r.value->obligations.size(), 2u);
  EXPECT_EQ(render_fotl_body(r.value->obligations[0].obligation),
            "N2.in.c == N3.in.b and N3.out.d == N3.in.b -> N2.in.a > 0");
  EXPECT_EQ(render_fotl_body(r.value->obligations[1].obligation),
            "N3.out.c == N3.in.b and N4.in.d == N3.in.b -> N4.in.d > 1");
  EXPECT_EQ(render_fotl_body(r.value->derived),
            "N3.in.b > 1 -> <> N2.out.b == N2.in.a + 1 and <> N4.out.f == N4.in.d");
  EXPECT_EQ(codes(apply_r2(*m.value, "N3", {"N2"}).diags), "partition-incomplete ");
  EXPECT_EQ(codes(apply_r2(*m.value, "N3", {"N2", "N1"}).diags),
            "partition-incomplete partition-incomplete ");
}

TEST(R3, RemoteInspectionAgent) {
  auto m = remote();
  auto r = apply_r3(m, {"Navigation", "RadiationSensor"}, "agent");
  ASSERT_TRUE(r.ok()) << codes(r.diags);
  auto& res = *r.value;
  ASSERT_EQ(res.obligations.size(), 1u);
  auto& ob = res.obligations[0].obligation;
  EXPECT_EQ(res.obligations[0].label, "G_Navigation and G_RadiationSensor => A_agent");
  EXPECT_EQ(render_formula(ob.consequent), "agent.in.radiationStatus in {red, orange, green}");
  auto body = render_formula(ob.antecedent);
  EXPECT_NE(body.find("agent.in.at(x, y) == TRUE"), std::string::npos);
  EXPECT_NE(body.find("agent.in.radiationStatus == green"), std::string::npos);
  EXPECT_NE(body.find("agent.in.inspected(i) == TRUE"), std::string::npos);
  EXPECT_EQ(body.find(".out."), std::string::npos);
  EXPECT_EQ(render_formula(res.derived.antecedent),
            "exists!(x, y in REAL | Navigation.in.position(x, y) == TRUE) and 0 <= RadiationSensor.in.r");
  ASSERT_EQ(res.derived.consequents.size(), 1u);
  // persistence note plus the two back-edges from agent.command
  EXPECT_EQ(res.notes.size(), 3u);
}

TEST(R3, SingleSourceMatchesR1) {
  auto checked = check_documents({testutil::document(kSynthetic)});
  auto m = *build_system_model("N2.b -> N3.b\n", checked.value->contracts, checked.value->context).value;
  auto a = apply_r3(m, {"N2"}, "N3");
  auto b = apply_r1(m, {"N2", "N3"});
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_TRUE(alpha_equal(a.value->obligations[0].obligation.antecedent,
                          b.value->obligations[0].obligation.antecedent));
  EXPECT_TRUE(alpha_equal(a.value->obligations[0].obligation.consequent,
                          b.value->obligations[0].obligation.consequent));
  EXPECT_EQ(render_fotl(a.value->derived), render_fotl(b.value->derived));
}

TEST(R2, SingleLeafMatchesR1) {
  auto m = remote();
  auto a = apply_r2(m, "Localisation", {"Navigation"});
  auto b = apply_r1(m, {"Localisation", "Navigation"});
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(render_fotl(a.value->obligations[0].obligation),
            render_fotl(b.value->obligations[0].obligation));
  EXPECT_EQ(render_fotl(a.value->derived), render_fotl(b.value->derived));
}

TEST(R3, Preconditions) {
  auto m = remote();
  // Navigation.in.command is fed by agent, which is not a source here.
  EXPECT_EQ(codes(apply_r3(m, {"Localisation"}, "Navigation").diags), "union-incomplete ");
  EXPECT_EQ(codes(apply_r3(m, {"Navigation"}, "agent").diags), "union-incomplete union-incomplete ");
  EXPECT_EQ(codes(apply_r3(m, {"Localisation", "Navigation"}, "agent").diags),
            "union-incomplete union-incomplete union-incomplete ");
  EXPECT_EQ(codes(apply_r3(m, {"agent", "agent"}, "Navigation").diags), "circular ");
}

TEST(R4, LoopShape) {
  auto checked = check_documents({testutil::document(kSynthetic)});
  auto wiring = "N1.a -> N2.a\nN2.b -> N3.b\nN3.c -> N2.c\nN3.d -> N4.d\n";
  auto m = build_system_model(wiring, checked.value->contracts, checked.value->context);
  ASSERT_TRUE(m.ok());
  auto r = apply_r4(*m.value, "N1", "N2", "N3", "N4");
  ASSERT_TRUE(r.ok()) << codes(r.diags);
  auto& res = *r.value;
  ASSERT_EQ(res.obligations.size(), 3u);
  for (auto& o : res.obligations) EXPECT_TRUE(o.sequent);
  EXPECT_EQ(render_fotl_body(res.obligations[0].obligation, true),
            "N2.in.a > 0 -> <> (N3.out.c == N3.in.b and N3.out.d == N3.in.b)");
  EXPECT_EQ(render_fotl_body(res.obligations[2].obligation, true),
            "N1.in.e > 0 and N3.in.b > 1 -> <> N2.out.b == N2.in.a + 1");
  EXPECT_EQ(res.premises.size(), 3u);
  EXPECT_EQ(render_fotl_body(res.derived), "N1.in.e > 0 -> <> N4.out.f == N4.in.d");

  auto broken = build_system_model("N1.a -> N2.a\nN2.b -> N3.b\nN3.d -> N4.d\n",
                                   checked.value->contracts, checked.value->context);
  EXPECT_EQ(codes(apply_r4(*broken.value, "N1", "N2", "N3", "N4").diags), "shape-mismatch ");
}

TEST(Render, TrivialObligation) {
  DerivedProperty p;
  p.antecedent = mk_bool(true);
  p.consequents.push_back({true, mk_bool(true)});
  EXPECT_EQ(render_fotl(p), "TRUE -> <> TRUE");
}

TEST(Render, BodyParsesBackWithoutEventually) {
  auto m = remote();
  for (auto r : {apply_r1(m, {"Localisation", "Navigation"}),
                 apply_r3(m, {"Navigation", "RadiationSensor"}, "agent")}) {
    ASSERT_TRUE(r.ok());
    std::string body = render_fotl_body(r.value->derived);
    for (size_t p; (p = body.find("<> ")) != std::string::npos;) body.erase(p, 3);
    auto parsed = parse_formula(body);
    ASSERT_TRUE(parsed.ok()) << body;
    auto expect = mk_implies(r.value->derived.antecedent, r.value->derived.consequents[0].formula);
    EXPECT_TRUE(alpha_equal(*parsed.value, expect)) << body;
  }
}

TEST(Render, StreamSemantics) {
  auto m = remote();
  EXPECT_EQ(render_stream_semantics(*m.find("RadiationSensor")).substr(0, 74),
            "(InStream([in.r, in.command | S]) and (0 <= in.r) and OutStream(T)) -> <> ");
  auto nav = render_stream_semantics(*m.find("Localisation"));
  EXPECT_EQ(nav,
            "(InStream([in.sensors | S]) and (TRUE) and OutStream(T)) -> <> (InStream(S) and "
            "(exists!(x, y in REAL | out.position(x, y))) and OutStream([out.position | T]))");
}

TEST(R2, GoalReasoningFanOut) {
  auto src = R"(context{ Goal : {charge, travel}; }
node GRA { inputs(battery : NATURAL) outputs(goal : Goal, dest : Goal) assume(in.battery >= 0)
  guarantee(in.battery < 20 -> out.goal == charge) }
node CPC { inputs(goal : Goal) outputs(plan : BOOL) assume(in.goal in {charge}) guarantee(out.plan == TRUE) }
node CPD { inputs(dest : Goal) outputs(plan : BOOL) assume(in.dest in {travel}) guarantee(out.plan == TRUE) }
node Extra { inputs(x : BOOL) outputs(y : BOOL) assume(TRUE) guarantee(TRUE) }
)";
  auto checked = check_documents({testutil::document(src)});
  ASSERT_TRUE(checked.ok());
  auto m = build_system_model("GRA.goal -> CPC.goal\nGRA.dest -> CPD.dest\n",
                              checked.value->contracts, checked.value->context);
  ASSERT_TRUE(m.ok());
  auto r = apply_r2(*m.value, "GRA", {"CPC", "CPD"});
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.value->obligations.size(), 2u);
  // Each premise pairs the root guarantee with its own leaf's assumption.
  EXPECT_EQ(render_formula(r.value->obligations[0].obligation.consequent), "CPC.in.goal in {charge}");
  EXPECT_EQ(render_formula(r.value->obligations[1].obligation.consequent), "CPD.in.dest in {travel}");
  EXPECT_EQ(r.value->derived.consequents.size(), 2u);

  // single node, no edges
  auto lone = build_system_model("", checked.value->contracts, checked.value->context);
  ASSERT_TRUE(lone.ok());
  EXPECT_TRUE(lone.value->edges.empty());
}

TEST(R2, ThreeLeaves) {
  auto src = R"(context{ M : {a}; }
node R { inputs(x : NATURAL) outputs(p : NATURAL, q : NATURAL, s : NATURAL) guarantee(out.p == in.x) }
node L1 { inputs(p : NATURAL) outputs(o : NATURAL) guarantee(TRUE) }
node L2 { inputs(q : NATURAL) outputs(o : NATURAL) guarantee(TRUE) }
node L3 { inputs(s : NATURAL) outputs(o : NATURAL) guarantee(TRUE) }
)";
  auto checked = check_documents({testutil::document(src)});
  auto m = build_system_model("R.p -> L1.p\nR.q -> L2.q\nR.s -> L3.s\n", checked.value->contracts,
                              checked.value->context);
  auto r = apply_r2(*m.value, "R", {"L1", "L2", "L3"});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value->obligations.size(), 3u);
  EXPECT_EQ(r.value->derived.consequents.size(), 3u);
}

TEST(R3, TrivialContracts) {
  auto src = R"(context{ M : {a}; }
node S1 { inputs(x : NATURAL) outputs(p : NATURAL) guarantee(TRUE) }
node S2 { inputs(x : NATURAL) outputs(q : NATURAL) guarantee(TRUE) }
node K { inputs(p : NATURAL, q : NATURAL) outputs(o : NATURAL) guarantee(TRUE) }
)";
  auto checked = check_documents({testutil::document(src)});
  auto m = build_system_model("S1.p -> K.p\nS2.q -> K.q\n", checked.value->contracts,
                              checked.value->context);
  auto r = apply_r3(*m.value, {"S1", "S2"}, "K");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(render_fotl(r.value->obligations[0].obligation), "TRUE -> TRUE");
  EXPECT_EQ(render_fotl(r.value->derived), "TRUE -> <> TRUE");
}

TEST(R4, IdenticalLoopContracts) {
  auto src = R"(context{ M : {a}; }
node E { inputs(x : NATURAL) outputs(v : NATURAL) guarantee(out.v > 0) }
node P { inputs(v : NATURAL, w : NATURAL) outputs(w : NATURAL) assume(in.v > 0) guarantee(out.w > 0) }
node Q { inputs(w : NATURAL) outputs(w : NATURAL, z : NATURAL) assume(in.w > 0) guarantee(out.w > 0 and out.z > 0) }
node X { inputs(z : NATURAL) outputs(o : NATURAL) assume(in.z > 0) guarantee(TRUE) }
)";
  auto checked = check_documents({testutil::document(src)});
  ASSERT_TRUE(checked.ok());
  auto m = build_system_model("E.v -> P.v\nP.w -> Q.w\nQ.w -> P.w\nQ.z -> X.z\n",
                              checked.value->contracts, checked.value->context);
  ASSERT_TRUE(m.ok()) << codes(m.diags);
  auto r = apply_r4(*m.value, "E", "P", "Q", "X");
  ASSERT_TRUE(r.ok()) << codes(r.diags);
  // Premise side conditions of the inner R1 are literally phi => phi.
  auto& inner = r.value->premises[0].obligations[0].obligation;
  EXPECT_TRUE(alpha_equal(inner.antecedent, inner.consequent));
}

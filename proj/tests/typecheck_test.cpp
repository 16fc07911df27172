#include <gtest/gtest.h>

#include <functional>

#include "contracts/typecheck.hpp"
#include "test_util.hpp"

using namespace contracts;

namespace {

const char* kContext = R"(context{
 WayP : REAL x REAL --> NATURAL ;
 RadStat : {red, orange, green} ;
 CommandSet : { move(REAL, REAL), inspect(NATURAL) };
 PositionType : REAL x REAL --> BOOL ;
 AtType: REAL x REAL --> BOOL;
 InspectedType :  NATURAL --> BOOL;
 SensorsType : {}; }
)";

ContextTable context() {
  auto doc = testutil::document(kContext);
  auto r = resolve_context(doc.all_decls());
  EXPECT_TRUE(r.ok());
  return *r.value;
}

std::vector<Diagnostic> check(const std::string& node_src) {
  auto doc = testutil::document(node_src);
  return check_contract(doc.contracts.at(0), context()).diags;
}

std::string codes(const std::vector<Diagnostic>& ds) {
  std::string s;
  for (auto& d : ds) s += d.code + " ";
  return s;
}

void collect_terms(const TermPtr& t, std::vector<const Term*>& out) {
  out.push_back(t.get());
  for (auto& a : t->args) collect_terms(a, out);
}

void collect_terms(const FormulaPtr& f, std::vector<const Term*>& out) {
  if (!f) return;
  if (f->t1) collect_terms(f->t1, out);
  if (f->t2) collect_terms(f->t2, out);
  collect_terms(f->lhs, out);
  collect_terms(f->rhs, out);
}

}  // namespace

TEST(ResolveContext, ListingOne) {
  auto ctx = context();
  EXPECT_EQ(ctx.size(), 7u);
  auto rs = ctx.find("RadStat");
  ASSERT_NE(rs, nullptr);
  EXPECT_EQ(rs->kind, TypeExpr::Kind::Enum);
  EXPECT_EQ(rs->members.size(), 3u);
}

TEST(ResolveContext, Empty) {
  auto r = resolve_context({});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value->size(), 0u);
}

TEST(ResolveContext, DuplicateName) {
  auto doc = testutil::document("context{ WayP : REAL --> NATURAL; WayP : {a}; }");
  auto r = resolve_context(doc.all_decls());
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diags[0].code, "duplicate-type");
}

TEST(ResolveContext, UndeclaredBaseType) {
  auto doc = testutil::document("context{ F : Pose --> BOOL; }");
  auto r = resolve_context(doc.all_decls());
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diags[0].code, "unknown-type");
}

TEST(CheckContract, CorpusHasNoDiagnostics) {
  std::vector<Document> docs = {testutil::document(testutil::corpus("remote_inspection.rcl")),
                                testutil::document(testutil::corpus("arm.rcl"))};
  auto r = check_documents(docs);
  EXPECT_TRUE(r.diags.empty()) << codes(r.diags);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value->contracts.size(), 6u);
}

TEST(CheckContract, SymbolTableIsExhaustive) {
  auto doc = testutil::document(testutil::corpus("remote_inspection.rcl"));
  auto ctx = *resolve_context(doc.all_decls()).value;
  for (auto& c : doc.contracts) {
    auto r = check_contract(c, ctx);
    ASSERT_TRUE(r.ok()) << c.node_name;
    std::vector<const Term*> terms;
    for (auto& f : r.value->contract.assumes) collect_terms(f, terms);
    for (auto& f : r.value->contract.guarantees) collect_terms(f, terms);
    for (auto* t : terms) EXPECT_TRUE(r.value->symbol_table.count(t)) << c.node_name;
  }
}

TEST(CheckContract, ConstructorArity) {
  auto d = check(
      "node n { inputs() outputs(command : CommandSet) "
      "guarantee(forall(x in REAL | out.command == move(x))) }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "arity");
}

TEST(CheckContract, FunctionArgumentTypes) {
  auto d = check(
      "node n { inputs(wayP : WayP) outputs() "
      "guarantee(forall(i in NATURAL, s in RadStat | in.wayP(s, 1) == i)) }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "type-mismatch");
}

TEST(CheckContract, NaturalLiteralWidensToReal) {
  EXPECT_TRUE(check("node n { inputs(r : REAL) outputs() guarantee(in.r < 120 and 0 <= in.r) }").empty());
  // only literals widen
  auto d = check("node n { inputs(r : REAL) outputs() guarantee(forall(i in NATURAL | in.r == i)) }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "type-mismatch");
}

TEST(CheckContract, OutAccessInAssume) {
  auto d = check("node n { inputs() outputs(b : BOOL) assume(out.b == TRUE) guarantee(TRUE) }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "out-in-assume");
}

TEST(CheckContract, DanglingTopic) {
  auto d = check("node n { inputs() outputs() topics(int16 t matches(in.missing)) guarantee(TRUE) }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "dangling-topic");
  auto d2 = check("node n { inputs(v : BOOL) outputs() topics(int16 t matches(out.v)) guarantee(TRUE) }");
  ASSERT_EQ(d2.size(), 1u);
  EXPECT_EQ(d2[0].code, "dangling-topic");
}

TEST(CheckContract, BareTopicBindingResolves) {
  auto doc = testutil::document(testutil::corpus("remote_inspection.rcl"));
  auto ctx = *resolve_context(doc.all_decls()).value;
  for (auto& c : doc.contracts) {
    if (c.node_name != "RadiationSensor") continue;
    auto r = check_contract(c, ctx);
    ASSERT_TRUE(r.ok());
    EXPECT_NE(r.value->topic_for(Dir::In, "r"), nullptr);
    EXPECT_NE(r.value->topic_for(Dir::Out, "inspected"), nullptr);
  }
}

TEST(CheckContract, MembershipChecksMembers) {
  auto d = check("node n { inputs(s : RadStat) outputs() guarantee(in.s in {red, purple}) }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "type-mismatch");
}

TEST(CheckContract, UnboundVariableAndUnknownVar) {
  auto d = check("node n { inputs(b : BOOL) outputs() guarantee(in.c == z) }");
  EXPECT_EQ(codes(d), "unknown-var unbound ");
}

TEST(CheckContract, QuantifierDomainMustBeEnumOrBase) {
  auto d = check("node n { inputs() outputs() guarantee(forall(p in PositionType | TRUE)) }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "bad-domain");
}

TEST(CheckContract, FunctionVarMustBeApplied) {
  auto d = check("node n { inputs(at : AtType) outputs() guarantee(in.at == TRUE) }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "unapplied-function");
}

TEST(CheckContract, DeterministicOrdering) {
  const char* src =
      "node n { inputs(r : REAL) outputs(b : BOOL)\n"
      " assume(out.b == TRUE)\n"
      " guarantee(in.q == 1 and move(1) == 2 and zz) }";
  auto a = check(src);
  auto b = check(src);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].code, b[i].code);
    EXPECT_EQ(a[i].span.line, b[i].span.line);
    EXPECT_EQ(a[i].span.col, b[i].span.col);
  }
  for (size_t i = 1; i < a.size(); ++i)
    EXPECT_TRUE(a[i - 1].span.line < a[i].span.line ||
                (a[i - 1].span.line == a[i].span.line && a[i - 1].span.col <= a[i].span.col));
}

TEST(CheckContract, QualifiedAccessRejected) {
  auto d = check("node n { inputs(b : BOOL) outputs() guarantee(n.in.b == TRUE) }");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "qualified-access");
}

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stdout only; stderr is folded in when `merge` is set.
Run contractc(const std::string& args, bool merge = false) {
  std::string cmd = std::string(CONTRACTC) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string corpus_path(const std::string& f) { return std::string(CORPUS_DIR) + "/" + f; }
std::string data_path(const std::string& f) { return std::string(TEST_DATA_DIR) + "/" + f; }

class Scratch {
 public:
  Scratch() {
    dir_ = fs::temp_directory_path() / ("contractc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(count_++));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name = {}) const { return (dir_ / name).string(); }

 private:
  static inline int count_ = 0;
  fs::path dir_;
};

const std::string kRemote = corpus_path("remote_inspection.rcl");
const std::string kWiring = corpus_path("remote_inspection.wiring");

}  // namespace

TEST(Cli, CheckCorpus) {
  auto r = contractc("check " + kRemote + " " + corpus_path("arm.rcl"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "ok: 6 contracts, 7 context types\n");
}

TEST(Cli, CheckDanglingMatches) {
  Scratch s;
  auto f = s.write("bad.rcl",
                   "node N{ inputs( a : BOOL ) outputs( b : BOOL ) topics( std/A a matches(in.zzz) )\n"
                   "assume( TRUE ) guarantee( out.b == TRUE ) }\n");
  auto r = contractc("check " + f, true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("bad.rcl:1:"), std::string::npos) << r.out;
}

TEST(Cli, CheckMissingFile) { EXPECT_EQ(contractc("check /nonexistent/x.rcl").code, 2); }

TEST(Cli, UsageErrors) {
  EXPECT_EQ(contractc("").code, 2);
  EXPECT_EQ(contractc("check --bogus " + kRemote).code, 2);
  EXPECT_EQ(contractc("--format yaml check " + kRemote).code, 2);
  auto help = contractc("compose --help");
  EXPECT_EQ(help.code, 0);
  for (auto* flag : {"--wiring", "--rule", "--nodes", "--discharge", "--bounds", "--format", "--out"})
    EXPECT_NE(help.out.find(flag), std::string::npos) << flag;
}

TEST(Cli, ComposeR3WithDefaultBounds) {
  auto r = contractc("compose " + kRemote + " -w " + kWiring + " -r R3 -n Navigation,RadiationSensor,agent --discharge");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict: ValidBounded"), std::string::npos);
  EXPECT_NE(r.out.find("exists!(x, y in REAL | Navigation.in.position(x, y) == TRUE) and 0 <= RadiationSensor.in.r -> <> ("),
            std::string::npos);
}

TEST(Cli, ComposeWithBoundsFileAndJson) {
  Scratch s;
  auto b = s.write("b.txt", "real_grid: 0, 60, 119, 120, 200, 249, 250, 400\n");
  auto r = contractc("--format json --bounds " + b + " compose " + kRemote + " -w " + kWiring +
                     " -r R3 -n Navigation,RadiationSensor,agent");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"verdict\": \"ValidBounded\""), std::string::npos) << r.out;
}

TEST(Cli, ComposeUnwiredChain) {
  auto r = contractc("compose " + kRemote + " -w " + kWiring + " -r R1 -n Localisation,agent", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("not-wired"), std::string::npos) << r.out;
}

TEST(Cli, MutatedRedBandStillDischarges) {
  // The agent assumption only asks for a member of RadStat, so swapping the red
  // band's status cannot break the obligation.
  Scratch s;
  auto text = testutil::corpus("remote_inspection.rcl");
  auto at = text.find("out.radiationStatus == red");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, std::string("out.radiationStatus == red").size(), "out.radiationStatus == green");
  auto f = s.write("mutant.rcl", text);
  auto r = contractc("discharge " + f + " -w " + kWiring + " -r R3 -n Navigation,RadiationSensor,agent");
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, CounterexampleExitsOne) {
  Scratch s;
  auto f = s.write("pair.rcl",
                   "node P{ inputs( i : REAL ) outputs( o : REAL ) assume( TRUE ) guarantee( 0 <= out.o ) }\n"
                   "node Q{ inputs( i : REAL ) outputs( o : REAL ) assume( 1 <= in.i ) guarantee( TRUE ) }\n");
  auto w = s.write("pair.wiring", "P.o -> Q.i\n");
  auto r = contractc("discharge " + f + " -w " + w + " -r R1 -n P,Q");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("verdict: Counterexample"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Q.in.i = 0"), std::string::npos) << r.out;
}

TEST(Cli, SynthAgentMatchesGoldens) {
  Scratch s;
  auto r = contractc("synth " + kRemote + " --node agent --out " + s.path());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(testutil::read_file(s.path("agent.rml")), testutil::data("agent.rml"));
  EXPECT_EQ(testutil::read_file(s.path("agent_config.yaml")), testutil::data("agent_config.yaml"));
  EXPECT_EQ(r.out, s.path("agent.rml") + "\n" + s.path("agent_config.yaml") + "\n");
}

TEST(Cli, SynthWholeCorpus) {
  Scratch s;
  auto r = contractc("synth " + kRemote + " --out " + s.path());
  EXPECT_EQ(r.code, 0);
  int files = 0;
  for (auto& e : fs::directory_iterator(s.path())) files += e.is_regular_file();
  EXPECT_EQ(files, 8);
}

TEST(Cli, SynthTrivialContract) {
  Scratch s;
  auto f = s.write("t.rcl",
                   "node T{ inputs( a : BOOL ) outputs( b : BOOL ) topics( std_msgs/Bool b matches(out.b) )\n"
                   "assume( TRUE ) guarantee( out.b == TRUE ) }\n");
  auto r = contractc("synth " + f + " --out " + s.path("gen"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(testutil::read_file(s.path("gen/T.rml")),
            "b(b) matches { topic: 'std_msgs/Bool', data: b };\n\nt1 = b(true)*;\n");
  EXPECT_EQ(testutil::read_file(s.path("gen/T_config.yaml")),
            "monitors:\n- monitor:\n    id: monitor_T\n    log: ./T_log.txt\n    topics:\n"
            "     - {action: log, name: std_msgs/Bool, type: std_msgs.msg.Bool}\n");
}

TEST(Cli, SynthIsDeterministic) {
  Scratch a, b;
  contractc("synth " + kRemote + " " + corpus_path("arm.rcl") + " --out " + a.path());
  contractc("synth " + kRemote + " " + corpus_path("arm.rcl") + " --out " + b.path());
  for (auto& e : fs::directory_iterator(a.path()))
    EXPECT_EQ(testutil::read_file(e.path().string()),
              testutil::read_file(b.path(e.path().filename().string())));
}

TEST(Cli, MonitorEmptyTrace) {
  Scratch s;
  auto t = s.write("empty.jsonl", "");
  EXPECT_EQ(contractc("monitor " + data_path("agent.rml") + " " + t).code, 0);
}

TEST(Cli, MonitorListing5GreenTrace) {
  Scratch s;
  auto t = s.write("green.jsonl",
                   "{\"topic\":\"gazebo_radiation_plugins/RadStat\",\"level\":\"green\"}\n"
                   "{\"topic\":\"/rosout\",\"msg\":\"noise\"}\n");
  auto r = contractc("monitor " + data_path("listing5.rml") + " " + t);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("1 events checked, 1 skipped"), std::string::npos) << r.out;
}

TEST(Cli, MonitorMissionTraceAgainstSynthesizedAgent) {
  // Every event on a declared topic falsifies the synthesized t3 (see monitor tests).
  Scratch s;
  auto t = s.write("mission.jsonl",
                   "{\"topic\":\"gazebo_radiation_plugins/At\",\"posX\":1,\"posY\":2}\n"
                   "{\"topic\":\"gazebo_radiation_plugins/Command\",\"command\":\"inspect\",\"id\":3}\n");
  auto r = contractc("--format json monitor " + data_path("agent.rml") + " " + t);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("\"violation_index\": 0"), std::string::npos) << r.out;
}

TEST(Cli, MonitorSkippedInspection) {
  // Listing 5 t3 accepts only green status events, so the command is the violation.
  Scratch s;
  auto t = s.write("skip.jsonl",
                   "{\"topic\":\"gazebo_radiation_plugins/RadStat\",\"level\":\"green\"}\n"
                   "{\"topic\":\"gazebo_radiation_plugins/Command\",\"command\":\"move\",\"posX\":4,\"posY\":4}\n");
  auto r = contractc("monitor " + data_path("listing5.rml") + " " + t);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("t3      violated    1"), std::string::npos) << r.out;
}

TEST(Cli, MonitorMalformedTrace) {
  Scratch s;
  auto t = s.write("bad.jsonl", "{\"topic\": 1}\n");
  auto r = contractc("monitor " + data_path("agent.rml") + " " + t, true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("bad.jsonl:1:"), std::string::npos) << r.out;
}

TEST(Cli, Latex) {
  auto r = contractc("latex " + kRemote + " --node agent");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("agent"), std::string::npos);
  EXPECT_EQ(r.out.find("Navigation"), std::string::npos);
}

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result sh(const std::string& args) {
  std::string cmd = std::string(TRIM_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return std::string(TRIM_TEST_DATA) + "/" + name; }

fs::path scratch(const char* name) {
  fs::path dir = fs::temp_directory_path() / "trim_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, TrimFactorialPreset) {
  Result r = sh("trim " + data("fig1_dse.imp") + " --preset trim_L");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("assume m = 5;"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("assumes: "), std::string::npos);
}

TEST(Cli, EmptyProgram) {
  fs::path out = scratch("empty.trimmed.imp");
  Result r = sh("trim " + data("empty.imp") + " -o " + out.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("assumes: 1"), std::string::npos) << r.out;
  std::ifstream in(out);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("assume false;"), std::string::npos) << text;
}

TEST(Cli, CheckTrimmedOutput) {
  fs::path out = scratch("fig1.trimmed.imp");
  ASSERT_EQ(sh("trim " + data("fig1_dse.imp") + " -o " + out.string()).code, 0);
  Result r = sh("check " + data("fig1_dse.imp") + " " + out.string() + " --domain 0..10");
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, CheckCounterexample) {
  Result r = sh("check " + data("fig1_dse.imp") + " " + data("fig1_ai.imp") + " --domain 0..10");
  EXPECT_EQ(r.code, 1) << r.out;
}

TEST(Cli, RunAndExplore) {
  Result r = sh("run " + data("fig1_dse.imp") + " --inputs m=5 --decisions 0,0,0,0,0,1");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("failure"), std::string::npos) << r.out;
  Result e = sh("explore " + data("fig1_dse.imp") + " --domain 4..6");
  EXPECT_EQ(e.code, 0) << e.out;
  EXPECT_NE(e.out.find("total: inputs 3"), std::string::npos) << e.out;
}

TEST(Cli, Dump) {
  Result r = sh("dump " + data("example41.imp") + " --aliases --conditions");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("->"), std::string::npos);
  EXPECT_NE(r.out.find("drf(y) = 3 && x != y"), std::string::npos) << r.out;
}

TEST(Cli, Deterministic) {
  std::string args = "trim " + data("example52.imp") + " --preset trim_NDB";
  Result a = sh(args), b = sh(args);
  // Timing lines differ; compare the program text only.
  auto program = [](const std::string& s) { return s.substr(0, s.find("assumes:")); };
  EXPECT_EQ(program(a.out), program(b.out));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(sh("").code, 64);
  EXPECT_EQ(sh("frobnicate").code, 64);
  EXPECT_EQ(sh("trim " + data("fig1_dse.imp") + " --preset nope").code, 64);
  EXPECT_EQ(sh("trim /nonexistent/file.imp").code, 66);
  fs::path bad = scratch("bad.imp");
  std::ofstream(bad) << "proc main( : r { }";
  EXPECT_EQ(sh("trim " + bad.string()).code, 65);
}

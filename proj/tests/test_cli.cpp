#include <doctest.h>

#include <array>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "test_support.hpp"

namespace {

struct CommandResult {
  int status = -1;
  std::string output;  // stdout and stderr combined
};

CommandResult run_cli(const std::string& args) {
  std::string command = std::string(MUSPARK_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  std::array<char, 4096> buffer;
  size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), n);
  int rc = pclose(pipe);
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

std::string corpus(const std::string& name) {
  return muspark::test::corpus_file(name);
}

}  // namespace

TEST_CASE("check rejects p1 with the documented diagnostic") {
  CommandResult r = run_cli("check " + corpus("p1.mus"));
  CHECK(r.status == 1);
  CHECK(r.output.find("B.Key.all") != std::string::npos);
  CHECK(r.output.find("requires W, has NO") != std::string::npos);
}

TEST_CASE("check is quiet on success") {
  CommandResult r = run_cli("check " + corpus("swap.mus"));
  CHECK(r.status == 0);
  CHECK(r.output.empty());
}

TEST_CASE("missing input files are usage errors") {
  CommandResult r = run_cli("check " + corpus("no_such_file.mus"));
  CHECK(r.status == 4);
}

TEST_CASE("json diagnostics are one object per line") {
  CommandResult r = run_cli("--format=json check " + corpus("p1.mus"));
  CHECK(r.status == 1);
  size_t lines = 0;
  size_t start = 0;
  while (start < r.output.size()) {
    size_t end = r.output.find('\n', start);
    if (end == std::string::npos) break;
    std::string line = r.output.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    ++lines;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    REQUIRE(!j.is_discarded());
    CHECK(j.contains("file"));
    CHECK(j.contains("line"));
    CHECK(j.contains("col"));
    CHECK(j.contains("code"));
    CHECK(j.contains("rule"));
    CHECK(j.contains("path"));
    CHECK(j.contains("required"));
    CHECK(j.contains("actual"));
    CHECK(j.contains("message"));
    CHECK(j["path"] == "B.Key.all");
    CHECK(j["required"] == "W");
    CHECK(j["actual"] == "NO");
    CHECK(j["rule"] == "P-assign");
  }
  CHECK(lines == 1);
}

TEST_CASE("run maps outcomes onto exit statuses") {
  CHECK(run_cli("run " + corpus("swap.mus") + " --monitor").status == 0);
  CHECK(run_cli("run " + corpus("null_deref.mus")).status == 2);
  CHECK(run_cli("run " + corpus("fuel.mus") + " --fuel 2000").status == 5);
  CHECK(run_cli("run " + corpus("p1.mus")).status == 1);  // rejected before running
}

TEST_CASE("unchecked monitored runs expose the masked aliasing") {
  CommandResult r =
      run_cli("run " + corpus("unchecked_alias.mus") + " --unchecked --monitor");
  CHECK(r.status == 3);
  CHECK(r.output.find("crew violation") != std::string::npos);
  CHECK(r.output.find("A.Key.all") != std::string::npos);
  CHECK(r.output.find("B.Key.all") != std::string::npos);
}

TEST_CASE("trace prints sorted path and permission lines") {
  CommandResult r = run_cli("trace " + corpus("alloc.mus") + " --point Main#1:after");
  CHECK(r.status == 0);
  CHECK(r.output.find("P\tW\n") != std::string::npos);
  CHECK(r.output.find("P.all\tW\n") != std::string::npos);
  CHECK(r.output.find("P.all.Key\tW\n") != std::string::npos);
  CHECK(r.output.find("P.all.Key.all\tNO\n") != std::string::npos);

  CommandResult roots =
      run_cli("trace " + corpus("swap.mus") + " --point Swap#1:after --depth 0");
  CHECK(roots.status == 0);
  CHECK(roots.output == "Temp\tRW\nX\tRW\nY\tW\n");

  CommandResult unknown =
      run_cli("trace " + corpus("alloc.mus") + " --point Main#9:after");
  CHECK(unknown.status == 4);
}

TEST_CASE("trace without a point prints every sequence point") {
  CommandResult r = run_cli("trace " + corpus("swap.mus") + " --depth 0");
  CHECK(r.status == 0);
  CHECK(r.output.find("== Swap#1:before\n") != std::string::npos);
  CHECK(r.output.find("== Swap#3:after\n") != std::string::npos);
  CHECK(r.output.find("== Main#7:after\n") != std::string::npos);
}

TEST_CASE("fuzz campaigns succeed and report json when asked") {
  CommandResult r = run_cli("fuzz --count 40 --seed 12");
  CHECK(r.status == 0);
  CHECK(r.output.find("generated: 40") != std::string::npos);

  CommandResult j = run_cli("--format=json fuzz --count 10 --seed 12");
  CHECK(j.status == 0);
  nlohmann::json parsed = nlohmann::json::parse(j.output, nullptr, false);
  REQUIRE(!parsed.is_discarded());
  CHECK(parsed["generated"] == 10);
  CHECK(parsed["ok"] == true);
}

TEST_CASE("usage errors exit with status 4") {
  CHECK(run_cli("frobnicate").status == 4);
  CHECK(run_cli("check").status == 4);
}

TEST_CASE("verbose monitored runs log sequence points") {
  CommandResult r = run_cli("run " + corpus("swap.mus") + " --monitor --verbose");
  CHECK(r.status == 0);
  CHECK(r.output.find("Main#1:before\t") != std::string::npos);
  CHECK(r.output.find("Swap#1:before\t") != std::string::npos);
}

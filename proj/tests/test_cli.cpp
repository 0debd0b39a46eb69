#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

Result bellctl(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" BELLCTL_PATH "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bellctl_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = path / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string at(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_records(const std::string& log) {
  std::istringstream in(log);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) n += !line.empty() && std::isdigit(static_cast<unsigned char>(line[0]));
  return n;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run writes a log with one record per round") {
    TempDir dir;
    const auto cfg = dir.file("d.cfg",
                              "rounds = 100\nseed = 1\nstrategy.name = deterministic\n"
                              "strategy.params.table = +1,+1,+1,-1\n");
    const auto r = bellctl("run " + cfg + " -o " + dir.at("d.log"));
    CHECK(r.code == 0);
    CHECK(r.output.find("test report") != std::string::npos);
    CHECK(count_records(slurp(dir.at("d.log"))) == 100);
  }

  TEST_CASE("signaling strategy with enforcement on is a structural violation") {
    TempDir dir;
    const auto cfg = dir.file("s.cfg", "rounds = 10\nseed = 1\nstrategy.name = signaling-cheat\n");
    const auto r = bellctl("run " + cfg + " -o " + dir.at("s.log"));
    CHECK(r.code == 3);
    CHECK_FALSE(fs::exists(dir.at("s.log")));
  }

  TEST_CASE("signaling strategy with enforcement off runs") {
    TempDir dir;
    const auto cfg = dir.file("s.cfg", "rounds = 200\nseed = 1\nstrategy.name = signaling-cheat\nenforcement = false\n");
    const auto r = bellctl("--format json run " + cfg + " -o " + dir.at("s.log"));
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["wins"] == 200);
  }

  TEST_CASE("invalid config is a usage error") {
    TempDir dir;
    const auto cfg = dir.file("n.cfg", "rounds = -5\nseed = 1\nstrategy.name = quantum\n");
    const auto r = bellctl("run " + cfg + " -o " + dir.at("n.log"));
    CHECK(r.code == 2);
    CHECK(r.output.find("rounds") != std::string::npos);
    CHECK(bellctl("run " + dir.at("missing.cfg") + " -o " + dir.at("x.log")).code == 1);
    CHECK(bellctl("frobnicate").code == 2);
    CHECK(bellctl("").code == 2);
  }

  TEST_CASE("enumerate") {
    const auto r = bellctl("enumerate");
    REQUIRE(r.code == 0);
    std::istringstream in(r.output);
    std::string line;
    int rows = 0, three = 0, one = 0;
    bool max_line = false;
    while (std::getline(in, line)) {
      if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) {
        ++rows;
        three += line.ends_with("\t3/4");
        one += line.ends_with("\t1/4");
      }
      if (line.starts_with("max") && line.ends_with("3/4")) max_line = true;
    }
    CHECK(rows == 16);
    CHECK(three == 8);
    CHECK(one == 8);
    CHECK(max_line);

    const auto j = nlohmann::json::parse(bellctl("--format json enumerate").output);
    CHECK(j["strategies"].size() == 16);
    CHECK(j["max_win_probability"] == "3/4");
  }

  TEST_CASE("analyze a quantum log") {
    TempDir dir;
    const auto cfg = dir.file("q.cfg", "rounds = 2000\nseed = 9\nstrategy.name = quantum\n");
    REQUIRE(bellctl("run " + cfg + " -o " + dir.at("q.log")).code == 0);
    const auto r = bellctl("--format json analyze " + dir.at("q.log") + " --alpha 0.05 0.01");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["test"]["reject_at"] == nlohmann::json::array({0.05, 0.01}));
    CHECK(j["test"]["rounds"] == 2000);
    CHECK(j["no_signaling"]["status"] == "ok");
    CHECK(j["audit"]["verdict"] == "inapplicable");

    const auto text = bellctl("analyze " + dir.at("q.log"));
    CHECK(text.code == 0);
    CHECK(text.output.find("inapplicable") != std::string::npos);
  }

  TEST_CASE("analyze audits a timed log") {
    TempDir dir;
    const auto cfg = dir.file("t.cfg",
                              "rounds = 100\nseed = 2\nstrategy.name = quantum\n"
                              "geometry.separation_m = 1300\ngeometry.response_latency_a_ns = 3000\n"
                              "geometry.response_latency_b_ns = 3000\n");
    REQUIRE(bellctl("run " + cfg + " -o " + dir.at("t.log")).code == 0);
    const auto j = nlohmann::json::parse(bellctl("--format json analyze " + dir.at("t.log")).output);
    CHECK(j["audit"]["verdict"] == "PASS");
    CHECK(j["audit"]["rounds_checked"] == 100);
  }

  TEST_CASE("a corrupted log names the line") {
    TempDir dir;
    const auto cfg = dir.file("q.cfg", "rounds = 50\nseed = 9\nstrategy.name = quantum\n");
    REQUIRE(bellctl("run " + cfg + " -o " + dir.at("q.log")).code == 0);
    std::string text = slurp(dir.at("q.log"));
    text = text.substr(0, text.size() - 4);  // tear the final record
    const auto bad = dir.file("bad.log", text);
    const auto lines = std::count(text.begin(), text.end(), '\n') + 1;
    const auto r = bellctl("analyze " + bad);
    CHECK(r.code == 2);
    CHECK(r.output.find("line " + std::to_string(lines)) != std::string::npos);
  }

  TEST_CASE("power") {
    auto r = bellctl("power --rate 0.8");
    CHECK(r.code == 0);
    CHECK(r.output.find("189") != std::string::npos);

    r = bellctl("--format json power --rate 0.750001");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["required_n_exact"] == "infeasible");
    CHECK(j["required_n_normal_approx"].get<double>() > 1e11);
    CHECK(j["required_n_normal_approx"].get<double>() == doctest::Approx(5.07e11).epsilon(0.01));

    CHECK(bellctl("power --rate 0.7").code == 2);
    CHECK(bellctl("power --rate 0.8 --alpha 1.5").code == 2);
  }

  TEST_CASE("search cap from the environment") {
    auto j = nlohmann::json::parse(bellctl("--format json power --rate 0.8", "BELLCTL_EXACT_SEARCH_CAP=100").output);
    CHECK(j["required_n_exact"] == "infeasible");
    CHECK(j["search_cap"] == 100);
    j = nlohmann::json::parse(bellctl("--format json power --rate 0.8", "BELLCTL_EXACT_SEARCH_CAP=200").output);
    CHECK(j["required_n_exact"] == 189);
    CHECK(bellctl("power --rate 0.8", "BELLCTL_EXACT_SEARCH_CAP=abc").code == 2);
    // the flag wins over the environment
    j = nlohmann::json::parse(
        bellctl("--format json power --rate 0.8 --cap 1000", "BELLCTL_EXACT_SEARCH_CAP=100").output);
    CHECK(j["required_n_exact"] == 189);
  }

  TEST_CASE("run can also write the report") {
    TempDir dir;
    const auto cfg = dir.file("q.cfg", "rounds = 300\nseed = 4\nstrategy.name = quantum\n");
    const auto r = bellctl("--format json run " + cfg + " -o " + dir.at("q.log") + " --report " + dir.at("r.json"));
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(slurp(dir.at("r.json")))["rounds"] == 300);
  }
}

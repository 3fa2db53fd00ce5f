#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dwlab/commands.hpp"
#include "dwlab/config.hpp"
#include "dwlab/report.hpp"

using namespace dwlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("dwlab_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& s) const { return (path / s).string(); }
};

int run(const std::string& cmd, const std::string& cfg_text, const std::string& out, int workers = 1,
        std::string* log = nullptr) {
  app::CommandOptions opt;
  opt.out_dir = out;
  opt.workers = workers;
  std::ostringstream l, e;
  const int rc = app::dispatch(cmd, Config::from_string(cfg_text), opt, l, e);
  if (log) *log = l.str() + e.str();
  return rc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Manifest without its wall-time line.
std::string stable(const std::string& path) {
  std::istringstream in(slurp(path));
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("wall_time_s", 0) != 0) out += line + "\n";
  return out;
}

const char* kSmallRun = "n = 1\nL = 64\nN = 1024\nt_max = 20\ndata.amplitude = 0.5\n";

}  // namespace

TEST_CASE("config parsing") {
  const auto c = Config::from_string("# comment\n a = 1.5 \nb=2 # trailing\nlist = x; y ;z\nnums = 1, 2 3\n");
  CHECK(c.get_double("a", 0) == 1.5);
  CHECK(c.get_int("b", 0) == 2);
  CHECK(c.get_int("missing", 7) == 7);
  CHECK(c.get_list("list") == std::vector<std::string>{"x", "y", "z"});
  CHECK(c.get_doubles("nums") == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(c.get_int("a", 0), ConfigError);
  CHECK_THROWS_AS(Config::from_string("novalue\n"), ConfigError);
  CHECK_THROWS_AS(Config::from_string("= 3\n"), ConfigError);
  CHECK_THROWS_AS(Config::from_string("x = 1q").get_double("x", 0), ConfigError);
  CHECK_THROWS_AS(c.require_known({"a", "b"}), ConfigError);
  CHECK_NOTHROW(c.require_known({"a", "b", "list", "nums"}));
  auto d = c;
  d.set_assignment("a=9");
  CHECK(d.get_double("a", 0) == 9.0);
  CHECK_THROWS_AS(d.set_assignment("noequals"), ConfigError);
}

TEST_CASE("config hash") {
  // FNV-1a 64 reference vectors
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  const auto a = Config::from_string("x = 1\ny = 2\n");
  const auto b = Config::from_string("y = 2\n# reordered\nx = 1\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash_hex().size() == 16u);
  CHECK(a.hash() != Config::from_string("x = 1\ny = 3\n").hash());
}

TEST_CASE("manifest round trip") {
  TempDir t("manifest");
  Manifest m;
  m.add("x", 0.1);
  m.add("third", 1.0 / 3.0);
  m.add("big", 1e300);
  m.add("i", 42);
  m.add("flag", true);
  m.add("config.n", std::string("2"));
  m.write(t.sub("m.txt"));
  const auto c = Config::from_file(t.sub("m.txt"));
  CHECK(c.get_double("x", 0) == 0.1);
  CHECK(c.get_double("third", 0) == 1.0 / 3.0);
  CHECK(c.get_double("big", 0) == 1e300);
  CHECK(c.get_int("i", 0) == 42);
  CHECK(c.get_string("flag", "") == "true");
  CHECK(format_real(INFINITY) == "inf");
  CHECK(Config::from_manifest(t.sub("m.txt")).entries().size() == 1u);
  CHECK(Config::from_manifest(t.sub("m.txt")).get_int("n", 0) == 2);
}

TEST_CASE("output directory resolution") {
  const auto cfg = Config::from_string("n = 1\n");
  app::CommandOptions opt;
  opt.out_dir = "/x/y";
  CHECK(app::resolve_out_dir("run", cfg, opt) == "/x/y");
  opt.out_dir.clear();
  ::setenv("DWLAB_OUT", "/tmp/root", 1);
  CHECK(app::resolve_out_dir("run", cfg, opt) == "/tmp/root/run-" + cfg.hash_hex().substr(0, 8));
  ::unsetenv("DWLAB_OUT");
  CHECK(app::resolve_out_dir("linear", cfg, opt) == "dwlab_out/linear-" + cfg.hash_hex().substr(0, 8));
}

TEST_CASE("classify exit codes") {
  TempDir t("classify");
  std::string log;
  CHECK(run("classify", "modulus = invlog:p=1.0\n", t.sub("a"), 1, &log) == app::kOk);
  CHECK(log.find("Divergent") != std::string::npos);
  CHECK(run("classify", "modulus = power:p=1.0\n", t.sub("b"), 1, &log) == app::kOk);
  CHECK(log.find("Convergent") != std::string::npos);
  CHECK(run("classify", "modulus = invlog:p=0\n", t.sub("c")) == app::kUsage);
  CHECK(run("classify", "modulus = invlog:p=1\nbogus = 1\n", t.sub("d")) == app::kUsage);
  CHECK(run("classify", "modulus = invlog:p=1\n", t.sub("e")) == app::kOk);
  CHECK(fs::exists(t.sub("e/manifest.txt")));
  CHECK(fs::exists(t.sub("e/shells.csv")));
  CHECK(run("frobnicate", "", t.sub("f")) == app::kUsage);
}

TEST_CASE("linear command") {
  TempDir t("linear");
  std::string log;
  CHECK(run("linear", "", t.sub("a"), 1, &log) == app::kOk);
  CHECK(fs::exists(t.sub("a/norms.csv")));
  CHECK(fs::exists(t.sub("a/plot_decay.py")));
  const auto m = Config::from_file(t.sub("a/manifest.txt"));
  CHECK(std::abs(m.get_double("fit.Linf.exponent", 0) + 0.5) <= 0.1);
  // an impossible tolerance turns the assertion into a mismatch
  CHECK(run("linear", "tolerance = 1e-9\n", t.sub("b")) == app::kMismatch);
  CHECK(run("linear", "data.amplitude = 0\n", t.sub("c"), 1, &log) == app::kOk);
  CHECK(log.find("fits skipped") != std::string::npos);
  CHECK(run("linear", "L = 100\n", t.sub("d")) == app::kUsage);
}

TEST_CASE("run is reproducible from its manifest") {
  TempDir t("run");
  CHECK(run("run", std::string(kSmallRun) + "modulus = invlog:p=1\nsnapshot_every = 4\n", t.sub("a")) == app::kOk);
  const auto cfg = Config::from_manifest(t.sub("a/manifest.txt"));
  app::CommandOptions opt;
  opt.out_dir = t.sub("b");
  std::ostringstream l, e;
  CHECK(app::dispatch("run", cfg, opt, l, e) == app::kOk);
  CHECK(stable(t.sub("a/manifest.txt")) == stable(t.sub("b/manifest.txt")));
  CHECK(slurp(t.sub("a/norms.csv")) == slurp(t.sub("b/norms.csv")));
  CHECK(fs::exists(t.sub("a/snapshots.csv")));

  // certificate from the saved trajectory
  std::string log;
  CHECK(run("certificate", "trajectory = " + t.sub("a") + "\nR0 = 8\nR_min = 2\nR_max = 19\n", t.sub("c"), 1, &log) ==
        app::kOk);
  CHECK(fs::exists(t.sub("c/certificate.txt")));
  CHECK(fs::exists(t.sub("c/functionals.csv")));
  CHECK(Config::from_file(t.sub("c/certificate.txt")).get_string("Y_le_log2_I", "") == "true");
  CHECK(run("certificate", "trajectory = " + t.sub("nope") + "\n", t.sub("d")) == app::kUsage);
  CHECK(run("certificate", std::string(kSmallRun) + "data.shape = dgaussian\n", t.sub("e")) == app::kUsage);
}

TEST_CASE("sweep") {
  TempDir t("sweep");
  const std::string cfg = std::string(kSmallRun) +
                          "nonlinearities = pure:q=1.5; invlog:p=2\nepsilons = 0.5, 1\nt_max = 40\n";
  std::string log;
  CHECK(run("sweep", cfg, t.sub("a"), 1, &log) == app::kOk);
  CHECK(run("sweep", cfg, t.sub("b"), 3) == app::kOk);
  for (int i = 0; i < 4; ++i) {
    const auto m = "/run_" + std::to_string(i) + "/manifest.txt";
    CHECK(slurp(t.sub("a") + m) == slurp(t.sub("b") + m));
  }
  CHECK(slurp(t.sub("a/summary.csv")) == slurp(t.sub("b/summary.csv")));
  const auto table = slurp(t.sub("a/dichotomy.txt"));
  CHECK(table.find("BlewUp@") != std::string::npos);
  CHECK(table.find("Completed") != std::string::npos);
  CHECK(run("sweep", std::string(kSmallRun) + "nonlinearities = invlog:p=2\n", t.sub("c")) == app::kUsage);
  CHECK(run("sweep", std::string(kSmallRun) + "epsilons = 1\n", t.sub("d")) == app::kUsage);
  CHECK(run("sweep", std::string(kSmallRun) + "nonlinearities = invlog:p=2\nepsilons = 1, 0.5\n", t.sub("e")) ==
        app::kUsage);
}

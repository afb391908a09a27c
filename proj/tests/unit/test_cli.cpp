#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <doctest.h>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/wait.h>
#endif

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(FRACLAP_CLI_PATH) + " " + args + " > cli_test_stdout.txt 2>&1";
  int status = std::system(cmd.c_str());
#if defined(__unix__) || defined(__APPLE__)
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
#else
  return status;
#endif
}

std::string last_stdout() {
  std::ifstream in("cli_test_stdout.txt");
  std::string all, line;
  while (std::getline(in, line)) all += line + "\n";
  return all;
}

bool file_exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("solve with zero data exits cleanly and writes the CSV") {
    int rc = run_cli("solve --p 2 --s 0.5 --rhs const:0 --n 64 --L 4 --out cli_sol_test.csv");
    CHECK(rc == 0);
    CHECK(last_stdout().find("iters=0") != std::string::npos);
    REQUIRE(file_exists("cli_sol_test.csv"));
    std::ifstream in("cli_sol_test.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "# p,s,L,a,n,energy,residual,iters");
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "x,u");
    std::remove("cli_sol_test.csv");
  }

  TEST_CASE("parameter errors exit with code 1") {
    CHECK(run_cli("solve --p 0.9 --s 0.5 --n 64 --L 4") == 1);
    CHECK(run_cli("solve --p 2 --s 1.5 --n 64 --L 4") == 1);
    CHECK(run_cli("solve --badflag") == 1);
    CHECK(run_cli("verify --suite nonsense") == 1);
  }

  TEST_CASE("measuring the zero field exits with code 3") {
    CHECK(run_cli("measure --field const:0 --n 2048") == 3);
  }

  TEST_CASE("operator dump is gated") {
    CHECK(run_cli("solve --p 2 --s 0.5 --rhs const:0 --n 64 --L 2 --dump-operator cli_op_test.csv") == 0);
    CHECK(file_exists("cli_op_test.csv"));
    std::remove("cli_op_test.csv");
    CHECK(run_cli("solve --p 2 --s 0.5 --rhs const:0 --n 128 --L 2 --dump-operator cli_op_test.csv") == 1);
  }

  TEST_CASE("config file values are overridden by flags") {
    {
      std::ofstream cfg("cli_test_config.ini");
      cfg << "# config for the zero problem\n";
      cfg << "p=2\n";
      cfg << "s=0.5\n";
      cfg << "rhs=const:0\n";
      cfg << "n=64\n";
      cfg << "L=4\n";
    }
    int rc = run_cli("solve --config cli_test_config.ini");
    CHECK(rc == 0);
    CHECK(last_stdout().find("n=64") != std::string::npos);
    rc = run_cli("solve --config cli_test_config.ini --n 96");
    CHECK(rc == 0);
    CHECK(last_stdout().find("n=96") != std::string::npos);
    std::remove("cli_test_config.ini");
  }

  TEST_CASE("verify homogeneity via the CLI") {
    int rc = run_cli("verify --suite homogeneity --p 3");
    CHECK(rc == 0);
    CHECK(last_stdout().find("PASS") != std::string::npos);
  }

  TEST_CASE("cleanup") {
    std::remove("cli_test_stdout.txt");
    CHECK(true);
  }
}

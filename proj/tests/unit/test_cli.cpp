#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Outcome {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(REDMASH_CLI) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return o;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) o.out += buf.data();
  const int status = pclose(pipe);
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

std::vector<double> split_csv(const std::string& line) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  return v;
}

}  // namespace

TEST(Cli, ValidateStaticSuitePasses) {
  const Outcome o = run_cli("validate --suite static");
  EXPECT_EQ(o.exit_code, 0) << o.out;
  EXPECT_NE(o.out.find("PASS"), std::string::npos);
}

TEST(Cli, MalformedConfigExitsTwo) {
  const auto path = temp_file("redmash_malformed.json", "{\n  \"run\": {\"n_traj\": 10,\n}\n");
  const Outcome o = run_cli("run --config " + path.string());
  EXPECT_EQ(o.exit_code, 2) << o.out;
  EXPECT_NE(o.out.find("line"), std::string::npos) << o.out;
}

TEST(Cli, UnknownFieldExitsTwo) {
  const auto path = temp_file("redmash_unknown.json", R"({"run": {"trajectories": 10}})");
  const Outcome o = run_cli("run --config " + path.string());
  EXPECT_EQ(o.exit_code, 2) << o.out;
  EXPECT_NE(o.out.find("run.trajectories"), std::string::npos) << o.out;
}

TEST(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(run_cli("run --trajectories many").exit_code, 2);
  EXPECT_EQ(run_cli("validate --suite nonsense").exit_code, 2);
}

TEST(Cli, CavityRatesPeakAtResonances) {
  const Outcome o = run_cli("rates --config " REDMASH_CONFIG_DIR "/cavity.json --qmin -2 --qmax 1.5 --n 3501");
  ASSERT_EQ(o.exit_code, 0) << o.out;
  std::stringstream ss(o.out);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'q') continue;
    rows.push_back(split_csv(line));
  }
  ASSERT_EQ(rows.size(), 3501u);
  std::vector<double> maxima;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    if (rows[i][3] > rows[i - 1][3] && rows[i][3] >= rows[i + 1][3]) maxima.push_back(rows[i][0]);
  }
  ASSERT_EQ(maxima.size(), 2u);
  EXPECT_NEAR(maxima[0], -1.23, 0.02);
  EXPECT_NEAR(maxima[1], 0.23, 0.02);
}

TEST(Cli, RunWritesCsv) {
  const auto out = std::filesystem::temp_directory_path() / "redmash_cli_run.csv";
  const Outcome o = run_cli("run --method redfield --t-max 2 --n-output 5 --output " + out.string());
  ASSERT_EQ(o.exit_code, 0) << o.out;
  std::ifstream in(out);
  std::string header, columns;
  std::getline(in, header);
  std::getline(in, columns);
  EXPECT_EQ(header.rfind("# method=redfield", 0), 0u) << header;
  EXPECT_EQ(columns.rfind("t,P_a,P_a_stderr", 0), 0u) << columns;
}

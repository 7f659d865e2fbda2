#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "commands.hpp"
#include "csv.hpp"
#include "experiment_config.hpp"
#include "ini.hpp"
#include "suprec/errors.hpp"
#include "suprec/serialize.hpp"

namespace {

namespace fs = std::filesystem;
using namespace suprec;
using namespace suprec::cli;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.front() != '#') lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("suprec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const char* kTrialConfig = R"(# small trial
[problem]
d = 10
k = 2
m = 4
n = 30
sigma2 = 0.1
seed = 17

[experiment]
trials = 50
delta = 0.1
)";

// ---------------------------------------------------------------------------
// Config parsing

TEST(Ini, ParsesSectionsAndComments) {
  const auto e = parse_ini("; comment\n[a]\nx = 1\n\n# other\n[b]\n y=two words \n");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].section, "a");
  EXPECT_EQ(e[0].key, "x");
  EXPECT_EQ(e[0].value, "1");
  EXPECT_EQ(e[0].line, 3u);
  EXPECT_EQ(e[1].section, "b");
  EXPECT_EQ(e[1].value, "two words");
}

TEST(Ini, ReportsLineNumbers) {
  auto expect_line = [](const std::string& text, const std::string& needle) {
    try {
      parse_ini(text);
      FAIL() << "expected error for: " << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_line("x = 1\n", "line 1");
  expect_line("[a]\nx = 1\nx = 2\n", "line 3");
  expect_line("[a]\n\njunk\n", "line 3");
  expect_line("[a\n", "line 1");
}

TEST(ExperimentConfig, UnknownKeysAndSectionsAreErrors) {
  try {
    parse_experiment_config("[problem]\nd = 4\ndd = 5\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'dd'"), std::string::npos);
  }
  EXPECT_THROW(parse_experiment_config("[problems]\nd = 4\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[problem]\nd = four\n"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[problem]\nx_min = nan\n"), ConfigError);
}

TEST(ExperimentConfig, DeltaOutOfRangeNamesField) {
  try {
    parse_experiment_config("[experiment]\ndelta = 1.5\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("delta"), std::string::npos);
  }
}

TEST(ExperimentConfig, AutoConstantsAndLists) {
  const auto c = parse_experiment_config(
      "[constants]\nc_heavy = auto\nc_sample = 4\n[sweep]\nm_list = 4, 5,6\n"
      "[verify-bounds]\nlemmas =\n");
  EXPECT_TRUE(c.c_heavy_auto);
  EXPECT_FALSE(c.c_sample_auto);
  EXPECT_EQ(c.constants.c_sample, 4.0);
  EXPECT_EQ(c.sweep.m_list, (std::vector<std::size_t>{4, 5, 6}));
  EXPECT_TRUE(c.verify_bounds.lemmas.empty());
  EXPECT_THROW(parse_experiment_config("[verify-bounds]\nlemmas = lemma7\n"), ConfigError);
}

TEST(ExperimentConfig, RenderedFormParsesBackToTheSameRendering) {
  auto c = parse_experiment_config(kTrialConfig);
  c.problem.fixed_pattern = {1.0};
  c.problem.signal_mode = SignalMode::UniformMagnitudeRandomSign;
  c.sweep.m_list = {3, 9};
  c.c_sample_auto = true;
  const std::string text = render_experiment_config(c);
  EXPECT_EQ(render_experiment_config(parse_experiment_config(text)), text);
}

// ---------------------------------------------------------------------------
// Number formatting

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(1e-300), "1e-300");
  EXPECT_EQ(std::stod(format_real(2.0 / 3.0)), 2.0 / 3.0);
  EXPECT_EQ(format_fixed(20.0 / 13.0, 6), "1.538462");
  EXPECT_EQ(format_fixed(5.0, 6), "5.000000");
  EXPECT_EQ(comment_block("a\n\nb"), "# a\n#\n# b\n");
}

// ---------------------------------------------------------------------------
// Subcommands

TEST_F(CliTest, TrialWritesOneRowAndIsReproducible) {
  const auto cfg = write_config("t.ini", kTrialConfig);
  const auto r = run({"trial", "--config", cfg, "--out", path("a.csv"), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(path("a.csv"));
  EXPECT_EQ(text.rfind("# suprec trial", 0), 0u);
  const auto lines = data_lines(text);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0],
            "d,k,m,n,sigma2,x_min,x_max,signal_mode,trials,successes,rate,ci_low,ci_high,"
            "master_seed");
  const auto row = split(lines[1]);
  ASSERT_EQ(row.size(), 14u);
  EXPECT_EQ(row[7], "constant_min");
  EXPECT_EQ(row[8], "50");
  EXPECT_EQ(row[13], "17");
  ASSERT_EQ(run({"trial", "--config", cfg, "--out", path("b.csv"), "--threads", "3", "--quiet"}).code, 0);
  EXPECT_EQ(slurp(path("b.csv")), text);
  // The comment block carries the resolved config but no run-local settings.
  EXPECT_NE(text.find("# trials = 50"), std::string::npos);
  EXPECT_EQ(text.find("threads"), std::string::npos);
  EXPECT_EQ(text.find("a.csv"), std::string::npos);
}

TEST_F(CliTest, SeedFlagOverridesConfig) {
  const auto cfg = write_config("t.ini", kTrialConfig);
  const auto r = run({"trial", "--config", cfg, "--stdout", "--seed", "99", "--quiet"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(split(data_lines(r.out)[1]).back(), "99");
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const auto bad = write_config("bad.ini", "[experiment]\ndelta = 1.5\n");
  const auto r = run({"trial", "--config", bad, "--stdout"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("delta"), std::string::npos);
  EXPECT_TRUE(r.out.empty());

  const auto typo = write_config("typo.ini", "[problem]\nd = 4\nsigma = 1\n");
  const auto t = run({"trial", "--config", typo, "--stdout"});
  EXPECT_EQ(t.code, 2);
  EXPECT_NE(t.err.find("line 3"), std::string::npos);

  EXPECT_EQ(run({"trial", "--bogus-flag"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"trial", "--out", path("x"), "--stdout"}).code, 2);
}

TEST_F(CliTest, IoErrorsExitThree) {
  EXPECT_EQ(run({"trial", "--config", path("missing.ini"), "--stdout"}).code, 3);
  const auto cfg = write_config("t.ini", kTrialConfig);
  EXPECT_EQ(run({"trial", "--config", cfg, "--out", path("no/such/dir/x.csv"), "--quiet"}).code, 3);
}

TEST_F(CliTest, SweepRowsSummaryAndThreadIndependence) {
  const auto cfg = write_config("s.ini", R"([problem]
d = 24
k = 6
seed = 3
[experiment]
delta = 0.25
trials = 100
[sweep]
m_list = 2, 3, 4, 6, 12
fit_low = 1
fit_high = 3
)");
  ASSERT_EQ(run({"sweep", "--config", cfg, "--out", path("s1.csv"), "--threads", "1", "--quiet"}).code, 0);
  ASSERT_EQ(run({"sweep", "--config", cfg, "--out", path("s2.csv"), "--threads", "4", "--quiet"}).code, 0);
  EXPECT_EQ(slurp(path("s1.csv")), slurp(path("s2.csv")));
  EXPECT_EQ(slurp(path("s1_summary.csv")), slurp(path("s2_summary.csv")));

  const auto lines = data_lines(slurp(path("s1.csv")));
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "d,k,m,k_over_m,delta,nstar,found,trials,master_seed");
  EXPECT_EQ(split(lines[1])[3], "3.000000");
  EXPECT_EQ(split(lines[2])[3], "2.000000");
  EXPECT_EQ(split(lines[5])[3], "0.500000");
  for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(split(lines[i])[6], "1");
  // Outside-regime points are flagged in the comment block.
  EXPECT_NE(slurp(path("s1.csv")).find("# outside_regime: m = 2"), std::string::npos);

  const auto summary = data_lines(slurp(path("s1_summary.csv")));
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[0], "fit_low,fit_high,points,slope,intercept,master_seed");
  EXPECT_EQ(split(summary[1])[2], "4");
}

TEST_F(CliTest, SweepNotFoundLeavesNStarEmpty) {
  const auto cfg = write_config("s.ini",
                                "[problem]\nd = 10\nk = 2\nsigma2 = 1e8\n[sweep]\nm_list = 2\n"
                                "n_max = 4\n[experiment]\ntrials = 20\n");
  const auto r = run({"sweep", "--config", cfg, "--stdout", "--quiet"});
  ASSERT_EQ(r.code, 0);
  const auto lines = data_lines(r.out);
  const auto row = split(lines[1]);
  EXPECT_EQ(row[5], "");
  EXPECT_EQ(row[6], "0");
  // With --stdout the summary follows the main table.
  EXPECT_NE(r.out.find("fit_low,fit_high,points,slope,intercept,master_seed"), std::string::npos);
  EXPECT_EQ(run({"sweep", "--stdout", "--quiet"}).code, 2);  // empty m_list
}

TEST_F(CliTest, NStarCommand) {
  const auto cfg = write_config("n.ini", "[problem]\nd = 2\nk = 1\nm = 50\n[experiment]\ntrials = 100\n");
  const auto r = run({"nstar", "--config", cfg, "--stdout", "--quiet"});
  ASSERT_EQ(r.code, 0);
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(split(lines[1])[5], "1");
}

TEST_F(CliTest, VerifyBoundsExitCodes) {
  const auto empty = write_config("e.ini", "[verify-bounds]\nlemmas =\n");
  const auto e = run({"verify-bounds", "--config", empty, "--stdout", "--quiet"});
  EXPECT_EQ(e.code, 0);
  EXPECT_EQ(data_lines(e.out), (std::vector<std::string>{"lemma,n,m,t,empirical,std_err,analytic,pass"}));

  const auto good = write_config("g.ini", R"([verify-bounds]
lemmas = chisq_upper_tail, max_chisq
n_list = 10
m_list = 4
t_grid = 0.5, 1
chisq_n_list = 5
chisq_mu_list = 1
chisq_t_grid = 0.5, 1
replications = 5000
)");
  const auto g = run({"verify-bounds", "--config", good, "--stdout", "--quiet"});
  EXPECT_EQ(g.code, 0) << g.out;
  const auto rows = data_lines(g.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(split(rows[1])[0], "chisq_upper_tail:mu=1:sigma2=1");
  EXPECT_EQ(split(rows[1])[2], "");
  EXPECT_EQ(split(rows[3])[0].rfind("max_chisq:mu_max=", 0), 0u);
  EXPECT_EQ(split(rows[3])[2], "4");

  const auto absurd = write_config("a.ini", R"([constants]
c_heavy = 1000
[verify-bounds]
lemmas = heavy_q3
n_list = 10
m_list = 4
t_grid = 0.1
replications = 5000
)");
  const auto a = run({"verify-bounds", "--config", absurd, "--stdout", "--quiet"});
  EXPECT_EQ(a.code, 1);
  EXPECT_EQ(split(data_lines(a.out)[1]).back(), "0");
}

TEST_F(CliTest, VerifyBoundsCalibratesWhenAsked) {
  const auto cfg = write_config("c.ini", R"([constants]
c_heavy = auto
[verify-bounds]
lemmas = heavy_q2
n_list = 10
m_list = 4
t_grid = 0.3
replications = 2000
calibration_replications = 2000
)");
  const auto r = run({"verify-bounds", "--config", cfg, "--stdout", "--quiet"});
  EXPECT_NE(r.out.find("# calibrated c_heavy = "), std::string::npos);
  EXPECT_EQ(r.code, 0);
}

TEST_F(CliTest, VerifySeparationCommand) {
  const auto cfg = write_config("v.ini", R"([problem]
d = 16
k = 4
m = 8
[experiment]
delta = 0.25
[constants]
c_sample = 64
[verify-separation]
instances = 10
n_factor = 2
)");
  const auto r = run({"verify-separation", "--config", cfg, "--stdout", "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0],
            "d,k,m,n,delta,c_sample,instances,satisfied,fraction,outside_regime,master_seed");
  const auto row = split(lines[1]);
  const auto formula = sample_complexity_upper({4, 8, 16, 0.25, 1.0, 1.0, 0.0}, BoundConstants{1, 64, 1});
  EXPECT_EQ(row[3], std::to_string(2 * formula.n));
  EXPECT_EQ(row[6], "10");
}

TEST_F(CliTest, GenerateDumpsALoadableInstance) {
  const auto cfg = write_config("g.ini", "[problem]\nd = 5\nk = 2\nm = 3\nn = 4\nseed = 8\n[generate]\ntrial = 2\n");
  const auto r = run({"generate", "--config", cfg, "--stdout", "--quiet"});
  ASSERT_EQ(r.code, 0);
  const auto inst = load_instance(r.out);
  ProblemConfig c;
  c.d = 5;
  c.k = 2;
  c.m = 3;
  c.n = 4;
  c.seed = 8;
  EXPECT_EQ(inst.measurements.observations[3], gen_instance(c, 2).measurements.observations[3]);
}

// ---------------------------------------------------------------------------
// bounds-eval

TEST(BoundsEval, Examples) {
  auto value = [](const std::vector<std::string>& args) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    const auto lines = data_lines(r.out);
    EXPECT_EQ(lines.size(), 2u);
    const auto header = split(lines.at(0));
    const auto row = split(lines.at(1));
    const auto col = std::find(header.begin(), header.end(), "value") - header.begin();
    return std::make_pair(row.at(col), r.out);
  };
  const auto [n, sc_text] = value({"bounds-eval", "sample_complexity_upper", "k=10", "m=2", "d=100", "delta=0.1"});
  EXPECT_EQ(n, "173");
  EXPECT_NE(sc_text.find(",regime_warning\n"), std::string::npos);
  EXPECT_EQ(sc_text.back(), '\n');
  EXPECT_EQ(split(data_lines(sc_text)[1]).back(), "1");

  EXPECT_NEAR(std::stod(value({"bounds-eval", "chisq_upper_tail", "n=1", "sigma=1", "mu=0", "t=2"}).first),
              0.778801, 5e-7);
  EXPECT_EQ(value({"bounds-eval", "heavy_q3", "t=0"}).first, "1");
  EXPECT_EQ(value({"bounds-eval", "chisq_cube_moment", "p=2", "m=4"}).first, "32768");
  EXPECT_NEAR(std::stod(value({"bounds-eval", "rosenthal", "lp_norm=1", "l2_norm=1"}).first),
              2.0 + std::sqrt(2.0), 1e-15);
}

TEST(BoundsEval, ErrorsExitTwo) {
  const auto unknown = run({"bounds-eval", "lemma_x", "t=1"});
  EXPECT_EQ(unknown.code, 2);
  for (auto name : bound_names()) EXPECT_NE(unknown.err.find(std::string(name)), std::string::npos);
  EXPECT_EQ(run({"bounds-eval", "heavy_q3"}).code, 2);               // t missing
  EXPECT_EQ(run({"bounds-eval", "heavy_q3", "t=1", "q=2"}).code, 2);  // unknown key
  EXPECT_EQ(run({"bounds-eval", "heavy_q3", "t=x"}).code, 2);
  EXPECT_EQ(run({"bounds-eval", "max_chisq", "mu_max=0.5", "t=1"}).code, 2);
  EXPECT_EQ(run({"bounds-eval", "chisq_lower_tail", "sigma2=0", "t=1"}).code, 2);
}

}  // namespace

// Copyright 2026 The rffdq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rffdq/rffdq.hpp"

using namespace rffdq;
using namespace rffdq::harness;

namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

/// Small, fast sweep configuration on 2-d synthetic data.
ExperimentConfig small_config() {
    ExperimentConfig c;
    c.kernel = "ring";
    c.layers = 1;
    c.dim = 2;
    c.n_train = 40;
    c.n_test = 40;
    c.epochs = 20;
    c.D_grid = {20, 80};
    c.repetitions = 3;
    c.baseline = false;
    return c;
}

std::string csv_of(const SweepResult& r) {
    std::ostringstream o;
    r.write_csv(o);
    return o.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("rffdq_harness_" + name);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

}  // namespace

TEST(Config, EmptyInputGivesDefaults) {
    const auto c = parse("");
    EXPECT_EQ(c.kernel, "ring");
    EXPECT_EQ(c.n_test, 200u);
    EXPECT_EQ(c.D_grid, (std::vector<std::size_t>{50, 200, 800}));
    EXPECT_EQ(c.repetitions, 10);
    EXPECT_TRUE(c.classification());
}

TEST(Config, SectionsParsed) {
    const auto c = parse(
        "[kernel]\nspec = ring\nlayers = 2\n[data]\ndim = 4\ntrain = 100\nnoise = 0.25\n"
        "[model]\nkind = ridge\nlambda = 0.01\nfeatures = eigen\n"
        "[sampling]\nstrategies = uniform, truncated\nD = 10, 20\n"
        "[baseline]\nshots = inf, 10\n[run]\nrepetitions = 4\nseed = 9\nthreshold = 0.15\ndims = 2,4\n");
    EXPECT_EQ(c.layers, 2);
    EXPECT_EQ(c.dim, 4);
    EXPECT_EQ(c.n_train, 100u);
    EXPECT_DOUBLE_EQ(c.noise, 0.25);
    EXPECT_EQ(c.model, "ridge");
    EXPECT_EQ(c.features, rff::FeatureKind::EigenFeatures);
    ASSERT_EQ(c.strategies.size(), 2u);
    EXPECT_EQ(c.strategies[0], rff::Strategy::Uniform);
    EXPECT_EQ(c.strategies[1], rff::Strategy::TruncatedConvolutional);
    EXPECT_EQ(c.D_grid, (std::vector<std::size_t>{10, 20}));
    ASSERT_EQ(c.shots.size(), 2u);
    EXPECT_FALSE(c.shots[0]);
    EXPECT_EQ(c.shots[1], std::optional<std::uint64_t>(10));
    EXPECT_EQ(c.repetitions, 4);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.threshold, std::optional<double>(0.15));
    EXPECT_EQ(c.dims, (std::vector<int>{2, 4}));
}

TEST(Config, InvalidInputsRejected) {
    EXPECT_THROW(parse("[data]\ncolour = red\n"), ConfigError);
    EXPECT_THROW(parse("[sampling]\nD = 200, 50\n"), ConfigError);
    EXPECT_THROW(parse("[sampling]\nD = 50, 50\n"), ConfigError);
    EXPECT_THROW(parse("[run]\nrepetitions = 0\n"), ConfigError);
    EXPECT_THROW(parse("[model]\nkind = ridge\n"), ConfigError);
    EXPECT_THROW(parse("[model]\nC = abc\n"), ConfigError);
    EXPECT_THROW(parse("[baseline]\nenabled = maybe\n"), ConfigError);
    EXPECT_THROW(parse("[baseline]\nshots = 0\n"), ConfigError);
    EXPECT_THROW(parse("[sampling]\nstrategies = sideways\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/rffdq.ini"), ConfigError);
}

TEST(Config, HashTracksContent) {
    const auto a = parse("[run]\nseed = 3\n");
    const auto b = parse("[run]\nseed = 3\n");
    const auto c = parse("[run]\nseed = 4\n");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, RingCircuitSizedFromDimension) {
    ExperimentConfig c;
    c.layers = 2;
    const auto k = c.circuit_for_dim(5);
    EXPECT_EQ(k.n_qubits, 3);
    EXPECT_EQ(k.dim, 5);
    c.kernel = "xrot";
    EXPECT_THROW(c.circuit_for_dim(2), ConfigError);
}

TEST(PrepareData, CsvSplitIsDisjointAndCovering) {
    const auto dir = scratch("split");
    const auto path = (dir / "rows.csv").string();
    {
        std::ofstream f(path);
        f << "x0,y\n";
        for (int i = 0; i < 10; ++i) f << i << ',' << (i % 2) << '\n';
    }
    ExperimentConfig c;
    c.data_source = path;
    c.dim = 1;
    c.n_train = 6;
    c.n_test = 4;
    const auto d = prepare_data(c, 1);
    ASSERT_EQ(d.train.m(), 6);
    ASSERT_EQ(d.test.m(), 4);
    std::set<double> seen;
    for (Eigen::Index i = 0; i < 6; ++i) seen.insert(d.train.X(i, 0));
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_FALSE(seen.count(d.test.X(i, 0)));
    for (Eigen::Index i = 0; i < 4; ++i) seen.insert(d.test.X(i, 0));
    EXPECT_EQ(seen.size(), 10u);
    c.n_train = 8;
    EXPECT_THROW(prepare_data(c, 1), ConfigError);
}

TEST(Sweep, RowCountWithBaseline) {
    ExperimentConfig c = small_config();
    c.n_train = 20;
    c.n_test = 10;
    c.epochs = 5;
    c.D_grid = {50, 200, 800};
    c.repetitions = 60;
    c.baseline = true;
    c.shots = {std::nullopt, std::uint64_t{10}};
    const auto r = risk_vs_D_sweep(c);
    ASSERT_EQ(r.rows.size(), 182u);
    std::size_t base = 0;
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.config_id, c.hash());
        EXPECT_GE(row.test_risk, 0.0);
        EXPECT_LE(row.test_risk, 1.0);
        EXPECT_GE(row.train_risk, 0.0);
        EXPECT_LE(row.train_risk, 1.0);
        if (row.D == 0) ++base;
    }
    EXPECT_EQ(base, 2u);
    EXPECT_EQ(r.rows[180].method, "qsvm-inf");
    EXPECT_EQ(r.rows[181].method, "qsvm-10");
    EXPECT_EQ(r.test_risks("truncated", 200).size(), 60u);
}

TEST(Sweep, CsvColumns) {
    auto c = small_config();
    c.repetitions = 1;
    const auto r = risk_vs_D_sweep(c);
    std::istringstream in(csv_of(r));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "config_id,method,D,repetition,seed,train_risk,test_risk");
    std::ostringstream timed;
    r.write_csv(timed, true);
    EXPECT_EQ(timed.str().substr(0, timed.str().find('\n')), header + ",wall_time");
}

TEST(Sweep, DeterministicGivenSeed) {
    auto c = small_config();
    c.strategies = {rff::Strategy::TruncatedConvolutional, rff::Strategy::Uniform};
    const auto a = csv_of(risk_vs_D_sweep(c));
    const auto b = csv_of(risk_vs_D_sweep(c));
    EXPECT_EQ(a, b);
    c.seed = 2;
    EXPECT_NE(a, csv_of(risk_vs_D_sweep(c)));
}

TEST(Sweep, CellSeedsIndependentOfGridOrderAndExtent) {
    auto c = small_config();
    const auto full = risk_vs_D_sweep(c);
    c.D_grid = {80};
    const auto part = risk_vs_D_sweep(c);
    for (const auto& row : part.rows) {
        const auto it = std::find_if(full.rows.begin(), full.rows.end(), [&](const SweepRow& r) {
            return r.method == row.method && r.D == row.D && r.repetition == row.repetition;
        });
        ASSERT_NE(it, full.rows.end());
        EXPECT_EQ(it->seed, row.seed);
        EXPECT_EQ(it->test_risk, row.test_risk);
    }
}

TEST(Sweep, UniformNotBetterThanTruncatedOnLowFrequencyData) {
    ExperimentConfig c;
    c.layers = 2;
    c.dim = 2;
    c.max_frequency = 1;
    c.n_train = 200;
    c.n_test = 200;
    c.D_grid = {100};
    c.repetitions = 15;
    c.baseline = false;
    c.strategies = {rff::Strategy::TruncatedConvolutional, rff::Strategy::Uniform};
    c.seed = 11;
    const auto r = risk_vs_D_sweep(c);
    EXPECT_GE(median(r.test_risks("uniform", 100)), median(r.test_risks("truncated", 100)));
}

TEST(Sweep, RidgeModelUsesMse) {
    auto c = small_config();
    c.model = "ridge";
    c.lambda = 1e-3;
    c.label_mode = SynthLabels::Value;
    c.features = rff::FeatureKind::CholeskyFeatures;
    const auto r = risk_vs_D_sweep(c);
    EXPECT_EQ(r.loss, learners::Loss::Mse);
    EXPECT_EQ(r.rows.front().method, "cholesky");
    EXPECT_EQ(r.rows.size(), 6u);
}

TEST(Sweep, RejectsNonBinaryLabelsForSvm) {
    auto c = small_config();
    c.label_mode = SynthLabels::Value;
    EXPECT_ANY_THROW(risk_vs_D_sweep(c));
}

TEST(MinD, GenerousThresholdGivesFirstGridElement) {
    const auto c = small_config();
    const auto r = min_D_to_risk(c, 1.1);
    ASSERT_TRUE(r.D);
    EXPECT_EQ(*r.D, c.D_grid.front());
    EXPECT_EQ(r.mean_risk.size(), c.D_grid.size());
}

TEST(MinD, ZeroThresholdOnNoisyDataNotReached) {
    auto c = small_config();
    c.noise = 1.0;
    const auto r = min_D_to_risk(c, 0.0);
    EXPECT_FALSE(r.D);
    for (const auto& [D, m] : r.mean_risk) EXPECT_GT(m, 0.0);
}

TEST(MinD, FromSweepUsesMeanOverRepetitions) {
    SweepResult s;
    s.rows = {{"x", "m", 10, 0, 0, 0, 0.4, 0}, {"x", "m", 10, 1, 0, 0, 0.1, 0},
              {"x", "m", 20, 0, 0, 0, 0.2, 0}, {"x", "m", 20, 1, 0, 0, 0.2, 0}};
    EXPECT_EQ(min_D_from_sweep(s, "m", {10, 20}, 0.25).D, std::optional<std::size_t>(10));
    EXPECT_EQ(min_D_from_sweep(s, "m", {10, 20}, 0.2).D, std::optional<std::size_t>(20));
    EXPECT_FALSE(min_D_from_sweep(s, "m", {10, 20}, 0.1).D);
}

TEST(MinD, LogLogFitMatchesNormalEquations) {
    const std::vector<double> x{2, 4, 6, 8}, y{30, 70, 200, 350};
    const auto f = fit_loglog(x, y);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / 4;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double ly = std::log(y[i]);
        ss_res += std::pow(ly - (slope * std::log(x[i]) + icpt), 2);
        ss_tot += std::pow(ly - sy / 4, 2);
    }
    EXPECT_NEAR(f.slope, slope, 1e-12);
    EXPECT_NEAR(f.intercept, icpt, 1e-12);
    EXPECT_NEAR(f.r2, 1 - ss_res / ss_tot, 1e-12);
    const auto exact = fit_loglog({1, 2, 4}, {3, 12, 48});
    EXPECT_NEAR(exact.slope, 2.0, 1e-12);
    EXPECT_NEAR(exact.r2, 1.0, 1e-12);
    EXPECT_THROW(fit_loglog({1}, {1}), InputError);
    EXPECT_THROW(fit_loglog({1, 2}, {0, 1}), InputError);
}

TEST(MinD, ScanOverDimensionsReportsFiniteFit) {
    ExperimentConfig c;
    c.layers = 1;
    c.n_train = 200;
    c.n_test = 100;
    c.D_grid = {10, 20, 40, 80, 160, 320, 640};
    c.repetitions = 3;
    c.baseline = false;
    c.seed = 5;
    const auto scan = min_D_vs_dim(c, {2, 4, 6, 8}, 0.45);
    ASSERT_EQ(scan.per_dim.size(), 4u);
    ASSERT_TRUE(scan.fit);
    EXPECT_GE(scan.fit->n, 2u);
    EXPECT_TRUE(std::isfinite(scan.fit->slope));
    EXPECT_TRUE(std::isfinite(scan.fit->r2));
    EXPECT_LE(scan.fit->r2, 1.0 + 1e-12);
}

TEST(Baseline, ExactShotsNoWorseThanTenShotsMostSeeds) {
    int wins = 0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        ExperimentConfig c;
        c.layers = 1;
        c.dim = 2;
        c.n_train = 100;
        c.n_test = 100;
        c.seed = s;
        c.shots = {std::nullopt, std::uint64_t{10}};
        const auto data = prepare_data(c, 2);
        const auto rows = kernel_baseline(c, data, c.circuit_for_dim(2), c.hash());
        ASSERT_EQ(rows.size(), 2u);
        if (rows[0].test_risk <= rows[1].test_risk) ++wins;
    }
    EXPECT_GE(wins, 14);
}

#ifdef RFFDQ_CLI_PATH

namespace {

int run_cli(const std::string& args, const fs::path& out = {}) {
    std::string cmd = std::string(RFFDQ_CLI_PATH) + " " + args;
    cmd += out.empty() ? " >/dev/null 2>&1" : " >" + out.string() + " 2>/dev/null";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli_codes");
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("spectrum --no-such-flag"), 2);
    EXPECT_EQ(run_cli("spectrum --kernel rot:Q"), 2);
    EXPECT_EQ(run_cli("sweep"), 2);
    EXPECT_EQ(run_cli("sweep --config " + write_file(dir / "bad.ini", "[data]\ncolour = red\n").string()), 2);
    EXPECT_EQ(run_cli("train --data " + (dir / "missing.csv").string()), 2);

    std::ofstream tr(dir / "tiny.csv");
    tr << "x0,y\n0.1,1\n0.7,-1\n1.9,1\n2.5,-1\n";
    tr.close();
    EXPECT_EQ(run_cli("train --data " + (dir / "tiny.csv").string() + " --model rff-ridge --lambda 0 --D 40"), 3);
    EXPECT_EQ(run_cli("train --data " + (dir / "tiny.csv").string() + " --model rff-ridge --lambda 0.1 --D 40"), 0);
}

TEST(Cli, SubcommandsReproducible) {
    const auto dir = scratch("cli_repro");
    const auto ini = write_file(dir / "sweep.ini",
                                "[data]\ndim = 2\ntrain = 30\ntest = 20\n[model]\nepochs = 10\n"
                                "[sampling]\nstrategies = truncated, uniform\nD = 10, 40\n"
                                "[baseline]\nshots = inf, 10\n[run]\nrepetitions = 2\nthreshold = 0.5\n");
    std::ofstream data(dir / "pts.csv");
    data << "x0,x1,y\n";
    for (int i = 0; i < 30; ++i) data << 0.2 * i << ',' << 0.37 * i << ',' << (std::cos(0.2 * i) > 0 ? 1 : -1) << '\n';
    data.close();
    const std::string pts = (dir / "pts.csv").string();
    const std::vector<std::string> cmds{
        "simulate-kernel --kernel ring:1,2,2 --n 6 --shots 50",
        "simulate-kernel --kernel ring:1,1,2 --data " + pts,
        "spectrum --kernel ring:2,1,2 --format json",
        "spectrum --kernel ring:1,1,2 --method estimate --samples 500 --format diagonal",
        "approx --kernel ring:1,2,2 --algorithm both --D 5,50 --repetitions 3",
        "train --data " + pts + " --model rff-svm --D 30",
        "train --data " + pts + " --model qsvm --shots 20",
        "check --kernel ring:1,1,2 --format table --budget 4",
        "sweep --config " + ini.string(),
        "min-d --config " + ini.string(),
    };
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        const auto a = dir / ("a" + std::to_string(i));
        const auto b = dir / ("b" + std::to_string(i));
        ASSERT_EQ(run_cli(cmds[i] + " --seed 17", a), 0) << cmds[i];
        ASSERT_EQ(run_cli(cmds[i] + " --seed 17", b), 0) << cmds[i];
        const auto sa = slurp(a);
        EXPECT_FALSE(sa.empty()) << cmds[i];
        EXPECT_EQ(sa, slurp(b)) << cmds[i];
    }
}

TEST(Cli, SweepWritesSidecar) {
    const auto dir = scratch("cli_sidecar");
    const auto ini = write_file(dir / "s.ini", "[data]\ntrain = 20\ntest = 10\n[sampling]\nD = 10\n[baseline]\nenabled = false\n[run]\nrepetitions = 2\n");
    const auto out = dir / "s.csv";
    ASSERT_EQ(run_cli("sweep --config " + ini.string() + " --out " + out.string()), 0);
    const std::string csv = slurp(out);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    const std::string side = slurp(out.string() + ".json");
    EXPECT_NE(side.find(load_config(ini.string()).hash()), std::string::npos);
}

#endif

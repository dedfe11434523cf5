#include "whitham/branch_io.hpp"
#include "whitham/continuation.hpp"
#include "whitham/error.hpp"
#include "whitham/steady.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace whitham;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / ("whitham_io_" + std::string(info->test_suite_name()) + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

SteadySolution small_wave(DispersionModel model, double height, std::size_t n = 32) {
    const auto guess = small_amplitude_guess(model, 1, height / 2, n);
    return newton_fixed_height(guess.values, guess.mu, height, model);
}

Branch short_branch() {
    ContinuationConfig cfg;
    cfg.n_initial = 16;
    cfg.height_max = 0.05;
    cfg.verify_points = false;
    return trace_branch(DispersionModel::whitham(), cfg);
}

double sup_residual(const WaveProfile& p) {
    double m = 0.0;
    for (double r : residual(p.values(), p.mu, p.model)) m = std::max(m, std::abs(r));
    return m;
}

}  // namespace

TEST(FormatNumber, ShortestRoundtripAndLocaleFree) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0}) {
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
    EXPECT_EQ(format_number(0.5).find(','), std::string::npos);
}

TEST(Profile, SaveLoadIsBitwiseLossless) {
    TempDir dir;
    for (auto model : {DispersionModel::whitham(), DispersionModel::kdv()}) {
        const auto sol = small_wave(model, 0.1);
        ASSERT_TRUE(sol.report.converged);
        const auto rec = ProfileRecord::from_solution(sol.profile, sol.report, 1e-12);
        const auto path = dir / (std::string(model.name()) + ".json");
        save_profile(rec, path);
        const auto back = load_profile(path);
        EXPECT_EQ(back.model, model);
        EXPECT_EQ(back.k, rec.k);
        EXPECT_EQ(back.n, rec.n);
        EXPECT_EQ(back.mu, rec.mu);
        EXPECT_EQ(back.height, rec.height);
        EXPECT_EQ(back.cosine_coeffs, rec.cosine_coeffs);
        EXPECT_EQ(back.metadata.newton_iters, rec.metadata.newton_iters);
        EXPECT_EQ(back.metadata.residual_norm, rec.metadata.residual_norm);
        EXPECT_NEAR(sup_residual(back.to_profile()), rec.metadata.residual_norm, 1e-12);
        EXPECT_EQ(slurp(path).find('\r'), std::string::npos);
    }
}

TEST(Profile, SavingIsDeterministic) {
    TempDir dir;
    const auto sol = small_wave(DispersionModel::whitham(), 0.1);
    const auto rec = ProfileRecord::from_solution(sol.profile, sol.report, 1e-12);
    save_profile(rec, dir / "a.json");
    save_profile(rec, dir / "b.json");
    EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
}

TEST(Profile, WrongSchemaVersionRaisesVersionError) {
    TempDir dir;
    const auto sol = small_wave(DispersionModel::whitham(), 0.1);
    auto rec = ProfileRecord::from_solution(sol.profile, sol.report, 1e-12);
    rec.schema_version = 99;
    save_profile(rec, dir / "v.json");
    EXPECT_THROW(load_profile(dir / "v.json"), VersionError);
}

TEST(Profile, MalformedFilesRaiseParseErrorWithContext) {
    TempDir dir;
    write(dir / "broken.json", "{\n  \"schema_version\": 1,\n  \"model\": \n");
    try {
        load_profile(dir / "broken.json");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("broken.json:"), std::string::npos) << e.what();
    }

    write(dir / "field.json",
          R"({"schema_version": 1, "model": "whitham", "k": 1, "N": 2, "mu": "fast", "height": 0.1, "cosine_coeffs": [0, 0]})");
    try {
        load_profile(dir / "field.json");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("'mu'"), std::string::npos) << e.what();
    }

    write(dir / "count.json",
          R"({"schema_version": 1, "model": "whitham", "k": 1, "N": 3, "mu": 0.8, "height": 0.1, "cosine_coeffs": [0, 0]})");
    EXPECT_THROW(load_profile(dir / "count.json"), ParseError);

    EXPECT_THROW(load_profile(dir / "missing.json"), IoError);
}

TEST(Profile, CoarseFixtureHasReferenceHeight) {
    const auto rec = load_profile(fs::path(WHITHAM_FIXTURE_DIR) / "coarse_wave_n16.json");
    const auto profile = rec.to_profile();
    EXPECT_EQ(rec.n, 16u);
    EXPECT_NEAR(waveheight(profile), 0.3368, 5e-3);
    EXPECT_NEAR(rec.mu, 0.789, 5e-3);
    EXPECT_LT(sup_residual(profile), 1e-10);
}

TEST(BranchCsv, HeaderAndSinglePoint) {
    TempDir dir;
    Branch branch = short_branch();
    branch.points.resize(1);
    export_branch_csv(branch, dir / "one.csv");
    const std::string text = slurp(dir / "one.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), kBranchCsvHeader);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);

    Branch empty;
    EXPECT_THROW(export_branch_csv(empty, dir / "empty.csv"), std::invalid_argument);
}

TEST(BranchCsv, RoundtripReproducesSpeedsAndHeights) {
    TempDir dir;
    const Branch branch = short_branch();
    export_branch_csv(branch, dir / "b.csv");
    const auto rows = load_branch_csv(dir / "b.csv");
    ASSERT_EQ(rows.size(), branch.points.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].index, i);
        EXPECT_NEAR(rows[i].mu, branch.points[i].mu, 1e-12);
        EXPECT_NEAR(rows[i].height, branch.points[i].height, 1e-12);
        EXPECT_EQ(rows[i].param_mode, branch.points[i].param_mode);
        EXPECT_EQ(rows[i].n, branch.points[i].profile.n_points());
        if (i > 0) EXPECT_GE(rows[i].height, rows[i - 1].height);
    }
}

TEST(BranchCsv, RejectsBadInput) {
    EXPECT_THROW(parse_branch_csv("index,mu\n"), ParseError);
    EXPECT_THROW(parse_branch_csv(std::string(kBranchCsvHeader) + "\n0,0.8,0.1,speed,3\n"), ParseError);
    EXPECT_THROW(parse_branch_csv(std::string(kBranchCsvHeader) + "\n0,abc,0.1,speed,3,1e-13,16\n"), ParseError);
    EXPECT_THROW(parse_branch_csv(std::string(kBranchCsvHeader) + "\n0,0.8,0.1,arc,3,1e-13,16\n"), ParseError);
    EXPECT_THROW(parse_branch_csv(""), ParseError);
}

TEST(BranchJson, SidecarRoundtrip) {
    TempDir dir;
    const Branch branch = short_branch();
    export_branch_json(branch, dir / "b.json");
    const auto rec = load_branch_json(dir / "b.json");
    EXPECT_EQ(rec.model, branch.model);
    EXPECT_EQ(rec.k, branch.k);
    EXPECT_EQ(rec.turning_point_index, branch.turning_point_index);
    ASSERT_EQ(rec.rows.size(), branch.points.size());
    for (std::size_t i = 0; i < rec.rows.size(); ++i) {
        EXPECT_EQ(rec.rows[i].mu, branch.points[i].mu);
        EXPECT_EQ(rec.rows[i].height, branch.points[i].height);
    }
    const auto from = BranchRecord::from_branch(branch);
    EXPECT_EQ(from.rows.size(), branch.points.size());
}

TEST(Snapshots, CsvLayout) {
    TempDir dir;
    EvolutionState s(4, 0.25);
    s.set_coeff(1, {0.5, 0.0});
    const std::vector<EvolutionState> snaps{s};
    export_snapshots_csv(snaps, dir / "s.csv");
    const std::string text = slurp(dir / "s.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), "time,j,x,eta");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
    EXPECT_NE(text.find("\n0.25,0,0,1\n"), std::string::npos) << text;
}

TEST(Align, SelfConstantAndHeightPreservation) {
    const CollocationGrid grid(64);
    const auto w = small_wave(DispersionModel::whitham(), 0.1).profile;
    const auto [a, b] = align_for_comparison(w, w, grid.points());
    EXPECT_EQ(a, b);

    const WaveProfile constant{DispersionModel::whitham(), 1, 0.8, cosine_analysis(std::vector<double>(8, 0.3))};
    const auto [c, d] = align_for_comparison(constant, constant, grid.points());
    for (double v : c) EXPECT_NEAR(v, 0.0, 1e-14);

    ContinuationConfig cfg;
    cfg.n_initial = 64;
    cfg.height_max = 0.4;
    cfg.verify_points = false;
    const auto wb = trace_branch(DispersionModel::whitham(), cfg).points.back();
    const auto kb = trace_branch(DispersionModel::kdv(), cfg).points.back();
    const auto ws = newton_fixed_height(wb.profile.values(), wb.mu, 0.4, DispersionModel::whitham());
    const auto ks = newton_fixed_height(kb.profile.values(), kb.mu, 0.4, DispersionModel::kdv());
    ASSERT_TRUE(ws.report.converged);
    ASSERT_TRUE(ks.report.converged);
    std::vector<double> pts{0.0, std::numbers::pi};
    for (double x : grid.points()) pts.push_back(x);
    const auto [wa, ka] = align_for_comparison(ws.profile, ks.profile, pts);
    for (const auto* v : {&wa, &ka}) {
        EXPECT_NEAR(*std::min_element(v->begin(), v->end()), 0.0, 1e-15);
        EXPECT_NEAR(*std::max_element(v->begin(), v->end()), 0.4, 1e-10);
    }
}

TEST(HalfHeightWidth, PureCosineAndNarrowing) {
    // ε cos x: half height reached at x = π/2.
    const auto v = small_amplitude_guess(DispersionModel::whitham(), 2, 0.05, 32).values;
    const WaveProfile k2{DispersionModel::whitham(), 2, 0.69, cosine_analysis(v)};
    EXPECT_NEAR(half_height_width(k2), std::numbers::pi / 2, 1e-12);
    std::vector<double> c(16);
    const CollocationGrid grid(16);
    for (std::size_t i = 0; i < 16; ++i) c[i] = 0.1 * std::cos(grid[i]);
    const WaveProfile k1{DispersionModel::whitham(), 1, 0.8, cosine_analysis(c)};
    EXPECT_NEAR(half_height_width(k1), std::numbers::pi, 1e-12);
    // adding a positive cos 2x component sharpens the crest
    for (std::size_t i = 0; i < 16; ++i) c[i] += 0.02 * std::cos(2 * grid[i]);
    EXPECT_LT(half_height_width(WaveProfile{DispersionModel::whitham(), 1, 0.8, cosine_analysis(c)}), std::numbers::pi);
}

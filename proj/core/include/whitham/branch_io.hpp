#pragma once

// File formats: one JSON object per wave profile, CSV (plus an optional JSON
// sidecar with full spectra) per branch, CSV for evolution snapshots. All
// numbers are written with 17 significant digits, '.' as decimal separator
// and LF line endings.

#include "whitham/continuation.hpp"
#include "whitham/evolution.hpp"
#include "whitham/steady.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace whitham {

inline constexpr int kProfileSchemaVersion = 1;
inline constexpr int kBranchSchemaVersion = 1;
inline constexpr std::string_view kBranchCsvHeader = "index,mu,height,param_mode,newton_iters,residual_norm,N";

struct ProfileMetadata {
    double newton_tol = 0.0;
    int newton_iters = 0;
    double residual_norm = 0.0;  // sup-norm of the collocation residual of the stored coefficients
    std::string generator;
};

struct ProfileRecord {
    int schema_version = kProfileSchemaVersion;
    DispersionModel model;
    int k = 1;
    std::size_t n = 0;
    double mu = 0.0;
    double height = 0.0;
    std::vector<double> cosine_coeffs;
    ProfileMetadata metadata;

    static ProfileRecord from_solution(const WaveProfile& profile, const SolverReport& report,
                                       double newton_tol, std::string generator = "whitham");
    WaveProfile to_profile() const;
};

std::string profile_to_json(const ProfileRecord& record);
// `source` names the input in error messages.
ProfileRecord profile_from_json(std::string_view text, std::string_view source = "<string>");

void save_profile(const ProfileRecord& record, const std::filesystem::path& path);
// Throws ParseError (malformed content, with line/field context) or
// VersionError (unsupported schema_version).
ProfileRecord load_profile(const std::filesystem::path& path);

struct BranchRow {
    std::size_t index = 0;
    double mu = 0.0;
    double height = 0.0;
    ParamMode param_mode = ParamMode::Speed;
    int newton_iters = 0;
    double residual_norm = 0.0;
    std::size_t n = 0;
};

struct BranchRecord {
    int schema_version = kBranchSchemaVersion;
    DispersionModel model;
    int k = 1;
    std::vector<BranchRow> rows;
    std::optional<std::size_t> turning_point_index;

    static BranchRecord from_branch(const Branch& branch);
};

std::string branch_to_csv(const Branch& branch);
void export_branch_csv(const Branch& branch, const std::filesystem::path& path);
std::vector<BranchRow> parse_branch_csv(std::string_view text, std::string_view source = "<string>");
std::vector<BranchRow> load_branch_csv(const std::filesystem::path& path);

// Sidecar with metadata and the full cosine spectrum of every point.
std::string branch_to_json(const Branch& branch);
void export_branch_json(const Branch& branch, const std::filesystem::path& path);
BranchRecord load_branch_json(const std::filesystem::path& path);

// Columns: time,j,x,eta.
void export_snapshots_csv(std::span<const EvolutionState> snapshots, const std::filesystem::path& path);

// Evaluates both waves on eval_points and shifts each so its minimum is 0.
std::pair<std::vector<double>, std::vector<double>> align_for_comparison(
    const WaveProfile& a, const WaveProfile& b, std::span<const double> eval_points);

// Full width of the crest at half of the waveheight: 2x where
// φ(x) - φ(π/k) = (φ(0) - φ(π/k))/2 on (0, π/k), located by bisection.
double half_height_width(const WaveProfile& profile);

// Locale-independent shortest-safe formatting (17 significant digits).
std::string format_number(double value);

}  // namespace whitham

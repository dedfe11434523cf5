#include "whitham/branch_io.hpp"

#include "whitham/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <sstream>

namespace whitham {

using nlohmann::json;

std::string format_number(double value) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return {buf, res.ptr};
}

namespace {

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string number_array(std::span<const double> values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_number(values[i]);
    }
    out += "]";
    return out;
}

std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

json parse_json(std::string_view text, std::string_view source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(source) + ":" + std::to_string(line_of(text, e.byte)) +
                         ": malformed JSON: " + e.what());
    }
}

// Typed field access with "<source>: field '<name>': ..." diagnostics.
template <class T>
T field(const json& obj, std::string_view name, std::string_view source) {
    const auto it = obj.find(std::string(name));
    if (it == obj.end()) {
        throw ParseError(std::string(source) + ": missing field '" + std::string(name) + "'");
    }
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string(source) + ": field '" + std::string(name) + "': " + e.what());
    }
}

double profile_residual_norm(const WaveProfile& profile) {
    const auto values = profile.values();
    const auto r = residual(values, profile.mu, profile.model);
    double norm = 0.0;
    for (double v : r) norm = std::max(norm, std::abs(v));
    return norm;
}

}  // namespace

// ---------------------------------------------------------------------------
// Profiles

ProfileRecord ProfileRecord::from_solution(const WaveProfile& profile, const SolverReport& report,
                                           double newton_tol, std::string generator) {
    ProfileRecord rec;
    rec.model = profile.model;
    rec.k = profile.k;
    rec.n = profile.n_points();
    rec.mu = profile.mu;
    rec.height = waveheight(profile);
    rec.cosine_coeffs = profile.spectrum.coeffs;
    rec.metadata.newton_tol = newton_tol;
    rec.metadata.newton_iters = report.iterations;
    rec.metadata.residual_norm = profile_residual_norm(profile);
    rec.metadata.generator = std::move(generator);
    return rec;
}

WaveProfile ProfileRecord::to_profile() const {
    return WaveProfile{model, k, mu, CosineSpectrum{cosine_coeffs}};
}

std::string profile_to_json(const ProfileRecord& r) {
    std::string out = "{\n";
    out += "  \"schema_version\": " + std::to_string(r.schema_version) + ",\n";
    out += "  \"model\": " + json_string(r.model.name()) + ",\n";
    out += "  \"k\": " + std::to_string(r.k) + ",\n";
    out += "  \"N\": " + std::to_string(r.n) + ",\n";
    out += "  \"mu\": " + format_number(r.mu) + ",\n";
    out += "  \"height\": " + format_number(r.height) + ",\n";
    out += "  \"cosine_coeffs\": " + number_array(r.cosine_coeffs) + ",\n";
    out += "  \"metadata\": {\n";
    out += "    \"newton_tol\": " + format_number(r.metadata.newton_tol) + ",\n";
    out += "    \"newton_iters\": " + std::to_string(r.metadata.newton_iters) + ",\n";
    out += "    \"residual_norm\": " + format_number(r.metadata.residual_norm) + ",\n";
    out += "    \"generator\": " + json_string(r.metadata.generator) + "\n";
    out += "  }\n}\n";
    return out;
}

ProfileRecord profile_from_json(std::string_view text, std::string_view source) {
    const json doc = parse_json(text, source);
    if (!doc.is_object()) throw ParseError(std::string(source) + ": expected a JSON object");

    ProfileRecord rec;
    rec.schema_version = field<int>(doc, "schema_version", source);
    if (rec.schema_version != kProfileSchemaVersion) {
        throw VersionError(std::string(source) + ": unsupported profile schema_version " +
                           std::to_string(rec.schema_version) + " (expected " +
                           std::to_string(kProfileSchemaVersion) + ")");
    }
    try {
        rec.model = DispersionModel::parse(field<std::string>(doc, "model", source));
    } catch (const ParseError& e) {
        throw ParseError(std::string(source) + ": field 'model': " + e.what());
    }
    rec.k = field<int>(doc, "k", source);
    rec.n = field<std::size_t>(doc, "N", source);
    rec.mu = field<double>(doc, "mu", source);
    rec.height = field<double>(doc, "height", source);
    rec.cosine_coeffs = field<std::vector<double>>(doc, "cosine_coeffs", source);
    if (rec.k < 1) throw ParseError(std::string(source) + ": field 'k': must be >= 1");
    if (rec.cosine_coeffs.size() != rec.n) {
        throw ParseError(std::string(source) + ": field 'cosine_coeffs': expected " +
                         std::to_string(rec.n) + " entries, found " +
                         std::to_string(rec.cosine_coeffs.size()));
    }
    if (const auto it = doc.find("metadata"); it != doc.end()) {
        const std::string ctx = std::string(source) + ": metadata";
        const json& md = *it;
        if (!md.is_object()) throw ParseError(ctx + ": expected an object");
        rec.metadata.newton_tol = field<double>(md, "newton_tol", ctx);
        rec.metadata.newton_iters = field<int>(md, "newton_iters", ctx);
        rec.metadata.residual_norm = field<double>(md, "residual_norm", ctx);
        if (md.contains("generator")) rec.metadata.generator = field<std::string>(md, "generator", ctx);
    }
    return rec;
}

void save_profile(const ProfileRecord& record, const std::filesystem::path& path) {
    write_file(path, profile_to_json(record));
}

ProfileRecord load_profile(const std::filesystem::path& path) {
    return profile_from_json(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Branches

BranchRecord BranchRecord::from_branch(const Branch& branch) {
    BranchRecord rec;
    rec.model = branch.model;
    rec.k = branch.k;
    rec.turning_point_index = branch.turning_point_index;
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        const BranchPoint& p = branch.points[i];
        rec.rows.push_back({i, p.mu, p.height, p.param_mode, p.report.iterations,
                            p.report.final_residual(), p.profile.n_points()});
    }
    return rec;
}

std::string branch_to_csv(const Branch& branch) {
    std::string out(kBranchCsvHeader);
    out += '\n';
    for (const BranchRow& row : BranchRecord::from_branch(branch).rows) {
        out += std::to_string(row.index) + ',' + format_number(row.mu) + ',' + format_number(row.height) +
               ',' + std::string(to_string(row.param_mode)) + ',' + std::to_string(row.newton_iters) +
               ',' + format_number(row.residual_norm) + ',' + std::to_string(row.n) + '\n';
    }
    return out;
}

void export_branch_csv(const Branch& branch, const std::filesystem::path& path) {
    if (branch.points.empty()) throw std::invalid_argument("cannot export an empty branch");
    write_file(path, branch_to_csv(branch));
}

namespace {

template <class T>
T parse_cell(std::string_view cell, std::string_view source, std::size_t line, std::string_view column) {
    T value{};
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw ParseError(std::string(source) + ":" + std::to_string(line) + ": column '" +
                         std::string(column) + "': cannot parse '" + std::string(cell) + "'");
    }
    return value;
}

}  // namespace

std::vector<BranchRow> parse_branch_csv(std::string_view text, std::string_view source) {
    std::vector<BranchRow> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    static constexpr std::string_view columns[] = {"index", "mu", "height", "param_mode",
                                                   "newton_iters", "residual_norm", "N"};
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1) {
            if (line != kBranchCsvHeader) {
                throw ParseError(std::string(source) + ":1: unexpected header '" + std::string(line) + "'");
            }
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 7) {
            throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": expected 7 columns, found " +
                             std::to_string(cells.size()));
        }
        BranchRow row;
        row.index = parse_cell<std::size_t>(cells[0], source, line_no, columns[0]);
        row.mu = parse_cell<double>(cells[1], source, line_no, columns[1]);
        row.height = parse_cell<double>(cells[2], source, line_no, columns[2]);
        try {
            row.param_mode = parse_param_mode(cells[3]);
        } catch (const ParseError& e) {
            throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": column 'param_mode': " + e.what());
        }
        row.newton_iters = parse_cell<int>(cells[4], source, line_no, columns[4]);
        row.residual_norm = parse_cell<double>(cells[5], source, line_no, columns[5]);
        row.n = parse_cell<std::size_t>(cells[6], source, line_no, columns[6]);
        rows.push_back(row);
    }
    if (line_no == 0) throw ParseError(std::string(source) + ": empty branch file");
    return rows;
}

std::vector<BranchRow> load_branch_csv(const std::filesystem::path& path) {
    return parse_branch_csv(read_file(path), path.string());
}

std::string branch_to_json(const Branch& branch) {
    std::string out = "{\n";
    out += "  \"schema_version\": " + std::to_string(kBranchSchemaVersion) + ",\n";
    out += "  \"model\": " + json_string(branch.model.name()) + ",\n";
    out += "  \"k\": " + std::to_string(branch.k) + ",\n";
    out += "  \"termination\": " + json_string(to_string(branch.termination)) + ",\n";
    out += "  \"turning_point_index\": " +
           (branch.turning_point_index ? std::to_string(*branch.turning_point_index) : std::string("null")) + ",\n";
    out += "  \"points\": [";
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        const BranchPoint& p = branch.points[i];
        out += i == 0 ? "\n" : ",\n";
        out += "    {\"index\": " + std::to_string(i) + ", \"mu\": " + format_number(p.mu) +
               ", \"height\": " + format_number(p.height) + ", \"param_mode\": " +
               json_string(to_string(p.param_mode)) + ", \"newton_iters\": " + std::to_string(p.report.iterations) +
               ", \"residual_norm\": " + format_number(p.report.final_residual()) +
               ", \"N\": " + std::to_string(p.profile.n_points()) +
               ", \"cosine_coeffs\": " + number_array(p.profile.spectrum.coeffs) + "}";
    }
    out += "\n  ]\n}\n";
    return out;
}

void export_branch_json(const Branch& branch, const std::filesystem::path& path) {
    write_file(path, branch_to_json(branch));
}

BranchRecord load_branch_json(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const std::string source = path.string();
    const json doc = parse_json(text, source);
    BranchRecord rec;
    rec.schema_version = field<int>(doc, "schema_version", source);
    if (rec.schema_version != kBranchSchemaVersion) {
        throw VersionError(source + ": unsupported branch schema_version " + std::to_string(rec.schema_version));
    }
    rec.model = DispersionModel::parse(field<std::string>(doc, "model", source));
    rec.k = field<int>(doc, "k", source);
    if (const auto& tp = doc.at("turning_point_index"); !tp.is_null()) rec.turning_point_index = tp.get<std::size_t>();
    const json& points = doc.at("points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string ctx = source + ": points[" + std::to_string(i) + "]";
        const json& p = points[i];
        BranchRow row;
        row.index = field<std::size_t>(p, "index", ctx);
        row.mu = field<double>(p, "mu", ctx);
        row.height = field<double>(p, "height", ctx);
        row.param_mode = parse_param_mode(field<std::string>(p, "param_mode", ctx));
        row.newton_iters = field<int>(p, "newton_iters", ctx);
        row.residual_norm = field<double>(p, "residual_norm", ctx);
        row.n = field<std::size_t>(p, "N", ctx);
        rec.rows.push_back(row);
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Snapshots and comparison

void export_snapshots_csv(std::span<const EvolutionState> snapshots, const std::filesystem::path& path) {
    std::string out = "time,j,x,eta\n";
    for (const EvolutionState& s : snapshots) {
        const auto values = s.samples();
        const double n = static_cast<double>(values.size());
        for (std::size_t j = 0; j < values.size(); ++j) {
            const double x = 2.0 * std::numbers::pi * static_cast<double>(j) / n;
            out += format_number(s.time()) + ',' + std::to_string(j) + ',' + format_number(x) + ',' +
                   format_number(values[j]) + '\n';
        }
    }
    write_file(path, out);
}

std::pair<std::vector<double>, std::vector<double>> align_for_comparison(
    const WaveProfile& a, const WaveProfile& b, std::span<const double> eval_points) {
    auto shift_to_zero = [&](const WaveProfile& p) {
        std::vector<double> v = cosine_synthesis(p.spectrum, eval_points);
        if (!v.empty()) {
            const double lo = *std::min_element(v.begin(), v.end());
            for (double& x : v) x -= lo;
        }
        return v;
    };
    return {shift_to_zero(a), shift_to_zero(b)};
}

double half_height_width(const WaveProfile& profile) {
    const double trough_x = std::numbers::pi / static_cast<double>(profile.k);
    const double trough = cosine_synthesis(profile.spectrum, trough_x);
    const double half = 0.5 * (cosine_synthesis(profile.spectrum, 0.0) - trough);
    double lo = 0.0, hi = trough_x;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cosine_synthesis(profile.spectrum, mid) - trough > half) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo + hi;
}

}  // namespace whitham

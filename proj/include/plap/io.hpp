#pragma once

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plap/profile.hpp"
#include "plap/version.hpp"

namespace plap {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

inline constexpr const char* kProfileHeader = "r,u,ur,w,urr,urrr";

namespace detail_io {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, int line) {
    if (s.empty()) throw ParseError("empty numeric field", line);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ParseError("malformed number '" + s + "'", line);
    return v;
}

}  // namespace detail_io

// Atomic write: temp file in the destination directory, then rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

// CSV contract: header exactly `r,u,ur,w,urr,urrr`, 17 significant digits,
// empty cells for absent derivative columns.
inline void save_profile(const std::filesystem::path& path, const RadialProfile& pr) {
    std::ostringstream out;
    out << kProfileHeader << "\n";
    const bool second = pr.has_second(), third = pr.has_third();
    for (std::size_t i = 0; i < pr.size(); ++i) {
        out << detail_io::fmt17(pr.grid[i]) << ',' << detail_io::fmt17(pr.u[i]) << ','
            << detail_io::fmt17(pr.u_r[i]) << ',' << detail_io::fmt17(pr.w[i]) << ',';
        if (second) out << detail_io::fmt17(pr.u_rr[i]);
        out << ',';
        if (third) out << detail_io::fmt17(pr.u_rrr[i]);
        out << "\n";
    }
    atomic_write(path, out.str());
}

inline RadialProfile load_profile(const std::filesystem::path& path, int N, double p) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kProfileHeader)
        throw ParseError("header must be exactly '" + std::string(kProfileHeader) + "'", 1);

    std::vector<double> r, u, ur, w, urr, urrr;
    bool any_urr = false, any_urrr = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        while (cells.size() < 6) cells.emplace_back();
        if (cells.size() != 6) throw ParseError("expected 6 columns", lineno);
        r.push_back(detail_io::parse_double(cells[0], lineno));
        u.push_back(detail_io::parse_double(cells[1], lineno));
        ur.push_back(detail_io::parse_double(cells[2], lineno));
        w.push_back(detail_io::parse_double(cells[3], lineno));
        if (!cells[4].empty()) {
            urr.push_back(detail_io::parse_double(cells[4], lineno));
            any_urr = true;
        } else {
            urr.push_back(0.0);
        }
        if (!cells[5].empty()) {
            urrr.push_back(detail_io::parse_double(cells[5], lineno));
            any_urrr = true;
        } else {
            urrr.push_back(0.0);
        }
        if (r.size() >= 2 && !(r[r.size() - 2] < r.back()))
            throw ParseError("radius column must increase strictly", lineno);
    }
    if (r.size() < 2) throw ParseError("profile needs at least two rows", lineno);

    RadialProfile pr;
    pr.grid = RadialGrid(std::move(r));
    pr.N = N;
    pr.p = p;
    pr.u = std::move(u);
    pr.u_r = std::move(ur);
    pr.w = std::move(w);
    if (any_urr) pr.u_rr = std::move(urr);
    if (any_urrr) pr.u_rrr = std::move(urrr);
    return pr;
}

// Report documents: schema-versioned JSON with config echo and per-check
// records.  Byte-identical for identical config and version, except for the
// timestamp field.
class ReportDocument {
public:
    explicit ReportDocument(const std::string& command) {
        doc_["schema_version"] = 1;
        doc_["artifact_version"] = kVersion;
        doc_["command"] = command;
        doc_["timestamp"] = "";
        doc_["config"] = nlohmann::ordered_json::object();
        doc_["records"] = nlohmann::ordered_json::array();
        doc_["profiles"] = nlohmann::ordered_json::array();
    }

    void set_timestamp(const std::string& ts) { doc_["timestamp"] = ts; }

    void config(const std::string& key, const nlohmann::ordered_json& value) {
        doc_["config"][key] = value;
    }

    void add_profile_reference(const std::string& path) { doc_["profiles"].push_back(path); }

    void add_record(const std::string& statement_id, bool holds, double fitted_constant,
                    double max_ratio_location, double tolerance,
                    const std::string& note = "") {
        nlohmann::ordered_json rec;
        rec["statement_id"] = statement_id;
        rec["holds"] = holds;
        rec["fitted_constant"] = fitted_constant;
        rec["max_ratio_location"] = max_ratio_location;
        rec["tolerance"] = tolerance;
        if (!note.empty()) rec["note"] = note;
        doc_["records"].push_back(rec);
    }

    void add_value(const std::string& statement_id, double value, double tolerance,
                   const std::string& note = "") {
        nlohmann::ordered_json rec;
        rec["statement_id"] = statement_id;
        rec["value"] = value;
        rec["tolerance"] = tolerance;
        if (!note.empty()) rec["note"] = note;
        doc_["records"].push_back(rec);
    }

    bool all_hold() const {
        for (const auto& rec : doc_["records"])
            if (rec.contains("holds") && !rec["holds"].get<bool>()) return false;
        return true;
    }

    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        for (const auto& rec : doc_["records"])
            if (rec.contains("holds") && !rec["holds"].get<bool>())
                out.push_back(rec["statement_id"].get<std::string>());
        return out;
    }

    const nlohmann::ordered_json& json() const { return doc_; }
    nlohmann::ordered_json& json() { return doc_; }

    void save(const std::filesystem::path& path) const { atomic_write(path, doc_.dump(2) + "\n"); }

private:
    nlohmann::ordered_json doc_;
};

}  // namespace plap

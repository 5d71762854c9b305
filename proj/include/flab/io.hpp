#pragma once

// Flat-file formats: CSV with 12 significant digits and LF line endings,
// JSON with insertion-ordered keys.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "flab/setgen.hpp"

namespace flab {

using ordered_json = nlohmann::ordered_json;

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// Row-oriented CSV builder; cells are pre-formatted strings.
class csv_table {
public:
    explicit csv_table(std::vector<std::string> header) : header_(std::move(header)) {}

    csv_table& row() {
        rows_.emplace_back();
        return *this;
    }
    csv_table& add(const std::string& s) {
        rows_.back().push_back(s);
        return *this;
    }
    csv_table& add(const char* s) { return add(std::string(s)); }
    csv_table& add(double x) { return add(format_real(x)); }
    template <class I>
        requires std::is_integral_v<I>
    csv_table& add(I x) {
        return add(std::to_string(x));
    }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_) {
            line(r);
        }
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes bytes verbatim (binary mode keeps LF on every platform).
inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    f << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open: " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

/// One centre per row: dim, delta, then x, y[, z].
inline std::string cloud_to_csv(const point_cloud& c) {
    std::vector<std::string> header{"dim", "delta", "x", "y"};
    if (c.dim == 3) {
        header.push_back("z");
    }
    csv_table t(header);
    for (const auto& p : c.points) {
        t.row().add(c.dim).add(c.delta);
        for (int i = 0; i < c.dim; ++i) {
            t.add(p[i]);
        }
    }
    return t.str();
}

struct numeric_csv {
    std::vector<std::string> header;  // empty when the file has none
    std::vector<std::vector<double>> rows;

    /// Index of a named column, or `fallback` when there is no header.
    std::size_t column(const std::string& name, std::size_t fallback) const {
        if (header.empty()) {
            return fallback;
        }
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        return static_cast<std::size_t>(-1);
    }
};

/// Reads numeric rows; a non-numeric first line is taken as a header.
inline numeric_csv parse_numeric_csv(const std::string& text) {
    numeric_csv out;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        std::vector<double> r;
        bool numeric = true;
        for (const auto& c : cells) {
            try {
                r.push_back(std::stod(c));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (!first) {
                throw std::runtime_error("non-numeric CSV row: " + line);
            }
            out.header = cells;
        } else {
            out.rows.push_back(std::move(r));
        }
        first = false;
    }
    return out;
}

/// Reads centres from columns x, y[, z] (or the first three columns when
/// there is no header).
inline point_cloud cloud_from_csv(const std::string& text, double delta) {
    const auto csv = parse_numeric_csv(text);
    const std::size_t cols[3] = {csv.column("x", 0), csv.column("y", 1), csv.column("z", 2)};
    point_cloud c;
    c.delta = delta;
    c.dim = 2;
    for (const auto& r : csv.rows) {
        vec3 p{0.0, 0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            if (cols[i] < r.size()) {
                p[i] = r[cols[i]];
                c.dim = std::max(c.dim, i + 1);
            }
        }
        c.points.push_back(p);
    }
    c.fit_bounds();
    return c;
}

}  // namespace flab

#include "gknn/csv.hpp"

#include "gknn/fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace gknn {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return false;
    return std::isfinite(out);
}

bool is_numeric(const std::string& s) {
    double ignored;
    return parse_double(s, ignored);
}

bool all_digits(const std::string& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

CsvTable parse_lines(std::istream& in, bool keel) {
    std::vector<std::vector<std::string>> raw;
    std::vector<std::size_t> lines;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (keel && t[0] == '@') continue;
        raw.push_back(split_line(line));
        lines.push_back(lineno);
    }
    if (raw.empty()) throw data_error("no data rows");
    const std::size_t width = raw.front().size();
    for (std::size_t r = 0; r < raw.size(); ++r) {
        if (raw[r].size() != width) {
            throw data_error("line " + std::to_string(lines[r]) + ": expected " +
                             std::to_string(width) + " cells, found " + std::to_string(raw[r].size()));
        }
    }

    CsvTable table;
    // A row is a header when some cell is non-numeric while a later row has
    // a numeric cell in the same column. Files whose label column is text in
    // every row thus stay header-less, as intended.
    bool header = false;
    if (!keel && raw.size() > 1) {
        for (std::size_t c = 0; c < width && !header; ++c) {
            if (!is_numeric(raw[0][c])) {
                for (std::size_t r = 1; r < raw.size(); ++r) {
                    if (is_numeric(raw[r][c])) {
                        header = true;
                        break;
                    }
                }
            }
        }
    }
    if (header) {
        table.header = raw.front();
        raw.erase(raw.begin());
        lines.erase(lines.begin());
    }
    table.rows = std::move(raw);
    table.line_numbers = std::move(lines);
    return table;
}

}  // namespace

CsvTable read_csv_table(std::istream& in) { return parse_lines(in, false); }

CsvTable read_csv_file(const std::string& path, bool keel) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file: " + path);
    try {
        return parse_lines(in, keel);
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
}

Dataset dataset_from_table(const CsvTable& table, const std::string& label_column,
                           const std::string& positive_value, std::string name) {
    const std::size_t width = table.rows.front().size();

    std::size_t prov_idx = width;  // width = absent
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (table.header[c] == "provenance") prov_idx = c;
    }

    std::size_t label_idx = width - 1;
    if (!label_column.empty()) {
        const auto it = std::find(table.header.begin(), table.header.end(), label_column);
        if (it != table.header.end()) {
            label_idx = static_cast<std::size_t>(it - table.header.begin());
        } else if (all_digits(label_column)) {
            label_idx = std::stoul(label_column);
            if (label_idx >= width) throw data_error("label column index out of range: " + label_column);
        } else {
            throw data_error("label column not found: " + label_column);
        }
        // naming the provenance column as the label claims it outright
        if (label_idx == prov_idx) prov_idx = width;
    } else if (label_idx == prov_idx) {
        // save_csv appends provenance after the label; the default skips it
        if (width < 2) throw data_error("no feature columns");
        label_idx = width - 2;
    }

    std::map<std::string, long> label_counts;
    for (const auto& row : table.rows) ++label_counts[row[label_idx]];
    if (label_counts.size() > 2) {
        std::string seen;
        for (const auto& [value, n] : label_counts) seen += (seen.empty() ? "" : ", ") + value;
        throw data_error("more than two label values: " + seen);
    }
    if (label_counts.size() < 2) throw data_error("empty class: only one label value present");

    std::string positive = positive_value;
    if (positive.empty()) {
        // The rarer raw value is the positive (minority) class; on a tie the
        // lexicographically larger value wins, which picks "positive" over
        // "negative" and "1" over "-1".
        const auto a = label_counts.begin();
        const auto b = std::next(a);
        if (a->second == b->second) {
            positive = std::max(a->first, b->first);
        } else {
            positive = (a->second < b->second) ? a->first : b->first;
        }
    } else if (label_counts.find(positive) == label_counts.end()) {
        throw data_error("positive label '" + positive + "' does not occur in the data");
    }

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < width; ++c) {
        if (c != label_idx && c != prov_idx) feature_cols.push_back(c);
    }
    if (feature_cols.empty()) throw data_error("no feature columns");

    Dataset out;
    const Eigen::Index m = static_cast<Eigen::Index>(table.rows.size());
    const Eigen::Index p = static_cast<Eigen::Index>(feature_cols.size());
    out.X.resize(m, p);
    out.y.resize(m);
    out.provenance.assign(static_cast<std::size_t>(m), Provenance::real);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto& row = table.rows[static_cast<std::size_t>(r)];
        for (Eigen::Index j = 0; j < p; ++j) {
            double v;
            if (!parse_double(row[feature_cols[static_cast<std::size_t>(j)]], v)) {
                throw data_error("non-numeric feature value '" +
                                 row[feature_cols[static_cast<std::size_t>(j)]] + "' at line " +
                                 std::to_string(table.line_numbers[static_cast<std::size_t>(r)]) +
                                 ", column " + std::to_string(feature_cols[static_cast<std::size_t>(j)] + 1));
            }
            out.X(r, j) = v;
        }
        out.y[r] = (row[label_idx] == positive) ? positive_label : negative_label;
        if (prov_idx < width) {
            const std::string& pv = row[prov_idx];
            if (pv == "synthetic") {
                out.provenance[static_cast<std::size_t>(r)] = Provenance::synthetic;
            } else if (pv != "real") {
                throw data_error("provenance value must be real or synthetic, got '" + pv + "'");
            }
        }
    }
    if (!table.header.empty()) {
        for (std::size_t c : feature_cols) out.feature_names.push_back(table.header[c]);
    }
    out.name = std::move(name);
    out.validate();
    return out;
}

namespace {

std::string basename_no_ext(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    std::string base = (slash == std::string::npos) ? path : path.substr(slash + 1);
    const std::size_t dot = base.find_last_of('.');
    if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
    return base;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label) {
    const CsvTable table = read_csv_file(path, false);
    try {
        return dataset_from_table(table, label_column, positive_label, basename_no_ext(path));
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
}

Dataset load_keel(const std::string& path, const std::string& positive_label) {
    const CsvTable table = read_csv_file(path, true);
    try {
        return dataset_from_table(table, "", positive_label, basename_no_ext(path));
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
}

Dataset load_dataset(const std::string& path, const std::string& label_column,
                     const std::string& positive_label) {
    if (path == "fixture:ir1") return fixture_ir1();
    if (path == "fixture:ir5") return fixture_ir5();
    if (path == "fixture:ir20") return fixture_ir20();
    if (path.rfind("fixture:", 0) == 0) {
        throw data_error("unknown fixture '" + path + "' (have fixture:ir1, fixture:ir5, fixture:ir20)");
    }
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".dat") == 0) {
        return load_keel(path, positive_label);
    }
    return load_csv(path, label_column, positive_label);
}

void write_csv(std::ostream& out, const Dataset& data) {
    const bool with_prov = data.has_synthetic();
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        if (j) out << ',';
        if (!data.feature_names.empty()) {
            out << data.feature_names[static_cast<std::size_t>(j)];
        } else {
            out << 'f' << j;
        }
    }
    out << ",label";
    if (with_prov) out << ",provenance";
    out << '\n';

    char buf[40];
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data.X(i, j));
            out << buf << ',';
        }
        out << data.y[i];
        if (with_prov) {
            out << ',' << (data.provenance[static_cast<std::size_t>(i)] == Provenance::synthetic
                               ? "synthetic"
                               : "real");
        }
        out << '\n';
    }
}

void save_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write file: " + path);
    write_csv(out, data);
}

}  // namespace gknn

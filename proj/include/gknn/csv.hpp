#pragma once

#include "gknn/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gknn {

// Raw delimited text, before any dataset semantics are applied.
struct CsvTable {
    std::vector<std::string> header;             // empty when the file has none
    std::vector<std::vector<std::string>> rows;  // data rows, cells trimmed
    std::vector<std::size_t> line_numbers;       // 1-based source line per row
};

CsvTable read_csv_table(std::istream& in);

// keel=true skips '@'-prefixed metadata lines before parsing.
CsvTable read_csv_file(const std::string& path, bool keel = false);

// Turn a table into a Dataset.
//   label_column: "" = last column, a header name, or a 0-based index.
//   positive_label: "" = the rarer raw label (ties: lexicographically larger).
// A column literally named "provenance" (values real/synthetic) is honored
// rather than treated as a feature, so save_csv output round-trips.
Dataset dataset_from_table(const CsvTable& table, const std::string& label_column,
                           const std::string& positive_label, std::string name);

Dataset load_csv(const std::string& path, const std::string& label_column = "",
                 const std::string& positive_label = "");

// KEEL .dat: '@' lines skipped, remainder parsed as CSV, label in the last
// column.
Dataset load_keel(const std::string& path, const std::string& positive_label = "");

// Dispatch on extension (.dat -> KEEL, otherwise CSV) and recognize the
// bundled synthetic fixtures via the pseudo-paths fixture:ir1, fixture:ir5,
// fixture:ir20.
Dataset load_dataset(const std::string& path, const std::string& label_column = "",
                     const std::string& positive_label = "");

// CSV with a header, full round-trip precision, labels written as 1 / -1,
// plus a provenance column when any synthetic point exists.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::string& path, const Dataset& data);

}  // namespace gknn

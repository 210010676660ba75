#pragma once

#include <string>
#include <vector>

namespace ejet {

// Real formatting for CSV/SVG output: 6 significant digits, dot decimal,
// "-0" canonicalized to "0".
std::string format_real(double v);

// Whole-file read; throws DataError if the file cannot be opened.
std::string read_file(const std::string& path);

// Atomic write: temp file in the same directory, then rename. Partial runs
// never leave truncated artifacts.
void write_file_atomic(const std::string& path, const std::string& content);

// Splits one CSV record on commas. No quoting: the dialect is plain
// comma-separated numerics.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace ejet

#pragma once

#include <string>
#include <vector>

namespace pcqa {

// Splits one CSV line on commas. Fields are trimmed of surrounding
// whitespace; quoting is not supported (none of our inputs need it).
std::vector<std::string> split_csv_line(const std::string& line);

// Reads a CSV file into rows of fields. Skips blank lines and lines starting
// with '#'. Throws InputError{MissingFile} when the file cannot be opened.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace pcqa

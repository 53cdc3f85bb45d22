#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sigsim::csv {

std::vector<std::string> split(std::string_view line, char delim = ',');
std::string trim(std::string_view value);

double parse_double(std::string_view field, const char* what, size_t line_no);
long parse_long(std::string_view field, const char* what, size_t line_no);

// Header-row delimited reader. Lines starting with '#' are skipped.
class TableReader {
public:
    TableReader(const std::string& path, char delim = ',');

    // Column index for a header name; throws InputError when required.
    size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;

    // Next data row; false at EOF. Fields are trimmed.
    bool next(std::vector<std::string>& fields);

    size_t line_number() const { return line_no_; }
    const std::vector<std::string>& header() const { return header_; }

private:
    std::ifstream in_;
    std::string path_;
    char delim_;
    size_t line_no_ = 0;
    std::vector<std::string> header_;
    std::unordered_map<std::string, size_t> columns_;
};

} // namespace sigsim::csv

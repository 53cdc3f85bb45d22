#include "sigsim/csv.hpp"

#include "sigsim/errors.hpp"

#include <charconv>

namespace sigsim::csv {

std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string token;
    for (char ch : line) {
        if (ch == delim) {
            fields.push_back(std::move(token));
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    fields.push_back(std::move(token));
    return fields;
}

std::string trim(std::string_view value) {
    const auto first = value.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = value.find_last_not_of(" \t\r\n");
    return std::string(value.substr(first, last - first + 1));
}

double parse_double(std::string_view field, const char* what, size_t line_no) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw InputError("line " + std::to_string(line_no) + ": bad " + what + " '" + std::string(field) + "'");
    return value;
}

long parse_long(std::string_view field, const char* what, size_t line_no) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw InputError("line " + std::to_string(line_no) + ": bad " + what + " '" + std::string(field) + "'");
    return value;
}

TableReader::TableReader(const std::string& path, char delim) : in_(path), path_(path), delim_(delim) {
    if (!in_.is_open()) throw InputError("cannot open " + path);
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (trim(line).empty() || line[0] == '#') continue;
        for (auto& name : split(line, delim_)) {
            std::string key = trim(name);
            columns_.emplace(key, header_.size());
            header_.push_back(std::move(key));
        }
        return;
    }
    // Empty file: no header, no rows. Callers see an empty table.
}

size_t TableReader::column(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) throw InputError(path_ + ": missing required column '" + name + "'");
    return it->second;
}

bool TableReader::has_column(const std::string& name) const {
    return columns_.count(name) != 0;
}

bool TableReader::next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (trim(line).empty() || line[0] == '#') continue;
        fields = split(line, delim_);
        for (auto& f : fields) f = trim(f);
        return true;
    }
    return false;
}

} // namespace sigsim::csv

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fermi {

/// Shortest round-trip decimal form of x ("nan", "inf", "-inf" otherwise).
std::string format_number(double x);

/// Column-oriented CSV table with `#` metadata lines ahead of the header.
class CsvTable {
public:
    void meta(std::string key, std::string value);
    void meta(std::string key, double value);
    void column(std::string name, std::vector<double> values);

    std::size_t rows() const;
    /// Throws std::invalid_argument when columns differ in length.
    std::string str() const;
    void write(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

void write_text(const std::string& path, const std::string& content);

}  // namespace fermi

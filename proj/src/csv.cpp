#include "fermi/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fermi {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void CsvTable::meta(std::string key, std::string value) { meta_.emplace_back(std::move(key), std::move(value)); }

void CsvTable::meta(std::string key, double value) { meta(std::move(key), format_number(value)); }

void CsvTable::column(std::string name, std::vector<double> values) {
    columns_.emplace_back(std::move(name), std::move(values));
}

std::size_t CsvTable::rows() const { return columns_.empty() ? 0 : columns_.front().second.size(); }

std::string CsvTable::str() const {
    const std::size_t n = rows();
    for (const auto& [name, values] : columns_) {
        if (values.size() != n) throw std::invalid_argument("column '" + name + "' has a different length");
    }
    std::string out;
    for (const auto& [k, v] : meta_) out += "# " + k + ": " + v + "\n";
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (c) out += ',';
        out += columns_[c].first;
    }
    out += '\n';
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            if (c) out += ',';
            out += format_number(columns_[c].second[r]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace fermi

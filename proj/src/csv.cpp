#include "mdqda/csv.hpp"

#include "mdqda/error.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <string_view>

namespace mdqda {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = line.find(',');
        out.push_back(trim(line.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), last, v);
    if (s.empty() || ec != std::errc() || ptr != last) return std::nullopt;
    return v;
}

}  // namespace

NumericTable read_numeric_csv(std::istream& in, const std::string& source) {
    NumericTable table;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        std::vector<double> row;
        row.reserve(fields.size());
        std::optional<std::size_t> bad;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            auto v = parse_double(fields[i]);
            if (!v) {
                bad = i;
                break;
            }
            row.push_back(*v);
        }
        if (bad) {
            if (first) {
                for (auto f : fields) table.header.emplace_back(f);
                table.cols = fields.size();
                first = false;
                continue;
            }
            throw ValidationError(source + ":" + std::to_string(lineno) + ": field " + std::to_string(*bad + 1) +
                                  " is not a number");
        }
        if (table.cols == 0) table.cols = row.size();
        if (row.size() != table.cols) {
            throw ValidationError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(table.cols) +
                                  " columns, found " + std::to_string(row.size()));
        }
        first = false;
        table.rows.push_back(std::move(row));
    }
    return table;
}

NumericTable read_numeric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path.string());
    return read_numeric_csv(in, path.string());
}

DataMatrix to_data_matrix(const NumericTable& table) {
    const auto p = static_cast<Eigen::Index>(table.cols);
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    Matrix x(p, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < p; ++i) x(i, j) = table.rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    return DataMatrix(std::move(x));
}

Matrix to_matrix(const NumericTable& table) {
    const auto r = static_cast<Eigen::Index>(table.rows.size());
    const auto c = static_cast<Eigen::Index>(table.cols);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

}  // namespace mdqda

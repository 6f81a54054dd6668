#pragma once

#include "colabm/error.hpp"

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace colabm {

/// One cell of a results table.
using Datum = std::variant<std::int64_t, std::uint64_t, double, std::string>;

/**
 * @brief Small append-only columnar table for run metrics and sweep results.
 *
 * Column types are fixed by the first appended row (or by add_column).
 */
class Table {
public:
    using ColumnData = std::variant<std::vector<std::int64_t>, std::vector<std::uint64_t>,
                                    std::vector<double>, std::vector<std::string>>;

    Table() = default;
    explicit Table(std::vector<std::string> names) : names_(std::move(names)) {
        cols_.resize(names_.size());
        typed_.assign(names_.size(), false);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    bool has_column(std::string_view name) const { return find(name) != npos; }

    std::size_t index_of(std::string_view name) const {
        const auto i = find(name);
        if (i == npos) {
            throw SchemaError("no column '" + std::string(name) + "' in table");
        }
        return i;
    }

    void append_row(const std::vector<Datum>& row) {
        if (row.size() != names_.size()) {
            throw SchemaError("row width does not match table width");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (typed_[c] && cols_[c].index() != row[c].index()) {
                throw SchemaError("type mismatch in column '" + names_[c] + "'");
            }
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!typed_[c]) {
                std::visit([&](const auto& v) {
                    cols_[c] = std::vector<std::decay_t<decltype(v)>>{};
                }, row[c]);
                typed_[c] = true;
            }
            std::visit([&](const auto& v) {
                std::get<std::vector<std::decay_t<decltype(v)>>>(cols_[c]).push_back(v);
            }, row[c]);
        }
        ++rows_;
    }

    Datum at(std::size_t row, std::string_view name) const {
        const auto c = index_of(name);
        return std::visit([row](const auto& vec) -> Datum { return vec.at(row); }, cols_[c]);
    }

    template <typename T>
    const std::vector<T>& column(std::string_view name) const {
        const auto c = index_of(name);
        if (!std::holds_alternative<std::vector<T>>(cols_[c])) {
            throw SchemaError("column '" + std::string(name) + "' has a different type");
        }
        return std::get<std::vector<T>>(cols_[c]);
    }

    /// Comma-separated with a header line. Doubles use 17 significant digits.
    void write_csv(std::ostream& os) const {
        for (std::size_t c = 0; c < names_.size(); ++c) {
            os << (c ? "," : "") << names_[c];
        }
        os << '\n';
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < names_.size(); ++c) {
                if (c) {
                    os << ',';
                }
                std::visit([&](const auto& vec) { os << format(vec[r]); }, cols_[c]);
            }
            os << '\n';
        }
    }

    std::string to_csv() const {
        std::ostringstream ss;
        write_csv(ss);
        return ss.str();
    }

    friend bool operator==(const Table& a, const Table& b) {
        return a.names_ == b.names_ && a.rows_ == b.rows_ && a.cols_ == b.cols_;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t find(std::string_view name) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) {
                return i;
            }
        }
        return npos;
    }

    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    static std::string format(const std::string& s) { return s; }
    template <typename I>
    static std::string format(I v) {
        return std::to_string(v);
    }

    std::vector<std::string> names_;
    std::vector<ColumnData> cols_;
    std::vector<bool> typed_;
    std::size_t rows_ = 0;
};

} // namespace colabm

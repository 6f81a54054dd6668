#pragma once

#include "colabm/error.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_set>
#include <variant>
#include <vector>

namespace colabm {

using AgentId = std::uint64_t;

enum class DType { Int64, Float64, Bool, Categorical };

inline const char* to_string(DType t) noexcept {
    switch (t) {
    case DType::Int64: return "Int64";
    case DType::Float64: return "Float64";
    case DType::Bool: return "Bool";
    case DType::Categorical: return "Categorical";
    }
    return "?";
}

/// Code of a categorical value: an index into the column's label set.
struct Category {
    std::int32_t code = 0;
    friend constexpr auto operator<=>(const Category&, const Category&) = default;
};

/// Column type. Categorical columns carry their (ordered) label set.
class AttributeType {
public:
    static AttributeType int64() { return AttributeType(DType::Int64, {}); }
    static AttributeType float64() { return AttributeType(DType::Float64, {}); }
    static AttributeType boolean() { return AttributeType(DType::Bool, {}); }

    static AttributeType categorical(std::vector<std::string> labels) {
        if (labels.empty()) {
            throw SchemaError("categorical label set must be non-empty");
        }
        std::unordered_set<std::string> seen;
        for (const auto& l : labels) {
            if (!seen.insert(l).second) {
                throw SchemaError("duplicate categorical label '" + l + "'");
            }
        }
        return AttributeType(DType::Categorical, std::move(labels));
    }

    DType kind() const noexcept { return kind_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    bool is_numeric() const noexcept { return kind_ == DType::Int64 || kind_ == DType::Float64; }

    std::optional<Category> code_of(std::string_view label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) {
            return std::nullopt;
        }
        return Category{static_cast<std::int32_t>(it - labels_.begin())};
    }

    /// Bytes per value in the columnar layout.
    std::size_t width() const noexcept {
        switch (kind_) {
        case DType::Bool: return 1;
        case DType::Categorical: return 4;
        default: return 8;
        }
    }

    friend bool operator==(const AttributeType&, const AttributeType&) = default;

private:
    AttributeType(DType kind, std::vector<std::string> labels)
        : kind_(kind), labels_(std::move(labels)) {}

    DType kind_;
    std::vector<std::string> labels_;
};

/// A dynamically typed cell value. Categorical cells are exchanged as labels.
using Value = std::variant<std::int64_t, double, bool, std::string>;

inline std::string describe(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return "'" + x + "'";
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else {
                return std::to_string(x);
            }
        },
        v);
}

/// C++ element types usable in typed column access and transforms.
template <typename T>
concept ColumnElement = std::is_same_v<T, std::int64_t> || std::is_same_v<T, double> ||
                        std::is_same_v<T, bool> || std::is_same_v<T, Category>;

template <ColumnElement T>
inline constexpr DType dtype_of = std::is_same_v<T, std::int64_t> ? DType::Int64
                                  : std::is_same_v<T, double>     ? DType::Float64
                                  : std::is_same_v<T, bool>       ? DType::Bool
                                                                  : DType::Categorical;

/// Bool columns are stored one byte per row.
template <ColumnElement T>
using storage_t = std::conditional_t<std::is_same_v<T, bool>, std::uint8_t, T>;

} // namespace colabm

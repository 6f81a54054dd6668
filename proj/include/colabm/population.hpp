#pragma once

#include "colabm/dtype.hpp"
#include "colabm/error.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace colabm {

struct ColumnSpec {
    std::string name;
    AttributeType type;
};

using Schema = std::vector<ColumnSpec>;
using Defaults = std::map<std::string, Value, std::less<>>;

/// Half-open range of freshly assigned agent IDs.
struct IdRange {
    AgentId first = 0;
    AgentId last = 0; // one past the end

    std::size_t size() const noexcept { return static_cast<std::size_t>(last - first); }
    friend bool operator==(const IdRange&, const IdRange&) = default;
};

enum class Aggregate { Sum, Mean, Min, Max, Count };

/// One named, typed, contiguous column. Length equals the population's row count.
class Column {
public:
    using Storage = std::variant<std::vector<std::int64_t>, std::vector<double>,
                                 std::vector<std::uint8_t>, std::vector<Category>>;

    Column(std::string name, AttributeType type) : name_(std::move(name)), type_(std::move(type)) {
        switch (type_.kind()) {
        case DType::Int64: data_ = std::vector<std::int64_t>{}; break;
        case DType::Float64: data_ = std::vector<double>{}; break;
        case DType::Bool: data_ = std::vector<std::uint8_t>{}; break;
        case DType::Categorical: data_ = std::vector<Category>{}; break;
        }
    }

    const std::string& name() const noexcept { return name_; }
    const AttributeType& type() const noexcept { return type_; }
    std::size_t size() const noexcept {
        return std::visit([](const auto& v) { return v.size(); }, data_);
    }

    template <ColumnElement T>
    std::vector<storage_t<T>>& data() {
        require<T>();
        return std::get<std::vector<storage_t<T>>>(data_);
    }
    template <ColumnElement T>
    const std::vector<storage_t<T>>& data() const {
        require<T>();
        return std::get<std::vector<storage_t<T>>>(data_);
    }

    template <ColumnElement T>
    void require() const {
        if (type_.kind() != dtype_of<T>) {
            throw DtypeError("column '" + name_ + "' has dtype " + to_string(type_.kind()) +
                             ", accessed as " + to_string(dtype_of<T>));
        }
    }

    Value get(std::size_t row) const {
        switch (type_.kind()) {
        case DType::Int64: return std::get<0>(data_)[row];
        case DType::Float64: return std::get<1>(data_)[row];
        case DType::Bool: return std::get<2>(data_)[row] != 0;
        case DType::Categorical: return type_.labels()[std::get<3>(data_)[row].code];
        }
        return {};
    }

    /// Validates `v` against the dtype; throws DtypeError on mismatch.
    void check(const Value& v) const {
        bool ok = false;
        switch (type_.kind()) {
        case DType::Int64: ok = std::holds_alternative<std::int64_t>(v); break;
        case DType::Float64: ok = std::holds_alternative<double>(v); break;
        case DType::Bool: ok = std::holds_alternative<bool>(v); break;
        case DType::Categorical:
            ok = std::holds_alternative<std::string>(v) &&
                 type_.code_of(std::get<std::string>(v)).has_value();
            break;
        }
        if (!ok) {
            throw DtypeError("value " + describe(v) + " does not fit column '" + name_ +
                             "' of dtype " + to_string(type_.kind()));
        }
    }

    void set(std::size_t row, const Value& v) {
        check(v);
        switch (type_.kind()) {
        case DType::Int64: std::get<0>(data_)[row] = std::get<std::int64_t>(v); break;
        case DType::Float64: std::get<1>(data_)[row] = std::get<double>(v); break;
        case DType::Bool: std::get<2>(data_)[row] = std::get<bool>(v) ? 1 : 0; break;
        case DType::Categorical:
            std::get<3>(data_)[row] = *type_.code_of(std::get<std::string>(v));
            break;
        }
    }

    void append(const Value& v, std::size_t n) {
        check(v);
        std::visit([n](auto& vec) { vec.resize(vec.size() + n); }, data_);
        for (std::size_t r = size() - n; r < size(); ++r) {
            set(r, v);
        }
    }

    Value zero() const {
        switch (type_.kind()) {
        case DType::Int64: return std::int64_t{0};
        case DType::Float64: return 0.0;
        case DType::Bool: return false;
        case DType::Categorical: return type_.labels().front();
        }
        return {};
    }

    /// Keeps rows whose `keep` flag is set, preserving order.
    void retain(std::span<const std::uint8_t> keep) {
        std::visit(
            [&](auto& vec) {
                std::size_t out = 0;
                for (std::size_t r = 0; r < vec.size(); ++r) {
                    if (keep[r]) {
                        vec[out++] = vec[r];
                    }
                }
                vec.resize(out);
            },
            data_);
    }

private:
    std::string name_;
    AttributeType type_;
    Storage data_;
};

class BatchUpdate;

/**
 * @brief Columnar home of all agent state.
 *
 * Rows are appended in ID order and never reordered, so row order is also
 * ascending ID order. Removal clears the row's alive flag; the values stay
 * in place until compact() drops dead rows. IDs are never reused.
 *
 * While a batch is open (begin_batch), set_value stages writes instead of
 * committing them, reads observe committed values only, and structural or
 * bulk mutations are rejected.
 *
 * Single writer. Concurrent reads are fine when no batch is open and no
 * mutation is in flight.
 */
class Population {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    explicit Population(const Schema& schema) {
        if (schema.empty()) {
            throw SchemaError("schema must declare at least one column");
        }
        for (const auto& spec : schema) {
            if (spec.name.empty()) {
                throw SchemaError("column names must be non-empty");
            }
            if (find_column(spec.name)) {
                throw SchemaError("duplicate column name '" + spec.name + "'");
            }
            columns_.emplace_back(spec.name, spec.type);
        }
    }

    Population(const Population&) = default;
    Population& operator=(const Population&) = default;
    Population(Population&&) noexcept = default;
    Population& operator=(Population&&) noexcept = default;

    // -- shape --

    std::size_t rows() const noexcept { return alive_.size(); }
    std::size_t live_count() const noexcept { return live_; }
    std::size_t column_count() const noexcept { return columns_.size(); }
    const std::vector<Column>& columns() const noexcept { return columns_; }
    AgentId next_id() const noexcept { return next_id_; }

    /// Incremented on every committed change; lets caches detect staleness.
    std::uint64_t version() const noexcept { return version_; }

    Schema schema() const {
        Schema s;
        for (const auto& c : columns_) {
            s.push_back({c.name(), c.type()});
        }
        return s;
    }

    bool has_column(std::string_view name) const { return find_column(name) != nullptr; }

    const AttributeType& type_of(std::string_view name) const { return column_ref(name).type(); }

    bool is_alive(AgentId id) const noexcept { return row_of_or_npos(id) != npos; }

    std::size_t row_of(AgentId id) const {
        const std::size_t r = row_of_or_npos(id);
        if (r == npos) {
            throw LivenessError("agent " + std::to_string(id) + " is not alive");
        }
        return r;
    }

    AgentId id_at(std::size_t row) const { return row_ids_.at(row); }
    std::span<const AgentId> row_ids() const noexcept { return row_ids_; }
    std::span<const std::uint8_t> alive_mask() const noexcept { return alive_; }

    /// Live IDs in ascending order, captured at call time.
    std::vector<AgentId> live_ids() const {
        std::vector<AgentId> ids;
        ids.reserve(live_);
        for (std::size_t r = 0; r < rows(); ++r) {
            if (alive_[r]) {
                ids.push_back(row_ids_[r]);
            }
        }
        return ids;
    }

    // -- lifecycle --

    IdRange add_agents(std::size_t n, const Defaults& defaults = {}) {
        require_no_batch("add_agents");
        if (n == 0) {
            throw DomainError("add_agents: n must be >= 1");
        }
        std::vector<Value> fill;
        fill.reserve(columns_.size());
        for (const auto& [name, value] : defaults) {
            if (!find_column(name)) {
                throw SchemaError("default given for unknown column '" + name + "'");
            }
        }
        for (const auto& col : columns_) {
            auto it = defaults.find(col.name());
            Value v = it == defaults.end() ? col.zero() : it->second;
            col.check(v);
            fill.push_back(std::move(v));
        }
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            columns_[c].append(fill[c], n);
        }
        const IdRange range{next_id_, next_id_ + n};
        id_to_row_.resize(id_to_row_.size() + n);
        for (std::size_t i = 0; i < n; ++i) {
            const AgentId id = next_id_ + i;
            id_to_row_[id] = row_ids_.size();
            row_ids_.push_back(id);
            alive_.push_back(1);
        }
        next_id_ += n;
        live_ += n;
        ++version_;
        return range;
    }

    void remove_agents(std::span<const AgentId> ids) {
        require_no_batch("remove_agents");
        std::vector<std::size_t> rows_to_kill;
        rows_to_kill.reserve(ids.size());
        for (AgentId id : ids) {
            const std::size_t r = row_of(id);
            if (std::find(rows_to_kill.begin(), rows_to_kill.end(), r) != rows_to_kill.end()) {
                throw LivenessError("agent " + std::to_string(id) + " listed twice for removal");
            }
            rows_to_kill.push_back(r);
        }
        for (std::size_t r : rows_to_kill) {
            alive_[r] = 0;
            id_to_row_[row_ids_[r]] = npos;
        }
        live_ -= rows_to_kill.size();
        ++version_;
    }

    void remove_agents(std::initializer_list<AgentId> ids) {
        remove_agents(std::span<const AgentId>(ids.begin(), ids.size()));
    }

    /// Drops dead rows. Returns the new row of every live ID.
    std::map<AgentId, std::size_t> compact() {
        require_no_batch("compact");
        for (auto& col : columns_) {
            col.retain(alive_);
        }
        std::size_t out = 0;
        std::map<AgentId, std::size_t> mapping;
        for (std::size_t r = 0; r < row_ids_.size(); ++r) {
            if (alive_[r]) {
                const AgentId id = row_ids_[r];
                row_ids_[out] = id;
                id_to_row_[id] = out;
                mapping.emplace(id, out);
                ++out;
            }
        }
        row_ids_.resize(out);
        alive_.assign(out, 1);
        ++version_;
        return mapping;
    }

    // -- single cell access --

    Value get_value(AgentId id, std::string_view attr) const {
        const Column& col = column_ref(attr);
        return col.get(row_of(id));
    }

    template <ColumnElement T>
    T get(AgentId id, std::string_view attr) const {
        const Column& col = column_ref(attr);
        const std::size_t r = row_of(id);
        if constexpr (std::is_same_v<T, bool>) {
            return col.data<bool>()[r] != 0;
        } else {
            return col.data<T>()[r];
        }
    }

    /// Commits immediately, or stages when a batch is open.
    void set_value(AgentId id, std::string_view attr, const Value& value) {
        const std::size_t c = column_index(attr);
        const std::size_t r = row_of(id);
        columns_[c].check(value);
        if (staged_) {
            staged_->push_back({id, c, value});
            return;
        }
        if (batched_writes_only_) {
            throw BatchError("immediate write to '" + std::string(attr) +
                             "' outside a batch while batched writes are required");
        }
        columns_[c].set(r, value);
        ++version_;
    }

    template <ColumnElement T>
    void set(AgentId id, std::string_view attr, T value) {
        if constexpr (std::is_same_v<T, Category>) {
            const auto& labels = type_of(attr).labels();
            if (value.code < 0 || static_cast<std::size_t>(value.code) >= labels.size()) {
                throw DtypeError("category code out of range for '" + std::string(attr) + "'");
            }
            set_value(id, attr, labels[value.code]);
        } else {
            set_value(id, attr, Value(value));
        }
    }

    // -- typed column access --

    template <ColumnElement T>
    std::span<const storage_t<T>> column(std::string_view name) const {
        return column_ref(name).template data<T>();
    }

    /// Direct write access to a column's storage (all rows, dead included).
    template <ColumnElement T>
    std::span<storage_t<T>> column_mut(std::string_view name) {
        require_no_batch("column_mut");
        ++version_;
        return columns_[column_index(name)].template data<T>();
    }

    // -- vectorized updates --

    /**
     * @brief Sets `output` to fn(inputs...) for every live row.
     *
     * All results are computed from the pre-update columns before any write,
     * so the outcome does not depend on evaluation order even when `output`
     * is also an input. Dead rows are left untouched.
     */
    template <ColumnElement Out, ColumnElement... In, typename F>
    void update_column(const std::array<std::string_view, sizeof...(In)>& inputs,
                       std::string_view output, F&& fn) {
        update_impl<Out, In...>(inputs, output, [](const auto&...) { return true; },
                                std::forward<F>(fn));
    }

    /**
     * @brief Like update_column, restricted to live rows where pred(inputs...) holds.
     * @return number of rows updated.
     */
    template <ColumnElement Out, ColumnElement... In, typename P, typename F>
    std::size_t update_where(const std::array<std::string_view, sizeof...(In)>& inputs,
                             std::string_view output, P&& pred, F&& fn) {
        return update_impl<Out, In...>(inputs, output, std::forward<P>(pred),
                                       std::forward<F>(fn));
    }

    // -- aggregates --

    /// Aggregate over live rows. Integer columns yield int64 for sum/min/max; mean is double.
    Value aggregate(std::string_view attr, Aggregate kind) const {
        if (kind == Aggregate::Count) {
            return static_cast<std::int64_t>(live_);
        }
        const Column& col = column_ref(attr);
        if (!col.type().is_numeric()) {
            throw DtypeError("aggregate over non-numeric column '" + col.name() + "'");
        }
        if (live_ == 0 && kind != Aggregate::Sum) {
            throw DomainError("mean/min/max over an empty population");
        }
        if (col.type().kind() == DType::Int64) {
            return reduce<std::int64_t>(col.data<std::int64_t>(), kind);
        }
        return reduce<double>(col.data<double>(), kind);
    }

    // -- batches --

    BatchUpdate begin_batch();
    bool batch_open() const noexcept { return staged_.has_value(); }

    /// When enabled, set_value outside a batch throws (synchronous mode guard).
    void set_batched_writes_only(bool on) noexcept { batched_writes_only_ = on; }
    bool batched_writes_only() const noexcept { return batched_writes_only_; }

private:
    friend class BatchUpdate;

    struct StagedWrite {
        AgentId id;
        std::size_t column;
        Value value;
    };

    const Column* find_column(std::string_view name) const {
        for (const auto& c : columns_) {
            if (c.name() == name) {
                return &c;
            }
        }
        return nullptr;
    }

    std::size_t column_index(std::string_view name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (columns_[i].name() == name) {
                return i;
            }
        }
        throw SchemaError("unknown attribute '" + std::string(name) + "'");
    }

    const Column& column_ref(std::string_view name) const { return columns_[column_index(name)]; }

    std::size_t row_of_or_npos(AgentId id) const noexcept {
        return id < id_to_row_.size() ? id_to_row_[id] : npos;
    }

    void require_no_batch(const char* what) const {
        if (staged_) {
            throw BatchError(std::string(what) + " is not allowed while a batch is open");
        }
    }

    template <typename T>
    Value reduce(const std::vector<T>& data, Aggregate kind) const {
        T acc{};
        bool first = true;
        for (std::size_t r = 0; r < data.size(); ++r) {
            if (!alive_[r]) {
                continue;
            }
            const T v = data[r];
            switch (kind) {
            case Aggregate::Sum:
            case Aggregate::Mean: acc += v; break;
            case Aggregate::Min: acc = first ? v : std::min(acc, v); break;
            case Aggregate::Max: acc = first ? v : std::max(acc, v); break;
            case Aggregate::Count: break;
            }
            first = false;
        }
        if (kind == Aggregate::Mean) {
            return static_cast<double>(acc) / static_cast<double>(live_);
        }
        return acc;
    }

    template <ColumnElement T>
    static T load(const storage_t<T>& s) {
        if constexpr (std::is_same_v<T, bool>) {
            return s != 0;
        } else {
            return s;
        }
    }

    template <ColumnElement Out, ColumnElement... In, typename P, typename F>
    std::size_t update_impl(const std::array<std::string_view, sizeof...(In)>& inputs,
                            std::string_view output, P&& pred, F&& fn) {
        static_assert(std::is_same_v<std::decay_t<std::invoke_result_t<F&, In...>>, Out>,
                      "transform must return exactly the output column's element type");
        static_assert(std::is_convertible_v<std::invoke_result_t<P&, In...>, bool>,
                      "predicate must return bool");
        require_no_batch("update_column");

        const std::size_t out_idx = column_index(output);
        Column& out_col = columns_[out_idx];
        out_col.template require<Out>();

        auto input_data = [&]<std::size_t... I>(std::index_sequence<I...>) {
            return std::tuple<const std::vector<storage_t<In>>*...>{
                &column_ref(inputs[I]).template data<In>()...};
        }(std::index_sequence_for<In...>{});

        std::vector<storage_t<Out>> next = out_col.template data<Out>();
        const std::size_t n_labels = out_col.type().labels().size();
        std::size_t updated = 0;

        auto row_step = [&]<std::size_t... I>(std::size_t r, std::index_sequence<I...>) {
            if (!pred(load<In>((*std::get<I>(input_data))[r])...)) {
                return;
            }
            Out v = fn(load<In>((*std::get<I>(input_data))[r])...);
            if constexpr (std::is_same_v<Out, Category>) {
                if (v.code < 0 || static_cast<std::size_t>(v.code) >= n_labels) {
                    throw DtypeError("transform produced category code outside the label set of '" +
                                     out_col.name() + "'");
                }
            }
            if constexpr (std::is_same_v<Out, bool>) {
                next[r] = v ? 1 : 0;
            } else {
                next[r] = v;
            }
            ++updated;
        };

        for (std::size_t r = 0; r < rows(); ++r) {
            if (alive_[r]) {
                row_step(r, std::index_sequence_for<In...>{});
            }
        }
        out_col.template data<Out>().swap(next);
        ++version_;
        return updated;
    }

    std::vector<Column> columns_;
    std::vector<std::uint8_t> alive_;
    std::vector<AgentId> row_ids_;
    std::vector<std::size_t> id_to_row_; // indexed by AgentId; npos once removed
    AgentId next_id_ = 0;
    std::size_t live_ = 0;
    std::uint64_t version_ = 0;
    bool batched_writes_only_ = false;
    std::optional<std::vector<StagedWrite>> staged_;
};

/**
 * @brief Handle to the open batch of a Population.
 *
 * Writes made through stage() or Population::set_value are buffered until
 * apply(). Destroying the handle without applying discards them. Duplicate
 * writes to one cell resolve to the last staged value.
 */
class BatchUpdate {
public:
    BatchUpdate(const BatchUpdate&) = delete;
    BatchUpdate& operator=(const BatchUpdate&) = delete;
    BatchUpdate(BatchUpdate&& other) noexcept
        : pop_(std::exchange(other.pop_, nullptr)), done_(other.done_) {}
    BatchUpdate& operator=(BatchUpdate&&) = delete;

    ~BatchUpdate() {
        if (pop_ && !done_) {
            pop_->staged_.reset();
        }
    }

    void stage(AgentId id, std::string_view attr, const Value& value) {
        require_open();
        pop_->set_value(id, attr, value);
    }

    std::size_t staged_count() const {
        return pop_ && !done_ ? pop_->staged_->size() : 0;
    }

    /// Commits every staged write in one step. Returns the number of staged writes.
    std::size_t apply() {
        require_open();
        auto writes = std::move(*pop_->staged_);
        pop_->staged_.reset();
        done_ = true;
        // Staging validated dtype and liveness, and structural changes are
        // blocked while open, so the commit below cannot fail part-way.
        for (const auto& w : writes) {
            pop_->columns_[w.column].set(pop_->row_of(w.id), w.value);
        }
        ++pop_->version_;
        return writes.size();
    }

    /// Drops staged writes and closes the batch.
    void discard() {
        require_open();
        pop_->staged_.reset();
        done_ = true;
    }

private:
    friend class Population;
    explicit BatchUpdate(Population& pop) : pop_(&pop) {}

    void require_open() const {
        if (!pop_ || done_) {
            throw BatchError("batch already applied or discarded");
        }
    }

    Population* pop_;
    bool done_ = false;
};

inline BatchUpdate Population::begin_batch() {
    if (staged_) {
        throw BatchError("a batch is already open on this population");
    }
    staged_.emplace();
    return BatchUpdate(*this);
}

} // namespace colabm

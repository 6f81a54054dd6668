#pragma once

#include "colabm/dtype.hpp"
#include "colabm/error.hpp"

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace colabm {

/**
 * @brief Object-per-agent baseline: one string-keyed map of attributes per agent.
 *
 * Offers the same get/set/iterate surface as Population so the two can be
 * checked against each other. Removal is a tombstone; IDs are positions in
 * the record vector and are never reused.
 */
class RecordStore {
public:
    using Record = std::unordered_map<std::string, Value>;

    AgentId add(Record r) {
        records_.push_back(std::move(r));
        alive_.push_back(true);
        return records_.size() - 1;
    }

    std::size_t size() const noexcept { return records_.size(); }

    std::size_t live_count() const noexcept {
        std::size_t n = 0;
        for (bool a : alive_) {
            n += a ? 1 : 0;
        }
        return n;
    }

    bool is_alive(AgentId id) const noexcept { return id < alive_.size() && alive_[id]; }

    void remove(AgentId id) {
        require_live(id);
        alive_[id] = false;
    }

    Value get(AgentId id, std::string_view attr) const {
        require_live(id);
        auto it = records_[id].find(std::string(attr));
        if (it == records_[id].end()) {
            throw SchemaError("unknown attribute '" + std::string(attr) + "'");
        }
        return it->second;
    }

    /// Writes must keep the attribute's existing value type.
    void set(AgentId id, std::string_view attr, const Value& v) {
        require_live(id);
        auto it = records_[id].find(std::string(attr));
        if (it == records_[id].end()) {
            throw SchemaError("unknown attribute '" + std::string(attr) + "'");
        }
        if (it->second.index() != v.index()) {
            throw DtypeError("value " + describe(v) + " changes the type of '" +
                             std::string(attr) + "'");
        }
        it->second = v;
    }

    std::vector<AgentId> live_ids() const {
        std::vector<AgentId> ids;
        for (AgentId i = 0; i < records_.size(); ++i) {
            if (alive_[i]) {
                ids.push_back(i);
            }
        }
        return ids;
    }

    Record& operator[](AgentId id) { return records_[id]; }
    const Record& operator[](AgentId id) const { return records_[id]; }

private:
    void require_live(AgentId id) const {
        if (!is_alive(id)) {
            throw LivenessError("record " + std::to_string(id) + " is not alive");
        }
    }

    std::vector<Record> records_;
    std::vector<bool> alive_;
};

} // namespace colabm

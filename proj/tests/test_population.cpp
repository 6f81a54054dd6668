#include "colabm/population.hpp"
#include "colabm/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

using namespace colabm;

namespace {

Population wealth_pop(std::size_t n, std::int64_t w = 1) {
    Population p({{"wealth", AttributeType::int64()}});
    if (n > 0) {
        p.add_agents(n, {{"wealth", Value(w)}});
    }
    return p;
}

std::vector<std::int64_t> wealth_of(const Population& p) {
    const auto c = p.column<std::int64_t>("wealth");
    return {c.begin(), c.end()};
}

std::size_t popcount(const Population& p) {
    const auto m = p.alive_mask();
    return static_cast<std::size_t>(std::count(m.begin(), m.end(), std::uint8_t{1}));
}

} // namespace

// -- construction --

TEST(Population, CreateSingleColumn) {
    Population p({{"wealth", AttributeType::int64()}});
    EXPECT_EQ(p.live_count(), 0u);
    EXPECT_EQ(p.column_count(), 1u);
    EXPECT_TRUE(p.has_column("wealth"));
}

TEST(Population, CreateCategorical) {
    Population p({{"state", AttributeType::categorical({"S", "I", "R"})}});
    EXPECT_EQ(p.live_count(), 0u);
    EXPECT_EQ(p.type_of("state").kind(), DType::Categorical);
}

TEST(Population, DuplicateColumnRejected) {
    EXPECT_THROW(Population({{"x", AttributeType::float64()}, {"x", AttributeType::int64()}}),
                 SchemaError);
}

TEST(Population, EmptySchemaRejected) { EXPECT_THROW(Population(Schema{}), SchemaError); }

TEST(AttributeType, CategoricalLabelsValidated) {
    EXPECT_THROW(AttributeType::categorical({}), SchemaError);
    EXPECT_THROW(AttributeType::categorical({"a", "a"}), SchemaError);
}

// -- add / remove / compact --

TEST(Population, AddAgentsSequentialIds) {
    auto p = wealth_pop(0);
    const auto r = p.add_agents(3, {{"wealth", Value(std::int64_t{1})}});
    EXPECT_EQ(r.first, 0u);
    EXPECT_EQ(r.last, 3u);
    EXPECT_EQ(p.live_ids(), (std::vector<AgentId>{0, 1, 2}));
    EXPECT_EQ(wealth_of(p), (std::vector<std::int64_t>{1, 1, 1}));
}

TEST(Population, IdsNeverReused) {
    auto p = wealth_pop(3);
    p.remove_agents({1});
    const auto r = p.add_agents(1);
    EXPECT_EQ(r.first, 3u);
    EXPECT_FALSE(p.is_alive(1));
}

TEST(Population, DefaultDtypeMismatch) {
    auto p = wealth_pop(0);
    EXPECT_THROW(p.add_agents(2, {{"wealth", Value(1.5)}}), DtypeError);
    EXPECT_EQ(p.rows(), 0u);
}

TEST(Population, ZeroValues) {
    Population p({{"i", AttributeType::int64()},
                  {"f", AttributeType::float64()},
                  {"b", AttributeType::boolean()},
                  {"c", AttributeType::categorical({"low", "high"})}});
    p.add_agents(1);
    EXPECT_EQ(p.get_value(0, "i"), Value(std::int64_t{0}));
    EXPECT_EQ(p.get_value(0, "f"), Value(0.0));
    EXPECT_EQ(p.get_value(0, "b"), Value(false));
    EXPECT_EQ(p.get_value(0, "c"), Value(std::string("low")));
}

TEST(Population, RemoveMasksRows) {
    auto p = wealth_pop(3);
    p.remove_agents({1});
    EXPECT_EQ(p.live_count(), 2u);
    EXPECT_EQ(p.live_ids(), (std::vector<AgentId>{0, 2}));
    EXPECT_THROW(p.remove_agents({1}), LivenessError);
}

TEST(Population, RemoveAllThenAggregate) {
    auto p = wealth_pop(3);
    p.remove_agents({0, 1, 2});
    EXPECT_EQ(p.live_count(), 0u);
    EXPECT_EQ(p.aggregate("wealth", Aggregate::Sum), Value(std::int64_t{0}));
    EXPECT_EQ(p.aggregate("wealth", Aggregate::Count), Value(std::int64_t{0}));
    EXPECT_THROW(p.aggregate("wealth", Aggregate::Mean), DomainError);
    EXPECT_THROW(p.aggregate("wealth", Aggregate::Min), DomainError);
    EXPECT_THROW(p.aggregate("wealth", Aggregate::Max), DomainError);
}

TEST(Population, RemoveUnknownIdFails) {
    auto p = wealth_pop(2);
    EXPECT_THROW(p.remove_agents({7}), LivenessError);
    EXPECT_EQ(p.live_count(), 2u);
}

TEST(Population, CompactPreservesIds) {
    auto p = wealth_pop(3);
    p.set<std::int64_t>(2, "wealth", 5);
    p.remove_agents({1});
    const auto m = p.compact();
    EXPECT_EQ(m, (std::map<AgentId, std::size_t>{{0, 0}, {2, 1}}));
    EXPECT_EQ(p.rows(), 2u);
    EXPECT_EQ(p.get<std::int64_t>(2, "wealth"), 5);
    EXPECT_EQ(p.row_of(2), 1u);
}

TEST(Population, CompactIdentity) {
    auto p = wealth_pop(3);
    const auto m = p.compact();
    EXPECT_EQ(m, (std::map<AgentId, std::size_t>{{0, 0}, {1, 1}, {2, 2}}));
}

TEST(Population, CompactAllDead) {
    auto p = wealth_pop(2);
    p.remove_agents({0, 1});
    EXPECT_TRUE(p.compact().empty());
    EXPECT_EQ(p.rows(), 0u);
}

// -- cell access --

TEST(Population, GetSetRoundtrip) {
    auto p = wealth_pop(1, 7);
    EXPECT_EQ(p.get_value(0, "wealth"), Value(std::int64_t{7}));
    p.set_value(0, "wealth", Value(std::int64_t{12}));
    EXPECT_EQ(p.get<std::int64_t>(0, "wealth"), 12);
}

TEST(Population, GetDeadOrUnknown) {
    auto p = wealth_pop(2);
    p.remove_agents({0});
    EXPECT_THROW(p.get_value(0, "wealth"), LivenessError);
    EXPECT_THROW(p.get_value(1, "nope"), SchemaError);
    EXPECT_THROW(p.set_value(0, "wealth", Value(std::int64_t{1})), LivenessError);
}

TEST(Population, CategoricalDomain) {
    Population p({{"state", AttributeType::categorical({"S", "I", "R"})}});
    p.add_agents(1);
    p.set_value(0, "state", Value(std::string("I")));
    EXPECT_EQ(p.get_value(0, "state"), Value(std::string("I")));
    EXPECT_EQ(p.get<Category>(0, "state").code, 1);
    EXPECT_THROW(p.set_value(0, "state", Value(std::string("X"))), DtypeError);
    EXPECT_THROW(p.set<Category>(0, "state", Category{3}), DtypeError);
}

TEST(Population, SetDtypeMismatch) {
    auto p = wealth_pop(1);
    EXPECT_THROW(p.set_value(0, "wealth", Value(2.0)), DtypeError);
    EXPECT_THROW(p.get<double>(0, "wealth"), DtypeError);
}

// -- update_column / update_where --

TEST(UpdateColumn, AddTen) {
    auto p = wealth_pop(3);
    p.update_column<std::int64_t, std::int64_t>({"wealth"}, "wealth",
                                                 [](std::int64_t w) { return w + 10; });
    EXPECT_EQ(wealth_of(p), (std::vector<std::int64_t>{11, 11, 11}));
}

TEST(UpdateColumn, IdentityUnchanged) {
    auto p = wealth_pop(4);
    p.set<std::int64_t>(2, "wealth", -3);
    const auto before = wealth_of(p);
    p.update_column<std::int64_t, std::int64_t>({"wealth"}, "wealth",
                                                 [](std::int64_t w) { return w; });
    EXPECT_EQ(wealth_of(p), before);
}

TEST(UpdateColumn, DeadRowsUntouched) {
    Population p({{"pos_x", AttributeType::float64()}, {"out", AttributeType::float64()}});
    p.add_agents(3, {{"pos_x", Value(2.5)}, {"out", Value(-1.0)}});
    p.remove_agents({1});
    p.update_column<double, double>({"pos_x"}, "out", [](double x) { return x; });
    const auto out = p.column<double>("out");
    EXPECT_EQ(out[0], 2.5);
    EXPECT_EQ(out[1], -1.0);
    EXPECT_EQ(out[2], 2.5);
}

TEST(UpdateColumn, MultipleInputs) {
    Population p({{"a", AttributeType::float64()},
                  {"b", AttributeType::int64()},
                  {"flag", AttributeType::boolean()}});
    p.add_agents(2, {{"a", Value(1.5)}, {"b", Value(std::int64_t{2})}});
    p.update_column<bool, double, std::int64_t>(
        {"a", "b"}, "flag", [](double a, std::int64_t b) { return a < static_cast<double>(b); });
    EXPECT_EQ(p.get<bool>(0, "flag"), true);
}

TEST(UpdateColumn, InputDtypeMismatch) {
    auto p = wealth_pop(2);
    auto bad = [&] {
        p.update_column<std::int64_t, double>({"wealth"}, "wealth",
                                              [](double w) { return std::int64_t(w); });
    };
    EXPECT_THROW(bad(), DtypeError);
}

TEST(UpdateColumn, CategoryOutOfRange) {
    Population p({{"s", AttributeType::categorical({"a", "b"})}});
    p.add_agents(2);
    auto bad = [&] {
        p.update_column<Category, Category>({"s"}, "s", [](Category) { return Category{5}; });
    };
    EXPECT_THROW(bad(), DtypeError);
    EXPECT_EQ(p.get<Category>(0, "s").code, 0);
}

TEST(UpdateWhere, HandEvaluation) {
    auto p = wealth_pop(3);
    p.set<std::int64_t>(0, "wealth", 0);
    p.set<std::int64_t>(1, "wealth", 5);
    p.set<std::int64_t>(2, "wealth", 9);
    const auto n = p.update_where<std::int64_t, std::int64_t>(
        {"wealth"}, "wealth", [](std::int64_t w) { return w >= 5; },
        [](std::int64_t w) { return w - 5; });
    EXPECT_EQ(n, 2u);
    EXPECT_EQ(wealth_of(p), (std::vector<std::int64_t>{0, 0, 4}));
}

TEST(UpdateWhere, NeverTrue) {
    auto p = wealth_pop(3, 4);
    const auto n = p.update_where<std::int64_t, std::int64_t>(
        {"wealth"}, "wealth", [](std::int64_t) { return false; }, [](std::int64_t) { return std::int64_t{0}; });
    EXPECT_EQ(n, 0u);
    EXPECT_EQ(wealth_of(p), (std::vector<std::int64_t>{4, 4, 4}));
}

TEST(UpdateWhere, PredicateSeesSnapshot) {
    // Predicate reads the output column; a row-by-row in-place update would
    // let a decremented value fail the predicate on a rerun, but each row is
    // judged on its pre-update value exactly once.
    auto p = wealth_pop(3);
    p.set<std::int64_t>(0, "wealth", 10);
    p.set<std::int64_t>(1, "wealth", 6);
    p.set<std::int64_t>(2, "wealth", 1);
    const auto n = p.update_where<std::int64_t, std::int64_t>(
        {"wealth"}, "wealth", [](std::int64_t w) { return w > 5; },
        [](std::int64_t w) { return w - 5; });
    EXPECT_EQ(n, 2u);
    EXPECT_EQ(wealth_of(p), (std::vector<std::int64_t>{5, 1, 1}));
}

TEST(UpdateColumn, SnapshotEquivalenceProperty) {
    // Random tables and random affine transforms; the reference copies the
    // inputs first and then writes rows in a shuffled order.
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        Population p({{"a", AttributeType::float64()}, {"b", AttributeType::float64()}});
        p.add_agents(n);
        auto a = p.column_mut<double>("a");
        auto b = p.column_mut<double>("b");
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform() * 10 - 5;
            b[i] = rng.uniform() * 10 - 5;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.uniform() < 0.2) {
                p.remove_agents({static_cast<AgentId>(i)});
            }
        }
        const double c1 = rng.uniform() * 4 - 2, c2 = rng.uniform() * 4 - 2, c3 = rng.uniform();
        auto f = [=](double x, double y) { return c1 * x + c2 * y + c3; };

        const auto sa = p.column<double>("a");
        const auto sb = p.column<double>("b");
        std::vector<double> ca(sa.begin(), sa.end()), cb(sb.begin(), sb.end());
        std::vector<double> expect = ca;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
        for (auto r : order) {
            if (p.alive_mask()[r]) {
                expect[r] = f(ca[r], cb[r]);
            }
        }
        p.update_column<double, double, double>({"a", "b"}, "a", f);
        const auto got = p.column<double>("a");
        ASSERT_EQ(std::vector<double>(got.begin(), got.end()), expect) << "trial " << trial;
    }
}

// -- aggregates --

TEST(Aggregate, Arithmetic) {
    auto p = wealth_pop(3);
    for (AgentId i = 0; i < 3; ++i) {
        p.set<std::int64_t>(i, "wealth", static_cast<std::int64_t>(i + 1));
    }
    EXPECT_EQ(p.aggregate("wealth", Aggregate::Sum), Value(std::int64_t{6}));
    EXPECT_EQ(p.aggregate("wealth", Aggregate::Mean), Value(2.0));
    EXPECT_EQ(p.aggregate("wealth", Aggregate::Min), Value(std::int64_t{1}));
    EXPECT_EQ(p.aggregate("wealth", Aggregate::Max), Value(std::int64_t{3}));
    p.remove_agents({1});
    EXPECT_EQ(p.aggregate("wealth", Aggregate::Sum), Value(std::int64_t{4}));
}

TEST(Aggregate, CountAfterAddRemove) {
    auto p = wealth_pop(5);
    p.remove_agents({0, 3});
    EXPECT_EQ(p.aggregate("wealth", Aggregate::Count), Value(std::int64_t{3}));
}

TEST(Aggregate, NonNumericRejected) {
    Population p({{"flag", AttributeType::boolean()}});
    p.add_agents(2);
    EXPECT_THROW(p.aggregate("flag", Aggregate::Sum), DtypeError);
    EXPECT_EQ(p.aggregate("flag", Aggregate::Count), Value(std::int64_t{2}));
}

TEST(Aggregate, FloatColumn) {
    Population p({{"x", AttributeType::float64()}});
    p.add_agents(2, {{"x", Value(0.25)}});
    EXPECT_EQ(p.aggregate("x", Aggregate::Sum), Value(0.5));
    EXPECT_EQ(p.aggregate("x", Aggregate::Max), Value(0.25));
}

// -- batches --

TEST(Batch, ApplyCommitsAll) {
    auto p = wealth_pop(2);
    auto b = p.begin_batch();
    b.stage(0, "wealth", Value(std::int64_t{9}));
    b.stage(1, "wealth", Value(std::int64_t{4}));
    EXPECT_EQ(b.apply(), 2u);
    EXPECT_EQ(wealth_of(p), (std::vector<std::int64_t>{9, 4}));
    EXPECT_FALSE(p.batch_open());
}

TEST(Batch, ReadsSeePreBatchValues) {
    auto p = wealth_pop(1, 7);
    auto b = p.begin_batch();
    p.set_value(0, "wealth", Value(std::int64_t{9}));
    EXPECT_EQ(p.get<std::int64_t>(0, "wealth"), 7);
    b.apply();
    EXPECT_EQ(p.get<std::int64_t>(0, "wealth"), 9);
}

TEST(Batch, DropWithoutApply) {
    auto p = wealth_pop(1, 7);
    {
        auto b = p.begin_batch();
        b.stage(0, "wealth", Value(std::int64_t{1}));
    }
    EXPECT_EQ(p.get<std::int64_t>(0, "wealth"), 7);
    EXPECT_FALSE(p.batch_open());
}

TEST(Batch, NestedBeginFails) {
    auto p = wealth_pop(1);
    auto b = p.begin_batch();
    EXPECT_THROW(p.begin_batch(), BatchError);
}

TEST(Batch, ApplyTwiceFails) {
    auto p = wealth_pop(1);
    auto b = p.begin_batch();
    b.apply();
    EXPECT_THROW(b.apply(), BatchError);
}

TEST(Batch, LastWriteWins) {
    auto p = wealth_pop(1);
    auto b = p.begin_batch();
    b.stage(0, "wealth", Value(std::int64_t{3}));
    b.stage(0, "wealth", Value(std::int64_t{8}));
    b.apply();
    EXPECT_EQ(p.get<std::int64_t>(0, "wealth"), 8);
}

TEST(Batch, StagingValidates) {
    auto p = wealth_pop(1);
    auto b = p.begin_batch();
    EXPECT_THROW(b.stage(0, "wealth", Value(1.0)), DtypeError);
    EXPECT_THROW(b.stage(5, "wealth", Value(std::int64_t{1})), LivenessError);
}

TEST(Batch, StructuralOpsBlocked) {
    auto p = wealth_pop(2);
    auto b = p.begin_batch();
    EXPECT_THROW(p.add_agents(1), BatchError);
    EXPECT_THROW(p.remove_agents({0}), BatchError);
    EXPECT_THROW(p.compact(), BatchError);
    EXPECT_THROW(p.column_mut<std::int64_t>("wealth"), BatchError);
}

TEST(Batch, InterleavedReadsNeverSeeStaged) {
    Rng rng(5);
    auto p = wealth_pop(20);
    for (AgentId i = 0; i < 20; ++i) {
        p.set<std::int64_t>(i, "wealth", static_cast<std::int64_t>(i));
    }
    auto b = p.begin_batch();
    for (int k = 0; k < 200; ++k) {
        const AgentId id = rng.below(20);
        b.stage(id, "wealth", Value(static_cast<std::int64_t>(1000 + k)));
        const AgentId probe = rng.below(20);
        ASSERT_EQ(p.get<std::int64_t>(probe, "wealth"), static_cast<std::int64_t>(probe));
    }
    b.discard();
    EXPECT_EQ(p.get<std::int64_t>(3, "wealth"), 3);
}

TEST(Batch, BatchedWritesOnlyMode) {
    auto p = wealth_pop(1);
    p.set_batched_writes_only(true);
    EXPECT_THROW(p.set_value(0, "wealth", Value(std::int64_t{2})), BatchError);
    auto b = p.begin_batch();
    p.set_value(0, "wealth", Value(std::int64_t{2}));
    b.apply();
    EXPECT_EQ(p.get<std::int64_t>(0, "wealth"), 2);
}

// -- properties over random operation sequences --

TEST(Population, RandomOpsKeepInvariants) {
    Rng rng(31337);
    Population p({{"v", AttributeType::int64()}, {"f", AttributeType::float64()}});
    std::map<AgentId, std::int64_t> shadow;
    for (int op = 0; op < 2000; ++op) {
        const auto kind = rng.below(10);
        if (kind < 4) {
            const std::size_t n = 1 + rng.below(5);
            const auto r = p.add_agents(n);
            for (AgentId id = r.first; id < r.last; ++id) {
                const auto v = static_cast<std::int64_t>(rng.below(1000));
                p.set<std::int64_t>(id, "v", v);
                shadow[id] = v;
            }
        } else if (kind < 7 && !shadow.empty()) {
            auto it = shadow.begin();
            std::advance(it, static_cast<long>(rng.below(shadow.size())));
            p.remove_agents({it->first});
            shadow.erase(it);
        } else if (kind < 8) {
            p.compact();
        } else if (!shadow.empty()) {
            auto it = shadow.begin();
            std::advance(it, static_cast<long>(rng.below(shadow.size())));
            it->second += 1;
            p.set<std::int64_t>(it->first, "v", it->second);
        }
        ASSERT_EQ(p.column<std::int64_t>("v").size(), p.column<double>("f").size());
        ASSERT_EQ(p.column<std::int64_t>("v").size(), p.rows());
        ASSERT_EQ(std::get<std::int64_t>(p.aggregate("v", Aggregate::Count)),
                  static_cast<std::int64_t>(popcount(p)));
        ASSERT_EQ(p.live_count(), shadow.size());
    }
    for (auto [id, v] : shadow) {
        EXPECT_EQ(p.get<std::int64_t>(id, "v"), v);
    }
    std::vector<AgentId> ids;
    for (auto [id, _] : shadow) {
        ids.push_back(id);
    }
    EXPECT_EQ(p.live_ids(), ids);
}

#include <gtest/gtest.h>

#include <sstream>

#include "edgechain/io/commands.hpp"

using namespace edgechain;
using namespace edgechain::io;

namespace {

const Table& table(const std::vector<Table>& tables, const std::string& name) {
    for (const auto& t : tables) {
        if (t.name == name) return t;
    }
    throw std::runtime_error("missing table " + name);
}

std::size_t column(const Table& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == name) return i;
    }
    throw std::runtime_error("missing column " + name);
}

std::string dump(const std::vector<Table>& tables) {
    std::ostringstream os;
    write_tables(os, tables);
    return os.str();
}

}  // namespace

TEST(Table, FormatsShortestRoundTrip) {
    Table t{"x", {"a", "b", "c", "d"}, {}};
    t.add(0.1, 3, true, "s");
    EXPECT_EQ(t.to_csv(), "a,b,c,d\n0.1,3,true,s\n");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
}

TEST(Commands, QueueTableCoversSweep) {
    const auto sc = load_scenario("paper_default");
    const auto tables = queue_command(sc);
    const auto& t = table(tables, "sojourn");
    EXPECT_EQ(t.rows.size(), 21u * sc.queue.sweep.size());
    const auto eq = column(t, "sojourn_equal");
    const auto mu = column(t, "service_rate");
    for (const auto& r : t.rows) {
        if (r[mu] == "50") { EXPECT_EQ(r[eq], "0.125"); }
    }
}

TEST(Commands, OptimizeMatchesOracle) {
    const auto tables = optimize_command(load_scenario("paper_default"));
    const auto& cmp = table(tables, "comparison");
    ASSERT_EQ(cmp.rows.size(), 1u);
    EXPECT_EQ(cmp.rows[0][column(cmp, "equal")], "true");
    const auto& res = table(tables, "result");
    EXPECT_EQ(res.rows[1][column(res, "steps")], "420");
}

TEST(Commands, ChannelsListsAllFour) {
    const auto tables = channels_command(load_scenario("paper_default"));
    const auto& t = table(tables, "channels");
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(t.rows[3][column(t, "mode")], "fixed");
    EXPECT_EQ(t.rows[3][column(t, "n")], "80");
}

TEST(Commands, SimulateIsDeterministic) {
    auto sc = load_scenario("paper_default");
    sc.sim.horizon = 60;
    const auto a = dump(simulate_command(sc, 3));
    const auto b = dump(simulate_command(sc, 3));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, dump(simulate_command(sc, 4)));
    const auto tables = simulate_command(sc, 3);
    EXPECT_FALSE(table(tables, "dispatch").rows.empty());
    EXPECT_FALSE(table(tables, "priority_comparison").rows.empty());
}

TEST(Commands, MonitorOnSyntheticCohort) {
    CohortSpec spec;
    spec.patients = 4;
    spec.channels = 14;
    spec.window_length = 256;
    spec.injected_channels = 3;
    spec.seed = 5;
    const auto cohort = generate_synthetic_cohort(spec);
    const auto input = windows_from_records(cohort.records(), 256);
    const auto tables = monitor_command(input, 30);
    const auto& p = table(tables, "patients");
    ASSERT_EQ(p.rows.size(), 4u);
    for (const auto& r : p.rows) {
        EXPECT_EQ(r[column(p, "status")], "Major");
        EXPECT_EQ(r[column(p, "exceed_count")], "3");
    }
    EXPECT_EQ(table(tables, "deltas").rows.size(), 4u * 14u);
    EXPECT_EQ(table(features_command(input), "features").rows.size(), 4u * 14u * 3u);
}

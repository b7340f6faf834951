#include <gtest/gtest.h>

#include <cstdlib>
#include <set>

#include "metamorph/config.hpp"
#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"
#include "metamorph/kill_matrix.hpp"
#include "metamorph/report.hpp"
#include "oracles.hpp"

using namespace metamorph;

TEST(Faults, CatalogCoversBothHalvesAndMandatorySet) {
    const auto list = faults::list_faults();
    EXPECT_GE(list.size(), 20u);
    std::set<std::string_view> names, mandatory;
    std::set<faults::Half> halves;
    for (const auto& f : list) {
        EXPECT_TRUE(names.insert(f.name).second) << f.name;
        halves.insert(f.half);
        if (f.mandatory) {
            mandatory.insert(f.name);
            EXPECT_FALSE(f.expected_killers.empty()) << f.name;
        }
    }
    EXPECT_EQ(halves.size(), 2u);
    EXPECT_EQ(mandatory, (std::set<std::string_view>{
                             "normalizer-fit-on-validation", "window-count-off-by-one",
                             "denormalize-drops-min", "correlation-missing-sqrt",
                             "loader-skips-sort", "sd-n-vs-n-minus-1"}));
}

TEST(Faults, LookupAndSingleActivation) {
    EXPECT_THROW(faults::find_fault("no-such-fault"), UnknownFault);
    const auto& f = faults::find_fault("loader-skips-sort");
    EXPECT_EQ(faults::current(), faults::FaultId::none);
    {
        faults::ScopedFault guard(f.id);
        EXPECT_TRUE(faults::active(f.id));
        EXPECT_THROW(faults::ScopedFault(faults::FaultId::shuffle_skipped), std::logic_error);
    }
    EXPECT_EQ(faults::current(), faults::FaultId::none);
}

TEST(KillMatrix, RefusesToRunWithActiveFault) {
    faults::ScopedFault guard(faults::FaultId::shuffle_skipped);
    EXPECT_THROW(kill::run_kill_matrix(faults::list_faults(), {}, {}), std::logic_error);
}

TEST(KillMatrix, CsvLayout) {
    kill::KillMatrix m;
    kill::FaultRow row;
    row.spec = &faults::list_faults().front();
    for (const auto& id : kill::mr_ids()) {
        row.cells[id] = kill::Cell::not_applicable;
    }
    row.cells["CMR-1"] = kill::Cell::killed;
    row.killed = true;
    m.rows.push_back(row);
    m.killed = 1;
    m.kill_rate = 1.0;
    const auto csv = kill::to_csv(m);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "fault,mutation_class,half,mandatory,CMR-1,CMR-2,CMR-3,CMR-4,CMR-5,CMR-6,CMR-7,"
              "CMR-8,CMR-9,CMR-10,FMR-1,FMR-2,FMR-3,FMR-4,FMR-5,FMR-6,FMR-7,FMR-8,FMR-9,killed");
    EXPECT_NE(csv.find(",killed,n/a,"), std::string::npos);
    EXPECT_NE(csv.find("# killed 1 of 1, kill rate 1.0000"), std::string::npos);
}

TEST(Config, ParsesKeysCommentsAndPaths) {
    const auto c = parse_config(
        "# harness\n"
        "timestamp_column = date\n"
        "target_column = sales   # the forecast target\n"
        "time_steps = 12\n"
        "batch_size=8\n"
        "learning_rate = 0.01\n"
        "seed = 42\n"
        "runs = 10\n"
        "train_csv = data/train.csv\n",
        "/cfg");
    EXPECT_EQ(c.csv.timestamp_column, "date");
    EXPECT_EQ(c.csv.target_column, "sales");
    EXPECT_EQ(c.mr.train.time_steps, 12u);
    EXPECT_EQ(c.mr.train.batch_size, 8u);
    EXPECT_DOUBLE_EQ(c.mr.train.learning_rate, 0.01);
    EXPECT_EQ(c.seed(), 42u);
    EXPECT_EQ(c.mr.train.seed, 42u);
    EXPECT_EQ(c.mr.n_runs, 10u);
    EXPECT_EQ(c.train_csv, std::filesystem::path("/cfg/data/train.csv"));
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_config("colour = blue\n"), MalformedConfig);
    EXPECT_THROW(parse_config("time_steps 10\n"), MalformedConfig);
    EXPECT_THROW(parse_config("time_steps = ten\n"), MalformedConfig);
    EXPECT_THROW(parse_config("batch_size = 0\n"), MalformedConfig);
    EXPECT_THROW(parse_config("runs = 1\n"), MalformedConfig);
    EXPECT_THROW(load_config("/nonexistent/harness.cfg"), MalformedConfig);
}

TEST(Config, SeedFromEnvironment) {
    ::setenv("METAMORPH_SEED", "77", 1);
    EXPECT_EQ(seed_from_env(), 77u);
    ::setenv("METAMORPH_SEED", "x", 1);
    EXPECT_THROW(seed_from_env(), MalformedConfig);
    ::unsetenv("METAMORPH_SEED");
    EXPECT_FALSE(seed_from_env().has_value());
}

TEST(Report, BaselineRoundTripIsExact) {
    const auto split = default_split(1);
    const auto b = compute_baseline(split.train, split.val, fixture::quick_config(), 3);
    const auto text = report::dump(report::to_json(b));
    EXPECT_EQ(report::baseline_from_json(report::json::parse(text)), b);
    EXPECT_THROW(report::baseline_from_json(report::json::parse("{}")), MalformedReport);
}

TEST(Report, SchemaAndTimingExclusion) {
    report::RunReport r{"corr-mrs", {}, {{"seed", 1}}, {}, 1.5};
    MrVerdict v;
    v.mr_id = "CMR-1";
    v.observed["x"] = 0.5;
    r.verdicts.push_back(v);
    const auto j = report::to_json(r);
    EXPECT_EQ(j["schema_version"], report::kSchemaVersion);
    EXPECT_EQ(j["summary"]["pass"], 1);
    auto other = r;
    other.timing_seconds = 9.0;
    EXPECT_NE(report::to_json(other), j);
    EXPECT_EQ(report::without_timing(report::to_json(other)), report::without_timing(j));
    EXPECT_EQ(report::dump(j).back(), '\n');
}

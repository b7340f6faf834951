#include "metamorph/kill_matrix.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "metamorph/correlation_mrs.hpp"
#include "metamorph/error.hpp"

namespace metamorph::kill {

using faults::Half;

std::string_view to_string(Cell cell) {
    switch (cell) {
        case Cell::killed: return "killed";
        case Cell::survived: return "survived";
        case Cell::not_applicable: return "n/a";
    }
    return "?";
}

const std::vector<std::string>& mr_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (int i = 1; i <= 10; ++i) {
            v.push_back("CMR-" + std::to_string(i));
        }
        for (int i = 1; i <= 9; ++i) {
            v.push_back("FMR-" + std::to_string(i));
        }
        return v;
    }();
    return ids;
}

std::vector<SuiteCase> synthetic_cases(std::uint64_t seed, std::size_t count) {
    std::vector<SuiteCase> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t s = seed + i;
        auto split = default_split(s);
        out.push_back({s, default_table(s), std::move(split.train), std::move(split.val)});
    }
    return out;
}

SuiteRun run_suites(const SuiteCase& c, const MatrixConfig& config, const BaselineSet* baseline,
                    std::optional<Half> half) {
    SuiteRun run;
    if (!half || half == Half::correlation) {
        run.correlation = corr_mrs::run_suite(c.table, c.seed);
    }
    if (!half || half == Half::forecaster) {
        auto mr = config.mr;
        mr.train.seed = c.seed;
        mr.seed = c.seed;
        run.baseline = baseline ? *baseline
                                : compute_baseline(c.train, c.val, mr.train, mr.n_runs);
        run.forecaster = fmr::run_suite(c.train, c.val, mr, run.baseline).verdicts;
    }
    return run;
}

namespace {

bool same_outputs(const std::vector<MrVerdict>& a, const std::vector<MrVerdict>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].status != b[i].status || a[i].observed != b[i].observed) {
            return false;
        }
    }
    return true;
}

}  // namespace

KillMatrix run_kill_matrix(std::span<const faults::FaultSpec> fault_list,
                           const std::vector<SuiteCase>& cases, const MatrixConfig& config,
                           const Progress& progress) {
    if (faults::current() != faults::FaultId::none) {
        throw std::logic_error("kill matrix needs a clean process; a fault is already active");
    }
    if (cases.empty()) {
        throw InsufficientData("kill matrix needs at least one suite case");
    }
    KillMatrix m;
    m.seed = cases.front().seed;
    m.gate_cases = cases.size();

    for (const auto& c : cases) {
        if (progress) {
            progress("clean gate, seed " + std::to_string(c.seed));
        }
        auto run = run_suites(c, config, nullptr);
        std::string failures;
        for (const auto* list : {&run.correlation, &run.forecaster}) {
            for (const auto& v : *list) {
                if (v.failed()) {
                    failures += " " + v.mr_id;
                    for (const auto& d : v.details) {
                        failures += " [" + d + "]";
                    }
                }
            }
        }
        if (!failures.empty()) {
            throw CleanBuildFails("clean build fails on seed " + std::to_string(c.seed) + ":" +
                                  failures);
        }
        m.clean.push_back(std::move(run));
    }

    const auto& reference = m.clean.front();
    for (const auto& spec : fault_list) {
        if (progress) {
            progress("fault " + std::string(spec.name));
        }
        SuiteRun run;
        {
            faults::ScopedFault guard(spec.id);
            run = run_suites(cases.front(), config, &reference.baseline, spec.half);
        }
        FaultRow row;
        row.spec = &spec;
        const auto& verdicts = spec.half == Half::correlation ? run.correlation : run.forecaster;
        const auto& clean = spec.half == Half::correlation ? reference.correlation
                                                           : reference.forecaster;
        for (const auto& id : mr_ids()) {
            row.cells[id] = Cell::not_applicable;
        }
        for (const auto& v : verdicts) {
            const bool fail = v.failed();
            row.cells[v.mr_id] = fail ? Cell::killed : Cell::survived;
            if (fail) {
                row.killers.push_back(v.mr_id);
            }
        }
        for (const auto& expected : spec.expected_killers) {
            if (std::find(row.killers.begin(), row.killers.end(), expected) == row.killers.end()) {
                row.missed_expected.emplace_back(expected);
            }
        }
        row.killed = !row.killers.empty();
        row.output_changed = !same_outputs(verdicts, clean);
        m.killed += row.killed ? 1 : 0;
        m.rows.push_back(std::move(row));
    }
    m.kill_rate = m.rows.empty() ? 0.0
                                 : static_cast<double>(m.killed) / static_cast<double>(m.rows.size());
    return m;
}

std::string to_csv(const KillMatrix& matrix) {
    std::ostringstream out;
    out << "fault,mutation_class,half,mandatory";
    for (const auto& id : mr_ids()) {
        out << ',' << id;
    }
    out << ",killed\n";
    for (const auto& row : matrix.rows) {
        out << row.spec->name << ',' << faults::to_string(row.spec->mutation_class) << ','
            << faults::to_string(row.spec->half) << ',' << (row.spec->mandatory ? "yes" : "no");
        for (const auto& id : mr_ids()) {
            out << ',' << to_string(row.cells.at(id));
        }
        out << ',' << (row.killed ? "yes" : "no") << '\n';
    }
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.4f", matrix.kill_rate);
    out << "# killed " << matrix.killed << " of " << matrix.rows.size() << ", kill rate " << rate
        << '\n';
    return out.str();
}

}  // namespace metamorph::kill

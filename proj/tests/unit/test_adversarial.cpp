#include <gtest/gtest.h>

#include <cmath>

#include "metamorph/adversarial.hpp"
#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"
#include "metamorph/forecaster.hpp"
#include "metamorph/forecaster_mrs.hpp"
#include "oracles.hpp"

using namespace metamorph;

namespace {

std::vector<std::vector<double>> windows(const TrainedModel& m, std::size_t n) {
    return fmr::adversarial_windows(m, default_split(1).val, n);
}

}  // namespace

TEST(Search, ZeroStepsIsIdentity) {
    const auto m = train(default_split(1).train, fixture::quick_config());
    adversarial::SearchConfig cfg;
    cfg.steps = 0;
    for (const auto& w : windows(m, 5)) {
        const auto r = adversarial::search(m.params, w, cfg);
        EXPECT_EQ(r.distance_sq, 0.0);
        EXPECT_DOUBLE_EQ(r.y_p, r.y_s);
        EXPECT_EQ(r.loss_trace.size(), 1u);
        for (std::size_t i = 0; i < w.size(); ++i) {
            EXPECT_NEAR(r.perturbed[i], w[i], 1e-15);
        }
    }
}

TEST(Search, LossDecreasesOverSteps) {
    const auto m = train(default_split(1).train, fixture::quick_config());
    for (const auto& w : windows(m, 8)) {
        const auto r = adversarial::search(m.params, w, {});
        ASSERT_EQ(r.loss_trace.size(), 201u);
        EXPECT_LT(r.final_loss(), r.initial_loss());
        for (double v : r.perturbed) {
            EXPECT_GE(v, 0.0);
        }
    }
}

TEST(Search, AscentFaultRaisesLoss) {
    const auto m = train(default_split(1).train, fixture::quick_config());
    const auto w = windows(m, 1).front();
    faults::ScopedFault guard(faults::FaultId::adversarial_ascent);
    const auto r = adversarial::search(m.params, w, {});
    EXPECT_GT(r.final_loss(), r.initial_loss());
}

TEST(Search, NegativeWindowRejected) {
    const auto m = fixture::fragile_model();
    EXPECT_THROW(adversarial::search(m.params, std::vector<double>(10, -0.1), {}), NonPositiveWindow);
}

TEST(Search, ParallelMatchesSerialReference) {
    const auto m = train(default_split(1).train, fixture::quick_config());
    const auto ws = windows(m, 12);
    adversarial::SearchConfig cfg;
    cfg.steps = 50;
    const auto par = adversarial::search_all(m.params, ws, cfg);
    const auto ser = adversarial::search_all_serial(m.params, ws, cfg);
    ASSERT_EQ(par.size(), ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        EXPECT_NEAR(par[i].y_p, ser[i].y_p, 1e-9);
        EXPECT_NEAR(par[i].final_loss(), ser[i].final_loss(), 1e-9);
        EXPECT_EQ(par[i].success, ser[i].success);
    }
}

TEST(Search, FragileFixtureIsFooled) {
    const auto m = fixture::fragile_model();
    const auto out = fmr::fmr9_adversarial(m, default_split(1).val, {});
    EXPECT_GT(adversarial::success_fraction(out.results), 0.5);
    EXPECT_EQ(out.verdict.status, Status::warn);
}

TEST(Search, TrainedModelIsRobust) {
    const auto m = train(default_split(1).train, fixture::quick_config());
    fmr::MrConfig cfg;
    cfg.adversarial_samples = 10;
    const auto out = fmr::fmr9_adversarial(m, default_split(1).val, cfg);
    EXPECT_LE(adversarial::success_fraction(out.results), 0.5);
    EXPECT_EQ(out.verdict.status, Status::pass);
}

#include <gtest/gtest.h>

#include <cmath>

#include "metamorph/error.hpp"
#include "metamorph/forecaster.hpp"
#include "oracles.hpp"

using namespace metamorph;

TEST(Train, DeterministicPerSeed) {
    const auto split = default_split(1);
    const auto cfg = fixture::quick_config(7);
    const auto a = train(split.train, cfg);
    const auto b = train(split.train, cfg);
    EXPECT_EQ(a, b);
    auto other = cfg;
    other.seed = 8;
    EXPECT_NE(train(split.train, other).params, a.params);
}

TEST(Train, RecordsNormalizerAndWindowCount) {
    const auto split = default_split(1);
    const auto m = train(split.train, fixture::quick_config());
    EXPECT_EQ(m.normalizer, fit_normalizer(split.train));
    EXPECT_EQ(m.n_sequences, sequence_count(750, 10, 2));
    EXPECT_TRUE(std::isfinite(m.final_train_loss));
    EXPECT_NEAR(m.final_train_loss,
                dataset_loss(m.params, make_sequences(m.normalizer.normalize(split.train.values()), 10, 2)),
                1e-15);
}

TEST(Train, LearningReducesValidationLossOnLinearSeries) {
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto series = synth_series(SynthKind::linear, 200, seed);
        const auto trn = series.head(150);
        const auto val = TimeSeries::from_values(
            std::vector<double>(series.values().begin() + 150, series.values().end()));
        auto cfg = fixture::quick_config(seed);
        cfg.epochs = 20;
        const auto m = train(trn, cfg);
        auto untrained = m;
        untrained.params = lstm::init_params(cfg.hidden_size, cfg.horizon, seed);
        improved += evaluate(m, val).validation_loss < evaluate(untrained, val).validation_loss;
    }
    EXPECT_GE(improved, 19);
}

TEST(Train, RejectsBadInput) {
    const auto cfg = fixture::quick_config();
    EXPECT_THROW(train(TimeSeries::from_values(std::vector<double>(20, 7.0)), cfg), ZeroRange);
    EXPECT_THROW(train(TimeSeries::from_values({1, 2, 3}), cfg), InsufficientData);
    auto bad = cfg;
    bad.batch_size = 0;
    EXPECT_THROW(bad.validate(), ShapeMismatch);
}

TEST(Evaluate, UsesTrainingNormalizerAndFirstWindow) {
    const auto split = default_split(2);
    const auto m = train(split.train, fixture::quick_config());
    const auto r = evaluate(m, split.val);
    EXPECT_EQ(r.n_windows, sequence_count(187, 10, 2));
    const auto window = m.normalizer.normalize(split.val.values().subspan(0, 10));
    const auto y = lstm::predict(m.params, window);
    ASSERT_EQ(r.first_forecast.size(), 2u);
    EXPECT_DOUBLE_EQ(r.first_forecast[0], m.normalizer.denormalize(y[0]));
    EXPECT_THROW(evaluate(m, split.val.head(11)), InsufficientData);
}

TEST(ModelFile, RoundTripIsBitExact) {
    const auto m = train(default_split(3).train, fixture::quick_config(3));
    const auto text = save_model(m);
    EXPECT_EQ(parse_model(text), m);
    EXPECT_EQ(save_model(parse_model(text)), text);
}

TEST(ModelFile, RejectsMalformedInput) {
    EXPECT_THROW(parse_model("{"), MalformedModel);
    EXPECT_THROW(parse_model(R"({"format":"other"})"), MalformedModel);
    auto text = save_model(fixture::fragile_model());
    text.replace(text.find("\"params\""), 8, "\"paramz\"");
    EXPECT_THROW(parse_model(text), MalformedModel);
    EXPECT_THROW(load_model(std::filesystem::path("/nonexistent/model.json")), MalformedModel);
}

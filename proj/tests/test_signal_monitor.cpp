#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "edgechain/signal_monitor.hpp"
#include "test_support.hpp"

using namespace edgechain;
using namespace edgechain::monitor;

namespace {

// Independent reference: long double, textbook two-pass formulas.
struct NaiveFeatures {
    long double mean, variance, rms, kurtosis, min, max;
};

NaiveFeatures naive_features(const std::vector<double>& x) {
    const long double n = x.size();
    long double sum = 0, sq = 0;
    for (double v : x) {
        sum += v;
        sq += static_cast<long double>(v) * v;
    }
    const long double mean = sum / n;
    long double m2 = 0, m4 = 0;
    for (double v : x) {
        const long double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    // Flat windows carry kurtosis 0 by convention.
    return {mean, m2, std::sqrt(sq / n), m2 == 0 ? 0.0L : m4 / (m2 * m2), *std::min_element(x.begin(), x.end()),
            *std::max_element(x.begin(), x.end())};
}

SignalWindow window(const std::string& patient, int channel, Session s, std::vector<double> samples) {
    return {patient, channel, s, std::move(samples)};
}

}  // namespace

TEST(ExtractFeatures, AlternatingSequence) {
    const auto fv = extract_features(std::vector<double>{1, -1, 1, -1});
    EXPECT_DOUBLE_EQ(fv.mean, 0.0);
    EXPECT_DOUBLE_EQ(fv.variance, 1.0);
    EXPECT_DOUBLE_EQ(fv.rms, 1.0);
    EXPECT_DOUBLE_EQ(fv.kurtosis, 1.0);
    EXPECT_DOUBLE_EQ(fv.min, -1.0);
    EXPECT_DOUBLE_EQ(fv.max, 1.0);
    EXPECT_FALSE(fv.degenerate);
}

TEST(ExtractFeatures, ConstantWindowIsDegenerate) {
    const auto fv = extract_features(std::vector<double>{2, 2, 2, 2});
    EXPECT_DOUBLE_EQ(fv.mean, 2.0);
    EXPECT_DOUBLE_EQ(fv.variance, 0.0);
    EXPECT_DOUBLE_EQ(fv.rms, 2.0);
    EXPECT_DOUBLE_EQ(fv.kurtosis, 0.0);
    EXPECT_DOUBLE_EQ(fv.min, 2.0);
    EXPECT_DOUBLE_EQ(fv.max, 2.0);
    EXPECT_TRUE(fv.degenerate);
}

TEST(ExtractFeatures, InexactConstantStillDegenerate) {
    const auto fv = extract_features(std::vector<double>{0.1, 0.1, 0.1});
    EXPECT_TRUE(fv.degenerate);
    EXPECT_EQ(fv.variance, 0.0);
    EXPECT_EQ(fv.kurtosis, 0.0);
}

TEST(ExtractFeatures, GaussianKurtosisNearThree) {
    std::mt19937_64 rng(42);
    const auto samples = testing_support::gaussian_samples(rng, 1'000'000);
    const auto fv = extract_features(samples);
    EXPECT_NEAR(fv.kurtosis, 3.0, 0.05);
    EXPECT_NEAR(fv.variance, 1.0, 0.01);
}

TEST(ExtractFeatures, RejectsShortOrNonFiniteWindows) {
    auto expect_invalid = [](std::vector<double> s) {
        try {
            extract_features(s);
            FAIL() << "expected an error";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
        }
    };
    expect_invalid({});
    expect_invalid({1.0});
    expect_invalid({1.0, std::numeric_limits<double>::quiet_NaN()});
    expect_invalid({1.0, std::numeric_limits<double>::infinity()});
}

TEST(ExtractFeatures, MatchesLongDoubleReference) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = testing_support::random_window(rng);
        const auto fv = extract_features(x);
        const auto ref = naive_features(x);
        const double scale = 1.0 + std::abs(static_cast<double>(ref.mean));
        EXPECT_NEAR(fv.mean, static_cast<double>(ref.mean), 1e-12 * scale);
        EXPECT_NEAR(fv.variance, static_cast<double>(ref.variance), 1e-9 * static_cast<double>(ref.variance));
        EXPECT_NEAR(fv.rms, static_cast<double>(ref.rms), 1e-12 * static_cast<double>(ref.rms));
        EXPECT_NEAR(fv.kurtosis, static_cast<double>(ref.kurtosis), 1e-8 * static_cast<double>(ref.kurtosis));
        EXPECT_EQ(fv.min, static_cast<double>(ref.min));
        EXPECT_EQ(fv.max, static_cast<double>(ref.max));
    }
}

TEST(ExtractFeatures, InvariantsHoldOnRandomWindows) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const auto x = testing_support::random_window(rng);
        const auto fv = extract_features(x);
        EXPECT_LE(fv.min, fv.mean);
        EXPECT_LE(fv.mean, fv.max);
        EXPECT_GE(fv.variance, 0.0);
        const double lhs = fv.rms * fv.rms;
        const double rhs = fv.variance + fv.mean * fv.mean;
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, rhs));
        EXPECT_EQ(fv.degenerate, fv.variance == 0.0);
        if (fv.variance > 0) { EXPECT_GE(fv.kurtosis, 1.0 - 1e-12); }
    }
}

TEST(Delta, SumsSixFeatures) {
    EXPECT_DOUBLE_EQ(delta({0, 1, 1, 1, -1, 1, false}), 3.0);
    EXPECT_DOUBLE_EQ(delta({2, 0, 2, 0, 2, 2, true}), 8.0);
}

TEST(Delta, MatchesIndependentResummation) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 100; ++i) {
        FeatureVector fv{u(rng), std::abs(u(rng)), std::abs(u(rng)), 1 + std::abs(u(rng)), u(rng), u(rng), false};
        const double fields[] = {fv.max, fv.min, fv.kurtosis, fv.rms, fv.variance, fv.mean};
        long double acc = 0;
        for (double f : fields) acc += f;
        EXPECT_NEAR(delta(fv), static_cast<double>(acc), 1e-12 * (1 + std::abs(static_cast<double>(acc))));
    }
}

TEST(CohortBaseline, ConstantAndSmallInputs) {
    std::vector<double> threes(3 * 14 * 30, 3.0);
    EXPECT_DOUBLE_EQ(cohort_baseline(threes, 14, 30).delta_bar, 3.0);
    const auto b = cohort_baseline(std::vector<double>{1, 2, 3}, 1, 1);
    EXPECT_DOUBLE_EQ(b.delta_bar, 2.0);
    EXPECT_EQ(b.channel_count, 1);
    EXPECT_EQ(b.patient_count, 1);
}

TEST(CohortBaseline, MatchesNaiveSummation) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 500);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> d(3 * 14 * 30);
        long double acc = 0;
        for (auto& x : d) {
            x = u(rng);
            acc += x;
        }
        const double expected = static_cast<double>(acc / d.size());
        EXPECT_NEAR(cohort_baseline(d, 14, 30).delta_bar, expected, 1e-12 * expected);
    }
}

TEST(CohortBaseline, Errors) {
    try {
        cohort_baseline(std::vector<double>{1, 2}, 1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }
    try {
        cohort_baseline(std::vector<double>{-1, 0, 1}, 1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BaselineDegenerate);
    }
}

TEST(ChangeIndicator, Examples) {
    EXPECT_DOUBLE_EQ(change_indicator(5, 5, 5, {7, 1, 1}), 0.0);
    EXPECT_DOUBLE_EQ(change_indicator(10, 20, 20, {100, 1, 1}), 10.0);
    for (double bar : {0.5, 3.0, 117.25}) EXPECT_DOUBLE_EQ(change_indicator(0, bar, 0, {bar, 1, 1}), 200.0);
}

TEST(ChangeIndicator, RejectsNonFinite) {
    EXPECT_THROW(change_indicator(std::nan(""), 1, 1, {1, 1, 1}), Error);
    EXPECT_THROW(change_indicator(1, 1, INFINITY, {1, 1, 1}), Error);
}

TEST(ChangeIndicator, TimeReversalAndScaleInvariance) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-100, 300);
    std::uniform_real_distribution<double> pos(0.5, 400);
    std::uniform_real_distribution<double> scale(1e-3, 1e3);
    for (int i = 0; i < 500; ++i) {
        const double b = u(rng), d = u(rng), a = u(rng), bar = pos(rng), s = scale(rng);
        const double k = change_indicator(b, d, a, {bar, 1, 1});
        EXPECT_GE(k, 0.0);
        EXPECT_DOUBLE_EQ(change_indicator(a, d, b, {bar, 1, 1}), k);
        EXPECT_NEAR(change_indicator(s * b, s * d, s * a, {s * bar, 1, 1}), k, 1e-12 * std::max(1.0, k));
    }
}

TEST(Classify, Examples) {
    ChangeProfile p{"p", {}, std::vector<double>(14, 0.0)};
    EXPECT_EQ(classify(p, 30), PatientStatus::Minor);

    p.kappa.assign(14, 0.0);
    p.kappa[0] = p.kappa[5] = p.kappa[13] = 31;
    EXPECT_EQ(classify(p, 30), PatientStatus::Major);

    p.kappa.assign(14, 0.0);
    p.kappa[13] = 500;
    EXPECT_EQ(classify(p, 30), PatientStatus::Repeat);

    p.kappa.assign(14, 0.0);
    p.kappa[2] = 30;
    EXPECT_EQ(classify(p, 30), PatientStatus::Minor);

    p.kappa.assign(14, 0.0);
    p.kappa[2] = p.kappa[3] = 45;
    EXPECT_EQ(classify(p, 30), PatientStatus::Repeat);
}

TEST(Classify, MonotoneInZetaAndOrderFree) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0, 120);
    auto severity = [](PatientStatus s) { return s == PatientStatus::Minor ? 0 : s == PatientStatus::Repeat ? 1 : 2; };
    for (int i = 0; i < 300; ++i) {
        ChangeProfile p{"p", {}, std::vector<double>(14)};
        for (auto& k : p.kappa) k = u(rng);
        std::size_t prev_count = SIZE_MAX;
        int prev_severity = 3;
        for (double zeta = 1; zeta <= 130; zeta += 3) {
            const auto c = exceed_count(p.kappa, zeta);
            EXPECT_LE(c, prev_count);
            prev_count = c;
            const int sev = severity(classify(p, zeta));
            // Minor never moves towards Major as zeta rises.
            if (prev_severity == 0) { EXPECT_EQ(sev, 0); }
            if (sev == 2) { EXPECT_EQ(prev_severity == 3 || prev_severity == 2, true); }
            prev_severity = sev;
        }
        auto shuffled = p;
        std::shuffle(shuffled.kappa.begin(), shuffled.kappa.end(), rng);
        EXPECT_EQ(classify(shuffled, 30), classify(p, 30));
    }
}

TEST(ShareDecision, PayloadPerStatus) {
    ChangeProfile p{"p7", {1, 2, 3}, {10, 40, 35}};
    std::vector<FeatureVector> fvs(3);
    std::vector<SignalWindow> raw{window("p7", 1, Session::Before, {1, 2})};

    const auto major = share_decision(PatientStatus::Major, p, 30, fvs, raw);
    EXPECT_EQ(major.kind, PayloadKind::EmergencyNotificationWithRaw);
    EXPECT_EQ(major.raw.size(), 1u);
    EXPECT_EQ(major.features.size(), 3u);
    EXPECT_TRUE(major.goes_on_chain());

    const auto minor = share_decision(PatientStatus::Minor, p, 30, fvs, raw);
    EXPECT_EQ(minor.kind, PayloadKind::FeaturesOnly);
    EXPECT_TRUE(minor.raw.empty());
    EXPECT_EQ(minor.features.size(), 3u);
    EXPECT_TRUE(minor.goes_on_chain());

    const auto repeat = share_decision(PatientStatus::Repeat, p, 30, fvs, raw);
    EXPECT_EQ(repeat.kind, PayloadKind::PhysicianRepeatNotice);
    EXPECT_EQ(repeat.flagged_channels, (std::vector<int>{2, 3}));
    EXPECT_TRUE(repeat.raw.empty());
    EXPECT_TRUE(repeat.features.empty());
    EXPECT_FALSE(repeat.goes_on_chain());
}

TEST(AssessCohort, MissingSessionIsIncompleteData) {
    std::vector<SignalWindow> w{window("a", 1, Session::Before, {1, -1}), window("a", 1, Session::During, {1, -1})};
    try {
        assess_cohort(w);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IncompleteData);
    }
}

TEST(AssessCohort, MismatchedChannelSetsAreIncomplete) {
    std::vector<SignalWindow> w;
    for (auto s : {Session::Before, Session::During, Session::After}) {
        w.push_back(window("a", 1, s, {1, -1}));
        w.push_back(window("b", 2, s, {1, -1}));
    }
    EXPECT_THROW(assess_cohort(w), Error);
}

// Alternating +-1 windows have delta = 3. Shifting during/after by o gives
// mean o, var 1, rms sqrt(1+o^2), kurtosis 1, min o-1, max o+1, so
// delta = 3o + 2 + sqrt(1 + o^2).
TEST(AssessCohort, AnalyticInjectionOracle) {
    constexpr int kChannels = 14;
    constexpr int kPatients = 4;
    const double offset = 40.0;
    const double shifted_delta = 3 * offset + 2 + std::sqrt(1 + offset * offset);
    for (int k : {0, 1, 2, 3, 5}) {
        std::vector<SignalWindow> w;
        for (int p = 0; p < kPatients; ++p) {
            for (int c = 1; c <= kChannels; ++c) {
                const bool injected = c <= k;
                for (auto s : {Session::Before, Session::During, Session::After}) {
                    const double add = (injected && s != Session::Before) ? offset : 0.0;
                    w.push_back(window("p" + std::to_string(p), c, s, {1 + add, -1 + add, 1 + add, -1 + add}));
                }
            }
        }
        const double total = kPatients * (kChannels * 3 * 3.0 + k * 2 * (shifted_delta - 3.0));
        const double bar = total / (3.0 * kChannels * kPatients);
        const double expected_kappa = std::abs(3.0 - shifted_delta) / bar * 100.0;

        const auto cohort = assess_cohort(w, 30.0);
        EXPECT_NEAR(cohort.baseline.delta_bar, bar, 1e-9 * bar);
        for (const auto& pa : cohort.patients) {
            for (const auto& cd : pa.channels) {
                if (cd.channel_id <= k) {
                    EXPECT_NEAR(cd.kappa, expected_kappa, 1e-9 * expected_kappa);
                    EXPECT_GT(cd.kappa, 30.0);
                } else {
                    EXPECT_EQ(cd.kappa, 0.0);
                }
            }
            const auto want = k == 0 ? PatientStatus::Minor : k <= 2 ? PatientStatus::Repeat : PatientStatus::Major;
            EXPECT_EQ(pa.status, want) << "k=" << k;
            if (want == PatientStatus::Major) { EXPECT_EQ(pa.payload.raw.size(), 3u * kChannels); }
        }
    }
}

TEST(AssessCohort, FrozenBaselineIsUsedVerbatim) {
    std::vector<SignalWindow> w;
    for (auto s : {Session::Before, Session::During, Session::After}) {
        const double add = s == Session::Before ? 0.0 : 1.0;
        w.push_back(window("a", 1, s, {1 + add, -1 + add}));
    }
    const CohortBaseline frozen{1000.0, 1, 1};
    const auto out = assess_cohort(w, 30.0, frozen);
    EXPECT_EQ(out.baseline.delta_bar, 1000.0);
    const double shifted = 3 * 1.0 + 2 + std::sqrt(2.0);
    EXPECT_NEAR(out.patients[0].channels[0].kappa, std::abs(shifted - 3.0) / 1000.0 * 100.0, 1e-12);
}

#pragma once

// Edge-side patient monitoring: time-domain features per EEG window, the
// per-channel statistic delta, the session-to-session change indicator kappa
// and the Major/Minor/Repeat rule that decides what is shared on-chain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edgechain/error.hpp"

namespace edgechain::monitor {

enum class Session { Before, During, After };

constexpr std::string_view to_string(Session s) noexcept {
    switch (s) {
        case Session::Before: return "before";
        case Session::During: return "during";
        case Session::After:  return "after";
    }
    return "?";
}

inline std::optional<Session> parse_session(std::string_view text) noexcept {
    if (text == "before") return Session::Before;
    if (text == "during") return Session::During;
    if (text == "after") return Session::After;
    return std::nullopt;
}

inline constexpr double kDefaultZeta = 30.0;
inline constexpr std::size_t kDefaultWindowLength = 1920;  // 15 s at 128 Hz

struct SignalWindow {
    std::string patient_id;
    int channel_id = 1;
    Session session = Session::Before;
    std::vector<double> samples;  // microvolts
};

struct FeatureVector {
    double mean = 0.0;
    double variance = 0.0;
    double rms = 0.0;
    double kurtosis = 0.0;
    double min = 0.0;
    double max = 0.0;
    bool degenerate = false;

    bool operator==(const FeatureVector&) const = default;
};

/// Mean, population variance, RMS, non-excess kurtosis, min and max of a
/// window. A flat window (all samples equal) has no defined kurtosis: it is
/// reported as 0 with `degenerate` set.
inline FeatureVector extract_features(std::span<const double> samples) {
    const std::size_t count = samples.size();
    if (count < 2) {
        fail(ErrorKind::InvalidInput, "window needs at least 2 samples, got " + std::to_string(count));
    }
    double lo = samples[0];
    double hi = samples[0];
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : samples) {
        if (!std::isfinite(x)) fail(ErrorKind::InvalidInput, "window contains a non-finite sample");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum += x;
        sum_sq += x * x;
    }
    const double n = static_cast<double>(count);

    FeatureVector fv;
    fv.min = lo;
    fv.max = hi;
    fv.rms = std::sqrt(sum_sq / n);
    if (lo == hi) {
        fv.mean = lo;
        fv.degenerate = true;
        return fv;
    }
    fv.mean = std::clamp(sum / n, lo, hi);

    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : samples) {
        const double d = x - fv.mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    fv.variance = m2;
    fv.kurtosis = m4 / (m2 * m2);
    return fv;
}

inline FeatureVector extract_features(const SignalWindow& window) {
    return extract_features(std::span<const double>(window.samples));
}

/// Plain sum of the six features (units are mixed on purpose).
inline double delta(const FeatureVector& fv) noexcept {
    return fv.mean + fv.variance + fv.rms + fv.kurtosis + fv.min + fv.max;
}

struct CohortBaseline {
    double delta_bar = 0.0;
    int channel_count = 0;
    int patient_count = 0;
};

/// Mean of the 3*C*P delta values collected offline. Frozen once computed.
inline CohortBaseline cohort_baseline(std::span<const double> deltas, int channels, int patients) {
    if (channels < 1 || patients < 1) {
        fail(ErrorKind::InvalidInput, "cohort baseline needs C >= 1 and P >= 1");
    }
    const auto expected = static_cast<std::size_t>(3) * static_cast<std::size_t>(channels) *
                          static_cast<std::size_t>(patients);
    if (deltas.size() != expected) {
        fail(ErrorKind::InvalidInput, "cohort baseline expects " + std::to_string(expected) +
                                          " delta values, got " + std::to_string(deltas.size()));
    }
    double sum = 0.0;
    for (double d : deltas) {
        if (!std::isfinite(d)) fail(ErrorKind::InvalidInput, "non-finite delta in cohort baseline");
        sum += d;
    }
    const double mean = sum / static_cast<double>(expected);
    if (!(mean > 0.0)) {
        fail(ErrorKind::BaselineDegenerate, "cohort mean delta must be positive");
    }
    return {mean, channels, patients};
}

/// Percent change of delta across before/during/after, normalised by the
/// cohort mean.
inline double change_indicator(double delta_before, double delta_during, double delta_after,
                               const CohortBaseline& baseline) {
    if (!std::isfinite(delta_before) || !std::isfinite(delta_during) || !std::isfinite(delta_after) ||
        !std::isfinite(baseline.delta_bar)) {
        fail(ErrorKind::InvalidInput, "change indicator inputs must be finite");
    }
    if (!(baseline.delta_bar > 0.0)) {
        fail(ErrorKind::BaselineDegenerate, "cohort mean delta must be positive");
    }
    const double jumps = std::abs(delta_before - delta_during) + std::abs(delta_during - delta_after);
    return jumps / baseline.delta_bar * 100.0;
}

struct ChangeProfile {
    std::string patient_id;
    std::vector<int> channel_ids;  // parallel to kappa
    std::vector<double> kappa;     // percent
};

enum class PatientStatus { Major, Minor, Repeat };

constexpr std::string_view to_string(PatientStatus s) noexcept {
    switch (s) {
        case PatientStatus::Major:  return "Major";
        case PatientStatus::Minor:  return "Minor";
        case PatientStatus::Repeat: return "Repeat";
    }
    return "?";
}

/// Zero-norm of [kappa - zeta]^+, i.e. channels strictly above the threshold.
inline std::size_t exceed_count(std::span<const double> kappa, double zeta) noexcept {
    return static_cast<std::size_t>(std::count_if(kappa.begin(), kappa.end(), [zeta](double k) { return k > zeta; }));
}

inline PatientStatus classify(const ChangeProfile& profile, double zeta = kDefaultZeta) {
    const std::size_t c = exceed_count(profile.kappa, zeta);
    if (c > 2) return PatientStatus::Major;
    if (c == 0) return PatientStatus::Minor;
    return PatientStatus::Repeat;
}

enum class PayloadKind { EmergencyNotificationWithRaw, FeaturesOnly, PhysicianRepeatNotice };

constexpr std::string_view to_string(PayloadKind k) noexcept {
    switch (k) {
        case PayloadKind::EmergencyNotificationWithRaw: return "EmergencyNotificationWithRaw";
        case PayloadKind::FeaturesOnly:                 return "FeaturesOnly";
        case PayloadKind::PhysicianRepeatNotice:        return "PhysicianRepeatNotice";
    }
    return "?";
}

struct SharePayload {
    PayloadKind kind = PayloadKind::FeaturesOnly;
    std::string patient_id;
    std::vector<SignalWindow> raw;
    std::vector<FeatureVector> features;
    std::vector<int> flagged_channels;

    /// Repeat notices go to the physician, not to the chain.
    bool goes_on_chain() const noexcept { return kind != PayloadKind::PhysicianRepeatNotice; }
};

inline SharePayload share_decision(PatientStatus status, const ChangeProfile& profile, double zeta,
                                   std::vector<FeatureVector> features, std::vector<SignalWindow> raw) {
    SharePayload payload;
    payload.patient_id = profile.patient_id;
    switch (status) {
        case PatientStatus::Major:
            payload.kind = PayloadKind::EmergencyNotificationWithRaw;
            payload.raw = std::move(raw);
            payload.features = std::move(features);
            break;
        case PatientStatus::Minor:
            payload.kind = PayloadKind::FeaturesOnly;
            payload.features = std::move(features);
            break;
        case PatientStatus::Repeat:
            payload.kind = PayloadKind::PhysicianRepeatNotice;
            for (std::size_t i = 0; i < profile.kappa.size(); ++i) {
                if (profile.kappa[i] > zeta) {
                    payload.flagged_channels.push_back(i < profile.channel_ids.size() ? profile.channel_ids[i]
                                                                                      : static_cast<int>(i) + 1);
                }
            }
            break;
    }
    return payload;
}

// ---------------------------------------------------------------------------
// Cohort pipeline

struct ChannelDeltas {
    int channel_id = 0;
    FeatureVector before, during, after;
    double delta_before = 0.0, delta_during = 0.0, delta_after = 0.0;
    double kappa = 0.0;
};

struct PatientAssessment {
    std::string patient_id;
    std::vector<ChannelDeltas> channels;  // ascending channel id
    ChangeProfile profile;
    PatientStatus status = PatientStatus::Minor;
    SharePayload payload;
};

struct CohortAssessment {
    CohortBaseline baseline;
    std::vector<PatientAssessment> patients;  // ascending patient id
};

/// Runs the full edge pipeline over a cohort. Each (patient, channel) must
/// have one window per session and every patient must cover the same channel
/// set; when several windows exist for a session the first one is used.
/// Passing a frozen baseline skips the cohort-mean computation.
inline CohortAssessment assess_cohort(std::span<const SignalWindow> windows, double zeta = kDefaultZeta,
                                      std::optional<CohortBaseline> frozen = std::nullopt) {
    using Key = std::pair<std::string, int>;
    struct Slots {
        const SignalWindow* by_session[3] = {nullptr, nullptr, nullptr};
    };
    std::map<Key, Slots> grouped;
    for (const auto& w : windows) {
        auto& slot = grouped[{w.patient_id, w.channel_id}].by_session[static_cast<int>(w.session)];
        if (slot == nullptr) slot = &w;
    }
    if (grouped.empty()) fail(ErrorKind::IncompleteData, "no signal windows to assess");

    std::map<std::string, std::vector<int>> channels_of;
    for (const auto& [key, slots] : grouped) {
        for (int s = 0; s < 3; ++s) {
            if (slots.by_session[s] == nullptr) {
                fail(ErrorKind::IncompleteData, "patient " + key.first + " channel " + std::to_string(key.second) +
                                                    " is missing the '" +
                                                    std::string(to_string(static_cast<Session>(s))) + "' session");
            }
        }
        channels_of[key.first].push_back(key.second);
    }
    const auto& reference = channels_of.begin()->second;
    for (const auto& [patient, chans] : channels_of) {
        if (chans != reference) {
            fail(ErrorKind::IncompleteData, "patient " + patient + " does not cover the cohort channel set");
        }
    }

    CohortAssessment out;
    std::vector<double> all_deltas;
    all_deltas.reserve(grouped.size() * 3);
    for (const auto& [patient, chans] : channels_of) {
        PatientAssessment pa;
        pa.patient_id = patient;
        for (int ch : chans) {
            const auto& slots = grouped.at({patient, ch});
            ChannelDeltas cd;
            cd.channel_id = ch;
            cd.before = extract_features(*slots.by_session[0]);
            cd.during = extract_features(*slots.by_session[1]);
            cd.after = extract_features(*slots.by_session[2]);
            cd.delta_before = delta(cd.before);
            cd.delta_during = delta(cd.during);
            cd.delta_after = delta(cd.after);
            all_deltas.insert(all_deltas.end(), {cd.delta_before, cd.delta_during, cd.delta_after});
            pa.channels.push_back(cd);
        }
        out.patients.push_back(std::move(pa));
    }
    out.baseline = frozen ? *frozen
                          : cohort_baseline(all_deltas, static_cast<int>(reference.size()),
                                            static_cast<int>(channels_of.size()));

    for (auto& pa : out.patients) {
        pa.profile.patient_id = pa.patient_id;
        std::vector<FeatureVector> features;
        std::vector<SignalWindow> raw;
        for (auto& cd : pa.channels) {
            cd.kappa = change_indicator(cd.delta_before, cd.delta_during, cd.delta_after, out.baseline);
            pa.profile.channel_ids.push_back(cd.channel_id);
            pa.profile.kappa.push_back(cd.kappa);
            features.insert(features.end(), {cd.before, cd.during, cd.after});
        }
        pa.status = classify(pa.profile, zeta);
        if (pa.status == PatientStatus::Major) {
            for (int ch : reference) {
                const auto& slots = grouped.at({pa.patient_id, ch});
                for (const auto* w : slots.by_session) raw.push_back(*w);
            }
        }
        pa.payload = share_decision(pa.status, pa.profile, zeta, std::move(features), std::move(raw));
    }
    return out;
}

}  // namespace edgechain::monitor

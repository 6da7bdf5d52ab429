#pragma once

// Signal CSV ingestion (`patient,channel,session,sample_index,value`) and the
// synthetic EEG cohort generator.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "edgechain/error.hpp"
#include "edgechain/io/table.hpp"
#include "edgechain/signal_monitor.hpp"

namespace edgechain::io {

using monitor::Session;
using monitor::SignalWindow;

inline constexpr std::string_view kSignalHeader = "patient,channel,session,sample_index,value";

struct SignalRecord {
    std::string patient_id;
    int channel_id = 1;
    Session session = Session::Before;
    std::int64_t sample_index = 0;
    double value = 0.0;
};

struct IngestResult {
    std::vector<SignalWindow> windows;  // ordered by (patient, channel, session, window)
    std::size_t dropped_samples = 0;    // trailing partial windows
};

namespace detail {

template <class T>
bool parse_number(std::string_view text, T& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

}  // namespace detail

/// Groups samples per (patient, channel, session) and cuts them into windows
/// of `window_length`. `rows` holds each record's 1-based CSV row for errors
/// (may be empty for in-memory records).
inline IngestResult windows_from_records(const std::vector<SignalRecord>& records, std::size_t window_length,
                                         const std::vector<std::size_t>& rows = {}) {
    if (window_length < 2) fail(ErrorKind::InvalidInput, "window length must be at least 2");
    using Key = std::tuple<std::string, int, int>;
    struct Sample {
        std::int64_t index;
        double value;
        std::size_t row;
    };
    std::map<Key, std::vector<Sample>> groups;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        groups[{r.patient_id, r.channel_id, static_cast<int>(r.session)}].push_back(
            {r.sample_index, r.value, rows.empty() ? i + 1 : rows[i]});
    }
    IngestResult out;
    for (auto& [key, samples] : groups) {
        std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.index < b.index; });
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto expected = static_cast<std::int64_t>(i);
            if (samples[i].index == expected) continue;
            const auto& [patient, channel, session] = key;
            if (i > 0 && samples[i].index == samples[i - 1].index) {
                fail(ErrorKind::Parse, fmt::format("row {}: duplicate sample_index {} for patient {} channel {} session {}",
                                                   samples[i].row, samples[i].index, patient, channel,
                                                   monitor::to_string(static_cast<Session>(session))));
            }
            fail(ErrorKind::Parse, fmt::format("row {}: sample_index {} breaks contiguity (expected {}) for patient {} "
                                               "channel {} session {}",
                                               samples[i].row, samples[i].index, expected, patient, channel,
                                               monitor::to_string(static_cast<Session>(session))));
        }
        const std::size_t full = samples.size() / window_length;
        out.dropped_samples += samples.size() - full * window_length;
        for (std::size_t w = 0; w < full; ++w) {
            SignalWindow win;
            win.patient_id = std::get<0>(key);
            win.channel_id = std::get<1>(key);
            win.session = static_cast<Session>(std::get<2>(key));
            win.samples.reserve(window_length);
            for (std::size_t k = 0; k < window_length; ++k) win.samples.push_back(samples[w * window_length + k].value);
            out.windows.push_back(std::move(win));
        }
    }
    return out;
}

inline IngestResult ingest_signals(std::istream& in, std::size_t window_length) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kSignalHeader) {
        fail(ErrorKind::Parse, fmt::format("row 1: expected header '{}'", kSignalHeader));
    }
    std::vector<SignalRecord> records;
    std::vector<std::size_t> rows;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        const auto fields = split_csv_line(text);
        if (fields.size() != 5) fail(ErrorKind::Parse, fmt::format("row {}: expected 5 fields, got {}", row, fields.size()));
        SignalRecord r;
        r.patient_id = std::string(detail::trim(fields[0]));
        if (r.patient_id.empty()) fail(ErrorKind::Parse, fmt::format("row {}: empty patient id", row));
        if (!detail::parse_number(detail::trim(fields[1]), r.channel_id) || r.channel_id < 1) {
            fail(ErrorKind::Parse, fmt::format("row {}: channel must be a positive integer", row));
        }
        const auto session = monitor::parse_session(detail::trim(fields[2]));
        if (!session) {
            fail(ErrorKind::Parse, fmt::format("row {}: unknown session '{}' (expected before, during or after)", row,
                                               detail::trim(fields[2])));
        }
        r.session = *session;
        if (!detail::parse_number(detail::trim(fields[3]), r.sample_index) || r.sample_index < 0) {
            fail(ErrorKind::Parse, fmt::format("row {}: sample_index must be a non-negative integer", row));
        }
        if (!detail::parse_number(detail::trim(fields[4]), r.value) || !std::isfinite(r.value)) {
            fail(ErrorKind::Parse, fmt::format("row {}: value must be a finite number", row));
        }
        records.push_back(std::move(r));
        rows.push_back(row);
    }
    return windows_from_records(records, window_length, rows);
}

inline IngestResult ingest_signals(const std::string& path, std::size_t window_length) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Configuration, "cannot open signal file " + path);
    return ingest_signals(in, window_length);
}

inline void write_signals(std::ostream& os, const std::vector<SignalRecord>& records) {
    os << kSignalHeader << '\n';
    for (const auto& r : records) {
        os << fmt::format("{},{},{},{},{}\n", r.patient_id, r.channel_id, monitor::to_string(r.session), r.sample_index,
                          r.value);
    }
}

// ---------------------------------------------------------------------------
// Synthetic cohort

struct CohortSpec {
    int patients = 30;
    int channels = 14;
    std::size_t window_length = monitor::kDefaultWindowLength;
    int injected_channels = 0;  // k
    double offset = 100.0;      // microvolts added to during/after of injected channels
    double baseline_sd = 10.0;  // microvolts
    std::uint64_t seed = 1;
};

struct SyntheticCohort {
    std::vector<SignalWindow> windows;  // one per (patient, channel, session), in ingest order
    std::map<std::string, std::vector<int>> injected;  // patient -> channels shifted

    std::vector<SignalRecord> records() const {
        std::vector<SignalRecord> out;
        for (const auto& w : windows) {
            for (std::size_t k = 0; k < w.samples.size(); ++k) {
                out.push_back({w.patient_id, w.channel_id, w.session, static_cast<std::int64_t>(k), w.samples[k]});
            }
        }
        return out;
    }
};

inline std::string patient_label(int index) { return fmt::format("P{:03}", index); }

/// Each (patient, channel) draws one Gaussian base sequence; the three
/// sessions are independent permutations of it, so an untouched channel has
/// the same six features (up to summation order) in every session. The
/// during/after sessions of k randomly chosen channels per patient are
/// shifted by `offset`.
inline SyntheticCohort generate_synthetic_cohort(const CohortSpec& spec) {
    if (spec.patients < 1 || spec.channels < 1) fail(ErrorKind::InvalidInput, "cohort needs patients and channels");
    if (spec.injected_channels < 0 || spec.injected_channels > spec.channels) {
        fail(ErrorKind::InvalidInput, "injected channel count must lie in [0, C]");
    }
    if (spec.window_length < 2) fail(ErrorKind::InvalidInput, "window length must be at least 2");
    if (!(spec.baseline_sd > 0.0)) fail(ErrorKind::InvalidInput, "baseline sd must be positive");

    std::mt19937_64 rng(spec.seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto gaussian = [&] {  // Box-Muller, one value per call
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    };

    SyntheticCohort out;
    const std::size_t n = spec.window_length;
    out.windows.reserve(static_cast<std::size_t>(spec.patients * spec.channels) * 3);
    std::vector<double> base(n);
    for (int p = 1; p <= spec.patients; ++p) {
        const auto pid = patient_label(p);
        std::vector<int> chans(static_cast<std::size_t>(spec.channels));
        std::iota(chans.begin(), chans.end(), 1);
        for (int i = 0; i < spec.injected_channels; ++i) {
            const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(spec.channels - i));
            std::swap(chans[static_cast<std::size_t>(i)], chans[j]);
        }
        std::vector<int> injected(chans.begin(), chans.begin() + spec.injected_channels);
        std::sort(injected.begin(), injected.end());
        out.injected[pid] = injected;

        for (int c = 1; c <= spec.channels; ++c) {
            const bool shifted = std::binary_search(injected.begin(), injected.end(), c);
            for (auto& x : base) x = spec.baseline_sd * gaussian();
            for (Session s : {Session::Before, Session::During, Session::After}) {
                const double add = (shifted && s != Session::Before) ? spec.offset : 0.0;
                SignalWindow w{pid, c, s, base};
                for (std::size_t i = n; i > 1; --i) {
                    const auto j = static_cast<std::size_t>(rng() % i);
                    std::swap(w.samples[i - 1], w.samples[j]);
                }
                for (auto& x : w.samples) x += add;
                out.windows.push_back(std::move(w));
            }
        }
    }
    return out;
}

}  // namespace edgechain::io

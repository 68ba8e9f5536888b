#pragma once

#include "shotlab/types.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shotlab {

inline constexpr std::string_view kCsvHeader = "t_ms,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z";

/// Parses a CSV log. The first line must be exactly kCsvHeader. Line numbers in
/// errors are 1-based and count the header.
RawSession parse_csv_log(std::string_view text, SessionMeta meta = {});
std::string write_csv_log(const RawSession& session);

/// Decodes one newline-delimited JSON frame
/// {"t_ms":int,"ax":r,"ay":r,"az":r,"gx":r,"gy":r,"gz":r}. Unknown keys are ignored.
ImuSample parse_stream_frame(std::string_view line);
/// Inverse of parse_stream_frame; `player_id` is attached when non-empty.
std::string write_stream_frame(const ImuSample& s, std::string_view player_id = {});

struct Gap {
    std::size_t start_index = 0;  // sample index just before the hole
    std::size_t missing_slots = 0;

    bool operator==(const Gap&) const = default;
};

struct GapReport {
    std::vector<Gap> gaps;
    double loss_fraction = 0.0;
    std::size_t expected_slots = 0;
    std::size_t missing_slots = 0;
};

/// Flags every step longer than 1.5 nominal periods.
GapReport detect_gaps(const RawSession& session);

/// Index of the first sample at or after the last grid point, i.e. the last
/// sample resample_uniform reads. Throws SessionTooShort if none exists.
std::size_t window_last_sample(const RawSession& session, const PipelineConfig& cfg);

/// Linearly interpolates each channel onto the uniform grid anchored at the
/// first sample. Grid times are whole milliseconds, so data already on the
/// grid is reproduced exactly.
ChannelSet resample_uniform(const RawSession& session, const PipelineConfig& cfg);

} // namespace shotlab

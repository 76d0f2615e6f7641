#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <tuple>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fusionhar/core.hpp"

namespace fusionhar {

// ---------------------------------------------------------------------------
// CSV primitives
// ---------------------------------------------------------------------------

namespace csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Splits one line into fields. Double-quoted fields may contain commas; a
// doubled quote inside quotes is a literal quote.
inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

// Lines with CR/LF handling; a UTF-8 BOM on the first line is dropped.
inline std::vector<std::string_view> split_lines(std::string_view bytes) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Shortest representation that round-trips.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace csv

// ---------------------------------------------------------------------------
// Timestamps
// ---------------------------------------------------------------------------

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian date.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  out = 0;
  for (std::size_t i = 0; i < count; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    out = out * 10 + (c - '0');
  }
  pos += count;
  return true;
}

inline std::optional<TimestampMs> parse_iso8601(std::string_view s) {
  std::size_t p = 0;
  int year, month, day, hour = 0, minute = 0, second = 0;
  if (!read_digits(s, p, 4, year) || p >= s.size() || s[p++] != '-') return std::nullopt;
  if (!read_digits(s, p, 2, month) || p >= s.size() || s[p++] != '-') return std::nullopt;
  if (!read_digits(s, p, 2, day)) return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
  std::int64_t ms = 0;
  if (p < s.size()) {
    if (s[p] != 'T' && s[p] != 't' && s[p] != ' ') return std::nullopt;
    ++p;
    if (!read_digits(s, p, 2, hour) || p >= s.size() || s[p++] != ':') return std::nullopt;
    if (!read_digits(s, p, 2, minute)) return std::nullopt;
    if (p < s.size() && s[p] == ':') {
      ++p;
      if (!read_digits(s, p, 2, second)) return std::nullopt;
      if (p < s.size() && (s[p] == '.' || s[p] == ',')) {
        ++p;
        int place = 100;
        std::size_t digits = 0;
        while (p < s.size() && s[p] >= '0' && s[p] <= '9') {
          ms += (s[p] - '0') * place;  // digits past milliseconds are truncated
          place /= 10;
          ++p;
          ++digits;
        }
        if (digits == 0) return std::nullopt;
      }
    }
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  }
  std::int64_t offset_min = 0;
  if (p < s.size()) {
    if (s[p] == 'Z' || s[p] == 'z') {
      ++p;
    } else if (s[p] == '+' || s[p] == '-') {
      int sign = s[p] == '+' ? 1 : -1;
      ++p;
      int oh, om = 0;
      if (!read_digits(s, p, 2, oh)) return std::nullopt;
      if (p < s.size() && s[p] == ':') ++p;
      if (p < s.size() && !read_digits(s, p, 2, om)) return std::nullopt;
      offset_min = sign * (oh * 60 + om);
    } else {
      return std::nullopt;
    }
  }
  if (p != s.size()) return std::nullopt;
  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  const std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_min * 60;
  return secs * 1000 + ms;
}

}  // namespace detail

// Integer or fractional milliseconds since epoch, or ISO-8601. Sub-millisecond
// parts are truncated toward zero.
inline std::optional<TimestampMs> parse_timestamp(std::string_view s) {
  s = csv::trim(s);
  if (s.empty()) return std::nullopt;
  if (auto v = csv::parse_double(s)) {
    if (!std::isfinite(*v) || std::fabs(*v) > 9.0e15) return std::nullopt;
    return static_cast<TimestampMs>(std::trunc(*v));
  }
  return detail::parse_iso8601(s);
}

// ---------------------------------------------------------------------------
// Header recognition
// ---------------------------------------------------------------------------

// Lowercased, trimmed, with a trailing "(unit)" suffix removed.
inline std::string canonical_header(std::string_view raw) {
  std::string_view s = csv::trim(raw);
  if (!s.empty() && s.back() == ')') {
    auto open = s.rfind('(');
    if (open != std::string_view::npos) s = csv::trim(s.substr(0, open));
  }
  std::string out = csv::lower(s);
  for (char& c : out)
    if (c == '_') c = ' ';
  return out;
}

namespace detail {

enum class ColumnRole { Timestamp, Channel, Label, KalmanFiltered };

struct ColumnMatch {
  ColumnRole role;
  std::size_t channel = 0;
};

inline std::optional<ColumnMatch> match_column(std::string_view raw) {
  const std::string h = canonical_header(raw);
  if (h == "timestamp" || h == "time") return ColumnMatch{ColumnRole::Timestamp};
  if (h == "label" || h == "activity") return ColumnMatch{ColumnRole::Label};
  static constexpr std::array<std::string_view, 3> prefixes = {"acceleration ", "angular velocity ",
                                                               "magnetic field "};
  static constexpr std::string_view axes = "xyz";
  for (std::size_t s = 0; s < 3; ++s) {
    if (h.size() == prefixes[s].size() + 1 && h.starts_with(prefixes[s])) {
      auto a = axes.find(h.back());
      if (a != std::string_view::npos) return ColumnMatch{ColumnRole::Channel, 3 * s + a};
    }
  }
  if (h.size() == 17 && h.starts_with("kalman filtered ") && axes.find(h.back()) != std::string_view::npos)
    return ColumnMatch{ColumnRole::KalmanFiltered};
  return std::nullopt;
}

struct RawRow {
  TimestampMs timestamp;
  std::array<double, kNumChannels> values;
  std::string label;
};

inline Dataset assemble_dataset(std::vector<RawRow> rows, LabelScheme scheme) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RawRow& a, const RawRow& b) { return a.timestamp < b.timestamp; });
  std::vector<std::string> names;
  names.reserve(rows.size());
  for (const auto& r : rows) names.push_back(r.label);
  require(!rows.empty(), ErrorKind::Parse, "no valid data rows");
  auto encoded = encode_labels(names, scheme);
  std::vector<SyncRecord> records;
  records.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SyncRecord rec;
    rec.timestamp = rows[i].timestamp;
    for (std::size_t c = 0; c < kNumChannels; ++c) rec.sensor(static_cast<SensorKind>(c / 3))[c % 3] = rows[i].values[c];
    rec.label = encoded.indices[i];
    records.push_back(rec);
  }
  return Dataset(std::move(records), std::move(encoded.vocabulary));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Primary (WitMotion-style) files
// ---------------------------------------------------------------------------

struct TimedVec3 {
  TimestampMs timestamp = 0;
  Vec3 value{};

  bool operator==(const TimedVec3&) const = default;
};

struct RawSensorStream {
  SensorKind kind = SensorKind::Accelerometer;
  std::vector<TimedVec3> samples;
  // Per-sample activity names; empty when the file carries none.
  std::vector<std::string> labels;
  // Applies to every sample when `labels` is empty.
  std::optional<std::string> file_label;

  std::string label_at(std::size_t i) const {
    if (!labels.empty()) return labels[i];
    return file_label.value_or(std::string{});
  }
};

struct PrimaryParseResult {
  std::variant<Dataset, RawSensorStream> data;
  std::size_t dropped_rows = 0;

  bool is_dataset() const { return std::holds_alternative<Dataset>(data); }
  const Dataset& dataset() const { return std::get<Dataset>(data); }
  const RawSensorStream& stream() const { return std::get<RawSensorStream>(data); }
};

inline PrimaryParseResult parse_primary_csv(std::string_view bytes) {
  auto lines = csv::split_lines(bytes);
  std::size_t header_line = 0;
  while (header_line < lines.size() && csv::trim(lines[header_line]).empty()) ++header_line;
  require(header_line < lines.size(), ErrorKind::Schema, "missing header row");

  const auto header = csv::split_line(lines[header_line]);
  std::optional<std::size_t> ts_col, label_col;
  std::array<std::optional<std::size_t>, kNumChannels> chan_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto m = detail::match_column(header[i]);
    if (!m) fail(ErrorKind::Schema, "unrecognized column '" + std::string(csv::trim(header[i])) + "'");
    switch (m->role) {
      case detail::ColumnRole::Timestamp:
        require(!ts_col, ErrorKind::Schema, "duplicate timestamp column");
        ts_col = i;
        break;
      case detail::ColumnRole::Label:
        require(!label_col, ErrorKind::Schema, "duplicate label column");
        label_col = i;
        break;
      case detail::ColumnRole::Channel:
        require(!chan_col[m->channel], ErrorKind::Schema,
                "duplicate column '" + std::string(kChannelNames[m->channel]) + "'");
        chan_col[m->channel] = i;
        break;
      case detail::ColumnRole::KalmanFiltered: break;
    }
  }
  require(ts_col.has_value(), ErrorKind::Schema, "no Timestamp column");

  std::size_t n_channels = 0;
  for (const auto& c : chan_col) n_channels += c.has_value();
  std::optional<SensorKind> single;
  if (n_channels == kNumChannels) {
    require(label_col.has_value(), ErrorKind::Schema, "9-channel file without a label column");
  } else {
    for (auto s : kAllSensors) {
      const auto f = first_channel(s);
      if (chan_col[f] && chan_col[f + 1] && chan_col[f + 2] && n_channels == 3) single = s;
    }
    if (!single) {
      for (std::size_t c = 0; c < kNumChannels; ++c)
        if (!chan_col[c]) fail(ErrorKind::Schema, "incomplete sensor layout, missing column '" + std::string(kChannelNames[c]) + "'");
    }
  }

  std::vector<detail::RawRow> rows;
  std::size_t dropped = 0;
  for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
    if (csv::trim(lines[li]).empty()) continue;
    const auto fields = csv::split_line(lines[li]);
    const std::string where = " at line " + std::to_string(li + 1);
    auto cell = [&](std::size_t col) -> std::string_view {
      return col < fields.size() ? csv::trim(fields[col]) : std::string_view{};
    };
    bool missing = false;
    detail::RawRow row{};
    std::string_view ts = cell(*ts_col);
    if (ts.empty()) {
      missing = true;
    } else {
      auto t = parse_timestamp(ts);
      require(t.has_value(), ErrorKind::Parse, "bad timestamp '" + std::string(ts) + "'" + where);
      row.timestamp = *t;
    }
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      if (!chan_col[c]) continue;
      std::string_view v = cell(*chan_col[c]);
      if (v.empty()) {
        missing = true;
        continue;
      }
      auto d = csv::parse_double(v);
      require(d.has_value(), ErrorKind::Parse,
              "non-numeric value '" + std::string(v) + "' in column '" + std::string(kChannelNames[c]) + "'" + where);
      if (!std::isfinite(*d)) missing = true;
      row.values[c] = *d;
    }
    if (label_col) {
      row.label = std::string(cell(*label_col));
      if (row.label.empty()) missing = true;
    }
    if (missing) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(row));
  }

  if (!single) return {detail::assemble_dataset(std::move(rows), LabelScheme::Primary), dropped};

  std::stable_sort(rows.begin(), rows.end(),
                   [](const detail::RawRow& a, const detail::RawRow& b) { return a.timestamp < b.timestamp; });
  RawSensorStream stream;
  stream.kind = *single;
  const auto f = first_channel(*single);
  for (auto& r : rows) {
    stream.samples.push_back({r.timestamp, {r.values[f], r.values[f + 1], r.values[f + 2]}});
    if (label_col) stream.labels.push_back(std::move(r.label));
  }
  return {std::move(stream), dropped};
}

// ---------------------------------------------------------------------------
// Synchronization
// ---------------------------------------------------------------------------

inline constexpr TimestampMs kDefaultSyncToleranceMs = 50;

struct SyncResult {
  Dataset dataset;
  // Accelerometer samples with no partner in one of the other streams.
  std::size_t dropped_rows = 0;
};

namespace detail {

// Nearest unused sample within tolerance; ties go to the earlier timestamp.
inline std::optional<std::size_t> nearest_unused(const std::vector<TimedVec3>& samples,
                                                 const std::vector<bool>& used, TimestampMs t,
                                                 TimestampMs tolerance) {
  auto upper = std::lower_bound(samples.begin(), samples.end(), t,
                                [](const TimedVec3& s, TimestampMs v) { return s.timestamp < v; });
  auto mid = static_cast<std::ptrdiff_t>(upper - samples.begin());
  std::optional<std::size_t> best;
  TimestampMs best_dist = 0;
  for (std::ptrdiff_t i = mid - 1; i >= 0; --i) {
    const TimestampMs d = t - samples[static_cast<std::size_t>(i)].timestamp;
    if (d > tolerance) break;
    if (!used[static_cast<std::size_t>(i)]) {
      best = static_cast<std::size_t>(i);
      best_dist = d;
      break;
    }
  }
  for (auto i = static_cast<std::size_t>(mid); i < samples.size(); ++i) {
    const TimestampMs d = samples[i].timestamp - t;
    if (d > tolerance || (best && d >= best_dist)) break;
    if (!used[i]) {
      best = i;
      break;
    }
  }
  return best;
}

}  // namespace detail

inline SyncResult synchronize(std::span<const RawSensorStream> streams,
                              TimestampMs tolerance_ms = kDefaultSyncToleranceMs) {
  require(streams.size() == 3, ErrorKind::Argument, "synchronize needs exactly three streams");
  require(tolerance_ms >= 0, ErrorKind::Argument, "negative synchronization tolerance");
  std::array<const RawSensorStream*, 3> by_kind{};
  for (const auto& s : streams) {
    auto& slot = by_kind[static_cast<std::size_t>(s.kind)];
    require(slot == nullptr, ErrorKind::Argument, "duplicate " + std::string(sensor_name(s.kind)) + " stream");
    require(!s.samples.empty(), ErrorKind::Argument, std::string(sensor_name(s.kind)) + " stream is empty");
    for (std::size_t i = 1; i < s.samples.size(); ++i)
      require(s.samples[i - 1].timestamp <= s.samples[i].timestamp, ErrorKind::Argument,
              std::string(sensor_name(s.kind)) + " stream timestamps decrease");
    slot = &s;
  }
  const auto& acc = *by_kind[0];
  const auto& gyr = *by_kind[1];
  const auto& mag = *by_kind[2];
  require(!acc.labels.empty() || acc.file_label.has_value(), ErrorKind::Argument,
          "accelerometer stream carries no activity labels");

  std::vector<bool> gyr_used(gyr.samples.size()), mag_used(mag.samples.size());
  std::vector<detail::RawRow> rows;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < acc.samples.size(); ++i) {
    const TimestampMs t = acc.samples[i].timestamp;
    auto g = detail::nearest_unused(gyr.samples, gyr_used, t, tolerance_ms);
    auto m = detail::nearest_unused(mag.samples, mag_used, t, tolerance_ms);
    if (!g || !m) {
      ++dropped;
      continue;
    }
    gyr_used[*g] = true;
    mag_used[*m] = true;
    detail::RawRow row;
    row.timestamp = t;
    for (std::size_t a = 0; a < 3; ++a) {
      row.values[a] = acc.samples[i].value[a];
      row.values[3 + a] = gyr.samples[*g].value[a];
      row.values[6 + a] = mag.samples[*m].value[a];
    }
    row.label = acc.label_at(i);
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::EmptyJoin, "no accelerometer sample has partners within " +
                                                   std::to_string(tolerance_ms) + " ms in both other streams");
  return {detail::assemble_dataset(std::move(rows), LabelScheme::Primary), dropped};
}

// ---------------------------------------------------------------------------
// Secondary (public smartphone) dataset
// ---------------------------------------------------------------------------

// Maps source column names onto the canonical layout. Channel keys are the
// canonical channel names with or without the unit suffix.
struct AdapterConfig {
  std::string timestamp_column = "timestamp";
  std::string label_column = "activity";
  std::map<std::string, std::string> channels;
};

struct SecondaryParseResult {
  Dataset dataset;
  std::size_t dropped_rows = 0;
};

inline SecondaryParseResult parse_secondary_csv(std::string_view bytes, const AdapterConfig& adapter) {
  std::array<std::string, kNumChannels> source;
  for (const auto& [key, col] : adapter.channels) {
    auto m = detail::match_column(key);
    require(m && m->role == detail::ColumnRole::Channel, ErrorKind::Schema,
            "adapter key '" + key + "' is not a sensor channel");
    source[m->channel] = col;
  }
  for (std::size_t c = 0; c < kNumChannels; ++c)
    require(!source[c].empty(), ErrorKind::Schema,
            "adapter has no mapping for '" + std::string(kChannelNames[c]) + "'");
  require(!adapter.label_column.empty(), ErrorKind::Schema, "adapter has no label column");

  auto lines = csv::split_lines(bytes);
  std::size_t header_line = 0;
  while (header_line < lines.size() && csv::trim(lines[header_line]).empty()) ++header_line;
  require(header_line < lines.size(), ErrorKind::Schema, "missing header row");
  const auto header = csv::split_line(lines[header_line]);
  auto locate = [&](const std::string& name) -> std::size_t {
    const auto want = csv::lower(csv::trim(name));
    for (std::size_t i = 0; i < header.size(); ++i)
      if (csv::lower(csv::trim(header[i])) == want) return i;
    fail(ErrorKind::Schema, "column '" + name + "' not found in header");
  };
  std::array<std::size_t, kNumChannels> chan_col{};
  for (std::size_t c = 0; c < kNumChannels; ++c) chan_col[c] = locate(source[c]);
  const std::size_t label_col = locate(adapter.label_column);
  std::optional<std::size_t> ts_col;
  if (!adapter.timestamp_column.empty()) ts_col = locate(adapter.timestamp_column);

  std::vector<detail::RawRow> rows;
  std::size_t dropped = 0;
  std::size_t ordinal = 0;
  for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
    if (csv::trim(lines[li]).empty()) continue;
    const auto fields = csv::split_line(lines[li]);
    const std::string where = " at line " + std::to_string(li + 1);
    auto cell = [&](std::size_t col) -> std::string_view {
      return col < fields.size() ? csv::trim(fields[col]) : std::string_view{};
    };
    detail::RawRow row{};
    bool missing = false;
    if (ts_col) {
      std::string_view ts = cell(*ts_col);
      if (ts.empty()) {
        missing = true;
      } else {
        auto t = parse_timestamp(ts);
        require(t.has_value(), ErrorKind::Parse, "bad timestamp '" + std::string(ts) + "'" + where);
        row.timestamp = *t;
      }
    } else {
      row.timestamp = static_cast<TimestampMs>(ordinal);
    }
    ++ordinal;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      std::string_view v = cell(chan_col[c]);
      if (v.empty()) {
        missing = true;
        continue;
      }
      auto d = csv::parse_double(v);
      require(d.has_value(), ErrorKind::Parse, "non-numeric value '" + std::string(v) + "'" + where);
      if (!std::isfinite(*d)) missing = true;
      row.values[c] = *d;
    }
    row.label = std::string(cell(label_col));
    if (row.label.empty()) missing = true;
    if (missing) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(row));
  }
  return {detail::assemble_dataset(std::move(rows), LabelScheme::FirstAppearance), dropped};
}

// ---------------------------------------------------------------------------
// Canonical CSV
// ---------------------------------------------------------------------------

inline std::string canonical_header_line() {
  std::string out = "Timestamp";
  for (auto n : kChannelNames) {
    out += ',';
    out += n;
  }
  out += ",label";
  return out;
}

// Canonical 11-column form; `extra` appends named columns (one value per row).
inline std::string write_canonical_csv(
    const Dataset& dataset,
    std::span<const std::pair<std::string, std::vector<double>>> extra = {}) {
  for (const auto& [name, values] : extra)
    require(values.size() == dataset.size(), ErrorKind::Argument, "extra column '" + name + "' has wrong length");
  std::string out = canonical_header_line();
  for (const auto& [name, values] : extra) out += "," + csv::escape(name);
  out += '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& r = dataset[i];
    out += std::to_string(r.timestamp);
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      out += ',';
      out += csv::format_double(r.channel(c));
    }
    out += ',';
    out += csv::escape(dataset.vocabulary().name(r.label));
    for (const auto& [name, values] : extra) {
      out += ',';
      out += csv::format_double(values[i]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

struct SensorGaussian {
  Vec3 mean{};
  double stddev = 1.0;
};

struct SynthConfig {
  std::vector<std::string> class_names;
  std::size_t samples_per_class = 250;
  // gaussians[class][sensor]
  std::vector<std::array<SensorGaussian, 3>> gaussians;
  std::uint64_t seed = 7;

  std::size_t num_classes() const { return class_names.size(); }

  void validate() const {
    require(!class_names.empty(), ErrorKind::Config, "synthetic config needs at least one class");
    require(gaussians.size() == class_names.size(), ErrorKind::Config,
            "synthetic config needs one Gaussian triple per class");
    require(samples_per_class >= 1, ErrorKind::Config, "samples_per_class must be >= 1");
    for (const auto& g : gaussians)
      for (const auto& s : g) {
        require(std::isfinite(s.stddev) && s.stddev >= 0.0, ErrorKind::Config, "stddev must be >= 0");
        for (double m : s.mean) require(std::isfinite(m), ErrorKind::Config, "non-finite synthetic mean");
      }
  }
};

// Rows are emitted in contiguous per-class blocks, class 0 first, with
// timestamps 0, 1, 2, ... so that a recording looks like one activity
// segment after another.
inline Dataset generate_synthetic(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SyncRecord> rows;
  rows.reserve(config.num_classes() * config.samples_per_class);
  TimestampMs t = 0;
  for (std::size_t k = 0; k < config.num_classes(); ++k) {
    for (std::size_t i = 0; i < config.samples_per_class; ++i) {
      SyncRecord rec;
      rec.timestamp = t++;
      rec.label = k;
      for (auto s : kAllSensors) {
        const auto& g = config.gaussians[k][static_cast<std::size_t>(s)];
        for (std::size_t a = 0; a < 3; ++a) {
          const double z = normal(rng);
          rec.sensor(s)[a] = g.stddev == 0.0 ? g.mean[a] : g.mean[a] + g.stddev * z;
        }
      }
      rows.push_back(rec);
    }
  }
  return Dataset(std::move(rows), LabelVocabulary(config.class_names));
}

namespace detail {

inline std::vector<std::string> default_class_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i)
    names.push_back(i < kPrimaryActivities.size() && k <= kPrimaryActivities.size()
                        ? std::string(kPrimaryActivities[i])
                        : "class_" + std::to_string(i));
  return names;
}

// K points of the unit cubic lattice, lowest coordinate sum first, centred
// on the origin. Distinct points are at least 1 apart and classes differ
// along single axes; for K <= 8 every point is a cube corner and so is
// linearly separable from the rest.
inline std::vector<Vec3> lattice_points(std::size_t k) {
  std::size_t m = 1;
  while (m * m * m < k) ++m;
  std::vector<std::array<std::size_t, 3>> cells;
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < m; ++y)
      for (std::size_t z = 0; z < m; ++z) cells.push_back({x, y, z});
  std::stable_sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
    const auto sa = a[0] + a[1] + a[2], sb = b[0] + b[1] + b[2];
    if (sa != sb) return sa < sb;
    return std::tie(b[0], b[1], b[2]) < std::tie(a[0], a[1], a[2]);
  });
  std::vector<Vec3> pts(k);
  Vec3 centroid{};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t a = 0; a < 3; ++a) {
      pts[i][a] = static_cast<double>(cells[i][a]);
      centroid[a] += pts[i][a] / static_cast<double>(k);
    }
  for (auto& p : pts)
    for (std::size_t a = 0; a < 3; ++a) p[a] -= centroid[a];
  return pts;
}

// Class means for one sensor with minimum pairwise distance `separation`,
// offset by `center`; `rotate` cycles class-to-point assignment between
// sensors so they do not carry identical geometry.
inline std::vector<Vec3> class_means(std::size_t k, double separation, const Vec3& center, std::size_t rotate) {
  const auto pts = lattice_points(k);
  const double scale = k > 1 ? separation : 0.0;
  std::vector<Vec3> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& p = pts[(i + rotate) % k];
    for (std::size_t a = 0; a < 3; ++a) out[i][a] = center[a] + scale * p[a];
  }
  return out;
}

}  // namespace detail

// Every sensor separates the classes by `separation_sigma` standard
// deviations (minimum distance between class means).
inline SynthConfig separable_synth_config(std::size_t k, std::size_t samples_per_class, double separation_sigma,
                                          double stddev, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.class_names = detail::default_class_names(k);
  cfg.samples_per_class = samples_per_class;
  cfg.seed = seed;
  cfg.gaussians.resize(k);
  static constexpr std::array<Vec3, 3> centers = {Vec3{0.0, 0.0, 1.0}, Vec3{0.0, 0.0, 0.0}, Vec3{20.0, -5.0, 40.0}};
  const double unit = stddev > 0.0 ? stddev : 1.0;
  for (std::size_t s = 0; s < 3; ++s) {
    auto means = detail::class_means(k, separation_sigma * unit, centers[s], s);
    for (std::size_t c = 0; c < k; ++c) cfg.gaussians[c][s] = {means[c], stddev};
  }
  return cfg;
}

// Per-sensor separability ordered magnetometer > accelerometer > gyroscope,
// with the gyroscope close to pure noise.
inline SynthConfig tiered_synth_config(std::size_t samples_per_class, std::uint64_t seed,
                                       double mag_sigma = 6.0, double acc_sigma = 2.5, double gyro_sigma = 0.4) {
  SynthConfig cfg = separable_synth_config(4, samples_per_class, 1.0, 1.0, seed);
  static constexpr std::array<Vec3, 3> centers = {Vec3{0.0, 0.0, 1.0}, Vec3{0.0, 0.0, 0.0}, Vec3{20.0, -5.0, 40.0}};
  const std::array<double, 3> sep = {acc_sigma, gyro_sigma, mag_sigma};
  for (std::size_t s = 0; s < 3; ++s) {
    auto means = detail::class_means(4, sep[s], centers[s], s);
    for (std::size_t c = 0; c < 4; ++c) cfg.gaussians[c][s] = {means[c], 1.0};
  }
  return cfg;
}

}  // namespace fusionhar

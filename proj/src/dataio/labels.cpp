#include "serlab/dataio/labels.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "serlab/common/error.hpp"
#include "serlab/dataio/binary_io.hpp"

namespace serlab::dataio {

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test1") return Split::kTest1;
  throw ValidationError("unknown split '" + std::string(name) + "' (expected train|dev|test1)");
}

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest1: return "test1";
  }
  return "?";
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

struct LineError {
  const std::string& source;
  std::size_t line;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError(source + " line " + std::to_string(line) + ": " + msg);
  }
};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename Fn>
void for_each_line(std::string_view text, std::string_view header, const std::string& source, Fn fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != header) {
        LineError{source, line_no}.fail("expected header '" + std::string(header) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    fn(line, LineError{source, line_no});
  }
  if (!saw_header) LineError{source, 1}.fail("missing header '" + std::string(header) + "'");
}

double parse_number(std::string_view s, const char* field, const LineError& err) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    err.fail(std::string("invalid ") + field + " '" + std::string(s) + "'");
  }
  return v;
}

std::optional<AttributeVector> parse_attribute_cells(std::string_view a, std::string_view v, std::string_view d,
                                                     bool check_range, const LineError& err) {
  const int filled = !a.empty() + !v.empty() + !d.empty();
  if (filled == 0) return std::nullopt;
  if (filled != 3) err.fail("attributes must be all present or all empty");
  AttributeVector out{parse_number(a, "arousal", err), parse_number(v, "valence", err),
                      parse_number(d, "dominance", err)};
  if (check_range) {
    const std::pair<const char*, double> cells[] = {
        {"arousal", out.arousal}, {"valence", out.valence}, {"dominance", out.dominance}};
    for (auto [name, value] : cells) {
      if (value < metrics::kAttributeMin || value > metrics::kAttributeMax) {
        err.fail(std::string("attribute out of range: ") + name + " = " + format_double(value) +
                 " not in [1,7]");
      }
    }
  }
  return out;
}

std::optional<Emotion> parse_emotion_cell(std::string_view cell, const LineError& err) {
  if (cell.empty()) return std::nullopt;
  auto e = metrics::parse_emotion_code(cell);
  if (!e) err.fail("unknown emotion code '" + std::string(cell) + "' (expected one of A,C,D,F,H,N,S,U)");
  return e;
}

void check_id(std::string_view id, std::set<std::string, std::less<>>& seen, const LineError& err) {
  if (id.empty()) err.fail("empty id");
  if (!seen.emplace(id).second) err.fail("duplicate id '" + std::string(id) + "'");
}

void append_attributes(std::string& out, const std::optional<AttributeVector>& a) {
  if (a) {
    out += format_double(a->arousal) + ',' + format_double(a->valence) + ',' + format_double(a->dominance);
  } else {
    out += ",,";
  }
}

void check_writable_id(const std::string& id) {
  if (id.empty() || id.find_first_of(",\n\r") != std::string::npos) {
    throw ValidationError("id '" + id + "' is empty or contains a separator");
  }
}

}  // namespace

std::vector<LabelRow> parse_labels(std::string_view text, const std::string& source) {
  std::vector<LabelRow> rows;
  std::set<std::string, std::less<>> seen;
  for_each_line(text, kLabelsHeader, source, [&](std::string_view line, const LineError& err) {
    auto f = split_fields(line);
    if (f.size() != 6) err.fail("expected 6 fields, got " + std::to_string(f.size()));
    check_id(f[0], seen, err);
    LabelRow row;
    row.id = std::string(f[0]);
    try {
      row.split = parse_split(f[1]);
    } catch (const ValidationError& e) {
      err.fail(e.what());
    }
    row.emotion = parse_emotion_cell(f[2], err);
    row.attributes = parse_attribute_cells(f[3], f[4], f[5], true, err);
    if (!row.emotion && !row.attributes) err.fail("row has neither an emotion nor attributes");
    rows.push_back(std::move(row));
  });
  return rows;
}

std::string format_labels(const std::vector<LabelRow>& rows) {
  std::string out(kLabelsHeader);
  out += '\n';
  for (const auto& r : rows) {
    check_writable_id(r.id);
    out += r.id + ',' + to_string(r.split) + ',';
    if (r.emotion) out += metrics::emotion_code(*r.emotion);
    out += ',';
    append_attributes(out, r.attributes);
    out += '\n';
  }
  return out;
}

std::vector<LabelRow> read_labels(const std::filesystem::path& path) {
  return parse_labels(read_file(path), path.filename().string());
}

void write_labels(const std::filesystem::path& path, const std::vector<LabelRow>& rows) {
  write_file(path, format_labels(rows));
}

PredictionSet parse_predictions(std::string_view text, const std::string& source) {
  PredictionSet set;
  std::set<std::string, std::less<>> seen;
  for_each_line(text, kPredictionsHeader, source, [&](std::string_view line, const LineError& err) {
    auto f = split_fields(line);
    if (f.size() != 5) err.fail("expected 5 fields, got " + std::to_string(f.size()));
    check_id(f[0], seen, err);
    Prediction p;
    p.id = std::string(f[0]);
    p.emotion = parse_emotion_cell(f[1], err);
    p.attributes = parse_attribute_cells(f[2], f[3], f[4], false, err);
    set.items.push_back(std::move(p));
  });
  return set;
}

std::string format_predictions(const PredictionSet& set) {
  std::string out(kPredictionsHeader);
  out += '\n';
  for (const auto& p : set.items) {
    check_writable_id(p.id);
    out += p.id + ',';
    if (p.emotion) out += metrics::emotion_code(*p.emotion);
    out += ',';
    append_attributes(out, p.attributes);
    out += '\n';
  }
  return out;
}

PredictionSet read_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path), path.filename().string());
}

void write_predictions(const std::filesystem::path& path, const PredictionSet& set) {
  write_file(path, format_predictions(set));
}

}  // namespace serlab::dataio

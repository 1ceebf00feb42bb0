#include "oodgate/backbone.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "oodgate/errors.hpp"

namespace oodgate::backbone {
namespace {

constexpr std::string_view kHeader =
    "name,parameters_m,flops_g,feature_time_s,total_time_s,in_domain_acc,"
    "ood1_acc,ood2_acc";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw FormatError("unterminated quote", line_no);
  out.emplace_back(trim(cur));
  return out;
}

double parse_number(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("not a number: '" + text + "'", line_no);
  }
  return v;
}

void set_column(BackboneRow& row, std::size_t column, double v) {
  switch (column) {
    case 0: row.parameters = v; break;
    case 1: row.flops = v; break;
    case 2: row.feature_time = v; break;
    case 3: row.total_time = v; break;
    case 4: row.in_domain_acc = v; break;
    case 5: row.ood1_acc = v; break;
    case 6: row.ood2_acc = v; break;
  }
}

void require_unique_names(std::span<const BackboneRow> rows) {
  std::unordered_set<std::string> names;
  for (const auto& r : rows) {
    if (!names.insert(r.name).second) {
      throw DuplicateIdError("duplicate model name '" + r.name + "'");
    }
  }
}

}  // namespace

void validate(const BackboneRow& row) {
  if (row.name.empty()) throw FormatError("backbone row without a name", 0);
  for (std::size_t c = 0; c < kNumericColumns.size(); ++c) {
    const double v = column_value(row, c);
    if (!std::isfinite(v) || v < 0.0) {
      throw FormatError("'" + row.name + "': " + std::string(kNumericColumns[c]) +
                            " must be finite and non-negative",
                        c);
    }
    if (c >= 4 && v > 100.0) {
      throw FormatError("'" + row.name + "': " + std::string(kNumericColumns[c]) +
                            " must be a percentage in [0, 100]",
                        c);
    }
  }
}

void validate(const Weights& w) {
  if (!(w.accuracy >= 0.0 && w.efficiency >= 0.0 && w.robustness >= 0.0)) {
    throw WeightError("weights must be non-negative");
  }
  const double sum = w.accuracy + w.efficiency + w.robustness;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw WeightError("weights must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

double column_value(const BackboneRow& row, std::size_t column) {
  switch (column) {
    case 0: return row.parameters;
    case 1: return row.flops;
    case 2: return row.feature_time;
    case 3: return row.total_time;
    case 4: return row.in_domain_acc;
    case 5: return row.ood1_acc;
    case 6: return row.ood2_acc;
  }
  throw DimensionError("column index out of range");
}

std::vector<ScoreComponents> score_components(std::span<const BackboneRow> table,
                                              const Weights& w) {
  validate(w);
  if (table.empty()) throw EmptyInputError("empty backbone table");
  std::vector<double> acc, ood, time;
  for (const auto& r : table) {
    validate(r);
    acc.push_back(r.in_domain_acc);
    ood.push_back(r.ood_mean());
    time.push_back(r.total_time);
  }
  const auto acc_n = numerics::minmax_normalize(acc);
  const auto ood_n = numerics::minmax_normalize(ood);
  const auto time_n = numerics::minmax_normalize(time);

  std::vector<ScoreComponents> out(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& c = out[i];
    c.accuracy = acc_n[i];
    c.efficiency = 1.0 - time_n[i];
    c.robustness = ood_n[i];
    c.score = std::clamp(w.accuracy * c.accuracy + w.efficiency * c.efficiency +
                             w.robustness * c.robustness,
                         0.0, 1.0);
  }
  return out;
}

double composite_score(const BackboneRow& row,
                       std::span<const BackboneRow> table, const Weights& w) {
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const BackboneRow& r) { return r.name == row.name; });
  if (it == table.end()) {
    throw LabelMismatchError("row '" + row.name + "' is not part of the table");
  }
  return score_components(table, w)[static_cast<std::size_t>(it - table.begin())]
      .score;
}

RankedTable rank_models(std::span<const BackboneRow> rows, const Weights& w) {
  if (rows.size() < 2) throw EmptyInputError("ranking needs at least two rows");
  require_unique_names(rows);
  const auto comps = score_components(rows, w);

  RankedTable t;
  t.rows.assign(rows.begin(), rows.end());
  t.weights = w;
  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    idx[i] = i;
    t.scores[rows[i].name] = comps[i];
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (comps[a].score != comps[b].score) return comps[a].score > comps[b].score;
    if (rows[a].parameters != rows[b].parameters) {
      return rows[a].parameters < rows[b].parameters;
    }
    return rows[a].name < rows[b].name;
  });
  for (std::size_t i : idx) t.order.push_back(rows[i].name);
  for (const auto& r : pareto_front(rows)) t.pareto.insert(r.name);
  return t;
}

std::vector<BackboneRow> pareto_front(std::span<const BackboneRow> rows) {
  std::vector<BackboneRow> front;
  for (const auto& b : rows) {
    const bool dominated = std::any_of(rows.begin(), rows.end(), [&](const BackboneRow& a) {
      return a.in_domain_acc > b.in_domain_acc && a.ood_mean() > b.ood_mean() &&
             a.total_time < b.total_time;
    });
    if (!dominated) front.push_back(b);
  }
  std::sort(front.begin(), front.end(),
            [](const BackboneRow& a, const BackboneRow& b) { return a.name < b.name; });
  return front;
}

std::vector<ColumnSummary> table_summary(const BackboneTable& table,
                                         double tolerance) {
  // Absorbs binary rounding of decimal inputs, e.g. |344.96 - 344.955|.
  constexpr double kSlack = 1e-9;
  if (table.rows.empty()) throw EmptyInputError("empty backbone table");
  std::vector<ColumnSummary> out;
  for (std::size_t c = 0; c < kNumericColumns.size(); ++c) {
    std::vector<double> xs;
    xs.reserve(table.rows.size());
    for (const auto& r : table.rows) xs.push_back(column_value(r, c));
    ColumnSummary s;
    s.column = std::string(kNumericColumns[c]);
    s.stats = numerics::summary_stats(xs);
    if (table.printed_mean) {
      s.printed_mean = column_value(*table.printed_mean, c);
      s.mean_flagged = std::abs(*s.printed_mean - s.stats.mean) > tolerance + kSlack;
    }
    if (table.printed_median) {
      s.printed_median = column_value(*table.printed_median, c);
      s.median_flagged =
          std::abs(*s.printed_median - s.stats.median) > tolerance + kSlack;
    }
    out.push_back(std::move(s));
  }
  return out;
}

BackboneTable parse_backbone_csv(std::string_view text) {
  BackboneTable table;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      std::string normalized;
      for (const auto& f : split_csv(line, line_no)) {
        if (!normalized.empty()) normalized += ',';
        normalized += f;
      }
      if (normalized != kHeader) {
        throw FormatError("unexpected header, want '" + std::string(kHeader) + "'",
                          line_no);
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv(line, line_no);
    if (fields.size() != kNumericColumns.size() + 1) {
      throw FormatError("expected " + std::to_string(kNumericColumns.size() + 1) +
                            " fields",
                        line_no);
    }
    BackboneRow row;
    row.name = fields[0];
    for (std::size_t c = 0; c < kNumericColumns.size(); ++c) {
      set_column(row, c, parse_number(fields[c + 1], line_no));
    }
    try {
      validate(row);
    } catch (const FormatError& e) {
      throw FormatError(e.what(), line_no);
    }
    if (row.name == "Mean") {
      table.printed_mean = row;
    } else if (row.name == "Median") {
      table.printed_median = row;
    } else {
      table.rows.push_back(std::move(row));
    }
  }
  if (!header_seen) throw FormatError("empty backbone CSV", 0);
  require_unique_names(table.rows);
  return table;
}

}  // namespace oodgate::backbone

#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oodgate/numerics.hpp"

namespace oodgate::backbone {

// One candidate architecture: complexity, timing, and accuracy figures.
struct BackboneRow {
  std::string name;
  double parameters = 0.0;    // millions
  double flops = 0.0;         // giga-operations
  double feature_time = 0.0;  // seconds
  double total_time = 0.0;    // seconds
  double in_domain_acc = 0.0; // percent
  double ood1_acc = 0.0;      // percent
  double ood2_acc = 0.0;      // percent

  double ood_mean() const { return (ood1_acc + ood2_acc) / 2.0; }
};

// Throws FormatError when a figure is negative/non-finite or an accuracy
// falls outside [0, 100].
void validate(const BackboneRow& row);

struct Weights {
  double accuracy = 0.4;
  double efficiency = 0.3;
  double robustness = 0.3;
};

// Throws WeightError unless all weights are >= 0 and sum to 1 (+-1e-9).
void validate(const Weights& w);

struct ScoreComponents {
  double accuracy = 0.0;    // min-max normalized in-domain accuracy
  double efficiency = 0.0;  // 1 - min-max normalized total inference time
  double robustness = 0.0;  // min-max normalized mean of the two OOD accuracies
  double score = 0.0;
};

// Components for every row of `table`, in table order.
std::vector<ScoreComponents> score_components(std::span<const BackboneRow> table,
                                              const Weights& w);

// Composite score of `row`, which must appear (by name) in `table`.
double composite_score(const BackboneRow& row,
                       std::span<const BackboneRow> table, const Weights& w);

struct RankedTable {
  std::vector<BackboneRow> rows;                    // input order
  std::map<std::string, ScoreComponents> scores;    // by name
  std::vector<std::string> order;                   // best first
  Weights weights;
  std::set<std::string> pareto;                     // names on the front
};

// Descending score; ties by fewer parameters, then name. Needs >= 2 rows with
// unique names (DuplicateIdError otherwise).
RankedTable rank_models(std::span<const BackboneRow> rows, const Weights& w);

// Rows no other row beats on all three objectives at once (higher in-domain
// accuracy, higher mean OOD accuracy, lower total time). Sorted by name.
std::vector<BackboneRow> pareto_front(std::span<const BackboneRow> rows);

inline constexpr std::array<std::string_view, 7> kNumericColumns = {
    "parameters_m", "flops_g",  "feature_time_s", "total_time_s",
    "in_domain_acc", "ood1_acc", "ood2_acc"};

double column_value(const BackboneRow& row, std::size_t column);

struct ColumnSummary {
  std::string column;
  numerics::SummaryStats stats;
  std::optional<double> printed_mean;
  std::optional<double> printed_median;
  bool mean_flagged = false;    // recomputed mean disagrees with printed
  bool median_flagged = false;
};

// Backbone table plus the optional printed "Mean" / "Median" rows that some
// published tables carry; those are kept as references, not candidates.
struct BackboneTable {
  std::vector<BackboneRow> rows;
  std::optional<BackboneRow> printed_mean;
  std::optional<BackboneRow> printed_median;
};

// Recomputes per-column statistics and flags every printed reference value
// that differs from the recomputed one by more than `tolerance`.
std::vector<ColumnSummary> table_summary(const BackboneTable& table,
                                         double tolerance = 0.005);

// CSV with header
//   name,parameters_m,flops_g,feature_time_s,total_time_s,in_domain_acc,ood1_acc,ood2_acc
// Rows named "Mean" or "Median" become the printed references.
BackboneTable parse_backbone_csv(std::string_view text);

}  // namespace oodgate::backbone

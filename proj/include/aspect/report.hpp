#pragma once

// Rendering of evaluation and clustering results as text or CSV tables.

#include <optional>
#include <span>
#include <string>

#include "aspect/catg_eval.hpp"
#include "json.hpp"

namespace aspect::report {

enum class Format { text, csv };

Format parse_format(std::string_view name);

/// Fraction rendered as a percentage with one decimal, rounding half up:
/// 0.3457 -> "34.6".
std::string format_percent(double fraction);

struct EvalRow {
  std::string method;
  catg_eval::MatchReport report;
};

struct ClusterRow {
  std::string method;
  std::optional<double> nmi;
  std::size_t clusters = 0;  // non-empty clusters after overlap resolution
  std::size_t trivial_excluded = 0;
};

/// Column groups Overall, EN, CN, ID, MS, each P R F1. With two or more rows
/// the best F1 of each group is shown as **x** and the second best as _x_.
std::string render_eval_table(std::span<const EvalRow> rows, Format format);

/// One row per clustering run; a run without clusters renders as "no clusters".
std::string render_cluster_table(std::span<const ClusterRow> rows, Format format);

/// Reads the summary fields of a cluster output document. Throws SchemaMismatch.
ClusterRow cluster_row_from_json(std::string method, const nlohmann::json& j);

}  // namespace aspect::report

#include "aspect/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "aspect/error.hpp"

namespace aspect::report {

using corpus::Language;

namespace {

// Column order of the results table.
constexpr std::array<Language, 4> kLanguageColumns = {Language::EN, Language::CN, Language::ID,
                                                       Language::MS};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

const catg_eval::MatchStats* group_stats(const catg_eval::MatchReport& r, std::size_t group) {
  if (group == 0) return &r.overall;
  auto it = r.per_language.find(kLanguageColumns[group - 1]);
  return it == r.per_language.end() ? nullptr : &it->second;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "text") return Format::text;
  if (name == "csv") return Format::csv;
  throw Error(ErrorKind::InvalidArgument, "unknown format \"" + std::string(name) + "\"");
}

std::string format_percent(double fraction) {
  if (fraction < 0.0) return "-" + format_percent(-fraction);
  const double tenths = std::floor(fraction * 1000.0 + 0.5 + 1e-9);
  const auto v = static_cast<long long>(tenths);
  const long long whole = v / 10;
  const long long frac = v % 10;
  return std::to_string(whole) + "." + std::to_string(frac);
}

std::string render_eval_table(std::span<const EvalRow> rows, Format format) {
  constexpr std::size_t kGroups = 1 + kLanguageColumns.size();
  std::ostringstream out;

  if (format == Format::csv) {
    out << "method";
    for (std::size_t g = 0; g < kGroups; ++g) {
      const std::string prefix = g == 0 ? "overall" : std::string(corpus::to_string(kLanguageColumns[g - 1]));
      out << ',' << prefix << "_p," << prefix << "_r," << prefix << "_f1";
    }
    out << '\n';
    for (const auto& row : rows) {
      out << csv_escape(row.method);
      for (std::size_t g = 0; g < kGroups; ++g) {
        if (const auto* s = group_stats(row.report, g)) {
          out << ',' << format_percent(s->precision) << ',' << format_percent(s->recall) << ','
              << format_percent(s->f1);
        } else {
          out << ",,,";
        }
      }
      out << '\n';
    }
    return out.str();
  }

  // Best and second-best displayed F1 per group, compared on rounded values.
  std::array<std::vector<std::string>, kGroups> ranked;
  for (std::size_t g = 0; g < kGroups; ++g) {
    std::vector<double> f1s;
    for (const auto& row : rows) {
      if (const auto* s = group_stats(row.report, g)) f1s.push_back(std::stod(format_percent(s->f1)));
    }
    std::sort(f1s.begin(), f1s.end(), std::greater<>());
    f1s.erase(std::unique(f1s.begin(), f1s.end()), f1s.end());
    for (std::size_t k = 0; k < std::min<std::size_t>(2, f1s.size()); ++k) {
      ranked[g].push_back(format_percent(f1s[k] / 100.0));
    }
  }
  const bool emphasize = rows.size() >= 2;

  std::size_t method_width = 6;
  for (const auto& row : rows) method_width = std::max(method_width, row.method.size());
  constexpr std::size_t kGroupWidth = 18;

  out << pad_right("Method", method_width);
  for (std::size_t g = 0; g < kGroups; ++g) {
    out << " | " << pad_right(g == 0 ? "Overall" : std::string(corpus::to_string(kLanguageColumns[g - 1])), kGroupWidth);
  }
  out << '\n' << pad_right("", method_width);
  for (std::size_t g = 0; g < kGroups; ++g) out << " | " << pad_right("   P    R   F1", kGroupWidth);
  out << '\n';

  for (const auto& row : rows) {
    out << pad_right(row.method, method_width);
    for (std::size_t g = 0; g < kGroups; ++g) {
      std::string cell;
      if (const auto* s = group_stats(row.report, g)) {
        std::string f1 = format_percent(s->f1);
        if (emphasize && !ranked[g].empty() && f1 == ranked[g][0]) f1 = "**" + f1 + "**";
        else if (emphasize && ranked[g].size() > 1 && f1 == ranked[g][1]) f1 = "_" + f1 + "_";
        cell = pad_left(format_percent(s->precision), 4) + " " + pad_left(format_percent(s->recall), 4) +
               " " + pad_left(f1, 4);
      } else {
        cell = "   -    -    -";
      }
      out << " | " << pad_right(cell, kGroupWidth);
    }
    out << '\n';
  }
  return out.str();
}

std::string render_cluster_table(std::span<const ClusterRow> rows, Format format) {
  std::ostringstream out;
  if (format == Format::csv) {
    out << "method,nmi,clusters,trivial_excluded\n";
    if (rows.empty()) out << "no clusters,,,\n";
    for (const auto& row : rows) {
      if (row.clusters == 0) {
        out << csv_escape(row.method) << ",no clusters,0," << row.trivial_excluded << '\n';
        continue;
      }
      out << csv_escape(row.method) << ',' << (row.nmi ? format_percent(*row.nmi) : "") << ','
          << row.clusters << ',' << row.trivial_excluded << '\n';
    }
    return out.str();
  }

  std::size_t method_width = 6;
  for (const auto& row : rows) method_width = std::max(method_width, row.method.size());
  out << pad_right("Method", method_width) << " | " << pad_left("NMI", 5) << " | Clusters | Trivial\n";
  if (rows.empty()) out << "no clusters\n";
  for (const auto& row : rows) {
    out << pad_right(row.method, method_width) << " | ";
    if (row.clusters == 0) {
      out << "no clusters | " << row.trivial_excluded << '\n';
      continue;
    }
    out << pad_left(row.nmi ? format_percent(*row.nmi) : "-", 5) << " | "
        << pad_left(std::to_string(row.clusters), 8) << " | " << row.trivial_excluded << '\n';
  }
  return out.str();
}

ClusterRow cluster_row_from_json(std::string method, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("clusters") || !j["clusters"].is_array()) {
    throw Error(ErrorKind::SchemaMismatch, "cluster output lacks a \"clusters\" array");
  }
  ClusterRow row;
  row.method = std::move(method);
  try {
    for (const auto& c : j["clusters"]) {
      if (!c.at("assigned").empty()) ++row.clusters;
    }
    if (j.contains("nmi") && !j["nmi"].is_null()) row.nmi = j["nmi"].get<double>();
    row.trivial_excluded = j.at("trivial_excluded").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("cluster output: ") + e.what());
  }
  return row;
}

}  // namespace aspect::report

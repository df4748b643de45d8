// Copyright 2026 The regret_miner Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "regret_miner/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

namespace regret_miner {

namespace {

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// Shortest text that reads back to the same double.
std::string Exact(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string Cell(const MetricStats& s) {
  return Fmt("%.3f", s.mean) + " ± " + Fmt("%.3f", s.stddev);
}

std::vector<std::string> SplitOn(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double ParseDouble(const std::string& s) {
  if (s == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(ErrorCode::kSchema, "bad number '" + s + "' in CSV");
  }
  return v;
}

}  // namespace

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "md" || name == "markdown") return ReportFormat::kMarkdown;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "svg") return ReportFormat::kSvg;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown report format '" + std::string(name) + "'");
}

std::string_view ReportExtension(ReportFormat format) {
  switch (format) {
    case ReportFormat::kMarkdown:
      return "md";
    case ReportFormat::kCsv:
      return "csv";
    case ReportFormat::kSvg:
      return "svg";
  }
  return "md";
}

std::string CaseStudyMarkdown(const CaseStudyReport& report) {
  std::ostringstream out;
  out << "## Closed-loop redeployment\n\n";
  out << "Seeds: " << report.seeds.size() << ". Cells are mean ± sd over seeds.\n\n";
  out << "| Arm |";
  for (Split split : kSplits) {
    const char* tag = split == Split::kHighHoldout ? "High-regret" : "Low-regret";
    out << ' ' << tag << " Col Cost | " << tag << " Col Severity | " << tag
        << " Regret |";
  }
  out << "\n|---|";
  for (std::size_t i = 0; i < 2 * 3; ++i) out << "---|";
  out << '\n';
  for (const ArmResult& a : report.arms) {
    out << "| " << ArmLabel(a.arm) << " |";
    for (Split split : kSplits) {
      for (CaseMetric m : {CaseMetric::kCollisionCost, CaseMetric::kCollisionSeverity,
                           CaseMetric::kMeanRegret}) {
        out << ' ' << Cell(report.At(a.arm, split, m)) << " |";
      }
    }
    out << '\n';
  }
  out << "\n## Open-loop prediction error\n\n";
  out << "| Arm | High-regret ADE | High-regret FDE | Low-regret ADE | Low-regret FDE |\n";
  out << "|---|---|---|---|---|\n";
  for (const ArmResult& a : report.arms) {
    out << "| " << ArmLabel(a.arm) << " |";
    for (Split split : kSplits) {
      for (CaseMetric m : {CaseMetric::kAde, CaseMetric::kFde}) {
        out << ' ' << Cell(report.At(a.arm, split, m)) << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string CaseStudyCsv(const CaseStudyReport& report) {
  std::ostringstream out;
  out << "arm,split,metric,stat,value\n";
  for (const ArmResult& a : report.arms) {
    for (Split split : kSplits) {
      for (CaseMetric m : kCaseMetrics) {
        const MetricStats& s = report.At(a.arm, split, m);
        const std::string prefix = std::string(ArmName(a.arm)) + "," +
                                   std::string(SplitName(split)) + "," +
                                   std::string(CaseMetricName(m)) + ",";
        for (std::size_t i = 0; i < s.per_seed.size(); ++i) {
          out << prefix << "seed=" << report.seeds.at(i) << ','
              << Exact(s.per_seed[i]) << '\n';
        }
        out << prefix << "mean," << Exact(s.mean) << '\n';
        out << prefix << "stddev," << Exact(s.stddev) << '\n';
      }
    }
  }
  return out.str();
}

CaseStudyReport CaseStudyFromCsv(std::string_view text) {
  CaseStudyReport report;
  std::map<Arm, std::size_t> slot;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "arm,split,metric,stat,value") {
    throw Error(ErrorCode::kSchema, "not a case-study CSV");
  }
  bool seeds_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitOn(line, ',');
    if (f.size() != 5) throw Error(ErrorCode::kSchema, "CSV row needs 5 fields");
    const Arm arm = ParseArm(f[0]);
    const Split split = ParseSplit(f[1]);
    const CaseMetric metric = ParseCaseMetric(f[2]);
    if (!slot.count(arm)) {
      if (!report.arms.empty()) seeds_done = true;
      slot[arm] = report.arms.size();
      report.arms.push_back(ArmResult{arm, {}});
    }
    MetricStats& s = report.arms[slot[arm]]
                         .cells[static_cast<std::size_t>(split)]
                               [static_cast<std::size_t>(metric)];
    const double value = ParseDouble(f[4]);
    if (f[3].rfind("seed=", 0) == 0) {
      s.per_seed.push_back(value);
      // Seeds are listed in order for the first cell of the first arm.
      if (!seeds_done && split == Split::kHighHoldout &&
          metric == CaseMetric::kCollisionCost) {
        report.seeds.push_back(std::strtoull(f[3].c_str() + 5, nullptr, 10));
      }
    } else if (f[3] == "mean") {
      s.mean = value;
    } else if (f[3] == "stddev") {
      s.stddev = value;
    } else {
      throw Error(ErrorCode::kSchema, "unknown CSV stat '" + f[3] + "'");
    }
  }
  return report;
}

Histogram HistogramOf(std::span<const double> scores, int bins) {
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one bin");
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  if (scores.empty()) return h;
  h.lo = std::min(0.0, *std::min_element(scores.begin(), scores.end()));
  h.hi = *std::max_element(scores.begin(), scores.end());
  if (!(h.hi > h.lo)) h.hi = h.lo + 1.0;
  for (double v : scores) {
    auto b = static_cast<long>(std::floor((v - h.lo) / h.width()));
    b = std::clamp<long>(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

std::string RegretHistogramSvg(std::span<const double> scores, double threshold,
                               int bins) {
  const Histogram h = HistogramOf(scores, bins);
  constexpr double kW = 640.0, kH = 360.0, kLeft = 56.0, kRight = 16.0,
                   kTop = 24.0, kBottom = 48.0;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;
  const int peak = std::max(1, *std::max_element(h.counts.begin(), h.counts.end()));
  const double bar_w = plot_w / static_cast<double>(bins);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int i = 0; i < bins; ++i) {
    const int c = h.counts[static_cast<std::size_t>(i)];
    const double bh = plot_h * c / peak;
    out << "<rect class=\"bin\" data-count=\"" << c << "\" x=\""
        << Fmt("%.2f", kLeft + i * bar_w) << "\" y=\""
        << Fmt("%.2f", kTop + plot_h - bh) << "\" width=\""
        << Fmt("%.2f", bar_w - 1.0) << "\" height=\"" << Fmt("%.2f", bh)
        << "\" fill=\"#4a78b5\"/>\n";
  }
  const double tx = kLeft + plot_w * std::clamp((threshold - h.lo) / (h.hi - h.lo), 0.0, 1.0);
  out << "<line class=\"threshold\" x1=\"" << Fmt("%.2f", tx) << "\" y1=\"" << kTop
      << "\" x2=\"" << Fmt("%.2f", tx) << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"#c0392b\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
  out << "<text x=\"" << Fmt("%.2f", tx + 4) << "\" y=\"" << kTop + 12
      << "\" fill=\"#c0392b\">mined threshold " << Fmt("%.4f", threshold)
      << "</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"" << kH - 28 << "\">"
      << Fmt("%.3f", h.lo) << "</text>\n";
  out << "<text x=\"" << kLeft + plot_w << "\" y=\"" << kH - 28
      << "\" text-anchor=\"end\">" << Fmt("%.3f", h.hi) << "</text>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 8
      << "\" text-anchor=\"middle\">scene regret (N = " << scores.size()
      << ")</text>\n";
  out << "<text x=\"14\" y=\"" << kTop + plot_h / 2
      << "\" transform=\"rotate(-90 14 " << kTop + plot_h / 2
      << ")\" text-anchor=\"middle\">scenes (max " << peak << ")</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string OverlapCsv(const Comparison& c) {
  std::ostringstream out;
  out << "metric";
  for (const MetricLabeling& l : c.labelings) out << ',' << MetricName(l.tag);
  out << '\n';
  for (std::size_t a = 0; a < c.labelings.size(); ++a) {
    out << MetricName(c.labelings[a].tag);
    for (double v : c.overlap[a]) out << ',' << Exact(v);
    out << '\n';
  }
  return out.str();
}

MinedSet MinedSetOf(const MetricLabeling& labeling, double p,
                    Aggregation aggregation) {
  MinedSet m;
  m.metric = std::string(MetricName(labeling.tag));
  m.p = p;
  m.k = static_cast<int>(labeling.mined.size());
  m.aggregation = aggregation;
  m.flagged = labeling.mined;
  return m;
}

}  // namespace regret_miner

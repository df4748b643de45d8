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

// Rendering of case-study and comparison results. Every renderer is a pure
// function of its input.

#ifndef REGRET_MINER_REPORT_HPP_
#define REGRET_MINER_REPORT_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regret_miner/harness.hpp"
#include "regret_miner/serialize.hpp"

namespace regret_miner {

enum class ReportFormat { kMarkdown, kCsv, kSvg };

// Accepts md, markdown, csv and svg.
ReportFormat ParseReportFormat(std::string_view name);
std::string_view ReportExtension(ReportFormat format);

// Closed-loop table (collision cost, severity, regret per split) followed by
// the open-loop ADE/FDE table. Cells read "mean ± sd".
std::string CaseStudyMarkdown(const CaseStudyReport& report);

// Long format: arm,split,metric,stat,value with stat one of seed=<s>, mean,
// stddev.
std::string CaseStudyCsv(const CaseStudyReport& report);
CaseStudyReport CaseStudyFromCsv(std::string_view text);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<int> counts;
  double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

// Equal-width bins over [min(0, min score), max score]; the top edge is
// closed so every score lands in a bin.
Histogram HistogramOf(std::span<const double> scores, int bins);

std::string RegretHistogramSvg(std::span<const double> scores, double threshold,
                               int bins = 20);

// Square matrix with a header row of metric names.
std::string OverlapCsv(const Comparison& comparison);

MinedSet MinedSetOf(const MetricLabeling& labeling, double p,
                    Aggregation aggregation);

}  // namespace regret_miner

#endif  // REGRET_MINER_REPORT_HPP_

#include <algorithm>
#include <stdexcept>
#include <string>

#include "imatch/adaptive.hpp"

namespace imatch {

std::string_view to_string(LogBase base) {
  return base == LogBase::Natural ? "natural" : "binary";
}

LogBase parse_log_base(std::string_view name) {
  if (name == "natural" || name == "e") return LogBase::Natural;
  if (name == "binary" || name == "2") return LogBase::Binary;
  throw ConfigError("unknown log base '" + std::string(name) + "'");
}

std::string_view to_string(HardRule rule) {
  switch (rule) {
    case HardRule::PositiveInterviewMatches: return "positive_interview_matches";
    case HardRule::PositiveInterviewWindow: return "positive_interview_window";
    case HardRule::ConsecutiveInterviews: return "consecutive_interviews";
  }
  return "?";
}

std::size_t MonitorReport::count(HardRule rule) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [rule](const auto& v) { return v.rule == rule; }));
}

MonitorReport check_trace_monitors(std::span<const TraceEvent> trace, const Market& market,
                                   MonitorOptions options) {
  const Index n = market.n();
  const Index m = market.m();
  MonitorReport report;
  const double log_n = n > 1 ? log_in(options.log_base, static_cast<double>(n)) : 0.0;
  report.upward_window = options.upward_coefficient * log_n;
  report.downward_window = options.downward_coefficient * log_n * log_n;

  InterviewLedger ledger(n, m);
  std::vector<Index> holder(static_cast<std::size_t>(m), kNone);
  // Applicant index of the positive-interview match that bounds the
  // position's later interviews, if any.
  std::vector<Index> anchor(static_cast<std::size_t>(m), kNone);

  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& e = trace[k];
    const Index i = e.applicant;
    const Index j = e.position;
    if (i < 0 || i >= n || j < 0 || j >= m) {
      throw std::invalid_argument("trace event " + std::to_string(k) + " references (" + std::to_string(i) +
                                  ", " + std::to_string(j) + ") outside the market");
    }
    switch (e.kind) {
      case TraceKind::Interview: {
        if (!ledger.record(i, j)) {
          throw std::invalid_argument("trace event " + std::to_string(k) + " repeats an interview");
        }
        ++report.interviews;
        report.max_upward_gap = std::max(report.max_upward_gap, i - j);
        report.max_downward_gap = std::max(report.max_downward_gap, j - i);
        if (static_cast<double>(i) > static_cast<double>(j) + report.upward_window) {
          ++report.upward_window_violations;
        }
        if (static_cast<double>(j) > static_cast<double>(i) + report.downward_window) {
          ++report.downward_window_violations;
        }
        if (i < j) {
          for (Index jp = i; jp < j; ++jp) {
            if (!ledger.contains(i, jp)) {
              report.violations.push_back({HardRule::ConsecutiveInterviews, k, i, j});
              break;
            }
          }
        }
        if (anchor[j] != kNone && i >= std::max(anchor[j], j + 1)) {
          report.violations.push_back({HardRule::PositiveInterviewWindow, k, i, j});
        }
        if (holder[j] == kNone && market.eps_applicant(i, j) >= 0.0 && market.eps_position(j, i) >= 0.0) {
          const bool followed = k + 1 < trace.size() && trace[k + 1].kind == TraceKind::TentativeMatch &&
                                trace[k + 1].applicant == i && trace[k + 1].position == j;
          if (!followed) {
            report.violations.push_back({HardRule::PositiveInterviewMatches, k, i, j});
          } else {
            anchor[j] = i;
          }
        }
        break;
      }
      case TraceKind::TentativeMatch:
        if (!ledger.contains(i, j)) {
          throw std::invalid_argument("trace event " + std::to_string(k) + " matches an uninterviewed pair");
        }
        holder[j] = i;
        break;
      case TraceKind::Displace:
        if (holder[j] != i) {
          throw std::invalid_argument("trace event " + std::to_string(k) + " displaces a non-holder");
        }
        holder[j] = kNone;
        break;
      case TraceKind::Reject:
        break;
    }
  }
  return report;
}

}  // namespace imatch

#pragma once

// Chronological bundle corpora (records of co-consumed entities with a realized
// utility), their replay through the recursive estimator, and the CSV/JSON
// formats shared by every command.
//
// Corpus CSV: header `order,items,utility`, one record per LF-terminated line,
// items separated by `;`, `.` as decimal point, no thousands separators.

#include "bundlelearn/estimator.hpp"
#include "bundlelearn/interactions.hpp"
#include "bundlelearn/market.hpp"
#include "bundlelearn/simulator.hpp"
#include "bundlelearn/spectral.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bundlelearn {

struct CorpusRecord {
  std::int64_t order;
  std::vector<std::string> items;
  double utility;
  std::size_t line;  // 1-based source line, for diagnostics
};

std::vector<CorpusRecord> load_corpus(std::istream& in);
std::vector<CorpusRecord> load_corpus_file(const std::string& path);

struct SplitFilter {
  std::int64_t at;  // record position (1-based) splitting before/after
  int min_before;
  int min_after;
};

struct ReplayOptions {
  int min_appearances{1};
  bool interactions{false};
  bool reduce{true};
  double rho{kDefaultRidge};
  double alpha{0.0};
  std::optional<SplitFilter> split;
};

struct PathPoint {
  std::int64_t t;
  Vector estimate;  // per reduced column
  bool identified;  // false before full_rank_time (ridge phase)
};

struct ReplayReport {
  std::vector<std::string> entities;  // filtered entities, columns of the dummy design
  std::map<std::string, Eigen::Index> entity_index;
  std::vector<std::string> columns;  // design columns incl. pair dummies "a*b"
  std::vector<std::string> reduced_labels;  // composites joined with "|"
  CollinearityReduction reduction;
  Matrix design;          // filtered dummy design (T x columns)
  Matrix reduced_design;  // design * reduction.projection
  Vector utilities;
  std::optional<std::int64_t> full_rank_time;
  std::vector<PathPoint> coefficient_paths;
  std::vector<CentralityEntry> centralities;  // over reduced columns
  PrecisionState final_state;
};

class NeverFullRankError : public Error {
 public:
  explicit NeverFullRankError(ReplayReport partial)
      : Error(ErrorCode::NeverFullRank, "design never reaches full rank"), partial_(std::move(partial)) {}
  const ReplayReport& partial() const noexcept { return partial_; }

 private:
  ReplayReport partial_;
};

ReplayReport replay(const std::vector<CorpusRecord>& records, const ReplayOptions& options = {});

enum class Format { CSV, JSON };

void export_trajectory(const Trajectory& traj, std::ostream& sink, Format format);
Trajectory load_trajectory(std::istream& in, Format format);

void export_report(const ReplayReport& report, std::ostream& sink, Format format);

// labels name the columns of the decomposed matrix; empty means "x1", "x2", ...
void export_spectral(const SpectralSummary& summary, const std::vector<std::string>& labels, std::ostream& sink,
                     Format format);

// Result of one design construction: named scalars plus an optional bundle.
struct DesignResult {
  std::string construction;
  std::vector<std::pair<std::string, double>> values;
  std::optional<Bundle> bundle;
};
void export_design(const DesignResult& result, std::ostream& sink, Format format);

struct MarketReport {
  std::optional<PricingPlan> complete;
  std::optional<Bundle> incomplete;  // l2 plan under a prior belief
  std::optional<PriorBelief> prior;
};
void export_market(const MarketReport& report, std::ostream& sink, Format format);

struct SweepRow {
  std::uint64_t seed;
  ConvergenceDiagnostics diagnostics;
};
void export_sweep(const std::vector<SweepRow>& rows, std::ostream& sink, Format format);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

}  // namespace bundlelearn

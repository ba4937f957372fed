#include "bundlelearn/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace bundlelearn {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw Error(ErrorCode::ParseError, "not a number: '" + text + "'");
  return v;
}

// ---------------------------------------------------------------- loading

namespace {

constexpr const char* kCorpusHeader = "order,items,utility";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<CorpusRecord> load_corpus(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::string> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto cr = lines[ln].find('\r');
    if (cr != std::string::npos) throw ParseError(ErrorCode::ParseError, ln + 1, cr + 1, "carriage return; use LF line endings");
  }
  if (lines.empty() || lines[0] != kCorpusHeader)
    throw ParseError(ErrorCode::ParseError, 1, 1, std::string("expected header '") + kCorpusHeader + "'");

  std::vector<CorpusRecord> records;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::string& line = lines[ln];
    const std::size_t lineno = ln + 1;
    if (line.empty()) throw ParseError(ErrorCode::ParseError, lineno, 1, "empty line");
    const auto fields = split(line, ',');
    if (fields.size() != 3)
      throw ParseError(ErrorCode::ParseError, lineno, 1, "expected 3 fields, found " + std::to_string(fields.size()));
    const std::size_t col_items = fields[0].size() + 2;
    const std::size_t col_utility = col_items + fields[1].size() + 1;

    CorpusRecord rec{};
    rec.line = lineno;
    {
      const auto& f = fields[0];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), rec.order);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw ParseError(ErrorCode::ParseError, lineno, 1, "order is not an integer: '" + f + "'");
    }
    {
      std::set<std::string> seen;
      std::size_t col = col_items;
      for (const auto& item : split(fields[1], ';')) {
        if (item.empty()) throw ParseError(ErrorCode::ParseError, lineno, col, "empty item identifier");
        if (!seen.insert(item).second)
          throw ParseError(ErrorCode::DuplicateItemInRecord, lineno, col, "item '" + item + "' listed twice");
        rec.items.push_back(item);
        col += item.size() + 1;
      }
    }
    {
      const auto& f = fields[2];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), rec.utility);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(rec.utility))
        throw ParseError(ErrorCode::ParseError, lineno, col_utility, "utility is not a finite number: '" + f + "'");
    }
    records.push_back(std::move(rec));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const CorpusRecord& a, const CorpusRecord& b) { return a.order < b.order; });
  return records;
}

std::vector<CorpusRecord> load_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open corpus file '" + path + "'");
  return load_corpus(in);
}

// ---------------------------------------------------------------- replay

ReplayReport replay(const std::vector<CorpusRecord>& records, const ReplayOptions& opt) {
  if (opt.min_appearances < 1) throw Error(ErrorCode::InvalidArgument, "min_appearances must be >= 1");
  for (std::size_t k = 1; k < records.size(); ++k)
    if (records[k].order < records[k - 1].order) throw Error(ErrorCode::InvalidArgument, "records are not chronological");

  ReplayReport rep;
  const auto T = static_cast<Eigen::Index>(records.size());

  // Entities in first-appearance order, kept when frequent enough.
  std::vector<std::string> order;
  std::map<std::string, int> total, before, after;
  for (Eigen::Index t = 0; t < T; ++t)
    for (const auto& item : records[static_cast<std::size_t>(t)].items) {
      if (!total.count(item)) order.push_back(item);
      ++total[item];
      if (opt.split) ++((t + 1) < opt.split->at ? before : after)[item];
    }
  for (const auto& name : order) {
    if (total[name] < opt.min_appearances) continue;
    if (opt.split && (before[name] < opt.split->min_before || after[name] < opt.split->min_after)) continue;
    rep.entity_index[name] = static_cast<Eigen::Index>(rep.entities.size());
    rep.entities.push_back(name);
  }
  const auto m = static_cast<Eigen::Index>(rep.entities.size());

  rep.columns = rep.entities;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  if (opt.interactions) {
    std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
    for (const auto& rec : records) {
      std::vector<Eigen::Index> cols;
      for (const auto& item : rec.items)
        if (auto it = rep.entity_index.find(item); it != rep.entity_index.end()) cols.push_back(it->second);
      std::sort(cols.begin(), cols.end());
      for (std::size_t a = 0; a < cols.size(); ++a)
        for (std::size_t b = a + 1; b < cols.size(); ++b) seen.emplace(cols[a], cols[b]);
    }
    pairs.assign(seen.begin(), seen.end());
    for (const auto& [a, b] : pairs) rep.columns.push_back(rep.entities[a] + "*" + rep.entities[b]);
  }
  const auto n = static_cast<Eigen::Index>(rep.columns.size());

  rep.design = Matrix::Zero(T, n);
  rep.utilities.resize(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto& rec = records[static_cast<std::size_t>(t)];
    for (const auto& item : rec.items)
      if (auto it = rep.entity_index.find(item); it != rep.entity_index.end()) rep.design(t, it->second) = 1.0;
    for (std::size_t p = 0; p < pairs.size(); ++p)
      rep.design(t, m + static_cast<Eigen::Index>(p)) = rep.design(t, pairs[p].first) * rep.design(t, pairs[p].second);
    rep.utilities(t) = rec.utility;
  }

  if (n == 0 || T == 0) throw NeverFullRankError(std::move(rep));

  if (opt.reduce) {
    ReducedDesign red = reduce_collinearity(rep.design);
    rep.reduction = std::move(red.reduction);
    rep.reduced_design = std::move(red.design);
  } else {
    rep.reduction.projection = Matrix::Identity(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      rep.reduction.kept.push_back(k);
      rep.reduction.members.push_back({k});
    }
    rep.reduced_design = rep.design;
  }
  for (const auto& members : rep.reduction.members) {
    std::string label;
    for (Eigen::Index k : members) label += (label.empty() ? "" : "|") + rep.columns[static_cast<std::size_t>(k)];
    rep.reduced_labels.push_back(label);
  }
  const Eigen::Index r = rep.reduced_design.cols();
  if (r == 0) throw NeverFullRankError(std::move(rep));

  // Ridge phase until the exact information matrix is invertible, then batch
  // OLS on the prefix, then exact recursive updates.
  PrecisionState state = init_ridge(r, opt.rho, Vector::Zero(r), opt.alpha);
  Matrix exact = Matrix::Zero(r, r);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Vector x = rep.reduced_design.row(t).transpose();
    const double u = rep.utilities(t);
    exact.noalias() += x * x.transpose();
    if (rep.full_rank_time) {
      state = recursive_update(state, x, u).new_state;
    } else if (is_full_rank(exact)) {
      rep.full_rank_time = t + 1;
      History prefix(opt.alpha);
      for (Eigen::Index s = 0; s <= t; ++s) prefix.append(rep.reduced_design.row(s).transpose(), rep.utilities(s));
      state = batch_ols(prefix);
    } else {
      state = recursive_update(state, x, u).new_state;
    }
    rep.coefficient_paths.push_back({t + 1, state.estimate, rep.full_rank_time.has_value()});
  }
  rep.final_state = state;
  if (!rep.full_rank_time) throw NeverFullRankError(std::move(rep));
  rep.centralities = centrality_report(decompose(exact));
  return rep;
}

// ---------------------------------------------------------------- export

namespace {

void check_sink(std::ostream& sink) {
  if (!sink) throw Error(ErrorCode::SinkWriteFailure, "failed to write output");
}

ordered_json to_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

ordered_json to_json(const Matrix& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
  return a;
}

// JSON has no infinity; kappa of a singular Z is written as null.
ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }
double null_as_inf(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

Vector vector_from_json(const ordered_json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) v(static_cast<Eigen::Index>(k)) = a[k].get<double>();
  return v;
}

Matrix matrix_from_json(const ordered_json& a) {
  const auto rows = static_cast<Eigen::Index>(a.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(a[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = vector_from_json(a[static_cast<std::size_t>(r)]).transpose();
  return m;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,surprise,mse,kappa,lambda_min";
  for (Eigen::Index k = 0; k < traj.dimension; ++k) out << ",beta_hat_" << (k + 1);
  out << '\n';
  for (const auto& s : traj.steps) {
    out << s.t << ',' << format_double(s.surprise) << ',' << format_double(s.mse) << ',' << format_double(s.kappa)
        << ',' << format_double(s.lambda_min);
    for (Eigen::Index k = 0; k < s.estimate.size(); ++k) out << ',' << format_double(s.estimate(k));
    out << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(ErrorCode::ParseError, 1, 1, "missing header");
  const auto header = split(line, ',');
  const std::vector<std::string> fixed{"t", "surprise", "mse", "kappa", "lambda_min"};
  if (header.size() < fixed.size() || !std::equal(fixed.begin(), fixed.end(), header.begin()))
    throw ParseError(ErrorCode::ParseError, 1, 1, "unexpected trajectory header");
  Trajectory traj;
  traj.dimension = static_cast<Eigen::Index>(header.size() - fixed.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split(line, ',');
    if (f.size() != header.size()) throw ParseError(ErrorCode::ParseError, lineno, 1, "wrong field count");
    StepRecord s{};
    try {
      s.t = std::stoll(f[0]);
      s.surprise = parse_double(f[1]);
      s.mse = parse_double(f[2]);
      s.kappa = parse_double(f[3]);
      s.lambda_min = parse_double(f[4]);
      s.estimate.resize(traj.dimension);
      for (Eigen::Index k = 0; k < traj.dimension; ++k)
        s.estimate(k) = parse_double(f[fixed.size() + static_cast<std::size_t>(k)]);
    } catch (const std::exception& e) {
      throw ParseError(ErrorCode::ParseError, lineno, 1, e.what());
    }
    traj.steps.push_back(std::move(s));
  }
  return traj;
}

ordered_json state_to_json(const PrecisionState& s) {
  return ordered_json{{"count", s.count},           {"full_rank", s.full_rank}, {"ridge", s.ridge},
                      {"baseline", s.baseline},     {"estimate", to_json(s.estimate)},
                      {"info", to_json(s.info)},    {"cov", to_json(s.cov)}};
}

}  // namespace

void export_trajectory(const Trajectory& traj, std::ostream& sink, Format format) {
  if (format == Format::CSV) {
    write_trajectory_csv(traj, sink);
  } else {
    ordered_json doc;
    doc["schema_version"] = "1";
    doc["kind"] = "trajectory";
    doc["dimension"] = traj.dimension;
    doc["sigma2"] = traj.sigma2;
    doc["oracle_reads"] = traj.oracle_reads;
    doc["stall_step"] = traj.stall_step ? ordered_json(*traj.stall_step) : ordered_json(nullptr);
    ordered_json steps = ordered_json::array();
    for (const auto& s : traj.steps)
      steps.push_back({{"t", s.t},
                       {"bundle", to_json(s.bundle)},
                       {"utility", s.utility},
                       {"surprise", s.surprise},
                       {"estimate", to_json(s.estimate)},
                       {"mse", s.mse},
                       {"kappa", number_or_null(s.kappa)},
                       {"lambda_min", s.lambda_min},
                       {"infeasible", s.infeasible}});
    doc["steps"] = std::move(steps);
    doc["final_state"] = state_to_json(traj.final_state);
    sink << doc.dump(2) << '\n';
  }
  check_sink(sink);
}

Trajectory load_trajectory(std::istream& in, Format format) {
  if (format == Format::CSV) return read_trajectory_csv(in);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("trajectory JSON: ") + e.what());
  }
  if (doc.value("schema_version", "") != "1") throw Error(ErrorCode::ParseError, "unsupported schema_version");
  Trajectory traj;
  traj.dimension = doc.at("dimension").get<Eigen::Index>();
  traj.sigma2 = doc.at("sigma2").get<double>();
  traj.oracle_reads = doc.at("oracle_reads").get<std::int64_t>();
  if (!doc.at("stall_step").is_null()) traj.stall_step = doc.at("stall_step").get<std::int64_t>();
  for (const auto& s : doc.at("steps"))
    traj.steps.push_back({s.at("t").get<std::int64_t>(), vector_from_json(s.at("bundle")), s.at("utility").get<double>(),
                          s.at("surprise").get<double>(), vector_from_json(s.at("estimate")), s.at("mse").get<double>(),
                          null_as_inf(s.at("kappa")), s.at("lambda_min").get<double>(), s.at("infeasible").get<bool>()});
  const auto& fs = doc.at("final_state");
  traj.final_state.count = fs.at("count").get<std::int64_t>();
  traj.final_state.full_rank = fs.at("full_rank").get<bool>();
  traj.final_state.ridge = fs.at("ridge").get<double>();
  traj.final_state.baseline = fs.at("baseline").get<double>();
  traj.final_state.estimate = vector_from_json(fs.at("estimate"));
  traj.final_state.info = matrix_from_json(fs.at("info"));
  traj.final_state.cov = matrix_from_json(fs.at("cov"));
  return traj;
}

void export_report(const ReplayReport& rep, std::ostream& sink, Format format) {
  if (format == Format::CSV) {
    sink << "t,identified";
    for (const auto& label : rep.reduced_labels) sink << ',' << label;
    sink << '\n';
    for (const auto& p : rep.coefficient_paths) {
      sink << p.t << ',' << (p.identified ? 1 : 0);
      for (Eigen::Index k = 0; k < p.estimate.size(); ++k) sink << ',' << format_double(p.estimate(k));
      sink << '\n';
    }
    check_sink(sink);
    return;
  }
  const auto labels_of = [&](const std::vector<Eigen::Index>& cols) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index k : cols) a.push_back(rep.columns[static_cast<std::size_t>(k)]);
    return a;
  };
  ordered_json doc;
  doc["schema_version"] = "1";
  doc["kind"] = "replay";
  doc["entities"] = rep.entities;
  doc["columns"] = rep.columns;
  doc["reduced_columns"] = rep.reduced_labels;
  ordered_json composites = ordered_json::array();
  for (const auto& c : rep.reduction.composites) composites.push_back(labels_of(c));
  doc["reduction"] = {{"kept", labels_of(rep.reduction.kept)},
                      {"composites", std::move(composites)},
                      {"dropped", labels_of(rep.reduction.dropped)}};
  doc["full_rank_time"] = rep.full_rank_time ? ordered_json(*rep.full_rank_time) : ordered_json(nullptr);
  ordered_json final_estimate = ordered_json::object();
  for (std::size_t k = 0; k < rep.reduced_labels.size() && static_cast<Eigen::Index>(k) < rep.final_state.estimate.size(); ++k)
    final_estimate[rep.reduced_labels[k]] = rep.final_state.estimate(static_cast<Eigen::Index>(k));
  doc["final_estimate"] = std::move(final_estimate);
  ordered_json ranking = ordered_json::array();
  for (std::size_t rank = 0; rank < rep.centralities.size(); ++rank) {
    const auto& c = rep.centralities[rank];
    ranking.push_back({{"rank", rank + 1},
                       {"index", c.good},
                       {"label", rep.reduced_labels[static_cast<std::size_t>(c.good)]},
                       {"vN", c.vn},
                       {"vC", c.vc}});
  }
  doc["centralities"] = std::move(ranking);
  ordered_json paths = ordered_json::array();
  for (const auto& p : rep.coefficient_paths)
    paths.push_back({{"t", p.t}, {"identified", p.identified}, {"estimate", to_json(p.estimate)}});
  doc["coefficient_paths"] = std::move(paths);
  sink << doc.dump(2) << '\n';
  check_sink(sink);
}

}  // namespace bundlelearn

namespace bundlelearn {

namespace {

std::string default_label(std::size_t k) { return "x" + std::to_string(k + 1); }

// Key/value CSV shared by the small single-record documents.
void write_pairs_csv(const std::vector<std::pair<std::string, std::string>>& rows, std::ostream& sink) {
  sink << "key,value\n";
  for (const auto& [k, v] : rows) sink << k << ',' << v << '\n';
}

std::string join_vector(const Vector& v) {
  std::string s;
  for (Eigen::Index k = 0; k < v.size(); ++k) s += (k ? ";" : "") + format_double(v(k));
  return s;
}

}  // namespace

void export_spectral(const SpectralSummary& s, const std::vector<std::string>& labels_in, std::ostream& sink,
                     Format format) {
  const auto n = static_cast<std::size_t>(s.eigenvalues.size());
  std::vector<std::string> labels = labels_in;
  if (labels.empty())
    for (std::size_t k = 0; k < n; ++k) labels.push_back(default_label(k));
  if (labels.size() != n) throw Error(ErrorCode::DimensionMismatch, "export_spectral: label count");
  const auto ranking = centrality_report(s);
  if (format == Format::CSV) {
    sink << "rank,index,label,vN,vC\n";
    for (std::size_t r = 0; r < ranking.size(); ++r) {
      const auto& c = ranking[r];
      sink << r + 1 << ',' << c.good << ',' << labels[static_cast<std::size_t>(c.good)] << ',' << format_double(c.vn)
           << ',' << format_double(c.vc) << '\n';
    }
    check_sink(sink);
    return;
  }
  const auto part = partition_by_correlation(s);
  const auto label_list = [&](const std::vector<Eigen::Index>& idx) {
    ordered_json a = ordered_json::array();
    for (auto k : idx) a.push_back(labels[static_cast<std::size_t>(k)]);
    return a;
  };
  ordered_json clusters = ordered_json::array();
  for (const auto& [first, last] : s.clusters) clusters.push_back({first, last});
  ordered_json ranks = ordered_json::array();
  for (std::size_t r = 0; r < ranking.size(); ++r)
    ranks.push_back({{"rank", r + 1},
                     {"index", ranking[r].good},
                     {"label", labels[static_cast<std::size_t>(ranking[r].good)]},
                     {"vN", ranking[r].vn},
                     {"vC", ranking[r].vc}});
  ordered_json doc;
  doc["schema_version"] = "1";
  doc["kind"] = "spectral";
  doc["labels"] = labels;
  doc["eigenvalues"] = to_json(s.eigenvalues);
  doc["kappa"] = number_or_null(s.kappa);
  doc["clusters"] = std::move(clusters);
  doc["vN"] = to_json(s.vN);
  doc["vC"] = to_json(s.vC);
  doc["partition"] = {{"positive", label_list(part.side_positive)},
                      {"negative", label_list(part.side_negative)},
                      {"zero", label_list(part.zero_entries)}};
  doc["centralities"] = std::move(ranks);
  sink << doc.dump(2) << '\n';
  check_sink(sink);
}

void export_design(const DesignResult& r, std::ostream& sink, Format format) {
  if (format == Format::CSV) {
    std::vector<std::pair<std::string, std::string>> rows{{"construction", r.construction}};
    for (const auto& [k, v] : r.values) rows.emplace_back(k, format_double(v));
    if (r.bundle) rows.emplace_back("bundle", join_vector(*r.bundle));
    write_pairs_csv(rows, sink);
  } else {
    ordered_json doc;
    doc["schema_version"] = "1";
    doc["kind"] = "design";
    doc["construction"] = r.construction;
    ordered_json values = ordered_json::object();
    for (const auto& [k, v] : r.values) values[k] = number_or_null(v);
    doc["values"] = std::move(values);
    doc["bundle"] = r.bundle ? to_json(*r.bundle) : ordered_json(nullptr);
    sink << doc.dump(2) << '\n';
  }
  check_sink(sink);
}

void export_market(const MarketReport& m, std::ostream& sink, Format format) {
  if (format == Format::CSV) {
    std::vector<std::pair<std::string, std::string>> rows;
    if (const auto& p = m.complete) {
      rows = {{"mode", to_string(p->mode)},
              {"x1", join_vector(p->x1)},
              {"x2", join_vector(p->x2)},
              {"p1", format_double(p->p1)},
              {"p2", format_double(p->p2)},
              {"believed_best", std::to_string(p->believed_best)},
              {"true_best", std::to_string(p->true_best)},
              {"sold_in_period2", std::to_string(p->sold_in_period2)},
              {"expected_beta_hat1", join_vector(p->expected_beta_hat1)},
              {"objective", format_double(p->objective)},
              {"non_unique", p->non_unique ? "true" : "false"},
              {"regime_premise", p->regime_premise ? "true" : "false"}};
    }
    if (m.incomplete) rows.emplace_back("incomplete_bundle", join_vector(*m.incomplete));
    write_pairs_csv(rows, sink);
    check_sink(sink);
    return;
  }
  ordered_json doc;
  doc["schema_version"] = "1";
  doc["kind"] = "market";
  if (const auto& p = m.complete) {
    doc["complete"] = {{"mode", to_string(p->mode)},
                       {"x1", to_json(p->x1)},
                       {"x2", to_json(p->x2)},
                       {"p1", p->p1},
                       {"p2", p->p2},
                       {"believed_best", p->believed_best},
                       {"true_best", p->true_best},
                       {"sold_in_period2", p->sold_in_period2},
                       {"expected_beta_hat1", to_json(p->expected_beta_hat1)},
                       {"objective", p->objective},
                       {"non_unique", p->non_unique},
                       {"regime_premise", p->regime_premise}};
  } else {
    doc["complete"] = nullptr;
  }
  if (m.incomplete && m.prior) {
    doc["incomplete"] = {{"stance", m.prior->stance == Stance::Pessimistic ? "pessimistic" : "optimistic"},
                         {"xi", m.prior->xi},
                         {"bundle", to_json(*m.incomplete)}};
  } else {
    doc["incomplete"] = nullptr;
  }
  sink << doc.dump(2) << '\n';
  check_sink(sink);
}

void export_sweep(const std::vector<SweepRow>& rows, std::ostream& sink, Format format) {
  if (format == Format::CSV) {
    sink << "seed,final_mse,bound_ratio,lambda_min_divergent\n";
    for (const auto& r : rows)
      sink << r.seed << ',' << format_double(r.diagnostics.final_mse) << ',' << format_double(r.diagnostics.bound_ratio)
           << ',' << (r.diagnostics.lambda_min_divergent ? 1 : 0) << '\n';
  } else {
    ordered_json runs = ordered_json::array();
    for (const auto& r : rows)
      runs.push_back({{"seed", r.seed},
                      {"final_mse", r.diagnostics.final_mse},
                      {"bound_ratio", number_or_null(r.diagnostics.bound_ratio)},
                      {"lambda_min_divergent", r.diagnostics.lambda_min_divergent}});
    ordered_json doc;
    doc["schema_version"] = "1";
    doc["kind"] = "sweep";
    doc["runs"] = std::move(runs);
    sink << doc.dump(2) << '\n';
  }
  check_sink(sink);
}

}  // namespace bundlelearn

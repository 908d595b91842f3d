#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "stqa/records.hpp"
#include "stqa/vocabulary.hpp"

namespace stqa {

using Rational = boost::multiprecision::cpp_rational;
/// An exact rate; nullopt renders as N/A (empty defining set).
using Rate = std::optional<Rational>;

Rate ratio(std::size_t num, std::size_t den);
/// "0.67", "-0.40", "N/A". Rounds half away from zero on the exact value.
std::string format_rate(const Rate& r, int decimals = 2);

// ---- accuracy --------------------------------------------------------------

/// Per-answer-balanced accuracy of one type: the mean over observed ground
/// truth answers g of the accuracy on questions whose ground truth is g.
Rate accuracy(const RecordSet& records, QuestionType type);
/// Unweighted mean of the per-type accuracies over types present.
Rate overall_accuracy(const RecordSet& records);

// ---- compositional accuracy --------------------------------------------------

/// Defining-set counts for CA, RWR and RWR-n over labeled compositional
/// records whose children are all labeled.
struct CompositionStats {
  std::size_t ca_total = 0;
  std::size_t ca_correct = 0;
  std::size_t rwr_total = 0;
  std::size_t rwr_correct = 0;
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_wrong;  // n -> (total, correct)

  Rate ca() const { return ratio(ca_correct, ca_total); }
  Rate rwr() const { return ratio(rwr_correct, rwr_total); }
  Rate rwr_n(std::size_t n) const;
  Rate delta() const;
};

/// Restricted to one parent type when `type` is set.
CompositionStats composition_stats(const RecordSet& records,
                                   std::optional<QuestionType> type = std::nullopt);

// ---- internal consistency ----------------------------------------------------

struct ConsistencyCheck {
  const PredictionRecord* about;  // the related question the check constrains
  bool satisfied;
};

/// One row of the consistency table: a family, a parent answer pattern, and
/// the checks it derives on related questions from the model's own parent
/// answer.
struct ConsistencyRule {
  std::string family;
  std::string parent_answer;
  std::function<bool(const PredictionRecord&, const RecordSet&)> applies;
  std::function<std::vector<ConsistencyCheck>(const PredictionRecord&, const RecordSet&)> derive;

  std::string id() const { return family + "/" + parent_answer; }
};

/// The 31 default rules, in table order. The vocabulary tells object options
/// of a choice from action options.
std::vector<ConsistencyRule> default_consistency_rules(
    const Vocabulary& vocab = Vocabulary::standard());

struct RuleScore {
  std::string id;
  std::size_t satisfied = 0;
  std::size_t checks = 0;
  Rate ic() const { return ratio(satisfied, checks); }
};

struct ConsistencyReport {
  std::vector<RuleScore> rules;
  Rate overall;   // mean over rules with a nonzero denominator
  Rate weighted;  // all satisfied checks over all checks
};

ConsistencyReport internal_consistency(const RecordSet& records,
                                       const std::vector<ConsistencyRule>& rules);

// ---- report ------------------------------------------------------------------

struct TypeRow {
  QuestionType type;
  std::size_t records = 0;
  Rate accuracy;
  CompositionStats composition;
};

struct MetricsReport {
  std::size_t records = 0;
  std::vector<TypeRow> types;  // every type, in enumeration order
  Rate overall_accuracy;
  CompositionStats composition;
  ConsistencyReport consistency;
};

MetricsReport compute_metrics(const RecordSet& records, const std::vector<ConsistencyRule>& rules);

/// Fixed-width text tables. `weighted_ic` selects the question-weighted
/// overall IC instead of the rule mean.
std::string render_report(const MetricsReport& report, bool weighted_ic = false);
/// Rates as exact fractions ("2/3") and rounded decimals; N/A as null.
nlohmann::json report_to_json(const MetricsReport& report);

}  // namespace stqa

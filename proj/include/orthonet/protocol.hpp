#ifndef ORTHONET_PROTOCOL_HPP
#define ORTHONET_PROTOCOL_HPP

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "orthonet/learner.hpp"
#include "orthonet/rng.hpp"

namespace orthonet {

struct DatasetItem {
  std::string id;  // stable object id, e.g. "mug/mug_0007"
  ObjectDescriptor descriptor;
};

/// Categories in lexicographic label order ("dataset order"); instances keep
/// their load order.
using LabeledDataset = std::map<std::string, std::vector<DatasetItem>>;

enum class StopCondition { lack_of_data, breakpoint_reached };

inline const char* stop_condition_name(StopCondition s) {
  return s == StopCondition::lack_of_data ? "lack_of_data"
                                          : "breakpoint_reached";
}

enum class ActionKind { teach, ask, correct };

inline const char* action_name(ActionKind a) {
  switch (a) {
    case ActionKind::teach: return "teach";
    case ActionKind::ask: return "ask";
    case ActionKind::correct: return "correct";
  }
  return "?";
}

struct LogEntry {
  std::size_t index = 0;  // 1-based, strictly increasing over all actions
  ActionKind action = ActionKind::ask;
  std::string true_label;
  std::string predicted;  // "Unknown" for no prediction, "-" for teach/correct
  int correct = -1;       // 1/0 for asks, -1 (not applicable) otherwise
  std::size_t known = 0;  // category count after this entry
};

struct ExperimentLog {
  std::vector<LogEntry> entries;
  StopCondition stop = StopCondition::lack_of_data;
  std::uint64_t seed = 0;
};

struct ProtocolConfig {
  double tau = 0.67;
  std::size_t breakpoint = 100;       // asks since last introduction
  std::size_t window_multiplier = 3;  // window = max(mult * known, floor)
  std::size_t window_floor = 10;
  bool shuffle_categories = false;    // introduction order: dataset or per-seed
  DistanceKind distance = DistanceKind::chi2;
};

struct ProtocolResult {
  ExperimentLog log;
  CategoryStore store;
};

/// Classification hook for protocol runs. The default consults the store;
/// tests inject stubs (the true label is passed so a perfect classifier is
/// expressible).
using ClassifyFn = std::function<Classification(
    const CategoryStore&, const DatasetItem&, const std::string& true_label)>;

/// Test-then-Train simulated teacher.
///
/// One category is introduced by teaching its first unconsumed instance.
/// Then the teacher repeatedly asks about a uniformly random unconsumed
/// instance of a uniformly random known category; a wrong or Unknown answer
/// triggers a correct action, which stores the instance under its true
/// label. Once the current phase has seen at least max(window_multiplier *
/// known, window_floor) asks, accuracy over that many most recent asks above
/// tau introduces the next category (or ends the run with lack_of_data when
/// none remain). Reaching `breakpoint` asks since the last introduction ends
/// the run with breakpoint_reached; running out of askable instances ends it
/// with lack_of_data. Fully deterministic given (dataset, config, seed).
inline ProtocolResult run_simulated_teacher(const LabeledDataset& data,
                                            const ProtocolConfig& config,
                                            std::uint64_t seed,
                                            ClassifyFn classify_fn = {}) {
  if (data.empty()) throw DataError("dataset has no categories");
  std::size_t max_instances = 0;
  for (const auto& [label, items] : data) {
    if (items.empty())
      throw DataError("category '" + label + "' has no instances");
    max_instances = std::max(max_instances, items.size());
  }
  if (max_instances < 2)
    throw DataError("dataset too small: need a category with at least 2 instances");
  if (!(config.tau > 0.0 && config.tau < 1.0))
    throw DataError("tau must lie in (0, 1)");
  if (config.breakpoint < 1) throw DataError("breakpoint must be at least 1");

  if (!classify_fn)
    classify_fn = [](const CategoryStore& store, const DatasetItem& item,
                     const std::string&) { return classify(store, item.descriptor); };

  std::vector<std::string> intro_order;
  intro_order.reserve(data.size());
  for (const auto& [label, items] : data) intro_order.push_back(label);

  CounterRng rng(seed);
  if (config.shuffle_categories) {
    for (std::size_t i = intro_order.size(); i > 1; --i)
      std::swap(intro_order[i - 1], intro_order[rng.next_below(i)]);
  }

  // Unconsumed instances per label; erase preserves order so draws stay
  // reproducible.
  std::map<std::string, std::vector<const DatasetItem*>> remaining;
  for (const auto& [label, items] : data) {
    auto& bucket = remaining[label];
    bucket.reserve(items.size());
    for (const DatasetItem& item : items) bucket.push_back(&item);
  }

  ProtocolResult result;
  result.log.seed = seed;
  result.store.distance = config.distance;

  std::vector<std::string> known;
  std::vector<int> ask_outcomes;  // 1 correct / 0 wrong, all phases
  std::size_t next_intro = 0;
  std::size_t asks_since_intro = 0;
  std::size_t index = 0;

  const auto introduce = [&]() {
    const std::string& label = intro_order[next_intro++];
    auto& bucket = remaining[label];
    const DatasetItem* item = bucket.front();
    bucket.erase(bucket.begin());
    teach(result.store, label, item->descriptor);
    known.push_back(label);
    asks_since_intro = 0;
    result.log.entries.push_back(
        {++index, ActionKind::teach, label, "-", -1, known.size()});
  };

  introduce();
  while (true) {
    std::vector<const std::string*> eligible;
    eligible.reserve(known.size());
    for (const std::string& label : known)
      if (!remaining[label].empty()) eligible.push_back(&label);
    if (eligible.empty()) {
      result.log.stop = StopCondition::lack_of_data;
      return result;
    }

    const std::string& label = *eligible[rng.next_below(eligible.size())];
    auto& bucket = remaining[label];
    const DatasetItem* item = bucket[rng.next_below(bucket.size())];
    bucket.erase(std::find(bucket.begin(), bucket.end(), item));

    const Classification answer = classify_fn(result.store, *item, label);
    const bool ok = answer.label.has_value() && *answer.label == label;
    result.log.entries.push_back({++index, ActionKind::ask, label,
                                  answer.label.value_or("Unknown"), ok ? 1 : 0,
                                  known.size()});
    ask_outcomes.push_back(ok ? 1 : 0);
    ++asks_since_intro;

    if (!ok) {
      teach(result.store, label, item->descriptor);
      result.log.entries.push_back(
          {++index, ActionKind::correct, label, "-", -1, known.size()});
    }

    const std::size_t window =
        std::max(config.window_multiplier * known.size(), config.window_floor);
    if (asks_since_intro >= window) {
      std::size_t hits = 0;
      for (std::size_t i = ask_outcomes.size() - window; i < ask_outcomes.size();
           ++i)
        hits += static_cast<std::size_t>(ask_outcomes[i]);
      const double accuracy =
          static_cast<double>(hits) / static_cast<double>(window);
      if (accuracy > config.tau) {
        if (next_intro >= intro_order.size()) {
          result.log.stop = StopCondition::lack_of_data;
          return result;
        }
        introduce();
        continue;
      }
    }
    if (asks_since_intro >= config.breakpoint) {
      result.log.stop = StopCondition::breakpoint_reached;
      return result;
    }
  }
}

struct Metrics {
  std::size_t qci = 0;  // ask + correct actions
  std::size_t tlc = 0;  // categories known at the end
  double aic = 0.0;     // stored instances per category
  double gca = 0.0;     // correct asks / asks over the whole run
  double apa = 0.0;     // mean per-phase ask accuracy
};

/// Phases are the ask spans between consecutive teach entries; phases with
/// no asks are skipped by APA.
inline Metrics compute_metrics(const ExperimentLog& log,
                               const CategoryStore& store) {
  if (log.entries.empty()) throw DataError("empty experiment log");

  Metrics m;
  std::size_t asks = 0, hits = 0;
  std::size_t phase_asks = 0, phase_hits = 0, phases = 0;
  double phase_acc_sum = 0.0;
  const auto close_phase = [&]() {
    if (phase_asks > 0) {
      phase_acc_sum +=
          static_cast<double>(phase_hits) / static_cast<double>(phase_asks);
      ++phases;
    }
    phase_asks = phase_hits = 0;
  };

  for (const LogEntry& e : log.entries) {
    switch (e.action) {
      case ActionKind::teach:
        close_phase();
        break;
      case ActionKind::ask:
        ++m.qci;
        ++asks;
        ++phase_asks;
        if (e.correct == 1) {
          ++hits;
          ++phase_hits;
        }
        break;
      case ActionKind::correct:
        ++m.qci;
        break;
    }
  }
  close_phase();

  m.tlc = store.category_count();
  m.aic = m.tlc > 0 ? static_cast<double>(store.instance_count()) /
                          static_cast<double>(m.tlc)
                    : 0.0;
  m.gca = asks > 0 ? static_cast<double>(hits) / static_cast<double>(asks) : 0.0;
  m.apa = phases > 0 ? phase_acc_sum / static_cast<double>(phases) : 0.0;
  return m;
}

/// One tab-separated line per entry plus a stop footer; byte-stable.
inline std::string serialize_log(const ExperimentLog& log) {
  std::string out = "# orthonet-log 1 seed " + std::to_string(log.seed) + "\n";
  out += "# index\taction\ttrue\tpredicted\tcorrect\tknown\n";
  for (const LogEntry& e : log.entries) {
    out += std::to_string(e.index);
    out += '\t';
    out += action_name(e.action);
    out += '\t';
    out += e.true_label;
    out += '\t';
    out += e.predicted;
    out += '\t';
    out += e.correct < 0 ? "-" : (e.correct == 1 ? "1" : "0");
    out += '\t';
    out += std::to_string(e.known);
    out += '\n';
  }
  out += "stop " + std::string(stop_condition_name(log.stop)) + "\n";
  return out;
}

inline std::string serialize_metrics(const Metrics& m, StopCondition stop) {
  std::string out;
  out += "qci " + std::to_string(m.qci) + "\n";
  out += "tlc " + std::to_string(m.tlc) + "\n";
  out += "aic " + detail::format_real(m.aic) + "\n";
  out += "gca " + detail::format_real(m.gca) + "\n";
  out += "apa " + detail::format_real(m.apa) + "\n";
  out += "stop " + std::string(stop_condition_name(stop)) + "\n";
  return out;
}

struct OfflineReport {
  double aia = 0.0;
  double aca = 0.0;
  std::vector<std::string> labels;  // confusion row/column order
  std::vector<std::vector<std::size_t>> counts;   // counts[true][predicted]
  std::vector<std::vector<double>> confusion;     // row-normalized
  std::size_t total = 0;
  std::size_t correct = 0;
};

/// Teach every train instance, classify every test instance. AIA is the
/// instance (micro) accuracy, ACA the mean of per-class accuracies over
/// classes present in the test set.
inline OfflineReport offline_eval(const LabeledDataset& train,
                                  const LabeledDataset& test,
                                  DistanceKind distance) {
  if (train.empty()) throw DataError("training set has no categories");
  for (const auto& [label, items] : test)
    if (train.find(label) == train.end())
      throw DataError("test label '" + label + "' absent from training set");

  CategoryStore store;
  store.distance = distance;
  for (const auto& [label, items] : train)
    for (const DatasetItem& item : items) teach(store, label, item.descriptor);

  OfflineReport report;
  std::map<std::string, std::size_t> row;
  for (const auto& [label, items] : train) {
    row[label] = report.labels.size();
    report.labels.push_back(label);
  }
  const std::size_t n = report.labels.size();
  report.counts.assign(n, std::vector<std::size_t>(n, 0));

  double class_acc_sum = 0.0;
  std::size_t classes_tested = 0;
  for (const auto& [label, items] : test) {
    std::size_t class_hits = 0;
    for (const DatasetItem& item : items) {
      const Classification c = classify(store, item.descriptor);
      ++report.total;
      const bool ok = c.label.has_value() && *c.label == label;
      if (ok) {
        ++report.correct;
        ++class_hits;
      }
      if (c.label) ++report.counts[row[label]][row[*c.label]];
    }
    if (!items.empty()) {
      class_acc_sum +=
          static_cast<double>(class_hits) / static_cast<double>(items.size());
      ++classes_tested;
    }
  }

  report.confusion.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t row_total = 0;
    for (std::size_t j = 0; j < n; ++j) row_total += report.counts[i][j];
    if (row_total > 0)
      for (std::size_t j = 0; j < n; ++j)
        report.confusion[i][j] = static_cast<double>(report.counts[i][j]) /
                                 static_cast<double>(row_total);
  }
  report.aia = report.total > 0 ? static_cast<double>(report.correct) /
                                      static_cast<double>(report.total)
                                : 0.0;
  report.aca = classes_tested > 0 ? class_acc_sum /
                                        static_cast<double>(classes_tested)
                                  : 0.0;
  return report;
}

}  // namespace orthonet

#endif  // ORTHONET_PROTOCOL_HPP

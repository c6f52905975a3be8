#include "quasim/consistency.hpp"

#include <cstdio>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "quasim/manifest.hpp"

namespace quasim {
namespace {

std::vector<std::string> sequence_ids(
    const std::vector<std::optional<QuasiState>>& sequence, int digits) {
  std::vector<std::string> ids;
  ids.reserve(sequence.size());
  for (const auto& s : sequence) ids.push_back(quasi_state_id(s, digits));
  return ids;
}

std::string map_digest_text(const std::map<std::string, std::string>& m) {
  std::string text;
  for (const auto& [k, v] : m) text += k + "->" + v + ";";
  return text;
}

const std::string& lookup(const std::map<std::string, std::string>& table,
                          const std::string& key, const char* what) {
  const auto it = table.find(key);
  if (it == table.end())
    throw std::out_of_range(std::string("check_diagram1: unresolved ") + what +
                            " '" + key + "'");
  return it->second;
}

nlohmann::json violations_json(const std::vector<PairViolation>& violations) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : violations) {
    nlohmann::json jv;
    jv["window_a"] = v.window_a;
    jv["window_b"] = v.window_b;
    jv["expected"] = v.expected;
    jv["found"] = v.found;
    arr.push_back(jv);
  }
  return arr;
}

nlohmann::json diagram1_json(const Diagram1Report& report) {
  nlohmann::json j;
  j["consistent"] = report.consistent();
  j["violations"] = violations_json(report.violations);
  j["pairs_checked"] = report.pairs_checked;
  j["vacuous"] = report.vacuous;
  j["quantize_digits"] = report.quantize_digits;
  j["instance_digest"] = report.instance_digest;
  return j;
}

}  // namespace

std::string quasi_state_id(const std::optional<QuasiState>& state, int digits) {
  if (!state) return "null";
  const double beta = state->normalization;
  std::string id;
  char buf[64];
  for (const auto& c : state->components) {
    const double w = beta > 0.0 ? c.weight / beta : 0.0;
    std::snprintf(buf, sizeof buf, "%zu:%.*f", c.basis_index, digits, w);
    if (!id.empty()) id += "|";
    id += buf;
  }
  return id;
}

std::vector<std::optional<QuasiState>> state_sequence(
    const std::vector<MaximalResult>& results) {
  std::vector<std::optional<QuasiState>> seq;
  seq.reserve(results.size());
  for (const auto& r : results) seq.push_back(r.state);
  return seq;
}

QuasiProcess induce_process(const std::vector<std::optional<QuasiState>>& sequence,
                            int quantize_digits, std::string derived_from) {
  if (sequence.size() < 2)
    throw std::invalid_argument("induce_process: need at least two windows");
  QuasiProcess process;
  process.derived_from = std::move(derived_from);
  const auto ids = sequence_ids(sequence, quantize_digits);
  for (std::size_t w = 0; w + 1 < sequence.size(); ++w) {
    if (!sequence[w] || !sequence[w + 1]) continue;
    const std::string& src = ids[w];
    const std::string& dst = ids[w + 1];
    const auto [it, inserted] = process.transitions.emplace(src, dst);
    if (!inserted && it->second != dst)
      process.conflicts.push_back(TransitionConflict{src, it->second, dst, w});
  }
  return process;
}

Diagram1Report check_diagram1(const DiagramInstance& instance,
                              int quantize_digits) {
  Diagram1Report report;
  report.quantize_digits = quantize_digits;

  const auto ids = sequence_ids(instance.sequence, quantize_digits);
  std::string digest_text = "seq:";
  for (const auto& id : ids) digest_text += id + ";";
  digest_text += "interp:" + map_digest_text(instance.interpretation);
  digest_text += "dyn:" + map_digest_text(instance.info_dynamics);
  report.instance_digest = hex64(fnv1a64(digest_text));

  for (std::size_t w = 0; w + 1 < instance.sequence.size(); ++w) {
    if (!instance.sequence[w] || !instance.sequence[w + 1]) continue;
    const std::string& label_a =
        lookup(instance.interpretation, ids[w], "identifier");
    const std::string& label_b =
        lookup(instance.interpretation, ids[w + 1], "identifier");
    const std::string& expected =
        lookup(instance.info_dynamics, label_a, "label");
    ++report.pairs_checked;
    if (expected != label_b)
      report.violations.push_back(PairViolation{w, w + 1, expected, label_b});
  }
  report.vacuous = report.pairs_checked == 0;
  return report;
}

// ---------------------------------------------------------------------------

int record_pointer_value(const std::string& record_label) {
  const auto colon = record_label.find(':');
  if (colon == std::string::npos) return -1;
  const std::string kind = record_label.substr(0, colon);
  if (kind == "status") return 0;
  if (kind != "pointer") return -1;
  try {
    return std::stoi(record_label.substr(colon + 1));
  } catch (const std::exception&) {
    return -1;
  }
}

Diagram2Report check_diagram2(const MeasurementComposite& composite,
                              int quantize_digits) {
  const std::size_t windows = composite.apparatus_sequence.size();
  if (composite.record_labels.size() != windows ||
      composite.observer.sequence.size() != windows)
    throw std::invalid_argument(
        "check_diagram2: apparatus, record, and observer legs must cover the "
        "same windows");

  Diagram2Report report;
  report.quantize_digits = quantize_digits;
  report.untestable_note =
      "the entanglement-induced map between the apparatus and observer legs "
      "is declared structure with no observable of its own; this check "
      "covers only the record and interpretation legs";

  const auto vacuous = [&](std::size_t w) {
    return !composite.apparatus_sequence[w].has_value();
  };

  for (std::size_t w = 0; w < windows; ++w) {
    if (vacuous(w)) {
      ++report.vacuous_windows;
      continue;
    }
    // (b) the record's pointer must name the apparatus's induced pointer.
    const auto& state = *composite.apparatus_sequence[w];
    const int apparatus_pointer =
        state.components.size() == 1
            ? static_cast<int>(state.components.front().basis_index)
            : -1;
    const int rec_pointer = record_pointer_value(composite.record_labels[w]);
    if (rec_pointer != apparatus_pointer)
      report.pointer_violations.push_back(
          PointerViolation{w, rec_pointer, apparatus_pointer});
  }

  // (a) record transitions across consecutive non-vacuous windows.  Records
  // are external data, so an unmapped source is a violation, not an error.
  for (std::size_t w = 0; w + 1 < windows; ++w) {
    if (vacuous(w) || vacuous(w + 1)) continue;
    ++report.pairs_checked;
    const std::string& from = composite.record_labels[w];
    const std::string& to = composite.record_labels[w + 1];
    const auto it = composite.observer.info_dynamics.find(from);
    if (it == composite.observer.info_dynamics.end()) {
      report.record_dynamics_violations.push_back(
          PairViolation{w, w + 1, "(no dynamics for '" + from + "')", to});
    } else if (it->second != to) {
      report.record_dynamics_violations.push_back(
          PairViolation{w, w + 1, it->second, to});
    }
  }

  // (c) the observer leg must commute on its own.
  report.observer_leg = check_diagram1(composite.observer, quantize_digits);
  return report;
}

// ---------------------------------------------------------------------------

std::string diagram1_report_json(const Diagram1Report& report) {
  return diagram1_json(report).dump(2) + "\n";
}

std::string diagram2_report_json(const Diagram2Report& report) {
  nlohmann::json j;
  j["consistent"] = report.consistent();
  j["record_dynamics_violations"] =
      violations_json(report.record_dynamics_violations);
  nlohmann::json pointer_arr = nlohmann::json::array();
  for (const auto& v : report.pointer_violations) {
    nlohmann::json jv;
    jv["window"] = v.window;
    jv["record_pointer"] = v.record_pointer;
    jv["apparatus_pointer"] = v.apparatus_pointer;
    pointer_arr.push_back(jv);
  }
  j["pointer_violations"] = pointer_arr;
  j["observer_leg"] = diagram1_json(report.observer_leg);
  j["vacuous_windows"] = report.vacuous_windows;
  j["pairs_checked"] = report.pairs_checked;
  j["quantize_digits"] = report.quantize_digits;
  j["untestable_note"] = report.untestable_note;
  return j.dump(2) + "\n";
}

}  // namespace quasim

// Commutation checks on finite maps.
//
// A window sequence of quasi-states becomes a finite transition system once
// each state is given a canonical identifier (sorted component indices plus
// weights quantized after normalization).  An interpretation table maps those
// identifiers to information labels, and an information dynamics maps labels
// to labels.  The first check asks, pair by pair, whether interpreting and
// then stepping the labels agrees with stepping the states and then
// interpreting.  The second check layers a measurement on top: decoded
// records must step by the same label dynamics, and each record's pointer
// must name the same pointer the apparatus chain induces for that window.

#ifndef QUASIM_CONSISTENCY_HPP_
#define QUASIM_CONSISTENCY_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quasim/projection.hpp"

namespace quasim {

// Canonical identifier: "null" for Null, otherwise "idx:weight" pairs joined
// by "|", weights divided by the state's normalization and rounded to
// quantize_digits decimal digits.
std::string quasi_state_id(const std::optional<QuasiState>& state,
                           int quantize_digits = 6);

// The state sequence of a projection run.
std::vector<std::optional<QuasiState>> state_sequence(
    const std::vector<MaximalResult>& results);

// ---------------------------------------------------------------------------

struct TransitionConflict {
  std::string source;
  std::string kept;      // first-seen target, retained in the map
  std::string rejected;  // later conflicting target
  std::size_t window;    // index of the pair's first window
};

struct QuasiProcess {
  std::map<std::string, std::string> transitions;
  std::vector<TransitionConflict> conflicts;  // nondeterminism diagnostics
  std::string derived_from;
};

// Transition map over consecutive non-Null pairs; Null breaks adjacency and
// never creates transitions.  Conflicting targets for one source are
// reported, first target kept.
QuasiProcess induce_process(const std::vector<std::optional<QuasiState>>& sequence,
                            int quantize_digits = 6,
                            std::string derived_from = {});

// ---------------------------------------------------------------------------

using InterpretationTable = std::map<std::string, std::string>;
using InfoDynamics = std::map<std::string, std::string>;

struct DiagramInstance {
  std::vector<std::optional<QuasiState>> sequence;
  InterpretationTable interpretation;  // state identifier -> info label
  InfoDynamics info_dynamics;          // info label -> info label
};

struct PairViolation {
  std::size_t window_a = 0;
  std::size_t window_b = 0;
  std::string expected;
  std::string found;
};

struct Diagram1Report {
  std::vector<PairViolation> violations;
  std::size_t pairs_checked = 0;
  bool vacuous = false;  // no checkable pair in the sequence
  int quantize_digits = 6;
  std::string instance_digest;
  bool consistent() const { return violations.empty(); }
};

// For every consecutive pair of non-Null windows: stepping the first state's
// label through info_dynamics must give the second state's label.  Throws
// std::out_of_range when an identifier or label fails to resolve in the
// instance's own tables.
Diagram1Report check_diagram1(const DiagramInstance& instance,
                              int quantize_digits = 6);

// ---------------------------------------------------------------------------

// Record label asserted pointer: "pointer:N" names pointer N, any status
// label asserts the quiet pointer 0, anything else (including a missing
// record, "") parses to -1 and can never match.
int record_pointer_value(const std::string& record_label);

struct PointerViolation {
  std::size_t window = 0;
  int record_pointer = -1;
  int apparatus_pointer = -1;
};

// One window row per apparatus window.  apparatus_sequence holds the chain's
// induced quasi-state per window (Null = vacuous window: the interaction was
// undetectable and no transition is asserted there).  record_labels holds
// the decoded record content governing each window, carried over unchanged
// through vacuous windows.
struct MeasurementComposite {
  std::vector<std::optional<QuasiState>> apparatus_sequence;
  std::vector<std::string> record_labels;
  DiagramInstance observer;
};

struct Diagram2Report {
  std::vector<PairViolation> record_dynamics_violations;  // record leg
  std::vector<PointerViolation> pointer_violations;       // record vs apparatus
  Diagram1Report observer_leg;
  std::size_t vacuous_windows = 0;
  std::size_t pairs_checked = 0;  // record-leg pairs
  int quantize_digits = 6;
  std::string untestable_note;
  bool consistent() const {
    return record_dynamics_violations.empty() && pointer_violations.empty() &&
           observer_leg.consistent();
  }
};

// Verifies (a) record-label transitions across consecutive non-vacuous
// windows follow the observer's info dynamics, (b) each non-vacuous window's
// record pointer equals the apparatus's induced pointer, and (c) the
// observer leg commutes per check_diagram1.  The induced entanglement
// between the apparatus and observer legs is declared, not observed, so the
// report carries a fixed note that no check can reach it; only the record
// and interpretation legs are verified.  Throws std::invalid_argument when
// the three legs disagree on the window count.
Diagram2Report check_diagram2(const MeasurementComposite& composite,
                              int quantize_digits = 6);

// ---------------------------------------------------------------------------
// JSON report bodies (deterministic: sorted keys, 2-space indent).
std::string diagram1_report_json(const Diagram1Report& report);
std::string diagram2_report_json(const Diagram2Report& report);

}  // namespace quasim

#endif  // QUASIM_CONSISTENCY_HPP_

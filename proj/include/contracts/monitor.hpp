#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contracts/diagnostic.hpp"
#include "contracts/rml.hpp"

namespace contracts {

struct Event {
  std::vector<std::pair<std::string, Lit>> fields;
  int line = 0;  // 1-based line in the source file, 0 when built in memory

  const Lit* get(const std::string& key) const;
  std::string topic() const;
  void set(const std::string& key, Lit v);
};

struct Trace {
  std::vector<Event> events;
};

// JSON lines, one flat object per line; blank lines are ignored.
Result<Trace> parse_trace(std::string_view source);
std::string event_json(const Event& ev);

// `args` are the resolved values for et.params, in order.
bool matches(const EventType& et, const std::vector<Lit>& args, const Event& ev);

bool nullable(const RmlPtr& t);
// Replaces free occurrences of `var`; `var+c` folds to a constant, or to no-match for non-numbers.
RmlPtr substitute(const RmlPtr& t, const std::string& var, const Lit& value);
RmlPtr derivative(const RmlPtr& t, const Event& ev, const RmlSpec& spec);

enum class MonitorVerdict { Accepted, Violated, Incomplete };
const char* monitor_verdict_name(MonitorVerdict v);

// Incremental evaluation of one term.
class Monitor {
 public:
  Monitor(const RmlSpec& spec, RmlPtr term);

  // Consumes one event; `index` is its position in the original trace.
  void step(const Event& ev, std::size_t index);
  bool violated() const { return violation_.has_value(); }
  std::optional<std::size_t> violation_index() const { return violation_; }
  MonitorVerdict verdict() const;
  const RmlPtr& residual() const { return residual_; }

 private:
  const RmlSpec& spec_;
  RmlPtr residual_;
  std::optional<std::size_t> violation_;
};

struct TermVerdict {
  std::string term;
  MonitorVerdict verdict = MonitorVerdict::Incomplete;
  std::optional<std::size_t> violation_index;
};

struct MonitorReport {
  std::vector<TermVerdict> terms;
  TermVerdict overall;  // conjunction of all terms
  std::size_t events = 0;
  std::size_t skipped = 0;  // events on topics no event type declares
};

// Topics named by the spec's event types; empty optional when some event type has no fixed topic.
std::optional<std::set<std::string>> declared_topics(const RmlSpec& spec);

MonitorReport run(const RmlSpec& spec, const Trace& trace);
std::string report_json(const MonitorReport& r);
std::string report_table(const MonitorReport& r);

// Direct set-semantics check; errors when the trace is longer than 4 * star_unroll_bound.
Result<bool> naive_membership(const RmlPtr& t, const RmlSpec& spec, const Trace& trace,
                              std::size_t star_unroll_bound);

}  // namespace contracts

#pragma once

#include <string>
#include <vector>

#include "contracts/diagnostic.hpp"
#include "contracts/rml.hpp"
#include "contracts/typecheck.hpp"

namespace contracts {

// Event types for every io atom shape used by the guarantees, in order of first use.
Result<std::vector<EventType>> derive_event_types(const TypedContract& c, const ContextTable& ctx);

// Rule-by-rule translation of one guarantee body, before simplification.
// Event types needed by the term are appended to `ets` when missing.
Result<RmlPtr> translate_formula(const FormulaPtr& f, const TypedContract& c, const ContextTable& ctx,
                                 std::vector<EventType>& ets);

// One starred, simplified term per guarantee, named t1..tn.
Result<RmlSpec> synthesize_rml(const TypedContract& c, const ContextTable& ctx);

// Message path used as the ROS topic name for a topics entry.
std::string topic_path(const TopicBinding& b, const TypedContract& c, const ContextTable& ctx,
                       std::vector<Diagnostic>* diags = nullptr);

struct MonitorTopic {
  std::string action = "log";
  std::string name;
  std::string type;
};

struct MonitorConfig {
  std::string monitor_id;
  std::string log_path;
  std::vector<MonitorTopic> topics;
};

Result<MonitorConfig> monitor_config(const TypedContract& c, const ContextTable& ctx,
                                     const std::string& log_path = {});
std::string emit_monitor_config(const MonitorConfig& cfg);

}  // namespace contracts

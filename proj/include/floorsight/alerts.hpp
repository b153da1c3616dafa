// Copyright 2026 The Floorsight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "floorsight/ontology.hpp"
#include "floorsight/telemetry.hpp"

namespace floorsight {

enum class Comparator { above, below };
enum class Severity { info, attention, critical };
enum class NotificationState { active, acknowledged };
enum class MeterStatus { ok, att };

std::string_view to_string(Comparator c) noexcept;
std::string_view to_string(Severity s) noexcept;
std::string_view to_string(NotificationState s) noexcept;
std::string_view to_string(MeterStatus s) noexcept; // "OK" / "ATT"

/// `message` may reference {rule}, {path}, {value}, {threshold} and {unit}.
struct AlertRule {
    std::string id;
    OntologyPath target;
    Comparator comparator = Comparator::above;
    double threshold = 0.0;
    Severity severity = Severity::attention;
    std::string message;
};

/// Strict comparison: a value equal to the threshold does not satisfy either
/// comparator.
bool condition_holds(Comparator comparator, double threshold, double value) noexcept;

struct Notification {
    std::uint64_t id = 0;
    std::string rule_id;
    OntologyPath path;
    EpochMs triggered_at = 0;
    double value = 0.0;
    Severity severity = Severity::info;
    NotificationState state = NotificationState::active;
    std::string message;

    friend bool operator==(const Notification&, const Notification&) = default;
};

void to_json(nlohmann::json& j, const AlertRule& rule);
void to_json(nlohmann::json& j, const Notification& n);

/// Reads `{"rules": [...]}` or a bare array. Throws SyntaxError/SchemaError.
std::vector<AlertRule> parse_rules(std::string_view text);
std::vector<AlertRule> load_rules(const std::filesystem::path& file);

/**
 * Edge-triggered threshold evaluation and the notification log.
 *
 * A rule fires when its condition goes from false (or never evaluated) to
 * true between consecutive samples on the target path, in evaluation order.
 * Notification ids start at 1 and grow with emission order.
 */
class AlertEngine {
public:
    using Listener = std::function<void(const Notification&)>;

    explicit AlertEngine(std::shared_ptr<const Deployment> deployment);

    /// Throws Error(conflict) for a duplicate id, Error(not_found) or
    /// Error(invalid_argument) for a target that is not a Data node, and
    /// Error(invalid_argument) for a non-finite threshold.
    void register_rule(AlertRule rule);

    std::vector<AlertRule> rules() const;

    std::vector<Notification> evaluate(const TelemetrySample& sample);

    /// Throws Error(not_found) for an unknown id and Error(conflict) if the
    /// notification is already acknowledged.
    Notification acknowledge(std::uint64_t id);

    /// Newest first: triggered_at descending, then id descending.
    std::vector<Notification> recent_notifications(const OntologyPath& scope, std::size_t limit,
        bool active_only = false) const;

    /// ATT iff an active notification targets a path under `resource`.
    MeterStatus meter_status(const OntologyPath& resource) const;

    std::optional<Notification> find(std::uint64_t id) const;

    /// Increments on every emission and acknowledgement.
    std::uint64_t revision() const;

    /// Listeners run on the evaluating thread after the engine lock is released.
    void on_notification(Listener listener);

private:
    struct RuleState {
        AlertRule rule;
        std::optional<bool> last;
    };

    std::shared_ptr<const Deployment> deployment_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, RuleState> rules_;
    std::multimap<std::string, std::string> rules_by_path_;
    std::vector<Notification> log_; // log_[i].id == i + 1
    std::uint64_t revision_ = 0;
    std::vector<Listener> listeners_;
};

std::string render_message(const AlertRule& rule, double value, Unit unit);

} // namespace floorsight

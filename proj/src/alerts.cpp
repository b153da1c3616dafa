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

#include "floorsight/alerts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

namespace floorsight {

using nlohmann::json;

std::string_view to_string(Comparator c) noexcept { return c == Comparator::above ? "above" : "below"; }

std::string_view to_string(Severity s) noexcept
{
    switch (s) {
    case Severity::info: return "info";
    case Severity::attention: return "attention";
    case Severity::critical: return "critical";
    }
    return "?";
}

std::string_view to_string(NotificationState s) noexcept
{
    return s == NotificationState::active ? "active" : "acknowledged";
}

std::string_view to_string(MeterStatus s) noexcept { return s == MeterStatus::ok ? "OK" : "ATT"; }

bool condition_holds(Comparator comparator, double threshold, double value) noexcept
{
    return comparator == Comparator::above ? value > threshold : value < threshold;
}

void to_json(json& j, const AlertRule& rule)
{
    j = json {{"id", rule.id}, {"target", rule.target.str()}, {"comparator", to_string(rule.comparator)},
        {"threshold", rule.threshold}, {"severity", to_string(rule.severity)}, {"message", rule.message}};
}

void to_json(json& j, const Notification& n)
{
    j = json {{"id", n.id}, {"rule_id", n.rule_id}, {"path", n.path.str()}, {"triggered_at", n.triggered_at},
        {"value", n.value}, {"severity", to_string(n.severity)}, {"state", to_string(n.state)},
        {"message", n.message}};
}

namespace {

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void replace_all(std::string& s, std::string_view from, const std::string& to)
{
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

AlertRule read_rule(const json& j, const std::string& where)
{
    if (!j.is_object()) {
        throw SchemaError(where, "expected object");
    }
    auto str = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw SchemaError(where + "." + key, "expected string");
        }
        return j[key].get<std::string>();
    };
    AlertRule rule;
    rule.id = str("id");
    try {
        rule.target = OntologyPath::parse(str("target"));
    }
    catch (const Error& e) {
        throw SchemaError(where + ".target", e.what());
    }
    const auto cmp = str("comparator");
    if (cmp == "above") {
        rule.comparator = Comparator::above;
    }
    else if (cmp == "below") {
        rule.comparator = Comparator::below;
    }
    else {
        throw SchemaError(where + ".comparator", "expected \"above\" or \"below\"");
    }
    if (!j.contains("threshold") || !j["threshold"].is_number()) {
        throw SchemaError(where + ".threshold", "expected number");
    }
    rule.threshold = j["threshold"].get<double>();
    const auto sev = j.contains("severity") ? str("severity") : std::string("attention");
    if (sev == "info") {
        rule.severity = Severity::info;
    }
    else if (sev == "attention") {
        rule.severity = Severity::attention;
    }
    else if (sev == "critical") {
        rule.severity = Severity::critical;
    }
    else {
        throw SchemaError(where + ".severity", "expected info, attention or critical");
    }
    rule.message = j.contains("message") ? str("message") : std::string("{path} {value} {unit}");
    return rule;
}

} // namespace

std::string render_message(const AlertRule& rule, double value, Unit unit)
{
    std::string out = rule.message;
    replace_all(out, "{rule}", rule.id);
    replace_all(out, "{path}", rule.target.str());
    replace_all(out, "{value}", format_number(value));
    replace_all(out, "{threshold}", format_number(rule.threshold));
    replace_all(out, "{unit}", std::string(to_string(unit)));
    return out;
}

std::vector<AlertRule> parse_rules(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e) {
        throw SyntaxError(e.byte, std::string("JSON syntax error: ") + e.what());
    }
    const json* list = &doc;
    std::string where;
    if (doc.is_object()) {
        if (!doc.contains("rules")) {
            throw SchemaError("rules", "missing field");
        }
        list = &doc["rules"];
        where = "rules";
    }
    if (!list->is_array()) {
        throw SchemaError(where, "expected array");
    }
    std::vector<AlertRule> rules;
    for (std::size_t i = 0; i < list->size(); ++i) {
        rules.push_back(read_rule((*list)[i], where + "[" + std::to_string(i) + "]"));
    }
    return rules;
}

std::vector<AlertRule> load_rules(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(Errc::not_found, "cannot open rules file '" + file.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_rules(buf.str());
    }
    catch (const Error& e) {
        throw Error(e.code(), file.string() + ": " + e.what());
    }
}

/***********************************************************************************************************************
 * AlertEngine
 **********************************************************************************************************************/

AlertEngine::AlertEngine(std::shared_ptr<const Deployment> deployment) : deployment_(std::move(deployment)) {}

void AlertEngine::register_rule(AlertRule rule)
{
    deployment_->data_node(rule.target);
    if (!std::isfinite(rule.threshold)) {
        throw Error(Errc::invalid_argument, "rule '" + rule.id + "' has a non-finite threshold");
    }
    if (rule.id.empty()) {
        throw Error(Errc::invalid_argument, "rule id must not be empty");
    }
    std::unique_lock lock(mutex_);
    if (rules_.count(rule.id)) {
        throw Error(Errc::conflict, "rule '" + rule.id + "' is already registered");
    }
    rules_by_path_.emplace(rule.target.str(), rule.id);
    auto id = rule.id;
    rules_.emplace(std::move(id), RuleState {std::move(rule), std::nullopt});
}

std::vector<AlertRule> AlertEngine::rules() const
{
    std::shared_lock lock(mutex_);
    std::vector<AlertRule> out;
    for (const auto& [id, state] : rules_) {
        out.push_back(state.rule);
    }
    return out;
}

std::vector<Notification> AlertEngine::evaluate(const TelemetrySample& sample)
{
    std::vector<Notification> fired;
    std::vector<Listener> listeners;
    {
        std::unique_lock lock(mutex_);
        auto [first, last] = rules_by_path_.equal_range(sample.path.str());
        for (auto it = first; it != last; ++it) {
            auto& state = rules_.at(it->second);
            const auto& rule = state.rule;
            const bool now = condition_holds(rule.comparator, rule.threshold, sample.value);
            const bool was = state.last.value_or(false);
            state.last = now;
            if (now && !was) {
                Notification n;
                n.id = log_.size() + 1;
                n.rule_id = rule.id;
                n.path = sample.path;
                n.triggered_at = sample.timestamp;
                n.value = sample.value;
                n.severity = rule.severity;
                n.state = NotificationState::active;
                n.message = render_message(rule, sample.value, sample.unit);
                log_.push_back(n);
                fired.push_back(std::move(n));
            }
        }
        if (!fired.empty()) {
            ++revision_;
            listeners = listeners_;
        }
    }
    for (const auto& n : fired) {
        for (const auto& l : listeners) {
            l(n);
        }
    }
    return fired;
}

Notification AlertEngine::acknowledge(std::uint64_t id)
{
    std::unique_lock lock(mutex_);
    if (id == 0 || id > log_.size()) {
        throw Error(Errc::not_found, "unknown notification " + std::to_string(id));
    }
    auto& n = log_[id - 1];
    if (n.state == NotificationState::acknowledged) {
        throw Error(Errc::conflict, "notification " + std::to_string(id) + " is already acknowledged");
    }
    n.state = NotificationState::acknowledged;
    ++revision_;
    return n;
}

std::vector<Notification> AlertEngine::recent_notifications(const OntologyPath& scope, std::size_t limit,
    bool active_only) const
{
    std::vector<Notification> out;
    if (limit == 0) {
        return out;
    }
    std::shared_lock lock(mutex_);
    for (const auto& n : log_) {
        if (n.path.starts_with(scope) && (!active_only || n.state == NotificationState::active)) {
            out.push_back(n);
        }
    }
    lock.unlock();
    const auto newer = [](const Notification& a, const Notification& b) {
        return a.triggered_at != b.triggered_at ? a.triggered_at > b.triggered_at : a.id > b.id;
    };
    if (out.size() > limit) {
        std::partial_sort(out.begin(), out.begin() + static_cast<long>(limit), out.end(), newer);
        out.resize(limit);
    }
    else {
        std::sort(out.begin(), out.end(), newer);
    }
    return out;
}

MeterStatus AlertEngine::meter_status(const OntologyPath& resource) const
{
    std::shared_lock lock(mutex_);
    for (const auto& n : log_) {
        if (n.state == NotificationState::active && n.path.starts_with(resource)) {
            return MeterStatus::att;
        }
    }
    return MeterStatus::ok;
}

std::optional<Notification> AlertEngine::find(std::uint64_t id) const
{
    std::shared_lock lock(mutex_);
    if (id == 0 || id > log_.size()) {
        return std::nullopt;
    }
    return log_[id - 1];
}

std::uint64_t AlertEngine::revision() const
{
    std::shared_lock lock(mutex_);
    return revision_;
}

void AlertEngine::on_notification(Listener listener)
{
    std::unique_lock lock(mutex_);
    listeners_.push_back(std::move(listener));
}

} // namespace floorsight

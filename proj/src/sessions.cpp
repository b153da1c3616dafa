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

#include <algorithm>

#include <spdlog/spdlog.h>

#include "floorsight/error.hpp"
#include "floorsight/gateway.hpp"

namespace floorsight {

using json = nlohmann::json;

void StreamOutbox::push_packet(std::uint64_t seq, std::string text)
{
    std::lock_guard lock(mu_);
    if (packet_) {
        ++coalesced_;
    }
    packet_ = StreamFrame {seq, std::move(text), true};
}

void StreamOutbox::push_event(std::uint64_t seq, std::string text)
{
    std::lock_guard lock(mu_);
    events_.push_back(StreamFrame {seq, std::move(text), false});
    while (events_.size() > event_capacity_) {
        events_.pop_front();
        ++dropped_;
    }
}

std::optional<StreamFrame> StreamOutbox::pop()
{
    std::lock_guard lock(mu_);
    const bool take_packet = packet_ && (events_.empty() || packet_->seq < events_.front().seq);
    if (take_packet) {
        auto out = std::move(*packet_);
        packet_.reset();
        return out;
    }
    if (events_.empty()) {
        return std::nullopt;
    }
    auto out = std::move(events_.front());
    events_.pop_front();
    return out;
}

bool StreamOutbox::empty() const
{
    std::lock_guard lock(mu_);
    return !packet_ && events_.empty();
}

std::uint64_t StreamOutbox::coalesced() const
{
    std::lock_guard lock(mu_);
    return coalesced_;
}

std::uint64_t StreamOutbox::dropped_events() const
{
    std::lock_guard lock(mu_);
    return dropped_;
}

namespace {

std::string packet_frame(std::uint64_t seq, const json& packet)
{
    return json {{"type", "packet"}, {"seq", seq}, {"packet", packet}}.dump();
}

std::string event_frame(std::uint64_t seq, const Notification& n)
{
    return json {{"type", "notification"}, {"seq", seq}, {"notification", n}}.dump();
}

} // namespace

SessionRegistry::SessionRegistry(Platform& platform, std::chrono::seconds idle_timeout, SteadyClock steady)
    : platform_(platform), idle_timeout_(idle_timeout), steady_(std::move(steady))
{
}

std::shared_ptr<SessionRegistry::Session> SessionRegistry::find(const std::string& id) const
{
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<StreamSink>> SessionRegistry::live_sinks(Session& s)
{
    std::vector<std::shared_ptr<StreamSink>> out;
    std::erase_if(s.sinks, [&](const std::weak_ptr<StreamSink>& w) {
        auto sink = w.lock();
        if (!sink) {
            return true;
        }
        out.push_back(std::move(sink));
        return false;
    });
    return out;
}

json SessionRegistry::compose(Session& s)
{
    const auto* site = platform_.deployment().find_site(s.site);
    const auto packet = compose_view_packet(
        s.pose, *site, platform_.store(), platform_.alerts(), s.memory, platform_.now(), platform_.awareness());
    s.memory = tier_memory(packet);
    ++s.seq;
    return json(packet);
}

PoseUpdate SessionRegistry::update_pose(const std::string& id, const std::string& site, const ObserverPose& pose)
{
    if (!is_valid_id(id)) {
        throw Error(Errc::invalid_argument, "invalid session id '" + id + "'");
    }
    std::string site_id = site;
    if (site_id.empty()) {
        if (auto existing = find(id)) {
            std::lock_guard lock(existing->mu);
            site_id = existing->site;
        }
        else if (platform_.deployment().sites().size() == 1) {
            site_id = platform_.deployment().sites().front().id;
        }
        else {
            throw Error(Errc::invalid_argument, "'site' is required when several sites are deployed");
        }
    }
    const auto* descriptor = platform_.deployment().find_site(site_id);
    if (!descriptor) {
        throw Error(Errc::not_found, "unknown site '" + site_id + "'");
    }
    validate_pose(pose, *descriptor);

    std::shared_ptr<Session> s;
    {
        std::lock_guard lock(mu_);
        auto& slot = sessions_[id];
        if (!slot) {
            slot = std::make_shared<Session>();
            slot->site = site_id;
            spdlog::info("session created id={} site={}", id, site_id);
        }
        s = slot;
    }
    std::lock_guard lock(s->mu);
    if (s->site != site_id) {
        throw Error(Errc::invalid_argument, "session '" + id + "' is bound to site '" + s->site + "'");
    }
    s->pose = pose;
    s->last_activity = steady_();
    auto packet = compose(*s);
    const auto text = packet_frame(s->seq, packet);
    for (const auto& sink : live_sinks(*s)) {
        sink->outbox.push_packet(s->seq, text);
        sink->wake();
    }
    return PoseUpdate {s->seq, std::move(packet)};
}

void SessionRegistry::attach(const std::string& id, const std::shared_ptr<StreamSink>& sink)
{
    auto s = find(id);
    if (!s) {
        throw Error(Errc::not_found, "unknown session '" + id + "'");
    }
    std::lock_guard lock(s->mu);
    s->sinks.push_back(sink);
    s->last_activity = steady_();
    const auto packet = compose(*s);
    sink->outbox.push_packet(s->seq, packet_frame(s->seq, packet));
    sink->wake();
}

void SessionRegistry::detach(const std::string& id, const StreamSink* sink)
{
    auto s = find(id);
    if (!s) {
        return;
    }
    std::lock_guard lock(s->mu);
    std::erase_if(s->sinks, [&](const std::weak_ptr<StreamSink>& w) {
        auto p = w.lock();
        return !p || p.get() == sink;
    });
    s->last_activity = steady_();
}

void SessionRegistry::refresh()
{
    std::vector<std::shared_ptr<Session>> all;
    {
        std::lock_guard lock(mu_);
        for (const auto& [id, s] : sessions_) {
            all.push_back(s);
        }
    }
    for (const auto& s : all) {
        std::lock_guard lock(s->mu);
        const auto sinks = live_sinks(*s);
        if (sinks.empty()) {
            continue;
        }
        const auto packet = compose(*s);
        const auto text = packet_frame(s->seq, packet);
        for (const auto& sink : sinks) {
            sink->outbox.push_packet(s->seq, text);
            sink->wake();
        }
    }
}

void SessionRegistry::broadcast(const Notification& n)
{
    if (n.path.empty()) {
        return;
    }
    std::vector<std::shared_ptr<Session>> all;
    {
        std::lock_guard lock(mu_);
        for (const auto& [id, s] : sessions_) {
            all.push_back(s);
        }
    }
    for (const auto& s : all) {
        std::lock_guard lock(s->mu);
        if (s->site != n.path.segments().front()) {
            continue;
        }
        const auto sinks = live_sinks(*s);
        if (sinks.empty()) {
            continue;
        }
        ++s->seq;
        const auto text = event_frame(s->seq, n);
        for (const auto& sink : sinks) {
            sink->outbox.push_event(s->seq, text);
            sink->wake();
        }
    }
}

std::size_t SessionRegistry::expire()
{
    const auto now = steady_();
    std::vector<std::string> gone;
    {
        std::lock_guard lock(mu_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            auto& s = *it->second;
            std::lock_guard slock(s.mu);
            if (live_sinks(s).empty() && now - s.last_activity > idle_timeout_) {
                gone.push_back(it->first);
                it = sessions_.erase(it);
            }
            else {
                ++it;
            }
        }
    }
    for (const auto& id : gone) {
        spdlog::info("session expired id={}", id);
    }
    return gone.size();
}

bool SessionRegistry::contains(const std::string& id) const { return find(id) != nullptr; }

std::size_t SessionRegistry::size() const
{
    std::lock_guard lock(mu_);
    return sessions_.size();
}

std::vector<std::string> SessionRegistry::ids() const
{
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) {
        out.push_back(id);
    }
    return out;
}

} // namespace floorsight

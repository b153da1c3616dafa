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

#include <cstddef>
#include <functional>

#include "floorsight/mqtt.hpp"
#include "floorsight/pilot_sim.hpp"

namespace floorsight::sim {

struct PublishOptions {
    bool realtime = true; // pace ticks at tick_ms on the steady clock
    int qos = 0;
    std::function<bool()> cancelled;
    std::function<void(std::size_t tick, const std::vector<TelemetrySample>&)> on_tick;
};

struct PublishReport {
    std::size_t ticks = 0;
    std::size_t samples = 0;
    bool cancelled = false;
};

/// Steps the simulator to the end, publishing every sample on its topic.
/// Throws Error(unavailable) if the client loses the broker.
PublishReport publish_scenario(Simulator& simulator, mqtt::Client& client, const PublishOptions& options = {});

} // namespace floorsight::sim

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

#include <thread>

#include "floorsight/sim_publisher.hpp"

namespace floorsight::sim {

PublishReport publish_scenario(Simulator& simulator, mqtt::Client& client, const PublishOptions& options)
{
    const Deployment deployment({simulator.site()});
    const auto begin = std::chrono::steady_clock::now();
    const auto tick = std::chrono::milliseconds(simulator.config().tick_ms);
    PublishReport report;
    while (!simulator.done()) {
        if (options.cancelled && options.cancelled()) {
            report.cancelled = true;
            break;
        }
        if (options.realtime) {
            std::this_thread::sleep_until(begin + tick * static_cast<long>(simulator.ticks_done()));
        }
        const auto samples = simulator.step();
        for (const auto& s : samples) {
            client.publish(topic_for(deployment, s.path), encode_payload(s), options.qos);
        }
        ++report.ticks;
        report.samples += samples.size();
        if (options.on_tick) {
            options.on_tick(report.ticks, samples);
        }
    }
    return report;
}

} // namespace floorsight::sim

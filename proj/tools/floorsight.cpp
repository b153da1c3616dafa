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

// floorsight: operator CLI (serve, simulate, lint, topics, broker, demo-site).

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "floorsight/error.hpp"
#include "floorsight/gateway.hpp"
#include "floorsight/mqtt.hpp"
#include "floorsight/pilot_sim.hpp"
#include "floorsight/sim_publisher.hpp"

using namespace floorsight;

namespace {

std::atomic<bool> g_signalled {false};

void on_signal(int) { g_signalled = true; }

void install_signal_handlers()
{
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
}

void wait_for_signal()
{
    while (!g_signalled) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
}

int cmd_serve(const std::string& config_file)
{
    auto config = load_server_config(config_file);
    apply_env_overrides(config, [](const char* name) { return std::getenv(name); });
    Gateway gateway(config);
    gateway.start();
    spdlog::info("serving port={} broker={}", gateway.port(), config.broker.str());
    wait_for_signal();
    spdlog::info("shutdown requested");
    gateway.stop();
    return 0;
}

int cmd_simulate(const std::string& scenario_file, const std::string& broker, bool fast, int qos)
{
    auto scenario = sim::load_scenario(scenario_file);
    if (scenario.start_ms == 0) {
        scenario.start_ms = system_now_ms();
    }
    sim::Simulator simulator(sim::build_demo_site(), scenario);
    const auto address = parse_host_port(broker, 1883);
    mqtt::ClientOptions options;
    options.host = address.host;
    options.port = address.port;
    options.client_id = "floorsight-sim-" + std::to_string(scenario.seed);
    mqtt::Client client(options);
    client.connect();
    spdlog::info("simulation started broker={} ticks={} tick_ms={} events={}", address.str(),
        scenario.tick_count(), scenario.tick_ms, scenario.events.size());
    sim::PublishOptions publish;
    publish.realtime = !fast;
    publish.qos = qos;
    publish.cancelled = [] { return g_signalled.load(); };
    const auto report = sim::publish_scenario(simulator, client, publish);
    client.disconnect();
    spdlog::info("simulation finished ticks={} samples={} cancelled={}", report.ticks, report.samples, report.cancelled);
    return 0;
}

int cmd_lint(const std::vector<std::string>& files)
{
    bool clean = true;
    std::vector<SiteDescriptor> loaded;
    std::vector<std::string> loaded_files;
    for (const auto& file : files) {
        try {
            loaded.push_back(load_descriptor(file));
            loaded_files.push_back(file);
        }
        catch (const InvariantError& e) {
            clean = false;
            for (const auto& v : e.report()) {
                std::cout << file << ": " << v.path.str() << ": " << to_string(v.kind) << ": " << v.message << '\n';
            }
        }
        catch (const SyntaxError& e) {
            clean = false;
            std::cout << e.what() << " (byte " << e.byte() << ")\n";
        }
        catch (const Error& e) {
            clean = false;
            std::cout << e.what() << '\n';
        }
    }
    if (loaded.size() > 1) {
        for (const auto& v : validate(loaded)) {
            if (v.kind == ViolationKind::duplicate_id && v.path.depth() == 1) {
                clean = false;
                std::cout << "deployment: " << v.path.str() << ": " << to_string(v.kind) << ": " << v.message << '\n';
            }
        }
    }
    for (const auto& file : loaded_files) {
        std::cerr << file << ": ok\n";
    }
    return clean ? 0 : 1;
}

int cmd_topics(const std::string& file)
{
    const Deployment deployment({load_descriptor(file)});
    for (const auto& path : deployment.data_paths()) {
        const auto& node = deployment.data_node(path);
        std::cout << topic_for(deployment, path) << '\t' << to_string(node.unit) << '\t' << to_string(node.semantic)
                  << '\n';
    }
    return 0;
}

int cmd_broker(const std::string& listen)
{
    const auto address = parse_host_port(listen, 1883);
    mqtt::Broker broker(mqtt::BrokerOptions {address.host, address.port});
    broker.start();
    spdlog::info("broker ready address={}:{}", address.host, broker.port());
    wait_for_signal();
    broker.stop();
    return 0;
}

int cmd_demo_site(const std::string& out)
{
    const auto text = serialize(sim::build_demo_site()) + "\n";
    if (out.empty() || out == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream f(out, std::ios::binary);
    if (!(f << text)) {
        throw Error(Errc::unavailable, "cannot write '" + out + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    spdlog::set_default_logger(spdlog::stderr_color_mt("floorsight"));
    spdlog::set_pattern("%Y-%m-%dT%H:%M:%S.%e level=%l %v");

    CLI::App app {"Floorsight industrial situational-awareness platform"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

    std::string config_file;
    auto* serve = app.add_subcommand("serve", "Run ingestion, alerting, REST and the stream endpoint");
    serve->add_option("--config", config_file, "Server config JSON")->required()->check(CLI::ExistingFile);

    std::string scenario_file;
    std::string broker = "127.0.0.1:1883";
    bool fast = false;
    int qos = 0;
    auto* simulate = app.add_subcommand("simulate", "Publish the demo pilot site telemetry over MQTT");
    simulate->add_option("--scenario", scenario_file, "Scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--broker", broker, "Broker host[:port]")->capture_default_str();
    simulate->add_flag("--fast", fast, "Publish ticks back to back instead of in real time");
    simulate->add_option("--qos", qos, "Publish QoS")->check(CLI::Range(0, 1))->capture_default_str();

    std::vector<std::string> lint_files;
    auto* lint = app.add_subcommand("lint", "Validate site descriptors; exit 1 on violations");
    lint->add_option("descriptors", lint_files, "Descriptor files")->required();

    std::string topics_file;
    auto* topics = app.add_subcommand("topics", "Print the topic of every Data node");
    topics->add_option("descriptor", topics_file, "Descriptor file")->required();

    std::string broker_listen = "127.0.0.1:1883";
    auto* broker_cmd = app.add_subcommand("broker", "Run the bundled MQTT broker");
    broker_cmd->add_option("--listen", broker_listen, "host[:port]")->capture_default_str();

    std::string demo_out;
    auto* demo = app.add_subcommand("demo-site", "Write the demo pilot site descriptor");
    demo->add_option("--out", demo_out, "Output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    const auto level = spdlog::level::from_str(log_level);
    spdlog::set_level(level);
    install_signal_handlers();

    try {
        if (*serve) return cmd_serve(config_file);
        if (*simulate) return cmd_simulate(scenario_file, broker, fast, qos);
        if (*lint) return cmd_lint(lint_files);
        if (*topics) return cmd_topics(topics_file);
        if (*broker_cmd) return cmd_broker(broker_listen);
        if (*demo) return cmd_demo_site(demo_out);
    }
    catch (const std::exception& e) {
        std::cerr << "floorsight: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

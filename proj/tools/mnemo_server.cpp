// SPDX-License-Identifier: Apache-2.0
// mnemo-server: the memory engine behind the /v1 HTTP API.
#include "mnemo/core/error.hpp"
#include "mnemo/service/service.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <iostream>

namespace {
mnemo::MemoryService* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mnemo memory service"};
    std::string config_path;
    app.add_option("-c,--config", config_path, "Service config JSON")->check(CLI::ExistingFile);
    CLI11_PARSE(app, argc, argv);

    try {
        std::optional<std::filesystem::path> file;
        if (!config_path.empty()) file = config_path;
        const auto config = mnemo::load_service_config(file, mnemo::process_environment());
        auto service = mnemo::MemoryService::create(config);
        const int port = service->bind();
        g_service = service.get();
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        spdlog::info("listening on {}:{}", config.host, port);
        service->serve();
        g_service = nullptr;
        service->engine().wait_idle();
        return 0;
    } catch (const mnemo::Error& e) {
        std::cerr << "error [" << mnemo::to_string(e.code()) << "]: " << e.what() << "\n";
        return 1;
    }
}

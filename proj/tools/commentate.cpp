// commentate: replays a game log through a character and writes the
// speech scripts, face timelines and traces.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <string>

#include "byrne/pipeline.hpp"

int main(int argc, char** argv) {
    byrne::ReplayOptions opts;
    CLI::App app{"Replay a soccer game log as character-driven commentary"};
    app.add_option("--log", opts.log_path, "game log")->required();
    app.add_option("--character", opts.character_path, "character profile")->required();
    app.add_option("--style", opts.style_path, "style file")->required();
    app.add_option("--out", opts.out_dir, "output directory")->required();
    app.add_option("--tick-seconds", opts.tick_seconds, "clock tick length in seconds")->capture_default_str();
    app.add_option("--seed", opts.seed, "seed echoed in the commentary trace")->capture_default_str();
    app.add_flag("--trace", opts.echo_trace, "print commentary events to stdout");
    CLI11_PARSE(app, argc, argv);

    auto logger = spdlog::stderr_color_mt("commentate");
    logger->set_pattern("%^%l%$: %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("BYRNE_LOG_LEVEL")) {
        const std::string name(level);
        if (name == "error" || name == "warn" || name == "info" || name == "debug") {
            spdlog::set_level(spdlog::level::from_str(name));
        } else {
            spdlog::warn("ignoring BYRNE_LOG_LEVEL={}; expected error, warn, info or debug", name);
        }
    }
    return byrne::run_replay(opts);
}

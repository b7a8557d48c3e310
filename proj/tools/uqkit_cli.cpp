// Command-line runner for the desk-scale experiments: every subcommand writes
// plot-ready CSVs plus a JSON manifest into the output directory.  Exit codes:
// 0 success, 2 configuration error, 3 numerical instability.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uqkit/experiments.hpp"
#include "uqkit/io.hpp"

namespace {

struct SubState {
    std::string out_dir = "out";
    std::uint64_t seed = 7;
    std::string config_path;
    std::map<std::string, std::string> raw;  // dynamic per-parameter overrides
};

// A bare value, or a bracket-less list for array parameters.
nlohmann::json parse_value(const std::string& key, const std::string& text) {
    const auto tryparse = [](const std::string& s) -> std::optional<nlohmann::json> {
        auto parsed = nlohmann::json::parse(s, nullptr, false);
        if (parsed.is_discarded()) return std::nullopt;
        return parsed;
    };
    if (auto v = tryparse(text)) return *v;
    if (auto v = tryparse("[" + text + "]")) return *v;
    throw uqkit::ConfigError("cannot parse value for --" + key + ": " + text);
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw uqkit::ConfigError("cannot open config file: " + path);
    auto parsed = nlohmann::json::parse(in, nullptr, false);
    if (parsed.is_discarded()) throw uqkit::ConfigError("config file is not valid JSON: " + path);
    if (!parsed.is_object()) throw uqkit::ConfigError("config file must hold a JSON object");
    return parsed;
}

void run_command(const std::string& name, const SubState& state, CLI::App* sub) {
    nlohmann::json params = nlohmann::json::object();
    if (!state.config_path.empty()) params = load_config_file(state.config_path);
    for (const auto& [key, text] : state.raw) {
        if (sub->count("--" + key) > 0) params[key] = parse_value(key, text);
    }

    const nlohmann::json manifest = uqkit::run_and_write(name, params, state.seed, state.out_dir);
    std::cout << name << ": wrote " << manifest.at("outputs").size() << " artifacts to "
              << state.out_dir << " (seed " << state.seed << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uncertainty quantification experiments: simulation, assimilation, and "
                 "information measures"};
    app.require_subcommand(1);

    std::vector<std::shared_ptr<SubState>> states;
    for (const std::string& name : uqkit::command_names()) {
        auto state = std::make_shared<SubState>();
        states.push_back(state);

        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--seed", state->seed, "random seed")->capture_default_str();
        sub->add_option("--out", state->out_dir, "output directory")->capture_default_str();
        sub->add_option("--config", state->config_path,
                        "JSON file with a parameter object (flags win over the file)");

        const nlohmann::json defaults = uqkit::default_params(name);
        for (const auto& [key, value] : defaults.items()) {
            state->raw[key] = "";
            sub->add_option("--" + key, state->raw[key],
                            "parameter (default " + value.dump() + ")");
        }

        sub->callback([name, state, sub] { run_command(name, *state, sub); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const uqkit::InstabilityError& e) {
        std::cerr << "numerical instability: " << e.what() << "\n";
        return 3;
    } catch (const uqkit::BlowUpError& e) {
        std::cerr << "numerical instability: " << e.what() << "\n";
        return 3;
    } catch (const uqkit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

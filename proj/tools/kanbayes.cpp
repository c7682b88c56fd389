#include "commands.hpp"

#include "kanbayes/dataset.hpp"
#include "kanbayes/planner.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

bool is_flag_token(const std::string& s) { return s.size() > 2 && s[0] == '-' && s[1] == '-'; }

std::string scalar_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
    }
    throw kanbayes::DataError("config values must be strings, numbers, booleans or arrays of those");
}

// Config keys are flag names; a key present in the config replaces the same flag on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw kanbayes::DataError("--config needs a file");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw kanbayes::DataError("cannot open config '" + path + "'");
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw kanbayes::DataError("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw kanbayes::DataError("config '" + path + "' must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = key.rfind("--", 0) == 0 ? key : "--" + key;
        for (std::size_t i = 0; i < args.size();) {
            if (args[i] == flag) {
                std::size_t j = i + 1;
                while (j < args.size() && !is_flag_token(args[j])) ++j;
                // A bare flag consumes nothing; options consume exactly the following tokens up to the next flag.
                args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(j));
            } else if (args[i].rfind(flag + "=", 0) == 0) {
                args.erase(args.begin() + static_cast<long>(i));
            } else {
                ++i;
            }
        }
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& e : value) joined += (joined.empty() ? "" : ",") + scalar_text(e);
            args.push_back(flag);
            args.push_back(joined);
        } else {
            args.push_back(flag);
            args.push_back(scalar_text(value));
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian sparse KAN regression: planning, sampling and diagnostics"};
    app.name("kanbayes");
    std::function<int()> action;
    kanbayes::cli::register_commands(app, action);
    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        return action ? action() : 2;
    } catch (const kanbayes::AssumptionError& e) {
        std::cerr << "assumption violated: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

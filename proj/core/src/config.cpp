#include "structpop/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "structpop/errors.hpp"

namespace structpop {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double x = std::stod(value, &used);
        if (used != value.size())
            throw Error(ErrorCode::MalformedConfig, "bad number for " + key + ": " + value);
        return x;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedConfig, "bad number for " + key + ": " + value);
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorCode::MalformedConfig,
                            "bad section header at line " + std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::MalformedConfig,
                        "expected key = value at line " + std::to_string(line_no));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section == "model") {
            if (key == "name")
                config.model.name = value;
            else if (key == "table_path")
                config.model.table_path = value;
            else if (key == "mu_table_path")
                config.model.mu_table_path = value;
            else if (key == "gamma_table_path")
                config.model.gamma_table_path = value;
            else
                config.model.params[key] = parse_number(key, value);
        } else if (section == "grid") {
            if (key == "N")
                config.grid_n = static_cast<int>(parse_number(key, value));
            else
                throw Error(ErrorCode::MalformedConfig, "unknown grid key " + key);
        } else if (section == "run") {
            if (key == "T")
                config.horizon = parse_number(key, value);
            else if (key == "dt")
                config.dt = parse_number(key, value);
            else if (key == "M")
                config.steps_m = static_cast<int>(parse_number(key, value));
            else
                throw Error(ErrorCode::MalformedConfig, "unknown run key " + key);
        } else {
            throw Error(ErrorCode::MalformedConfig,
                        "key outside a known section at line " + std::to_string(line_no));
        }
    }
    return config;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MalformedConfig, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace structpop

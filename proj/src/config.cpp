#include "spherelab/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spherelab/csv.hpp"

namespace spherelab {

namespace {

std::uint64_t parse_count(const std::string& text, const std::string& key) {
    if (text.empty() || text[0] == '-') {
        throw Error(ErrorCode::ConfigInvalid,
                    key + ": expected a non-negative integer, got '" + text + "'");
    }
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE) {
        throw Error(ErrorCode::ConfigInvalid,
                    key + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

bool parse_flag(const std::string& text, const std::string& key) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw Error(ErrorCode::ConfigInvalid,
                key + ": expected true or false, got '" + text + "'");
}

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "d0",          "d1",
        "n_preserved", "n_batches",
        "batch_size",  "method",
        "eta",         "alpha",
        "kernel_s",    "seed",
        "key_overlap", "recompute_principal",
        "rank_tol",    "min_pair_dist",
        "success_tol", "gram_ridge",
        "gen_radius",  "ft_lr",
        "ft_steps",
    };
    return keys;
}

bool is_config_key(const std::string& key) {
    for (const std::string& k : config_keys())
        if (k == key) return true;
    return false;
}

void apply_config_override(ExperimentConfig& c, const std::string& key,
                           const std::string& value) {
    if (key == "d0") c.d0 = parse_count(value, key);
    else if (key == "d1") c.d1 = parse_count(value, key);
    else if (key == "n_preserved") c.n_preserved = parse_count(value, key);
    else if (key == "n_batches") c.n_batches = parse_count(value, key);
    else if (key == "batch_size") c.batch_size = parse_count(value, key);
    else if (key == "method") c.method = edit_method_from_string(value);
    else if (key == "eta") c.eta = parse_double(value, key);
    else if (key == "alpha") c.alpha = parse_double(value, key);
    else if (key == "kernel_s") c.kernel_s = parse_double(value, key);
    else if (key == "seed") c.seed = parse_count(value, key);
    else if (key == "key_overlap") c.key_overlap = parse_double(value, key);
    else if (key == "recompute_principal") c.recompute_principal = parse_flag(value, key);
    else if (key == "rank_tol") c.rank_tol = parse_double(value, key);
    else if (key == "min_pair_dist") c.min_pair_dist = parse_double(value, key);
    else if (key == "success_tol") c.success_tol = parse_double(value, key);
    else if (key == "gram_ridge") c.gram_ridge = parse_double(value, key);
    else if (key == "gen_radius") c.gen_radius = parse_double(value, key);
    else if (key == "ft_lr") c.ft_lr = parse_double(value, key);
    else if (key == "ft_steps") c.ft_steps = parse_count(value, key);
    else
        throw Error(ErrorCode::ConfigInvalid, "unknown config key '" + key + "'");
}

std::string config_field_json(const ExperimentConfig& c, const std::string& key) {
    if (key == "d0") return std::to_string(c.d0);
    if (key == "d1") return std::to_string(c.d1);
    if (key == "n_preserved") return std::to_string(c.n_preserved);
    if (key == "n_batches") return std::to_string(c.n_batches);
    if (key == "batch_size") return std::to_string(c.batch_size);
    if (key == "method") return std::string("\"") + edit_method_name(c.method) + "\"";
    if (key == "eta") return format_g17(c.eta);
    if (key == "alpha") return format_g17(c.alpha);
    if (key == "kernel_s") return format_g17(c.kernel_s);
    if (key == "seed") return std::to_string(c.seed);
    if (key == "key_overlap") return format_g17(c.key_overlap);
    if (key == "recompute_principal") return c.recompute_principal ? "true" : "false";
    if (key == "rank_tol") return format_g17(c.rank_tol);
    if (key == "min_pair_dist") return format_g17(c.min_pair_dist);
    if (key == "success_tol") return format_g17(c.success_tol);
    if (key == "gram_ridge") return format_g17(c.gram_ridge);
    if (key == "gen_radius") return format_g17(c.gen_radius);
    if (key == "ft_lr") return format_g17(c.ft_lr);
    if (key == "ft_steps") return std::to_string(c.ft_steps);
    throw Error(ErrorCode::ConfigInvalid, "unknown config key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ConfigInvalid,
                        origin + ":" + std::to_string(lineno) +
                            ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw Error(ErrorCode::ConfigInvalid,
                        origin + ":" + std::to_string(lineno) + ": empty key");
        }
        apply_config_override(c, key, value);
    }
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

} // namespace spherelab

#include "spherelab/trace_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spherelab/config.hpp"
#include "spherelab/csv.hpp"

namespace spherelab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) {
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFinite, "trace serialization: non-finite value");
    }
    return format_g17(v);
}

std::string opt_num(const std::optional<double>& v) {
    return v ? num(*v) : std::string("null");
}

const char* flag(bool b) { return b ? "true" : "false"; }

void append_bound(std::string& out, const std::optional<BoundReport>& b) {
    if (!b) {
        out += "null";
        return;
    }
    out += "{\"delta_he_exact\":" + num(b->delta_he_exact);
    out += ",\"delta_he_linearized\":" + num(b->delta_he_linearized);
    out += ",\"bound_K\":" + num(b->bound_K);
    out += ",\"delta_v\":" + num(b->delta_v);
    out += ",\"bound_rhs\":" + num(b->bound_rhs);
    out += ",\"satisfied_linearized\":";
    out += flag(b->satisfied_linearized);
    out += ",\"ratio_exact\":" + num(b->ratio_exact);
    out += "}";
}

// Field accessors shared by the JSON and CSV writers so the two layouts
// cannot drift apart.
struct StepField {
    const char* name;
    std::string (*json_value)(const StepMetrics&);
};

const StepField kStepFields[] = {
    {"step", [](const StepMetrics& s) { return std::to_string(s.step); }},
    {"he_ok", [](const StepMetrics& s) { return std::string(flag(s.he_ok)); }},
    {"he_normalized", [](const StepMetrics& s) { return opt_num(s.he_normalized); }},
    {"he_raw", [](const StepMetrics& s) { return opt_num(s.he_raw); }},
    {"delta_he", [](const StepMetrics& s) { return opt_num(s.delta_he); }},
    {"delta_v_preserved", [](const StepMetrics& s) { return num(s.delta_v_preserved); }},
    {"efficacy", [](const StepMetrics& s) { return num(s.efficacy); }},
    {"generalization", [](const StepMetrics& s) { return num(s.generalization); }},
    {"retention", [](const StepMetrics& s) { return num(s.retention); }},
    {"dw_fro", [](const StepMetrics& s) { return num(s.dw_fro); }},
};

const char* kBoundCsvColumns[] = {
    "bound_delta_he_exact", "bound_delta_he_linearized", "bound_K",
    "bound_delta_v",        "bound_rhs",                 "bound_satisfied_linearized",
    "bound_ratio_exact",
};

double final_or(const EditTrace& t, double StepMetrics::*field, double fallback) {
    return t.steps.empty() ? fallback : t.steps.back().*field;
}

} // namespace

std::string render_trace_jsonl(const EditTrace& trace) {
    std::string out;
    out.reserve(256 + trace.steps.size() * 512);

    out += "{\"type\":\"header\",\"config\":{";
    bool first = true;
    for (const std::string& key : config_keys()) {
        if (!first) out += ',';
        first = false;
        out += '"' + key + "\":" + config_field_json(trace.config, key);
    }
    out += "}}\n";

    for (const StepMetrics& s : trace.steps) {
        out += "{\"type\":\"step\"";
        for (const StepField& f : kStepFields) {
            out += ",\"";
            out += f.name;
            out += "\":" + f.json_value(s);
        }
        out += ",\"bound_report\":";
        append_bound(out, s.bound_report);
        out += "}\n";
    }

    double cumulative = 0.0;
    for (const StepMetrics& s : trace.steps)
        if (s.bound_report) cumulative += std::fabs(s.bound_report->delta_he_exact);

    out += "{\"type\":\"footer\",\"n_steps\":" + std::to_string(trace.steps.size());
    out += ",\"spearman_he_vs_retention\":" + num(trace.spearman_he_vs_retention);
    out += ",\"spearman_defined\":";
    out += flag(trace.spearman_defined);
    out += ",\"final_efficacy\":" + num(final_or(trace, &StepMetrics::efficacy, 0.0));
    out += ",\"final_generalization\":" +
           num(final_or(trace, &StepMetrics::generalization, 0.0));
    out += ",\"final_retention\":" + num(final_or(trace, &StepMetrics::retention, 1.0));
    out += ",\"cumulative_abs_delta_he\":" + num(cumulative);
    out += "}\n";
    return out;
}

std::string render_trace_csv(const EditTrace& trace) {
    std::string out;
    for (const StepField& f : kStepFields) {
        if (&f != kStepFields) out += ',';
        out += f.name;
    }
    for (const char* col : kBoundCsvColumns) {
        out += ',';
        out += col;
    }
    out += '\n';

    for (const StepMetrics& s : trace.steps) {
        for (const StepField& f : kStepFields) {
            if (&f != kStepFields) out += ',';
            const std::string v = f.json_value(s);
            if (v != "null") out += v; // absent values become empty fields
        }
        if (s.bound_report) {
            const BoundReport& b = *s.bound_report;
            out += ',' + num(b.delta_he_exact);
            out += ',' + num(b.delta_he_linearized);
            out += ',' + num(b.bound_K);
            out += ',' + num(b.delta_v);
            out += ',' + num(b.bound_rhs);
            out += ',';
            out += flag(b.satisfied_linearized);
            out += ',' + num(b.ratio_exact);
        } else {
            out += ",,,,,,,";
        }
        out += '\n';
    }
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content,
                       bool overwrite) {
    const fs::path target(path);
    std::error_code ec;
    if (!overwrite && fs::exists(target, ec)) {
        throw Error(ErrorCode::FileExists,
                    "'" + path + "' already exists (pass the overwrite flag to replace)");
    }
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) {
            throw Error(ErrorCode::IoError,
                        "cannot create directory '" + target.parent_path().string() +
                            "': " + ec.message());
        }
    }
    const fs::path tmp(path + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot open '" + tmp.string() + "' for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError,
                    "cannot move temp file into place for '" + path + "'");
    }
}

namespace {

json parse_line(const std::string& line, const std::string& path, std::size_t lineno) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorCode::ConfigInvalid,
                    path + ":" + std::to_string(lineno) + ": malformed trace line");
    }
    return j;
}

const json& field(const json& j, const char* name, const std::string& where) {
    const auto it = j.find(name);
    if (it == j.end()) {
        throw Error(ErrorCode::ConfigInvalid,
                    where + ": missing field '" + std::string(name) + "'");
    }
    return *it;
}

std::string json_to_override_text(const json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return format_g17(v.get<double>());
    throw Error(ErrorCode::ConfigInvalid, where + ": unsupported config value type");
}

double get_real(const json& j, const char* name, const std::string& where) {
    const json& v = field(j, name, where);
    if (!v.is_number()) {
        throw Error(ErrorCode::ConfigInvalid,
                    where + ": field '" + std::string(name) + "' is not a number");
    }
    return v.get<double>();
}

std::optional<double> get_opt_real(const json& j, const char* name,
                                   const std::string& where) {
    const json& v = field(j, name, where);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) {
        throw Error(ErrorCode::ConfigInvalid,
                    where + ": field '" + std::string(name) + "' is not a number");
    }
    return v.get<double>();
}

bool get_flag(const json& j, const char* name, const std::string& where) {
    const json& v = field(j, name, where);
    if (!v.is_boolean()) {
        throw Error(ErrorCode::ConfigInvalid,
                    where + ": field '" + std::string(name) + "' is not a flag");
    }
    return v.get<bool>();
}

} // namespace

EditTrace read_trace_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open trace '" + path + "'");
    }

    EditTrace trace{ExperimentConfig{}, {}, std::nullopt, 0.0, false};
    bool have_header = false;
    bool have_footer = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const json j = parse_line(line, path, lineno);
        const json& type = field(j, "type", where);

        if (type == "header") {
            if (have_header) {
                throw Error(ErrorCode::ConfigInvalid, where + ": duplicate header");
            }
            const json& cfg = field(j, "config", where);
            if (!cfg.is_object()) {
                throw Error(ErrorCode::ConfigInvalid, where + ": config is not an object");
            }
            for (const auto& [key, value] : cfg.items()) {
                apply_config_override(trace.config, key,
                                      json_to_override_text(value, where));
            }
            validate_config(trace.config);
            have_header = true;
        } else if (type == "step") {
            if (!have_header) {
                throw Error(ErrorCode::ConfigInvalid, where + ": step before header");
            }
            StepMetrics s;
            s.step = field(j, "step", where).get<std::size_t>();
            s.he_ok = get_flag(j, "he_ok", where);
            s.he_normalized = get_opt_real(j, "he_normalized", where);
            s.he_raw = get_opt_real(j, "he_raw", where);
            s.delta_he = get_opt_real(j, "delta_he", where);
            s.delta_v_preserved = get_real(j, "delta_v_preserved", where);
            s.efficacy = get_real(j, "efficacy", where);
            s.generalization = get_real(j, "generalization", where);
            s.retention = get_real(j, "retention", where);
            s.dw_fro = get_real(j, "dw_fro", where);
            const json& b = field(j, "bound_report", where);
            if (!b.is_null()) {
                BoundReport br;
                br.delta_he_exact = get_real(b, "delta_he_exact", where);
                br.delta_he_linearized = get_real(b, "delta_he_linearized", where);
                br.bound_K = get_real(b, "bound_K", where);
                br.delta_v = get_real(b, "delta_v", where);
                br.bound_rhs = get_real(b, "bound_rhs", where);
                br.satisfied_linearized = get_flag(b, "satisfied_linearized", where);
                br.ratio_exact = get_real(b, "ratio_exact", where);
                s.bound_report = br;
            }
            trace.steps.push_back(std::move(s));
        } else if (type == "footer") {
            if (!have_header) {
                throw Error(ErrorCode::ConfigInvalid, where + ": footer before header");
            }
            if (field(j, "n_steps", where).get<std::size_t>() != trace.steps.size()) {
                throw Error(ErrorCode::ConfigInvalid,
                            where + ": footer step count disagrees with stream");
            }
            trace.spearman_he_vs_retention = get_real(j, "spearman_he_vs_retention", where);
            trace.spearman_defined = get_flag(j, "spearman_defined", where);
            have_footer = true;
        } else {
            throw Error(ErrorCode::ConfigInvalid, where + ": unknown line type");
        }
    }
    if (!have_header || !have_footer) {
        throw Error(ErrorCode::ConfigInvalid,
                    path + ": trace is missing its header or footer");
    }
    if (trace.steps.size() != trace.config.n_batches) {
        throw Error(ErrorCode::ConfigInvalid,
                    path + ": step count does not match the configured batch count");
    }
    return trace;
}

std::string render_analysis_summary_json(const std::vector<TraceAuditRecord>& audits,
                                         const MethodComparison& comparison) {
    std::string out = "{\n";
    out += "  \"traces\": " + std::to_string(audits.size()) + ",\n";
    out += "  \"audits\": [\n";
    for (std::size_t i = 0; i < audits.size(); ++i) {
        const TraceAuditRecord& a = audits[i];
        out += "    {\"file\": \"" + a.file + "\"";
        out += ", \"method\": \"" + a.method + "\"";
        out += ", \"seed\": " + std::to_string(a.seed);
        out += ", \"n_steps\": " + std::to_string(a.audit.n_steps);
        out += ", \"linearized_bound_violations\": " +
               std::to_string(a.audit.linearized_bound_violations);
        out += ", \"max_exact_ratio\": " + num(a.audit.max_exact_ratio);
        out += ", \"cumulative_abs_delta_he\": " + num(a.audit.cumulative_abs_delta_he);
        out += ", \"collapse_flag_step\": ";
        out += a.audit.collapse_flag_step
                   ? std::to_string(*a.audit.collapse_flag_step)
                   : std::string("null");
        out += ", \"spearman_he_vs_retention\": " + num(a.spearman_rho);
        out += ", \"spearman_defined\": ";
        out += flag(a.spearman_defined);
        out += ", \"final_efficacy\": " + num(a.final_efficacy);
        out += ", \"final_generalization\": " + num(a.final_generalization);
        out += ", \"final_retention\": " + num(a.final_retention);
        out += "}";
        if (i + 1 < audits.size()) out += ",";
        out += "\n";
    }
    out += "  ],\n";
    out += "  \"methods\": [\n";
    for (std::size_t i = 0; i < comparison.methods.size(); ++i) {
        const MethodSummary& m = comparison.methods[i];
        out += "    {\"method\": \"" + m.method + "\"";
        out += ", \"n_runs\": " + std::to_string(m.n_runs);
        out += ", \"mean_final_retention\": " + num(m.mean_final_retention);
        out += ", \"mean_final_efficacy\": " + num(m.mean_final_efficacy);
        out += ", \"mean_cumulative_abs_delta_he\": " +
               num(m.mean_cumulative_abs_delta_he);
        out += "}";
        if (i + 1 < comparison.methods.size()) out += ",";
        out += "\n";
    }
    out += "  ],\n";
    out += "  \"pairs\": [\n";
    for (std::size_t i = 0; i < comparison.pairs.size(); ++i) {
        const PairSummary& p = comparison.pairs[i];
        out += "    {\"method\": \"" + p.method + "\"";
        out += ", \"base\": \"" + p.base + "\"";
        out += ", \"n_pairs\": " + std::to_string(p.n_pairs);
        out += ", \"win_rate_retention\": " + num(p.win_rate_retention);
        out += ", \"win_rate_delta_he\": " + num(p.win_rate_delta_he);
        out += ", \"win_rate_dominant\": " + num(p.win_rate_dominant);
        out += "}";
        if (i + 1 < comparison.pairs.size()) out += ",";
        out += "\n";
    }
    out += "  ]\n";
    out += "}\n";
    return out;
}

std::string render_comparison_csv(const MethodComparison& comparison) {
    std::string out =
        "method,n_runs,mean_final_retention,mean_final_efficacy,"
        "mean_cumulative_abs_delta_he\n";
    for (const MethodSummary& m : comparison.methods) {
        out += m.method;
        out += ',' + std::to_string(m.n_runs);
        out += ',' + num(m.mean_final_retention);
        out += ',' + num(m.mean_final_efficacy);
        out += ',' + num(m.mean_cumulative_abs_delta_he);
        out += '\n';
    }
    return out;
}

} // namespace spherelab

#include "spherelab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>
#include <utility>

#include "spherelab/analysis.hpp"
#include "spherelab/config.hpp"
#include "spherelab/csv.hpp"
#include "spherelab/error.hpp"
#include "spherelab/harness.hpp"
#include "spherelab/linalg.hpp"
#include "spherelab/projector.hpp"
#include "spherelab/trace_io.hpp"

namespace spherelab {

namespace {

const char kUsage[] =
    "usage: spherelab <subcommand> [flags]\n"
    "\n"
    "subcommands:\n"
    "  run      run one editing sequence and write its trace files\n"
    "  he       print the hyperspherical energy of a matrix CSV\n"
    "  audit    print principal-space rank, mass, and projector spectrum\n"
    "  analyze  summarize one or more trace files into JSON + CSV tables\n"
    "  sweep    run a method x seed grid in parallel, one trace per cell\n"
    "\n"
    "common flags:\n"
    "  --config PATH       key = value config file\n"
    "  --<key> VALUE       override any config key (see README for the list)\n"
    "  --out DIR           output directory (default: out)\n"
    "  --overwrite         replace existing output files\n"
    "\n"
    "he flags:      --s VALUE, --normalize\n"
    "audit flags:   --eta VALUE (default 0.5), --alpha VALUE (default 0.8)\n"
    "analyze flags: --collapse-frac VALUE (default 0.5)\n"
    "sweep flags:   --seeds A..B or A,B,C   --methods name,name,...\n"
    "               --jobs N (default: hardware threads)\n";

std::string take_value(const std::vector<std::string>& args, std::size_t& i,
                       const std::string& flag) {
    if (i + 1 >= args.size()) {
        throw Error(ErrorCode::ConfigInvalid, "flag '" + flag + "' needs a value");
    }
    return args[++i];
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
    if (text.empty() || text[0] == '-') {
        throw Error(ErrorCode::ConfigInvalid,
                    what + ": expected a non-negative integer, got '" + text + "'");
    }
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (errno != 0 || end != text.c_str() + text.size() || end == text.c_str()) {
        throw Error(ErrorCode::ConfigInvalid,
                    what + ": expected a non-negative integer, got '" + text + "'");
    }
    return static_cast<std::uint64_t>(v);
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::size_t stop = comma == std::string::npos ? text.size() : comma;
        parts.push_back(text.substr(start, stop - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return parts;
}

// "A..B" (inclusive) or a comma list of non-negative integers.
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    const std::size_t dots = text.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t lo = parse_unsigned(text.substr(0, dots), "--seeds");
        const std::uint64_t hi = parse_unsigned(text.substr(dots + 2), "--seeds");
        if (hi < lo) {
            throw Error(ErrorCode::ConfigInvalid,
                        "--seeds: range '" + text + "' is reversed");
        }
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::vector<std::uint64_t> seeds;
    for (const std::string& part : split_commas(text)) {
        seeds.push_back(parse_unsigned(part, "--seeds"));
    }
    return seeds;
}

struct CellOutput {
    std::string stem; // out_dir/method-seedN
    std::string jsonl;
    std::string trace_csv;
    std::string final_w_csv;
    std::string cosine_csv;
};

std::string trace_stem(const std::string& out_dir, const ExperimentConfig& config) {
    return out_dir + "/" + edit_method_name(config.method) + "-seed" +
           std::to_string(config.seed);
}

void refuse_existing(const std::string& stem, bool overwrite) {
    if (overwrite) return;
    for (const char* suffix : {".jsonl", ".csv", ".final_w.csv", ".cosine.csv"}) {
        const std::string path = stem + suffix;
        std::ifstream probe(path);
        if (probe.good()) {
            throw Error(ErrorCode::FileExists,
                        "'" + path + "' already exists (pass --overwrite to replace)");
        }
    }
}

// Renders everything before touching the filesystem so a failed run leaves
// no output behind; each file then lands via an atomic rename.
CellOutput render_cell(const ExperimentConfig& config, const StepCallback& on_step,
                       const std::string& out_dir) {
    const World world = generate_world(config);
    const EditTrace trace = run_sequence(world, config, on_step);
    CellOutput cell;
    cell.stem = trace_stem(out_dir, trace.config);
    cell.jsonl = render_trace_jsonl(trace);
    cell.trace_csv = render_trace_csv(trace);
    cell.final_w_csv = render_matrix_csv(*trace.final_w);
    cell.cosine_csv = render_matrix_csv(cosine_similarity_matrix(*trace.final_w));
    return cell;
}

void write_cell(const CellOutput& cell, bool overwrite) {
    write_text_atomic(cell.stem + ".jsonl", cell.jsonl, overwrite);
    write_text_atomic(cell.stem + ".csv", cell.trace_csv, overwrite);
    write_text_atomic(cell.stem + ".final_w.csv", cell.final_w_csv, overwrite);
    write_text_atomic(cell.stem + ".cosine.csv", cell.cosine_csv, overwrite);
}

struct CommonArgs {
    ExperimentConfig config;
    std::string out_dir = "out";
    bool overwrite = false;
};

// Shared flag loop: config file first, then overrides in command-line order.
// `extra` gets first refusal on flags the common set does not know.
using ExtraFlag = std::function<bool(const std::string& flag,
                                     const std::vector<std::string>& args,
                                     std::size_t& i)>;

CommonArgs parse_common(const std::vector<std::string>& args, std::size_t first,
                        const ExtraFlag& extra) {
    CommonArgs common;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string config_path;
    for (std::size_t i = first; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            config_path = take_value(args, i, a);
        } else if (a == "--out") {
            common.out_dir = take_value(args, i, a);
        } else if (a == "--overwrite") {
            common.overwrite = true;
        } else if (extra && extra(a, args, i)) {
            // handled by the subcommand
        } else if (a.size() > 2 && a.rfind("--", 0) == 0 &&
                   is_config_key(a.substr(2))) {
            const std::string key = a.substr(2);
            overrides.emplace_back(key, take_value(args, i, a));
        } else {
            throw Error(ErrorCode::ConfigInvalid, "unknown flag '" + a + "'");
        }
    }
    if (!config_path.empty()) common.config = parse_config_file(config_path);
    for (const auto& [key, value] : overrides) {
        apply_config_override(common.config, key, value);
    }
    return common;
}

int cmd_run(const std::vector<std::string>& args, std::ostream&, std::ostream& err) {
    const CommonArgs common = parse_common(args, 1, {});
    validate_config(common.config);
    refuse_existing(trace_stem(common.out_dir, common.config), common.overwrite);
    const std::size_t total = common.config.n_batches;
    const CellOutput cell = render_cell(
        common.config,
        [&err, total](const StepMetrics& s) {
            err << "batch " << s.step << "/" << total
                << " efficacy=" << format_g17(s.efficacy)
                << " retention=" << format_g17(s.retention) << "\n";
        },
        common.out_dir);
    write_cell(cell, common.overwrite);
    err << "wrote " << cell.stem << ".{jsonl,csv,final_w.csv,cosine.csv}\n";
    return 0;
}

int cmd_he(const std::vector<std::string>& args, std::ostream& out, std::ostream&) {
    std::string matrix_path;
    EnergyParams params;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--s") {
            params.s = parse_double(take_value(args, i, a), "--s");
        } else if (a == "--normalize") {
            params.normalize = true;
        } else if (!a.empty() && a[0] != '-' && matrix_path.empty()) {
            matrix_path = a;
        } else {
            throw Error(ErrorCode::ConfigInvalid, "unknown flag '" + a + "'");
        }
    }
    if (matrix_path.empty()) {
        throw Error(ErrorCode::ConfigInvalid, "he: expected a matrix CSV path");
    }
    const Matrix w = read_matrix_csv(matrix_path);
    out << format_g17(hyperspherical_energy(w, params)) << "\n";
    return 0;
}

int cmd_audit(const std::vector<std::string>& args, std::ostream& out, std::ostream&) {
    std::string matrix_path;
    double eta = 0.5;
    double alpha = 0.8;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--eta") {
            eta = parse_double(take_value(args, i, a), "--eta");
        } else if (a == "--alpha") {
            alpha = parse_double(take_value(args, i, a), "--alpha");
        } else if (!a.empty() && a[0] != '-' && matrix_path.empty()) {
            matrix_path = a;
        } else {
            throw Error(ErrorCode::ConfigInvalid, "unknown flag '" + a + "'");
        }
    }
    if (matrix_path.empty()) {
        throw Error(ErrorCode::ConfigInvalid, "audit: expected a matrix CSV path");
    }
    const Matrix w = read_matrix_csv(matrix_path);
    ProjectorSpec spec = principal_space(w, eta);
    spec.alpha = alpha;
    const Matrix p = sparse_projector(spec);
    const EigenResult eig = sym_eigh(p);
    out << "rank_r " << spec.rank_r << "\n";
    out << "eigenvalue_mass " << format_g17(spec.eigenvalue_mass) << "\n";
    out << "spectrum";
    for (double v : eig.eigenvalues) out << " " << format_g17(v);
    out << "\n";
    return 0;
}

int cmd_analyze(const std::vector<std::string>& args, std::ostream&,
                std::ostream& err) {
    std::vector<std::string> trace_paths;
    std::string out_dir = "out";
    bool overwrite = false;
    double collapse_frac = 0.5;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--out") {
            out_dir = take_value(args, i, a);
        } else if (a == "--overwrite") {
            overwrite = true;
        } else if (a == "--collapse-frac") {
            collapse_frac = parse_double(take_value(args, i, a), "--collapse-frac");
        } else if (!a.empty() && a[0] != '-') {
            trace_paths.push_back(a);
        } else {
            throw Error(ErrorCode::ConfigInvalid, "unknown flag '" + a + "'");
        }
    }
    if (trace_paths.empty()) {
        throw Error(ErrorCode::ConfigInvalid,
                    "analyze: expected at least one trace file");
    }

    std::vector<EditTrace> traces;
    std::vector<TraceAuditRecord> audits;
    traces.reserve(trace_paths.size());
    for (const std::string& path : trace_paths) {
        EditTrace trace = read_trace_jsonl(path);
        TraceAuditRecord rec;
        rec.file = path;
        rec.method = edit_method_name(trace.config.method);
        rec.seed = trace.config.seed;
        rec.audit = audit_trace(trace, collapse_frac);
        rec.spearman_rho = trace.spearman_he_vs_retention;
        rec.spearman_defined = trace.spearman_defined;
        if (!trace.steps.empty()) {
            rec.final_efficacy = trace.steps.back().efficacy;
            rec.final_generalization = trace.steps.back().generalization;
            rec.final_retention = trace.steps.back().retention;
        }
        audits.push_back(std::move(rec));
        traces.push_back(std::move(trace));
    }
    const MethodComparison comparison = compare_methods(traces);

    const std::string summary_path = out_dir + "/summary.json";
    const std::string table_path = out_dir + "/comparison.csv";
    write_text_atomic(summary_path, render_analysis_summary_json(audits, comparison),
                      overwrite);
    write_text_atomic(table_path, render_comparison_csv(comparison), overwrite);
    err << "wrote " << summary_path << " and " << table_path << "\n";
    return 0;
}

int cmd_sweep(const std::vector<std::string>& args, std::ostream&, std::ostream& err) {
    std::vector<std::uint64_t> seeds;
    std::vector<EditMethod> methods;
    std::size_t jobs = 0;
    const CommonArgs common = parse_common(
        args, 1,
        [&](const std::string& flag, const std::vector<std::string>& rest,
            std::size_t& i) {
            if (flag == "--seeds") {
                seeds = parse_seed_list(take_value(rest, i, flag));
                return true;
            }
            if (flag == "--methods") {
                for (const std::string& name : split_commas(take_value(rest, i, flag))) {
                    methods.push_back(edit_method_from_string(name));
                }
                return true;
            }
            if (flag == "--jobs") {
                jobs = static_cast<std::size_t>(
                    parse_unsigned(take_value(rest, i, flag), "--jobs"));
                if (jobs == 0) {
                    throw Error(ErrorCode::ConfigInvalid, "--jobs: must be at least 1");
                }
                return true;
            }
            return false;
        });
    if (seeds.empty()) seeds.push_back(common.config.seed);
    if (methods.empty()) methods.push_back(common.config.method);
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

    std::vector<ExperimentConfig> cells;
    for (EditMethod m : methods) {
        for (std::uint64_t s : seeds) {
            ExperimentConfig cfg = common.config;
            cfg.method = m;
            cfg.seed = s;
            validate_config(cfg);
            refuse_existing(trace_stem(common.out_dir, cfg), common.overwrite);
            cells.push_back(cfg);
        }
    }

    std::mutex io_mutex;
    std::atomic<std::size_t> next{0};
    std::vector<std::optional<Error>> failures(cells.size());
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const std::string label = edit_method_name(cells[i].method) +
                                      std::string("-seed") +
                                      std::to_string(cells[i].seed);
            try {
                const CellOutput cell = render_cell(cells[i], {}, common.out_dir);
                std::lock_guard<std::mutex> lock(io_mutex);
                write_cell(cell, common.overwrite);
                err << "done " << label << "\n";
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                failures[i] = e;
                err << "failed " << label << ": " << e.what() << "\n";
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min(jobs, cells.size());
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    bool any_validation = false;
    bool any_numerical = false;
    for (const auto& failure : failures) {
        if (!failure) continue;
        (is_numerical(failure->code()) ? any_numerical : any_validation) = true;
    }
    if (any_numerical) return 3;
    if (any_validation) return 2;
    return 0;
}

} // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
    try {
        if (args.empty()) {
            err << kUsage;
            return 2;
        }
        const std::string& sub = args[0];
        if (sub == "--help" || sub == "-h" || sub == "help") {
            out << kUsage;
            return 0;
        }
        if (sub == "run") return cmd_run(args, out, err);
        if (sub == "he") return cmd_he(args, out, err);
        if (sub == "audit") return cmd_audit(args, out, err);
        if (sub == "analyze") return cmd_analyze(args, out, err);
        if (sub == "sweep") return cmd_sweep(args, out, err);
        throw Error(ErrorCode::ConfigInvalid, "unknown subcommand '" + sub + "'");
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_numerical(e.code()) ? 3 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace spherelab

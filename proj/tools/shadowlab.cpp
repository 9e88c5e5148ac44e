// Command-line runner: list, run and plot experiments.
//
// Exit codes: 0 pass, 1 assertion failed, 2 usage or config error,
// 3 resource or I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shadowlab.hpp"

namespace {

namespace sl = shadowlab;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kResource = 3;

struct RunFlags {
    std::string config_file;
    std::optional<std::string> experiment, system, tail_fraction, out;
    std::optional<std::size_t> horizon, samples;
    std::optional<double> delta, epsilon, resolution;
    std::optional<std::uint64_t> seed;
    bool all = false;
    bool quiet = false;
};

sl::Json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw sl::ConfigError("cannot read config file '" + path + "'");
    try {
        return sl::Json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw sl::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

/// Registered defaults, then the config file, then flags.
sl::ExperimentConfig resolve_config(const RunFlags& f, const std::string& experiment_override = "") {
    sl::Json file = sl::Json::object();
    if (!f.config_file.empty()) file = read_json_file(f.config_file);
    std::string name = experiment_override;
    if (name.empty() && f.experiment) name = *f.experiment;
    if (name.empty() && file.contains("experiment") && file["experiment"].is_string())
        name = file["experiment"].get<std::string>();
    if (name.empty()) throw sl::ConfigError("no experiment named (use --experiment or a config file)");

    auto c = sl::apply_config_json(sl::default_config(name), file);
    c.experiment = name;
    if (f.system) c.system = *f.system;
    if (f.horizon) c.horizon = *f.horizon;
    if (f.samples) c.samples = *f.samples;
    if (f.delta) c.delta = *f.delta;
    if (f.epsilon) c.epsilon = *f.epsilon;
    if (f.resolution) c.net_resolution = *f.resolution;
    if (f.seed) c.seed = *f.seed;
    if (f.tail_fraction) c.tail_fraction = sl::detail::parse_tail_fraction(*f.tail_fraction);
    if (f.out) c.output_path = *f.out;
    if (f.all) c.output_path.clear();
    return c;
}

int run_one(const sl::ExperimentConfig& c, bool quiet) {
    const auto rep = sl::run_experiment(c);
    const bool csv_ok = sl::recheck_from_csv(rep);
    const auto path = sl::write_report(rep);
    const bool ok = rep.pass && csv_ok;
    std::printf("%-18s %s  (%.2fs)  %s\n", c.experiment.c_str(), ok ? "PASS" : "FAIL", rep.duration_seconds,
                path.string().c_str());
    if (!csv_ok) std::printf("  csv recheck disagrees with the in-memory verdict\n");
    if (!quiet) std::printf("%s\n", rep.results.dump(2).c_str());
    return ok ? kPass : kFail;
}

int cmd_run(const RunFlags& f) {
    if (!f.all) return run_one(resolve_config(f), f.quiet);
    if (f.out) throw sl::ConfigError("--all writes to the default output directory; drop --out");
    int worst = kPass;
    for (const auto& e : sl::experiment_registry()) worst = std::max(worst, run_one(resolve_config(f, e.name), true));
    return worst;
}

int cmd_list(bool systems, bool json) {
    if (systems) {
        for (const auto& s : sl::system_catalog()) std::printf("%-18s %s\n", s.name.c_str(), s.description.c_str());
        return kPass;
    }
    if (json) {
        sl::Json arr = sl::Json::array();
        for (const auto& e : sl::experiment_registry())
            arr.push_back({{"name", e.name},
                           {"citation", e.citation},
                           {"summary", e.summary},
                           {"systems", e.systems},
                           {"defaults", e.defaults.to_json()},
                           {"columns", e.columns}});
        std::printf("%s\n", arr.dump(2).c_str());
        return kPass;
    }
    for (const auto& e : sl::experiment_registry())
        std::printf("%-18s %s\n%-18s   %s\n", e.name.c_str(), e.citation.c_str(), "", e.summary.c_str());
    return kPass;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

int cmd_plot(const std::string& csv, const std::string& x, const std::string& ys, const std::string& out,
             std::string title) {
    std::ifstream is(csv);
    if (!is) throw sl::IoError("cannot read '" + csv + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    const auto t = sl::CsvTable::parse(buf.str());
    const auto xc = t.column(x);
    std::vector<sl::Series> series;
    for (const auto& y : split(ys, ',')) {
        const auto yc = t.column(y);
        sl::Series s{y, {}, {}};
        for (const auto& row : t.rows) {
            // Rationals such as 3/1024 plot as their value.
            auto value = [](const std::string& cell) {
                return cell.find('/') != std::string::npos ? sl::parse_rational(cell).to_double()
                                                           : sl::detail::parse_real(cell);
            };
            s.x.push_back(value(row.at(xc)));
            s.y.push_back(value(row.at(yc)));
        }
        series.push_back(std::move(s));
    }
    if (title.empty()) title = csv;
    std::ofstream os(out);
    if (!os) throw sl::IoError("cannot open '" + out + "' for writing");
    os << sl::line_chart_svg(series, title, x, ys);
    if (!os) throw sl::IoError("failed writing '" + out + "'");
    std::printf("%s\n", out.c_str());
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experiments on mean ergodic shadowing and related shadowing variants"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sl::kVersion));

    RunFlags flags;
    auto* run = app.add_subcommand("run", "Run one experiment (or all with --all) and write its report");
    run->add_option("--config", flags.config_file, "JSON config file");
    run->add_option("--experiment", flags.experiment, "Registered experiment name");
    run->add_option("--system", flags.system, "Catalog system name");
    run->add_option("--horizon", flags.horizon, "Horizon (positive integer)");
    run->add_option("--samples", flags.samples, "Number of seeded repetitions");
    run->add_option("--delta", flags.delta, "Pseudo-orbit delta");
    run->add_option("--epsilon", flags.epsilon, "Tracing epsilon");
    run->add_option("--resolution", flags.resolution, "Net resolution");
    run->add_option("--seed", flags.seed, "Seed");
    run->add_option("--tail-fraction", flags.tail_fraction, "Tail window fraction, e.g. 1/4");
    run->add_option("--out", flags.out, "Report path (JSON); CSV tables go next to it");
    run->add_flag("--all", flags.all, "Run every registered experiment");
    run->add_flag("--quiet", flags.quiet, "Print only the verdict line");

    bool list_systems = false, list_json = false;
    auto* list = app.add_subcommand("list", "List experiments with their citations");
    list->add_flag("--systems", list_systems, "List catalog systems instead");
    list->add_flag("--json", list_json, "Machine-readable listing with defaults and CSV columns");

    std::string csv, x = "index", ys, svg_out, title;
    auto* plot = app.add_subcommand("plot", "Line chart (SVG) of CSV columns");
    plot->add_option("--csv", csv, "Input CSV")->required();
    plot->add_option("--x", x, "X column");
    plot->add_option("--y", ys, "Y column(s), comma separated")->required();
    plot->add_option("--out", svg_out, "Output SVG")->required();
    plot->add_option("--title", title, "Chart title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*run) return cmd_run(flags);
        if (*list) return cmd_list(list_systems, list_json);
        if (*plot) return cmd_plot(csv, x, ys, svg_out, title);
    } catch (const sl::ResourceError& e) {
        std::fprintf(stderr, "resource error: %s\n", e.what());
        return kResource;
    } catch (const sl::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kResource;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kResource;
    }
    return kUsage;
}

// bench: timing sweeps over the benchmark models, scaling fits and memory estimates.

#include "colabm/bench/perf_model.hpp"
#include "colabm/bench/report.hpp"
#include "colabm/models/benchmarks.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace colabm;

std::vector<std::size_t> parse_sizes(const std::string& csv) {
    std::vector<std::size_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(item, &pos);
        if (pos != item.size() || v == 0) {
            throw CLI::ValidationError("--sizes", "bad size '" + item + "'");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) {
        throw CLI::ValidationError("--sizes", "no sizes given");
    }
    return out;
}

int run_scaling(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "bench: cannot open " << path << '\n';
        return 1;
    }
    const auto rows = read_report(in);
    // keep first-appearance order of (benchmark, backend)
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> groups;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.benchmark, r.backend);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) {
            keys.push_back(key);
        }
        it->second.emplace_back(static_cast<double>(r.n), r.median_s);
    }
    std::printf("benchmark,backend,sizes,slope,r2\n");
    for (const auto& key : keys) {
        const auto& pts = groups[key];
        try {
            const auto fit = scaling_exponent(pts);
            std::printf("%s,%s,%zu,%.6f,%.6f\n", key.first.c_str(), key.second.c_str(), pts.size(),
                        fit.slope, fit.r2);
        } catch (const DomainError& e) {
            std::printf("%s,%s,%zu,,\n", key.first.c_str(), key.second.c_str(), pts.size());
            std::cerr << "bench: " << key.first << "/" << key.second << ": " << e.what() << '\n';
        }
    }
    return 0;
}

int run_memory(const std::string& schema_name, std::size_t n, double entry_cost) {
    const auto kind = parse_benchmark(schema_name);
    if (!kind) {
        std::cerr << "bench: unknown schema '" << schema_name << "'\n";
        return 1;
    }
    const auto schema = benchmark_schema(*kind);
    MemoryModel m;
    m.per_attribute_entry = entry_cost;
    std::printf("schema,n,attributes,columnar_bytes,record_bytes,reduction\n");
    std::printf("%s,%zu,%zu,%.0f,%.0f,%.6f\n", schema_name.c_str(), n, schema.size(),
                columnar_bytes(schema, n), record_bytes(schema, n, m),
                memory_reduction(schema, n, m));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Columnar vs record backend benchmark harness"};
    app.require_subcommand(0, 1);

    std::string benchmark = "all";
    std::string backend = "both";
    std::string sizes = "100,500,1000,2000,5000,10000";
    std::int64_t steps = 100;
    std::uint64_t seed = 0;
    std::size_t reps = 5;
    std::size_t warmup = 2;
    std::string out_path;
    app.add_option("--benchmark", benchmark, "wealth, sir, walk or all")
        ->check(CLI::IsMember({"wealth", "sir", "walk", "all"}));
    app.add_option("--backend", backend, "columnar, record or both")
        ->check(CLI::IsMember({"columnar", "record", "both"}));
    app.add_option("--sizes", sizes, "comma-separated population sizes");
    app.add_option("--steps", steps, "steps per run")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "simulation seed");
    app.add_option("--reps", reps, "measured runs (odd, at most 5)");
    app.add_option("--warmup", warmup, "discarded warmup runs");
    app.add_option("--out", out_path, "CSV output path (default stdout)");

    auto* scaling = app.add_subcommand("scaling", "fit log-log scaling exponents from a report");
    std::string in_path;
    scaling->add_option("--in", in_path, "report CSV")->required();

    auto* memory = app.add_subcommand("memory", "modelled bytes per backend for a schema");
    std::string schema_name;
    std::size_t mem_n = 10000;
    double entry_cost = MemoryModel{}.per_attribute_entry;
    memory->add_option("--schema", schema_name, "wealth, sir or walk")->required();
    memory->add_option("--n", mem_n, "population size")->required();
    memory->add_option("--entry-cost", entry_cost, "bytes per record attribute entry");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*scaling) {
            return run_scaling(in_path);
        }
        if (*memory) {
            return run_memory(schema_name, mem_n, entry_cost);
        }

        SweepConfig cfg;
        if (benchmark != "all") {
            cfg.benchmarks = {*parse_benchmark(benchmark)};
        }
        if (backend != "both") {
            cfg.backends = {*parse_backend(backend)};
        }
        cfg.sizes = parse_sizes(sizes);
        cfg.steps = steps;
        cfg.seed = seed;
        cfg.protocol.measured_runs = reps;
        cfg.protocol.warmup_runs = warmup;

        if (out_path.empty()) {
            sweep(cfg, &std::cout);
        } else {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "bench: cannot write " << out_path << '\n';
                return 1;
            }
            sweep(cfg, &out);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

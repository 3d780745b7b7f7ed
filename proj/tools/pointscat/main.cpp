// Command-line front end for point-scatterer computations.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 numerical error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"
#include "scene.hpp"
#include "table.hpp"

namespace
{
using namespace pointscat;
using namespace pointscat::cli;

enum ExitCode
{
    exit_ok = 0,
    exit_usage = 1,
    exit_invalid = 2,
    exit_numerical = 3
};

struct Flags
{
    std::string config;
    std::string output;
    std::string format{"csv"};
    unsigned threads{0};
    std::optional<double> tol;
    std::optional<std::size_t> max_terms;
    std::optional<std::size_t> grid_polar;
    std::optional<std::size_t> grid_azimuthal;
};

json read_document(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw InvalidInput("cannot read config file '" + path + "'");
    }
    try
    {
        return json::parse(in);
    }
    catch (json::parse_error const& e)
    {
        throw InvalidInput("config file '" + path + "' is not valid JSON: "
                           + e.what());
    }
}

void apply_overrides(Scene& scene, Flags const& f)
{
    if (f.tol)
    {
        if (!(*f.tol > 0))
        {
            throw InvalidInput("--tol must be positive");
        }
        scene.tol = *f.tol;
    }
    if (f.max_terms)
    {
        if (*f.max_terms < 1)
        {
            throw InvalidInput("--max-terms must be at least 1");
        }
        scene.max_terms = *f.max_terms;
    }
    if (f.grid_polar)
    {
        scene.grid_polar = *f.grid_polar;
    }
    if (f.grid_azimuthal)
    {
        scene.grid_azimuthal = *f.grid_azimuthal;
    }
    if (scene.grid_polar == 0 || scene.grid_azimuthal == 0)
    {
        throw InvalidInput("quadrature orders must be positive");
    }
}

void emit(std::string const& text, Flags const& f)
{
    if (f.output.empty())
    {
        std::cout << text;
        return;
    }
    std::ofstream out(f.output, std::ios::binary);
    if (!out)
    {
        throw InvalidInput("cannot write output file '" + f.output + "'");
    }
    out << text;
}

int run_compute(std::string const& name, Flags const& f)
{
    Scene scene = parse_scene(read_document(f.config));
    apply_overrides(scene, f);

    RunOptions opts;
    opts.threads = f.threads ? f.threads
                             : std::max(1u, std::thread::hardware_concurrency());

    Table table;
    if (name == "amplitude")
    {
        table = run_amplitude(scene, opts);
    }
    else if (name == "cross-section")
    {
        table = run_cross_section(scene, opts);
    }
    else if (name == "field")
    {
        table = run_field(scene, opts);
    }
    else if (name == "compare-rb")
    {
        table = run_compare_rb(scene, opts);
    }
    else
    {
        table = run_renorm_flow(scene, opts);
    }

    std::ostringstream os;
    if (f.format == "json")
    {
        os << to_json(table, name, scene.source).dump(2) << '\n';
    }
    else
    {
        write_csv(os, table);
    }
    emit(os.str(), f);
    return exit_ok;
}

int run_validate(Flags const& f)
{
    auto outcome = analyze_scene(read_document(f.config));
    std::ostringstream os;
    for (auto const& issue : outcome.issues)
    {
        os << issue << '\n';
    }
    emit(os.str(), f);
    return outcome.issues.empty() ? exit_ok : exit_invalid;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact and series scattering by arrays of point scatterers"};
    app.require_subcommand(1);

    Flags flags;
    auto add_common = [&flags](CLI::App* sub, bool compute) {
        sub->add_option("--config", flags.config, "Scene file (JSON)")
            ->required();
        sub->add_option("--output", flags.output, "Output path (default stdout)");
        if (!compute)
        {
            return;
        }
        sub->add_option("--format", flags.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", flags.threads,
                        "Worker threads (default: hardware concurrency)");
        sub->add_option("--tol", flags.tol, "Series convergence tolerance");
        sub->add_option("--max-terms", flags.max_terms, "Series term cap");
        sub->add_option("--grid-polar", flags.grid_polar,
                        "Gauss-Legendre order in cos(theta)");
        sub->add_option("--grid-azimuthal", flags.grid_azimuthal,
                        "Trapezoid points in phi");
    };

    std::vector<std::pair<std::string, std::string>> const compute_cmds = {
        {"amplitude", "Scattering amplitude over an outgoing-direction grid"},
        {"cross-section", "Differential and total cross sections"},
        {"field", "Total field on a line or plane"},
        {"compare-rb", "Exact vs far-zone Born series vs Neumann vs first Born"},
        {"renorm-flow", "Cutoff dependence of a single-scatterer amplitude"}};
    for (auto const& [name, help] : compute_cmds)
    {
        add_common(app.add_subcommand(name, help), true);
    }
    add_common(app.add_subcommand("validate", "Check a scene file"), false);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        std::cerr << app.help();
        return exit_usage;
    }

    auto* sub = app.get_subcommands().front();
    std::string const name = sub->get_name();
    try
    {
        return name == "validate" ? run_validate(flags)
                                  : run_compute(name, flags);
    }
    catch (NumericalError const& e)
    {
        std::cerr << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    }
    catch (InvalidInput const& e)
    {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_invalid;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid;
    }
}

#include "cli.hpp"

#include <fstream>

#include <CLI11.hpp>

#include "eos/elements.hpp"
#include "eos/scan.hpp"

namespace eos {

namespace {

void write_table(const ScanTable& table, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << table.to_csv();
        return;
    }
    std::ofstream f(path);
    if (!f)
        throw ConfigError("cannot write " + path);
    f << table.to_csv();
    std::ofstream gp(path + ".gp");
    if (!gp)
        throw ConfigError("cannot write " + path + ".gp");
    gp << plot_script(table, path);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Two-beam electro-optic sampling: probe states, harvested correlations and entanglement"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_path;
    std::string sweep_text;
    int threads = 0;
    app.add_option("--config", config_path, "config file (default: $EOS_CONFIG, then the shipped baseline)");
    app.add_option("--set", sets, "override a config key, key=value (repeatable)");
    app.add_option("--out", out_path, "write the table here (plus a .gp plot script) instead of stdout");
    app.add_option("--sweep", sweep_text, "name:start:stop:count[:log]");
    app.add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

    auto* corr = app.add_subcommand("scan-correlation", "two-beam correlation G at the quarter-wave setting");
    auto* neg = app.add_subcommand("scan-negativity", "negativity, E1 and phi_M");
    auto* bell = app.add_subcommand("scan-bell", "optimised Bell functional with N_LO = |m|");
    auto* wit = app.add_subcommand("witness", "entanglement-witness measurement budget");
    auto* ver = app.add_subcommand("verify", "run the oracle verification suite");
    for (auto* sc : {corr, neg, bell, wit, ver})
        sc->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return 2;
    }

    try {
        ConfigSource src = load_config_source(config_path.empty() ? default_config_path() : config_path);
        for (const auto& s : sets)
            src.set_assignment(s);

        const bool scanning = corr->parsed() || neg->parsed() || bell->parsed();
        if (scanning && sweep_text.empty())
            throw ConfigError("scan subcommands need --sweep name:start:stop:count[:log]");
        if (!scanning && !sweep_text.empty())
            throw ConfigError("--sweep only applies to scan subcommands");

        if (scanning) {
            const ScanSpec spec = parse_sweep(sweep_text);
            const ScanOptions opt{threads};
            const ScanTable t = corr->parsed()  ? cmd_scan_correlation(src, spec, opt)
                                : neg->parsed() ? cmd_scan_negativity(src, spec, opt)
                                                : cmd_scan_bell(src, spec, opt);
            write_table(t, out_path, out);
            return 0;
        }
        if (wit->parsed()) {
            write_table(cmd_witness(src), out_path, out);
            return 0;
        }
        const VerifyOutcome v = cmd_verify(src, threads);
        if (out_path.empty()) {
            out << v.text;
        } else {
            std::ofstream f(out_path);
            if (!f)
                throw ConfigError("cannot write " + out_path);
            f << v.text;
        }
        return v.pass ? 0 : 1;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const MaterialError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const StateError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace eos

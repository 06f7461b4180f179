// epv: command-line driver for the verification suites.
//
// Exit status: 0 when every check holds, 1 when some check fails, 2 on a
// configuration error, 3 on an internal error. Diagnostics for the last two
// cases are written to stderr as JSON.

#include "commands.hpp"
#include "svg.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

using epv::Json;

int diagnose(int code, const std::string& kind, const std::string& command, const std::string& message) {
    Json d;
    d["schema"] = epv::kSchema;
    d["error"] = Json{{"kind", kind}, {"command", command}, {"message", message}};
    std::cerr << d.dump(2) << "\n";
    return code;
}

void add_flags(CLI::App* sub, epv::RunConfig& cfg, const std::vector<std::string>& flags) {
    for (const auto& f : flags) {
        if (f == "type") sub->add_option("--type", cfg.type, "Cartan type, e.g. A2, C2, G2, B3");
        if (f == "q") sub->add_option("--q", cfg.q, "residue field orders")->delimiter(',');
        if (f == "radius") sub->add_option("--radius", cfg.radius, "ball radius in gallery steps");
        if (f == "rho") sub->add_option("--rho", cfg.rho, "probe depth");
        if (f == "r") sub->add_option("--r", cfg.r, "depth of the graded quotient");
        if (f == "cap") sub->add_option("--cap", cfg.cap, "largest finite group order to build");
        if (f == "format") sub->add_option("--format", cfg.format, "json or csv");
        if (f == "seed") sub->add_option("--seed", cfg.seed, "seed for randomized centrality probes");
        if (f == "groups") sub->add_option("--groups", cfg.groups, "finite groups as KIND:q")->delimiter(',');
        if (f == "mode") sub->add_option("--mode", cfg.mode, "depth-r or depth-zero");
        if (f == "probe") sub->add_option("--probe", cfg.probe, "vertex types of the probe facet")->delimiter(',');
        if (f == "l") sub->add_option("--l", cfg.l, "simplex dimension");
        if (f == "pairs") sub->add_option("--pairs", cfg.pairs, "affine roots g1,...,gl:level separated by ';'");
        if (f == "sector") sub->add_option("--sector", cfg.sector, "positive system whose sector is shaded");
        if (f == "threshold") sub->add_option("--threshold", cfg.threshold, "separation threshold (default rho+2)");
        if (f == "svg") sub->add_option("--svg", cfg.svg, "write an SVG figure to this path");
        if (f == "elements") sub->add_flag("--elements", cfg.elements, "include every group element");
    }
    sub->add_option("--out", cfg.out, "write the report here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact verification of Euler-Poincare vanishing identities"};
    app.require_subcommand(1);
    epv::RunConfig cfg;

    for (const auto& [name, flags] : epv::capability_table()) {
        auto* sub = app.add_subcommand(name);
        add_flags(sub, cfg, flags);
        sub->callback([&cfg, name = name] { cfg.command = name; });
    }

    // `verify MODE` is shorthand for the verify-* and related subcommands.
    std::string verify_mode;
    auto* verify = app.add_subcommand("verify", "alias: verify dplus|depth-r|stabilize|peter-weyl|ff");
    verify->add_option("suite", verify_mode)->required()->check(
        CLI::IsMember({"dplus", "depth-r", "stabilize", "peter-weyl", "ff"}));
    add_flags(verify, cfg, {"type", "q", "radius", "rho", "r", "cap", "seed", "groups", "mode", "probe", "threshold",
                            "svg"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const auto parsed = app.get_subcommands();
        return diagnose(2, "config", parsed.empty() ? "" : parsed.front()->get_name(), e.what());
    }

    if (verify->parsed()) {
        static const std::map<std::string, std::string> target = {{"dplus", "verify-dplus"},
                                                                  {"depth-r", "verify-depth-r"},
                                                                  {"stabilize", "stabilize"},
                                                                  {"peter-weyl", "peter-weyl"},
                                                                  {"ff", "verify-ff"}};
        cfg.command = target.at(verify_mode);
        const auto& allowed = epv::capability_table().at(cfg.command);
        for (const auto* opt : verify->get_options()) {
            const std::string flag = opt->get_single_name();
            if (opt->count() == 0 || flag == "suite" || flag == "out" || flag == "help") continue;
            if (std::find(allowed.begin(), allowed.end(), flag) == allowed.end())
                return diagnose(2, "config", cfg.command, "--" + flag + " is not accepted by " + cfg.command);
        }
    }

    epv::RunConfig resolved;
    try {
        resolved = epv::resolve(cfg);
    } catch (const std::invalid_argument& e) {
        return diagnose(2, "config", cfg.command, e.what());
    }

    try {
        std::string text;
        bool ok = true;
        if (resolved.format == "csv") {
            text = epv::chars_csv(resolved);
            ok = epv::run(resolved).all_hold();
        } else {
            const epv::Report rep = epv::run(resolved);
            text = rep.to_json(epv::config_json(resolved)).dump(2) + "\n";
            ok = rep.all_hold();
        }
        if (resolved.out.empty())
            std::cout << text;
        else
            epv::write_file(resolved.out, text);
        return ok ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        return diagnose(2, "config", resolved.command, e.what());
    } catch (const std::length_error& e) {
        return diagnose(2, "config", resolved.command, e.what());
    } catch (const std::exception& e) {
        return diagnose(3, "internal", resolved.command, e.what());
    }
}

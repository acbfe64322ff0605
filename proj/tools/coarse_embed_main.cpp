// coarse-embed: generate benchmark spaces, build dyadic L^p embeddings, certify
// Poincare inequalities and report distortion brackets.
//
//   coarse-embed gen binary_tree:6 -o t6.space
//   coarse-embed embed cycle:64 --family doubling -p 2 --rate 0.5,0
//   coarse-embed certify binary_tree:4 --kind tree_cp -p 2
//   coarse-embed bracket cycle:4 -p 2
//   coarse-embed profile laakso:2 --family subexp
//
// Exit code 0 iff every requested audit passes; failing runs print a
// machine-readable failures=[...] line.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "coarse/cli.hpp"
#include "coarse/errors.hpp"

namespace {

void parse_rate(const std::string& text, coarse::RunConfig& cfg) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--rate expects a,b");
    cfg.rate_a = std::stod(text.substr(0, comma));
    std::string b = text.substr(comma + 1);
    cfg.rate_b = (b == "inf" || b == "zero") ? std::numeric_limits<double>::infinity()
                                             : std::stod(b);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coarse geometry embeddings, profiles and Poincare certificates"};
    app.require_subcommand(1);

    coarse::RunConfig cfg;
    std::string rate_text;
    std::vector<std::string> scale_text;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("space", cfg.space_arg,
                        "generator spec (kind:params) or space file path")
            ->required();
        sub->add_option("-p", cfg.p, "exponent of the target L^p space");
        sub->add_option("--seed", cfg.seed, "seed for randomized pieces");
        sub->add_option("--tol", cfg.tol, "numeric tolerance override");
        sub->add_option("-o,--out", cfg.out_dir, "output directory");
        sub->add_option("--scales", cfg.scales, "explicit scale list")->delimiter(',');
        sub->add_option("--base", cfg.base, "base point of the embedding");
        sub->add_option("--family", cfg.family, "subexp | uniform_volume | doubling");
    };

    CLI::App* sub_gen = app.add_subcommand("gen", "generate a space file");
    sub_gen->add_option("spec", cfg.space_arg, "generator spec, e.g. laakso:3")->required();
    sub_gen->add_option("-o,--out", cfg.out_file, "output file");
    sub_gen->add_option("--dir", cfg.out_dir, "output directory");

    CLI::App* sub_embed = app.add_subcommand("embed", "build an embedding and profiles");
    add_common(sub_embed);
    sub_embed->add_option("--rate", rate_text, "rate function parameters a,b");

    CLI::App* sub_certify = app.add_subcommand("certify", "emit a Poincare certificate");
    add_common(sub_certify);
    sub_certify->add_option("--kind", cfg.kind,
                            "expander | tree_cp | laakso_cp | skew_cube | file:<path>");
    sub_certify->add_option("--cube", cfg.cube, "skew_cube corner map")->delimiter(',');

    CLI::App* sub_bracket = app.add_subcommand("bracket", "distortion sandwich report");
    add_common(sub_bracket);

    CLI::App* sub_profile = app.add_subcommand("profile", "growth and A-profile CSVs");
    add_common(sub_profile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!rate_text.empty()) parse_rate(rate_text, cfg);
        if (sub_gen->parsed()) cfg.command = "gen";
        else if (sub_embed->parsed()) cfg.command = "embed";
        else if (sub_certify->parsed()) cfg.command = "certify";
        else if (sub_bracket->parsed()) cfg.command = "bracket";
        else if (sub_profile->parsed()) cfg.command = "profile";

        coarse::CommandResult res = coarse::run_command(cfg);
        std::cout << res.summary << "\n";
        if (!res.failures.empty())
            std::cout << coarse::format_failures(res.failures) << "\n";
        return res.exit_code;
    } catch (const coarse::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

/**
 * @file quiverrep.cpp
 * @brief Command line front end: classification, model builders, reflection
 *        functors, decomposition, duality checks, orientation planning and
 *        indecomposable synthesis, all over JSON files.
 *
 * Every successful command writes one JSON document to stdout (or --out)
 * with a "manifest" key recording the command, inputs, tolerances, seed and
 * timing, so runs are reproducible.  Domain errors exit with code 1 and a
 * machine readable {"error": <code>} object; usage errors exit with code 2.
 */

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <qrep/json_io.hpp>
#include <qrep/planner.hpp>

using namespace qrep;

namespace {

struct CommonOpts {
    std::string out;
    TolerancePolicy tol;
    std::uint64_t seed = 0x51d67f3a2b4c9e01ull;
    std::vector<std::string> inputs;  // file paths read, for the manifest
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--out", c.out, "write the JSON output to this file instead of stdout");
    cmd->add_option("--rank-tol", c.tol.rank_rel_tol, "relative singular value cutoff");
    cmd->add_option("--residual-tol", c.tol.residual_tol, "residual acceptance threshold");
    cmd->add_option("--gap-tol", c.tol.eig_cluster_gap, "eigenvalue clustering gap");
    cmd->add_option("--seed", c.seed, "seed for randomized searches");
}

Json read_json(const std::string& path, CommonOpts& c) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open file: " + path);
    c.inputs.push_back(path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw BadInput("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

Complex parse_complex(const std::string& s) {
    // accepts "a", "a+bi", "a-bi"
    double re = 0, im = 0;
    char suffix = 0;
    std::istringstream iss(s);
    if (!(iss >> re)) throw BadParameter("cannot parse complex number: " + s);
    if (iss >> im >> suffix) {
        if (suffix != 'i' && suffix != 'j') throw BadParameter("cannot parse complex number: " + s);
    } else {
        im = 0;
    }
    return Complex(re, im);
}

int emit(Json j, const CommonOpts& c, const std::string& command,
         std::chrono::steady_clock::time_point started) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    Json manifest;
    manifest["command"] = command;
    manifest["inputs"] = c.inputs;
    manifest["tolerances"] = {{"rank_rel_tol", c.tol.rank_rel_tol},
                              {"residual_tol", c.tol.residual_tol},
                              {"eig_cluster_gap", c.tol.eig_cluster_gap}};
    manifest["seed"] = c.seed;
    manifest["elapsed_ms"] = elapsed;
    manifest["output"] = c.out.empty() ? "stdout" : c.out;
    j["manifest"] = std::move(manifest);
    if (c.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream outf(c.out);
        if (!outf) throw BadInput("cannot open output file: " + c.out);
        outf << j.dump(2) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quiver representation toolkit"};
    app.require_subcommand(1);

    // classify
    auto opt_classify = std::make_shared<CommonOpts>();
    std::string classify_path;
    auto* cmd_classify = app.add_subcommand("classify", "classify the underlying graph");
    cmd_classify->add_option("quiver", classify_path, "quiver JSON file")->required();
    add_common(cmd_classify, *opt_classify);

    // build
    auto opt_build = std::make_shared<CommonOpts>();
    std::string build_kind;
    int build_n = 1, build_size = 0;
    std::string build_lambda = "0";
    auto* cmd_build = app.add_subcommand("build", "build a model representation");
    cmd_build->add_option("--kind", build_kind, "a0_loop, an_tilde, d4_fourspace, dn_tilde, "
                                                "e6_tilde, e6_tilde_alt, e7_tilde, e8_tilde")
        ->required();
    cmd_build->add_option("--n", build_n, "truncation order N")->required();
    cmd_build->add_option("--lambda", build_lambda, "complex shift offset, e.g. 0.5-1i");
    cmd_build->add_option("--size", build_size, "family index n for an_tilde and dn_tilde");
    add_common(cmd_build, *opt_build);

    // reflect
    auto opt_reflect = std::make_shared<CommonOpts>();
    std::string reflect_rep, reflect_vertex, reflect_sign = "+";
    auto* cmd_reflect = app.add_subcommand("reflect", "apply a reflection functor");
    cmd_reflect->add_option("--rep", reflect_rep, "representation JSON file")->required();
    cmd_reflect->add_option("--vertex", reflect_vertex, "vertex to reflect at")->required();
    cmd_reflect->add_option("--sign", reflect_sign, "+ at a sink, - at a source")->required();
    add_common(cmd_reflect, *opt_reflect);

    // decompose
    auto opt_decompose = std::make_shared<CommonOpts>();
    std::string decompose_rep;
    auto* cmd_decompose = app.add_subcommand("decompose", "full direct sum decomposition");
    cmd_decompose->add_option("--rep", decompose_rep, "representation JSON file")->required();
    add_common(cmd_decompose, *opt_decompose);

    // check
    auto opt_check = std::make_shared<CommonOpts>();
    std::string check_rep;
    auto* cmd_check = app.add_subcommand("check", "certified indecomposability test");
    cmd_check->add_option("--rep", check_rep, "representation JSON file")->required();
    add_common(cmd_check, *opt_check);

    // duality
    auto opt_duality = std::make_shared<CommonOpts>();
    std::string duality_rep, duality_vertex;
    auto* cmd_duality = app.add_subcommand(
        "duality", "verify the double reflection decomposition at a sink or source");
    cmd_duality->add_option("--rep", duality_rep, "representation JSON file")->required();
    cmd_duality->add_option("--vertex", duality_vertex, "sink or source vertex")->required();
    add_common(cmd_duality, *opt_duality);

    // plan
    auto opt_plan = std::make_shared<CommonOpts>();
    std::string plan_from, plan_to;
    auto* cmd_plan = app.add_subcommand("plan", "plan source reflections between orientations");
    cmd_plan->add_option("--from", plan_from, "base quiver JSON file")->required();
    cmd_plan->add_option("--to", plan_to, "target quiver JSON file")->required();
    add_common(cmd_plan, *opt_plan);

    // synthesize
    auto opt_synth = std::make_shared<CommonOpts>();
    std::string synth_quiver;
    int synth_N = 1;
    std::string synth_lambda = "0";
    auto* cmd_synth = app.add_subcommand(
        "synthesize", "build a certified indecomposable representation on a host quiver");
    cmd_synth->add_option("--quiver", synth_quiver, "host quiver JSON file")->required();
    cmd_synth->add_option("--N", synth_N, "truncation order")->required();
    cmd_synth->add_option("--lambda", synth_lambda, "complex shift offset");
    add_common(cmd_synth, *opt_synth);

    // export-dot
    auto opt_dot = std::make_shared<CommonOpts>();
    std::string dot_path;
    auto* cmd_dot = app.add_subcommand("export-dot", "Graphviz rendering of a quiver");
    cmd_dot->add_option("quiver", dot_path, "quiver JSON file")->required();
    add_common(cmd_dot, *opt_dot);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const auto started = std::chrono::steady_clock::now();
    std::string command;
    for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);

    try {
        if (cmd_classify->parsed()) {
            auto& c = *opt_classify;
            Quiver q = quiver_from_json(read_json(classify_path, c));
            return emit(graph_class_to_json(underlying_classify(q)), c, command, started);
        }
        if (cmd_build->parsed()) {
            auto& c = *opt_build;
            HilbertRep x = build_example(example_kind_from_string(build_kind), build_n,
                                         parse_complex(build_lambda), build_size, c.tol);
            return emit(rep_to_json(x), c, command, started);
        }
        if (cmd_reflect->parsed()) {
            auto& c = *opt_reflect;
            HilbertRep x = rep_from_json(read_json(reflect_rep, c));
            if (reflect_sign != "+" && reflect_sign != "-")
                throw BadParameter("--sign must be + or -");
            auto r = reflect_sign == "+" ? reflect_plus(x, reflect_vertex, c.tol)
                                         : reflect_minus(x, reflect_vertex, c.tol);
            Json j = rep_to_json(r.rep);
            j["vertex"] = r.vertex;
            j["sign"] = r.sign;
            return emit(std::move(j), c, command, started);
        }
        if (cmd_decompose->parsed()) {
            auto& c = *opt_decompose;
            HilbertRep x = rep_from_json(read_json(decompose_rep, c));
            auto d = decompose_fully(x, c.tol, 256, c.seed);
            return emit(decomposition_to_json(d), c, command, started);
        }
        if (cmd_check->parsed()) {
            auto& c = *opt_check;
            HilbertRep x = rep_from_json(read_json(check_rep, c));
            auto verdict = is_indecomposable(x, c.tol, 256, c.seed);
            return emit(verdict_to_json(verdict), c, command, started);
        }
        if (cmd_duality->parsed()) {
            auto& c = *opt_duality;
            HilbertRep x = rep_from_json(read_json(duality_rep, c));
            DualityResult d;
            std::string side;
            if (x.quiver.is_sink(duality_vertex)) {
                d = duality_decompose_sink(x, duality_vertex, c.tol);
                side = "sink";
            } else if (x.quiver.is_source(duality_vertex)) {
                d = duality_decompose_source(x, duality_vertex, c.tol);
                side = "source";
            } else {
                throw BadParameter("vertex " + duality_vertex + " is neither a sink nor a source");
            }
            Json j;
            j["side"] = side;
            j["vertex"] = duality_vertex;
            j["tilde_dim"] = d.tilde_dim;
            j["residual"] = d.residual;
            j["reflected"] = rep_to_json(d.reflected);
            j["tilde"] = rep_to_json(d.tilde);
            j["iso"] = family_to_json(d.iso);
            return emit(std::move(j), c, command, started);
        }
        if (cmd_plan->parsed()) {
            auto& c = *opt_plan;
            Quiver from = quiver_from_json(read_json(plan_from, c));
            Quiver to = quiver_from_json(read_json(plan_to, c));
            return emit(plan_to_json(star_plan(from, to)), c, command, started);
        }
        if (cmd_synth->parsed()) {
            auto& c = *opt_synth;
            Quiver q = quiver_from_json(read_json(synth_quiver, c));
            auto r = synthesize_indecomposable(q, synth_N, parse_complex(synth_lambda), c.tol);
            return emit(synthesis_to_json(r), c, command, started);
        }
        if (cmd_dot->parsed()) {
            auto& c = *opt_dot;
            Quiver q = quiver_from_json(read_json(dot_path, c));
            Json j;
            j["dot"] = export_dot(q);
            return emit(std::move(j), c, command, started);
        }
    } catch (const Error& e) {
        Json j;
        j["error"] = e.code();
        j["message"] = e.what();
        std::cout << j.dump(2) << "\n";
        return 1;
    } catch (const std::exception& e) {
        Json j;
        j["error"] = "InternalError";
        j["message"] = e.what();
        std::cout << j.dump(2) << "\n";
        return 1;
    }
    return 2;
}

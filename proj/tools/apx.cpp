#include <CLI11.hpp>

#include "apx/cli_run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"almost periodic approximation toolkit"};
    app.require_subcommand(1);

    apx::RunConfig rc;
    for (const char* name :
         {"spectrum", "kernel", "extend", "sap-verify", "pipeline", "tensor"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--input", rc.input, "input JSON file")->required();
        sub->add_option("--out", rc.out, "output file");
        sub->add_option("--config", rc.config, "auxiliary config JSON");
        sub->add_option("--epsilon", rc.epsilon, "approximation target");
        sub->add_option("--fields-dir", rc.fields_dir, "directory for stage field CSVs");
        sub->add_option("--seed", rc.seed, "seed echoed into reports");
        if (std::string(name) == "pipeline")
            sub->add_option("--singular", rc.singular, "singular set JSON");
    }
    CLI11_PARSE(app, argc, argv);
    rc.command = app.get_subcommands().front()->get_name();
    return apx::run(rc);
}

// End-to-end exercise of the command line binary. The path to the built
// binary comes from the EP_CLI_BIN environment variable (set by ctest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "ep/dataset_io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* bin = std::getenv("EP_CLI_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "EP_CLI_BIN must point at the ep binary");
    return bin;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() / "ep_cli_smoke";
        fs::remove_all(dir);
        fs::create_directories(dir);

        // Two interleaved 12-vertex rings with a couple of cross links, one
        // class per ring, plus word labels.
        std::ofstream edges(dir / "toy.edges");
        std::ofstream words(dir / "toy.words");
        std::ofstream classes(dir / "toy.classes");
        for (int ring = 0; ring < 2; ++ring) {
            for (int i = 0; i < 12; ++i) {
                const std::string a = "r" + std::to_string(ring) + "_" + std::to_string(i);
                const std::string b =
                    "r" + std::to_string(ring) + "_" + std::to_string((i + 1) % 12);
                edges << a << '\t' << b << '\n';
                words << a << "\tw" << ring << "_" << i % 4 << "\tshared" << i % 2 << '\n';
                classes << a << "\tring" << ring << '\n';
            }
        }
        edges << "r0_0\tr1_0\n";
        std::ofstream manifest(dir / "toy.manifest");
        manifest << "edge_file = toy.edges\n"
                 << "node_id_labels = true\n"
                 << "label_file = words:toy.words\n"
                 << "class_file = toy.classes\n";
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string manifest() const { return (dir / "toy.manifest").string(); }
};

} // namespace

TEST_CASE("cli: usage errors exit with 2") {
    CHECK(run("definitely-not-a-subcommand") == 2);
    CHECK(run("train --out /tmp/nowhere") == 2);                 // missing --dataset
    CHECK(run("train --dataset /no/such/file --out /tmp/x") == 2); // names the path on stderr
}

TEST_CASE("cli: full train / inspect / evaluate / infer cycle") {
    Workspace ws;
    const std::string model_dir = (ws.dir / "model").string();

    CHECK(run("inspect --dataset " + ws.manifest()) == 0);

    CHECK(run("train --dataset " + ws.manifest() + " --out " + model_dir +
              " --epochs 30 --dim 8 --gamma 2 --lr 0.02 --batch-size 8 --seed 11") == 0);
    CHECK(fs::exists(fs::path(model_dir) / "nodes.emb"));
    CHECK(fs::exists(fs::path(model_dir) / "labels_node_id.emb"));
    CHECK(fs::exists(fs::path(model_dir) / "labels_words.emb"));
    CHECK(fs::exists(fs::path(model_dir) / "run_manifest.txt"));
    CHECK(count_lines(fs::path(model_dir) / "loss_curve.tsv") == 30);

    SUBCASE("epochs = 0 still writes the initial embeddings") {
        const std::string zero_dir = (ws.dir / "model0").string();
        CHECK(run("train --dataset " + ws.manifest() + " --out " + zero_dir +
                  " --epochs 0 --dim 8") == 0);
        CHECK(fs::exists(fs::path(zero_dir) / "nodes.emb"));
        CHECK(count_lines(fs::path(zero_dir) / "loss_curve.tsv") == 0);
    }

    SUBCASE("evaluate writes per-run metrics and a summary") {
        const std::string eval_dir = (ws.dir / "eval").string();
        CHECK(run("evaluate --dataset " + ws.manifest() + " --embeddings " + model_dir +
                  "/nodes.emb --protocol per-class --per-class-n 3 --n-test 8 --n-val 6"
                  " --repetitions 4 --out " + eval_dir) == 0);
        CHECK(count_lines(fs::path(eval_dir) / "metrics.tsv") == 5); // 4 runs + summary
        CHECK(fs::exists(fs::path(eval_dir) / "split_run0.tsv"));
    }

    SUBCASE("infer embeds new nodes and reports rejects") {
        std::ofstream spec(ws.dir / "new.nodes");
        spec << "fresh\tr0_0,r0_1\n";
        spec << "stranded\tunknown_vertex\n";
        spec.close();
        CHECK(run("infer --dataset " + ws.manifest() + " --model " + model_dir + " --nodes " +
                  (ws.dir / "new.nodes").string()) == 0);
        auto [ids, reps] = ep::load_embeddings(fs::path(model_dir) / "inductive.emb");
        CHECK(ids == std::vector<std::string>{"fresh"});
        CHECK(reps.cols == 16); // two label types at dim 8
        CHECK(count_lines(fs::path(model_dir) / "rejects.txt") == 1);
    }

    SUBCASE("empty spec file produces an empty embedding file and exit 0") {
        std::ofstream(ws.dir / "none.nodes").close();
        CHECK(run("infer --dataset " + ws.manifest() + " --model " + model_dir + " --nodes " +
                  (ws.dir / "none.nodes").string()) == 0);
        auto [ids, reps] = ep::load_embeddings(fs::path(model_dir) / "inductive.emb");
        CHECK(ids.empty());
        CHECK(reps.rows == 0);
    }
}

TEST_CASE("cli: config file values are applied and unknown keys rejected") {
    Workspace ws;
    {
        std::ofstream cfg(ws.dir / "run.cfg");
        cfg << "epochs = 5\n"
            << "dim = 4\n"
            << "gamma = 3\n";
    }
    const std::string model_dir = (ws.dir / "cfg_model").string();
    CHECK(run("train --dataset " + ws.manifest() + " --config " + (ws.dir / "run.cfg").string() +
              " --out " + model_dir) == 0);
    CHECK(count_lines(fs::path(model_dir) / "loss_curve.tsv") == 5);

    SUBCASE("flags override the config file") {
        const std::string override_dir = (ws.dir / "cfg_model2").string();
        CHECK(run("train --dataset " + ws.manifest() + " --config " +
                  (ws.dir / "run.cfg").string() + " --epochs 2 --out " + override_dir) == 0);
        CHECK(count_lines(fs::path(override_dir) / "loss_curve.tsv") == 2);
    }
    SUBCASE("unknown config keys are a usage error") {
        std::ofstream cfg(ws.dir / "bad.cfg");
        cfg << "not_a_real_option = 1\n";
        cfg.close();
        CHECK(run("train --dataset " + ws.manifest() + " --config " +
                  (ws.dir / "bad.cfg").string() + " --out " + (ws.dir / "x").string()) == 2);
    }
}

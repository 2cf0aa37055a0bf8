#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ep/evaluator.hpp"
#include "ep/graph.hpp"
#include "ep/matrix.hpp"
#include "ep/trainer.hpp"

namespace ep {

/*
 * Input grammar (lines starting with '#' and blank lines are skipped,
 * default delimiter TAB):
 *
 *   edge file:   <src><DELIM><dst>[<DELIM><edge_type>]
 *   label file:  <vertex><DELIM><label1><DELIM><label2>...
 *   class file:  <vertex><DELIM><class>[,<class>...]
 *
 * Vertices are defined by the edge file and assigned dense ids in first
 * appearance order; external ids are opaque UTF-8 strings without the
 * delimiter character.
 */

// Flat "key = value" file; duplicate keys are preserved in order.
struct KeyValueFile {
    std::vector<std::pair<std::string, std::string>> entries;

    static KeyValueFile parse(const std::filesystem::path& path);
    std::optional<std::string> get(const std::string& key) const;
    std::vector<std::string> get_all(const std::string& key) const;
};

struct DatasetManifest {
    std::filesystem::path edge_file;
    bool directed = false;
    char delimiter = '\t';
    // When set, a label type holding one unique label per vertex is placed
    // first (type 0).
    bool node_id_labels = true;
    std::string node_id_type_name = "node_id";
    std::vector<std::pair<std::string, std::filesystem::path>> label_files; // (type name, path)
    std::filesystem::path class_file; // empty = no class labels

    // Keys: edge_file, directed, delimiter (tab|space|comma), node_id_labels,
    // label_file (repeatable, "<name>:<path>"), class_file. Relative paths
    // resolve against the manifest's directory.
    static DatasetManifest from_file(const std::filesystem::path& path);
};

struct LoadStats {
    std::size_t vertices = 0;
    std::size_t edges = 0; // after dedup and self-loop removal
    std::size_t dropped_duplicate_edges = 0;
    std::size_t dropped_self_loops = 0;
    std::size_t num_classes = 0;
    std::vector<std::pair<std::string, std::size_t>> labels_per_type;
};

struct ParsedDataset {
    LabeledGraph graph; // pre dummy-completion
    LabelVocabulary vocab;
    ClassLabels classes;                    // per vertex, sorted class ids
    std::vector<std::string> vertex_names;  // dense id -> external id
    std::unordered_map<std::string, VertexId> vertex_ids;
    std::vector<std::string> class_names;
    std::vector<std::string> edge_type_names;
    bool has_node_id_type = false; // label type 0 is the auto-generated one
    LoadStats stats;
};

ParsedDataset load_dataset(const DatasetManifest& manifest);

// Writes the dataset back in the canonical grammar (edge/label/class files
// named "<stem>.edges" etc. plus "<stem>.manifest"). load(save(load(x)))
// is a fixed point.
DatasetManifest save_dataset(const ParsedDataset& dataset, const std::filesystem::path& directory,
                             const std::string& stem);

// Embedding file: header "<num_rows> <dim>", then "<id> <v_0> ... <v_{dim-1}>"
// per row. Values use shortest round-trip decimal rendering, so a
// save/load cycle is bitwise lossless.
void save_embeddings(const std::filesystem::path& path, std::span<const std::string> ids,
                     const Matrix& values);
std::pair<std::vector<std::string>, Matrix> load_embeddings(const std::filesystem::path& path);

// One "<vertex_id><TAB><role>" line per vertex, role in {train, test, val}.
void save_split(const std::filesystem::path& path, const Split& split);

// Rows "run_id<TAB>accuracy<TAB>micro_f1<TAB>macro_f1", then a trailing
// summary row with "mean±std" fields.
void save_metrics(const std::filesystem::path& path, const MetricsSummary& summary);

// One "epoch<TAB>mean_batch_loss<TAB>wall_time_seconds" line per epoch.
void save_loss_curve(const std::filesystem::path& path, std::span<const LossReport> reports);

struct HeldOutNode {
    std::string name;
    std::vector<int> classes;
    std::vector<std::vector<std::string>> labels_by_type; // label strings, per type
    std::vector<std::string> neighbors; // external names in the original graph
};

struct InductiveSplit {
    ParsedDataset training; // re-indexed, vocabulary rebuilt from kept vertices
    std::vector<HeldOutNode> held_out;
};

// Removes the given vertices and their incident edges from the dataset. The
// held-out side keeps labels, classes and original neighbor lists so the
// vertices can later be embedded against the training graph. Class ids keep
// the original numbering.
InductiveSplit remove_nodes_for_inductive(const ParsedDataset& dataset,
                                          std::span<const VertexId> remove);

// Fraction variant: removes floor(fraction * |V|) vertices sampled uniformly.
InductiveSplit remove_nodes_for_inductive(const ParsedDataset& dataset, double fraction,
                                          std::uint64_t seed);

// New-node spec for inductive inference, one node per line:
//   <name><DELIM><neighbor>[,<neighbor>...][<DELIM><type name>:<label>[,<label>...]]...
// Label fields are optional and recorded as-is; reconstruction only needs the
// neighbor list. `type_names` maps label-field type names to type indices.
std::vector<HeldOutNode> load_new_node_spec(const std::filesystem::path& path,
                                            std::span<const std::string> type_names,
                                            char delimiter = '\t');

// Formats a double with the shortest representation that parses back to the
// same bits.
std::string format_double(double value);
double parse_double(std::string_view text); // throws FormatError

} // namespace ep
